#pragma once

// Span masking with placeholder tags. Entity spans come from an external
// NER adapter; offsets are Unicode scalar values on the plain text.

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace lextopic::anonymize {

enum class EntityLabel { Organization, Person, Location, Email, Date, Id };

inline constexpr std::array<EntityLabel, 6> kAllLabels = {
    EntityLabel::Organization, EntityLabel::Person, EntityLabel::Location,
    EntityLabel::Email,        EntityLabel::Date,   EntityLabel::Id};

/// Label names, rendered tags and accepted input aliases. The default table
/// uses the tag set ORGANIZAZZIONE, PERSONA, LOCALITÀ, EMAIL, DATA, ID.
class TagTable {
 public:
  static const TagTable& defaults();

  /// Canonical label name, e.g. "PERSONA".
  const std::string& name(EntityLabel label) const { return names_[index(label)]; }
  /// Rendered placeholder, e.g. "<PERSONA>".
  std::string tag(EntityLabel label) const { return "<" + name(label) + ">"; }

  /// Resolves a canonical name or a registered alias; throws ValidationError.
  EntityLabel parse(std::string_view name) const;
  void add_alias(std::string alias, EntityLabel label);

 private:
  static std::size_t index(EntityLabel label) { return static_cast<std::size_t>(label); }

  std::array<std::string, 6> names_;
  std::map<std::string, EntityLabel, std::less<>> aliases_;
};

struct EntitySpan {
  std::string segment_id;
  std::size_t start = 0;
  std::size_t end = 0;
  EntityLabel label = EntityLabel::Person;
  double score = 1.0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

inline constexpr double kDefaultThreshold = 0.5;

/// Drops spans scoring below `threshold`, then keeps a disjoint subset:
/// higher score wins, then the longer span, then the earlier start.
/// Output is sorted by start. Throws ValidationError on offsets outside
/// [0, text_length].
std::vector<EntitySpan> resolve_overlaps(std::span<const EntitySpan> spans, double threshold,
                                         std::size_t text_length);

/// Replaces each span with its tag. Spans must be sorted and disjoint.
std::string mask(std::string_view text, std::span<const EntitySpan> spans,
                 const TagTable& tags = TagTable::defaults());

nlohmann::json span_to_json(const EntitySpan& span, const TagTable& tags = TagTable::defaults());
EntitySpan span_from_json(const nlohmann::json& j, const TagTable& tags = TagTable::defaults());

std::vector<EntitySpan> read_spans(const std::filesystem::path& path,
                                   const TagTable& tags = TagTable::defaults());
void write_spans(const std::filesystem::path& path, std::span<const EntitySpan> spans,
                 const TagTable& tags = TagTable::defaults());

}  // namespace lextopic::anonymize
