#include "lextopic/anonymize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lextopic/error.hpp"
#include "lextopic/text.hpp"

namespace lextopic::anonymize {

using nlohmann::json;

const TagTable& TagTable::defaults() {
  static const TagTable table = [] {
    TagTable t;
    t.names_ = {"ORGANIZAZZIONE", "PERSONA", "LOCALITÀ", "EMAIL", "DATA", "ID"};
    for (auto label : kAllLabels) t.aliases_.emplace(t.names_[index(label)], label);
    // Common spellings and English names emitted by off-the-shelf NER models.
    t.add_alias("ORGANIZZAZIONE", EntityLabel::Organization);
    t.add_alias("ORGANIZATION", EntityLabel::Organization);
    t.add_alias("ORG", EntityLabel::Organization);
    t.add_alias("PERSON", EntityLabel::Person);
    t.add_alias("PER", EntityLabel::Person);
    t.add_alias("LOCALITA", EntityLabel::Location);
    t.add_alias("LOCATION", EntityLabel::Location);
    t.add_alias("LOC", EntityLabel::Location);
    t.add_alias("DATE", EntityLabel::Date);
    return t;
  }();
  return table;
}

EntityLabel TagTable::parse(std::string_view name) const {
  auto it = aliases_.find(name);
  if (it == aliases_.end()) {
    throw ValidationError("unknown entity label \"" + std::string(name) + "\"");
  }
  return it->second;
}

void TagTable::add_alias(std::string alias, EntityLabel label) {
  aliases_.insert_or_assign(std::move(alias), label);
}

namespace {

bool overlaps(const EntitySpan& a, const EntitySpan& b) { return a.start < b.end && b.start < a.end; }

void check_bounds(const EntitySpan& s, std::size_t text_length) {
  if (s.start >= s.end || s.end > text_length) {
    throw ValidationError("span [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                          ") out of range for text of length " + std::to_string(text_length) +
                          (s.segment_id.empty() ? "" : " in " + s.segment_id));
  }
}

}  // namespace

std::vector<EntitySpan> resolve_overlaps(std::span<const EntitySpan> spans, double threshold,
                                         std::size_t text_length) {
  for (const auto& s : spans) check_bounds(s, text_length);

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].score >= threshold) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = spans[a];
    const auto& y = spans[b];
    if (x.score != y.score) return x.score > y.score;
    if (x.length() != y.length()) return x.length() > y.length();
    return x.start < y.start;
  });

  std::vector<EntitySpan> kept;
  for (std::size_t idx : order) {
    const auto& candidate = spans[idx];
    const bool clash = std::any_of(kept.begin(), kept.end(),
                                   [&](const EntitySpan& k) { return overlaps(k, candidate); });
    if (!clash) kept.push_back(candidate);
  }
  std::sort(kept.begin(), kept.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
  return kept;
}

std::string mask(std::string_view text, std::span<const EntitySpan> spans, const TagTable& tags) {
  auto scalars = text::decode_utf8(text);
  for (std::size_t i = 0; i < spans.size(); ++i) {
    check_bounds(spans[i], scalars.size());
    if (i > 0 && spans[i].start < spans[i - 1].end) {
      throw ValidationError("spans must be sorted and disjoint; resolve overlaps before masking");
    }
  }
  // Right to left so earlier offsets stay valid.
  for (auto it = spans.rbegin(); it != spans.rend(); ++it) {
    const auto tag = text::decode_utf8(tags.tag(it->label));
    scalars.replace(it->start, it->length(), tag);
  }
  return text::encode_utf8(scalars);
}

json span_to_json(const EntitySpan& span, const TagTable& tags) {
  return {{"segment_id", span.segment_id},
          {"start", span.start},
          {"end", span.end},
          {"label", tags.name(span.label)},
          {"score", span.score}};
}

EntitySpan span_from_json(const json& j, const TagTable& tags) {
  EntitySpan s;
  try {
    s.segment_id = j.at("segment_id").get<std::string>();
    const auto start = j.at("start").get<long long>();
    const auto end = j.at("end").get<long long>();
    if (start < 0 || end <= start) throw ValidationError("span requires 0 <= start < end");
    s.start = static_cast<std::size_t>(start);
    s.end = static_cast<std::size_t>(end);
    s.label = tags.parse(j.at("label").get<std::string>());
    s.score = j.at("score").get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("span schema: ") + e.what());
  }
  if (!std::isfinite(s.score) || s.score < 0.0 || s.score > 1.0) {
    throw ValidationError("span score must lie in [0, 1]");
  }
  return s;
}

std::vector<EntitySpan> read_spans(const std::filesystem::path& path, const TagTable& tags) {
  std::vector<EntitySpan> spans;
  const auto lines = text::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    try {
      spans.push_back(span_from_json(json::parse(lines[i]), tags));
    } catch (const json::parse_error& e) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return spans;
}

void write_spans(const std::filesystem::path& path, std::span<const EntitySpan> spans,
                 const TagTable& tags) {
  std::string out;
  for (const auto& s : spans) out += span_to_json(s, tags).dump() + "\n";
  text::write_file(path, out);
}

}  // namespace lextopic::anonymize
