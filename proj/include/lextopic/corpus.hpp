#pragma once

/**
 * @file corpus.hpp
 *
 * @brief Page extraction files, reading order and the segment table.
 *
 * A page extraction file holds the layout elements detected on one page,
 * each with its box, layout class, recognized text and anonymized text.
 * `filter_corpus()` turns a set of pages into the segment table consumed
 * by topic modeling.
 */

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lextopic/error.hpp"

namespace lextopic::corpus {

/// Pixel box, top-left and bottom-right corners.
struct BoundingBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool valid() const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

enum class ElementClass { Text, Title, SectionHeader, PageFooter };

std::string_view to_string(ElementClass cls);
/// Throws ValidationError for anything outside the closed set.
ElementClass parse_element_class(std::string_view name);

struct Element {
  BoundingBox box;
  ElementClass cls = ElementClass::Text;
  std::string text;
  std::string anonymized_text;

  friend bool operator==(const Element&, const Element&) = default;
};

struct PageExtraction {
  std::string page_name;
  std::vector<Element> elements;

  friend bool operator==(const PageExtraction&, const PageExtraction&) = default;
};

/// A page with its provenance inside the collection.
struct DocumentPage {
  std::string doc_id;
  int page_no = 1;
  PageExtraction page;
};

struct Segment {
  std::string segment_id;
  std::string doc_id;
  int page_no = 1;
  std::string text;
  std::size_t word_count = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Parse error carrying the offending element index when there is one.
class PageParseError : public ValidationError {
 public:
  PageParseError(const std::string& what, std::optional<std::size_t> element_index)
      : ValidationError(what), element_index_(element_index) {}
  std::optional<std::size_t> element_index() const { return element_index_; }

 private:
  std::optional<std::size_t> element_index_;
};

class EmptyCorpusError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

PageExtraction parse_page(std::string_view json_bytes);
nlohmann::json page_to_json(const PageExtraction& page);

/// Western single-column reading order. Elements whose vertical overlap is
/// at least `row_overlap` of the shorter height share a row; rows go top to
/// bottom, elements within a row left to right. Stable.
std::vector<Element> reading_order(std::span<const Element> elements, double row_overlap = 0.5);

struct FilterOptions {
  std::set<ElementClass> drop_classes{ElementClass::Title, ElementClass::SectionHeader,
                                      ElementClass::PageFooter};
  double min_quantile = 0.25;
  bool use_anonymized = false;
};

/// Elements are taken in their stored order; call reading_order() first.
std::vector<Segment> filter_corpus(std::span<const DocumentPage> pages, const FilterOptions& options);

/// "docID/pNNN/eMMM".
std::string make_segment_id(std::string_view doc_id, int page_no, std::size_t element_index);

/// Empirical quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). `values` need not be sorted.
double quantile(std::vector<double> values, double p);

struct Summary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};
Summary summarize(std::vector<double> values);

struct CorpusStats {
  std::size_t segments = 0;
  std::size_t documents = 0;
  std::size_t pages = 0;
  Summary words_per_segment;
  Summary words_per_page;
  Summary pages_per_document;
};

CorpusStats corpus_stats(std::span<const Segment> segments);
nlohmann::json to_json(const CorpusStats& stats);

nlohmann::json segment_to_json(const Segment& segment);
Segment segment_from_json(const nlohmann::json& j);
std::vector<Segment> read_segments(const std::filesystem::path& path);
void write_segments(const std::filesystem::path& path, std::span<const Segment> segments);

/// Loads a collection laid out as `<root>/<doc_id>/<page>.json`. Pages are
/// numbered by the trailing integer of their file stem, falling back to
/// their position in sorted order.
std::vector<DocumentPage> load_collection(const std::filesystem::path& root);

}  // namespace lextopic::corpus
