#include "lextopic/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "lextopic/text.hpp"

namespace lextopic::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::pair<ElementClass, std::string_view> kClassNames[] = {
    {ElementClass::Text, "Text"},
    {ElementClass::Title, "Title"},
    {ElementClass::SectionHeader, "Section-header"},
    {ElementClass::PageFooter, "Page-footer"},
};

[[noreturn]] void element_error(std::size_t index, const std::string& what) {
  throw PageParseError("element " + std::to_string(index) + ": " + what, index);
}

double vertical_overlap(const BoundingBox& a, const BoundingBox& b) {
  return std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
}

}  // namespace

bool BoundingBox::valid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min >= 0 && y_min >= 0 && x_min < x_max && y_min < y_max;
}

std::string_view to_string(ElementClass cls) {
  for (const auto& [c, name] : kClassNames) {
    if (c == cls) return name;
  }
  return "Text";
}

ElementClass parse_element_class(std::string_view name) {
  for (const auto& [c, n] : kClassNames) {
    if (n == name) return c;
  }
  throw ValidationError("unknown element class \"" + std::string(name) + "\"");
}

PageExtraction parse_page(std::string_view json_bytes) {
  json doc;
  try {
    doc = json::parse(json_bytes);
  } catch (const json::parse_error& e) {
    throw PageParseError(std::string("malformed JSON: ") + e.what(), std::nullopt);
  }
  if (!doc.is_object()) throw PageParseError("page document must be an object", std::nullopt);
  if (!doc.contains("page") || !doc["page"].is_string()) {
    throw PageParseError("missing string key \"page\"", std::nullopt);
  }
  if (!doc.contains("elements") || !doc["elements"].is_array()) {
    throw PageParseError("missing array key \"elements\"", std::nullopt);
  }

  PageExtraction page;
  page.page_name = doc["page"].get<std::string>();
  if (page.page_name.empty()) throw PageParseError("empty page name", std::nullopt);

  const auto& elements = doc["elements"];
  page.elements.reserve(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& el = elements[i];
    if (!el.is_object()) element_error(i, "not an object");
    for (const char* key : {"bbox", "class", "text", "anonymized_text"}) {
      if (!el.contains(key)) element_error(i, std::string("missing key \"") + key + "\"");
    }
    const auto& bbox = el["bbox"];
    if (!bbox.is_array() || bbox.size() != 4) element_error(i, "bbox must be [xmin, ymin, xmax, ymax]");
    for (const auto& v : bbox) {
      if (!v.is_number()) element_error(i, "bbox coordinates must be numbers");
    }
    if (!el["class"].is_string()) element_error(i, "class must be a string");
    if (!el["text"].is_string() || !el["anonymized_text"].is_string()) {
      element_error(i, "text fields must be strings");
    }

    Element element;
    element.box = {bbox[0].get<double>(), bbox[1].get<double>(), bbox[2].get<double>(),
                   bbox[3].get<double>()};
    if (element.box.x_min < 0 || element.box.y_min < 0) element_error(i, "negative bbox coordinate");
    if (!element.box.valid()) element_error(i, "degenerate bbox (requires xmin < xmax and ymin < ymax)");
    try {
      element.cls = parse_element_class(el["class"].get<std::string>());
    } catch (const ValidationError& e) {
      element_error(i, e.what());
    }
    element.text = el["text"].get<std::string>();
    element.anonymized_text = el["anonymized_text"].get<std::string>();
    page.elements.push_back(std::move(element));
  }
  return page;
}

json page_to_json(const PageExtraction& page) {
  json elements = json::array();
  for (const auto& el : page.elements) {
    elements.push_back({{"bbox", {el.box.x_min, el.box.y_min, el.box.x_max, el.box.y_max}},
                        {"class", std::string(to_string(el.cls))},
                        {"text", el.text},
                        {"anonymized_text", el.anonymized_text}});
  }
  return {{"page", page.page_name}, {"elements", std::move(elements)}};
}

std::vector<Element> reading_order(std::span<const Element> elements, double row_overlap) {
  std::vector<std::size_t> order(elements.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ba = elements[a].box;
    const auto& bb = elements[b].box;
    if (ba.y_min != bb.y_min) return ba.y_min < bb.y_min;
    return ba.x_min < bb.x_min;
  });

  std::vector<std::vector<std::size_t>> rows;
  for (std::size_t idx : order) {
    const auto& box = elements[idx].box;
    bool joined = false;
    if (!rows.empty()) {
      for (std::size_t member : rows.back()) {
        const auto& other = elements[member].box;
        const double shorter = std::min(box.height(), other.height());
        if (shorter > 0 && vertical_overlap(box, other) >= row_overlap * shorter) {
          joined = true;
          break;
        }
      }
    }
    if (joined) {
      rows.back().push_back(idx);
    } else {
      rows.push_back({idx});
    }
  }

  std::vector<Element> out;
  out.reserve(elements.size());
  for (auto& row : rows) {
    std::stable_sort(row.begin(), row.end(), [&](std::size_t a, std::size_t b) {
      return elements[a].box.x_min < elements[b].box.x_min;
    });
    for (std::size_t idx : row) out.push_back(elements[idx]);
  }
  return out;
}

std::string make_segment_id(std::string_view doc_id, int page_no, std::size_t element_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "/p%03d/e%03zu", page_no, element_index);
  return std::string(doc_id) + buf;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw EmptyCorpusError("cannot summarize an empty sample");
  Summary s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.q1 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return s;
}

std::vector<Segment> filter_corpus(std::span<const DocumentPage> pages, const FilterOptions& options) {
  if (!(options.min_quantile >= 0.0 && options.min_quantile < 1.0)) {
    throw ValidationError("min_quantile must lie in [0, 1)");
  }
  std::vector<Segment> kept;
  for (const auto& dp : pages) {
    for (std::size_t i = 0; i < dp.page.elements.size(); ++i) {
      const auto& el = dp.page.elements[i];
      if (options.drop_classes.contains(el.cls)) continue;
      Segment seg;
      seg.segment_id = make_segment_id(dp.doc_id, dp.page_no, i);
      seg.doc_id = dp.doc_id;
      seg.page_no = dp.page_no;
      seg.text = options.use_anonymized ? el.anonymized_text : el.text;
      seg.word_count = text::word_count(seg.text);
      kept.push_back(std::move(seg));
    }
  }
  if (kept.empty()) throw EmptyCorpusError("every element was filtered out by class");

  std::vector<double> counts;
  counts.reserve(kept.size());
  for (const auto& s : kept) counts.push_back(static_cast<double>(s.word_count));
  const double threshold = quantile(counts, options.min_quantile);

  std::vector<Segment> out;
  for (auto& s : kept) {
    if (static_cast<double>(s.word_count) >= threshold) out.push_back(std::move(s));
  }
  if (out.empty()) throw EmptyCorpusError("every element was filtered out by length");
  return out;
}

CorpusStats corpus_stats(std::span<const Segment> segments) {
  if (segments.empty()) throw EmptyCorpusError("corpus has no segments");
  std::map<std::pair<std::string, int>, double> page_words;
  std::map<std::string, std::set<int>> doc_pages;
  std::vector<double> seg_words;
  for (const auto& s : segments) {
    page_words[{s.doc_id, s.page_no}] += static_cast<double>(s.word_count);
    doc_pages[s.doc_id].insert(s.page_no);
    seg_words.push_back(static_cast<double>(s.word_count));
  }
  CorpusStats stats;
  stats.segments = segments.size();
  stats.documents = doc_pages.size();
  stats.pages = page_words.size();
  stats.words_per_segment = summarize(seg_words);
  std::vector<double> per_page;
  for (const auto& [key, words] : page_words) per_page.push_back(words);
  stats.words_per_page = summarize(per_page);
  std::vector<double> per_doc;
  for (const auto& [doc, pages] : doc_pages) per_doc.push_back(static_cast<double>(pages.size()));
  stats.pages_per_document = summarize(per_doc);
  return stats;
}

namespace {
json summary_json(const Summary& s) {
  return {{"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}, {"mean", s.mean}};
}
}  // namespace

json to_json(const CorpusStats& stats) {
  return {{"segments", stats.segments},
          {"documents", stats.documents},
          {"pages", stats.pages},
          {"words_per_segment", summary_json(stats.words_per_segment)},
          {"words_per_page", summary_json(stats.words_per_page)},
          {"pages_per_document", summary_json(stats.pages_per_document)}};
}

json segment_to_json(const Segment& segment) {
  return {{"segment_id", segment.segment_id},
          {"doc_id", segment.doc_id},
          {"page_no", segment.page_no},
          {"text", segment.text},
          {"word_count", segment.word_count}};
}

Segment segment_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("segment must be a JSON object");
  Segment s;
  try {
    s.segment_id = j.at("segment_id").get<std::string>();
    s.doc_id = j.at("doc_id").get<std::string>();
    s.page_no = j.at("page_no").get<int>();
    s.text = j.at("text").get<std::string>();
    s.word_count = j.at("word_count").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("segment schema: ") + e.what());
  }
  if (s.segment_id.empty()) throw ValidationError("empty segment_id");
  if (s.page_no < 1) throw ValidationError("page_no must be >= 1 in " + s.segment_id);
  if (s.word_count != text::word_count(s.text)) {
    throw ValidationError("word_count does not match text in " + s.segment_id);
  }
  return s;
}

std::vector<Segment> read_segments(const fs::path& path) {
  const auto lines = text::read_lines(path);
  std::vector<Segment> segments;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    try {
      auto seg = segment_from_json(json::parse(lines[i]));
      if (!seen.insert(seg.segment_id).second) {
        throw ValidationError("duplicate segment_id " + seg.segment_id);
      }
      segments.push_back(std::move(seg));
    } catch (const json::parse_error& e) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return segments;
}

void write_segments(const fs::path& path, std::span<const Segment> segments) {
  std::string out;
  for (const auto& s : segments) {
    out += segment_to_json(s).dump();
    out += '\n';
  }
  text::write_file(path, out);
}

namespace {

int trailing_number(const std::string& stem, int fallback) {
  auto end = stem.size();
  auto start = end;
  while (start > 0 && std::isdigit(static_cast<unsigned char>(stem[start - 1]))) --start;
  if (start == end) return fallback;
  const int n = std::stoi(stem.substr(start, std::min<std::size_t>(end - start, 9)));
  return n >= 1 ? n : fallback;
}

std::vector<fs::path> sorted_entries(const fs::path& dir, bool directories) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (directories ? entry.is_directory()
                    : (entry.is_regular_file() && entry.path().extension() == ".json")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void load_document(const fs::path& dir, const std::string& doc_id, std::vector<DocumentPage>& out) {
  const auto files = sorted_entries(dir, false);
  for (std::size_t i = 0; i < files.size(); ++i) {
    DocumentPage dp;
    dp.doc_id = doc_id;
    dp.page_no = trailing_number(files[i].stem().string(), static_cast<int>(i + 1));
    try {
      dp.page = parse_page(text::read_file(files[i]));
    } catch (const PageParseError& e) {
      throw PageParseError(files[i].string() + ": " + e.what(), e.element_index());
    }
    out.push_back(std::move(dp));
  }
}

}  // namespace

std::vector<DocumentPage> load_collection(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
  std::vector<DocumentPage> pages;
  load_document(root, root.filename().string(), pages);
  for (const auto& dir : sorted_entries(root, true)) {
    load_document(dir, dir.filename().string(), pages);
  }
  return pages;
}

}  // namespace lextopic::corpus
