#include "lextopic/eval_text.hpp"

#include "lextopic/text.hpp"

namespace lextopic::eval_text {

EditCounts& EditCounts::operator+=(const EditCounts& other) {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  reference_length += other.reference_length;
  return *this;
}

std::string normalize(std::string_view input, const NormalizeOptions& options) {
  auto scalars = text::decode_utf8(input);
  if (options.lowercase) scalars = text::to_lower(scalars);
  if (options.strip_punctuation) std::erase_if(scalars, text::is_punct);
  if (options.collapse_whitespace) {
    std::u32string out;
    bool pending_space = false;
    for (char32_t c : scalars) {
      if (text::is_space(c)) {
        pending_space = !out.empty();
        continue;
      }
      if (pending_space) out.push_back(U' ');
      pending_space = false;
      out.push_back(c);
    }
    scalars = std::move(out);
  }
  return text::encode_utf8(scalars);
}

EditCounts char_counts(std::string_view reference, std::string_view hypothesis,
                       const NormalizeOptions& options) {
  const auto ref = text::decode_utf8(normalize(reference, options));
  const auto hyp = text::decode_utf8(normalize(hypothesis, options));
  if (ref.empty()) throw ValidationError("empty reference");
  return edit_counts<char32_t>(ref, hyp);
}

EditCounts word_counts(std::string_view reference, std::string_view hypothesis,
                       const NormalizeOptions& options) {
  const auto ref = text::split_whitespace(normalize(reference, options));
  const auto hyp = text::split_whitespace(normalize(hypothesis, options));
  if (ref.empty()) throw ValidationError("reference contains no words");
  return edit_counts<std::string>(ref, hyp);
}

double cer(std::string_view reference, std::string_view hypothesis, const NormalizeOptions& options) {
  return char_counts(reference, hypothesis, options).rate();
}

double wer(std::string_view reference, std::string_view hypothesis, const NormalizeOptions& options) {
  return word_counts(reference, hypothesis, options).rate();
}

MetricReport corpus_error_rates(std::span<const TextPair> pairs, const NormalizeOptions& options) {
  if (pairs.empty()) throw ValidationError("no reference/hypothesis pairs");
  EditCounts chars, words;
  double cer_sum = 0, wer_sum = 0;
  nlohmann::json lines = nlohmann::json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EditCounts c, w;
    try {
      c = char_counts(pairs[i].first, pairs[i].second, options);
      w = word_counts(pairs[i].first, pairs[i].second, options);
    } catch (const ValidationError& e) {
      throw ValidationError("pair " + std::to_string(i + 1) + ": " + e.what());
    }
    chars += c;
    words += w;
    cer_sum += c.rate();
    wer_sum += w.rate();
    lines.push_back({{"cer", c.rate()}, {"wer", w.rate()},
                     {"char", {{"S", c.substitutions}, {"D", c.deletions}, {"I", c.insertions}, {"N", c.reference_length}}},
                     {"word", {{"S", w.substitutions}, {"D", w.deletions}, {"I", w.insertions}, {"M", w.reference_length}}}});
  }
  const auto n = static_cast<double>(pairs.size());
  MetricReport report;
  report.name = "ocr";
  report.set("CER", chars.rate());
  report.set("WER", words.rate());
  report.set("CER_macro", cer_sum / n);
  report.set("WER_macro", wer_sum / n);
  report.set("pairs", n);
  report.config = {{"lowercase", options.lowercase},
                   {"strip_punctuation", options.strip_punctuation},
                   {"collapse_whitespace", options.collapse_whitespace},
                   {"average", "micro"}};
  report.details["lines"] = std::move(lines);
  return report;
}

std::vector<TextPair> read_pairs_tsv(const std::filesystem::path& path) {
  std::vector<TextPair> pairs;
  const auto lines = text::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto tab = lines[i].find('\t');
    if (tab == std::string::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) + ": expected reference<TAB>hypothesis");
    }
    pairs.emplace_back(lines[i].substr(0, tab), lines[i].substr(tab + 1));
  }
  return pairs;
}

}  // namespace lextopic::eval_text
