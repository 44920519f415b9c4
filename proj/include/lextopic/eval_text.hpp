#pragma once

// Character and word error rates from a unit-cost Levenshtein alignment.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lextopic/error.hpp"
#include "lextopic/report.hpp"

namespace lextopic::eval_text {

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_length = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  double rate() const { return static_cast<double>(errors()) / static_cast<double>(reference_length); }
  EditCounts& operator+=(const EditCounts& other);
};

/// Backtrace prefers match/substitution, then deletion, then insertion.
template <typename T>
EditCounts edit_counts(std::span<const T> reference, std::span<const T> hypothesis) {
  if (reference.empty()) throw ValidationError("reference must not be empty");
  const std::size_t n = reference.size();
  const std::size_t m = hypothesis.size();
  const std::size_t cols = m + 1;
  std::vector<std::size_t> dist((n + 1) * cols);
  for (std::size_t i = 0; i <= n; ++i) dist[i * cols] = i;
  for (std::size_t j = 0; j <= m; ++j) dist[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = dist[(i - 1) * cols + j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      const std::size_t del = dist[(i - 1) * cols + j] + 1;
      const std::size_t ins = dist[i * cols + j - 1] + 1;
      dist[i * cols + j] = std::min({diag, del, ins});
    }
  }

  EditCounts counts;
  counts.reference_length = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = dist[i * cols + j];
    if (i > 0 && j > 0) {
      const bool same = reference[i - 1] == hypothesis[j - 1];
      if (dist[(i - 1) * cols + j - 1] + (same ? 0 : 1) == here) {
        if (!same) ++counts.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && dist[(i - 1) * cols + j] + 1 == here) {
      ++counts.deletions;
      --i;
    } else {
      ++counts.insertions;
      --j;
    }
  }
  return counts;
}

struct NormalizeOptions {
  bool lowercase = false;
  bool strip_punctuation = false;
  /// Collapse runs of whitespace to one space and trim.
  bool collapse_whitespace = false;
};

std::string normalize(std::string_view text, const NormalizeOptions& options);

EditCounts char_counts(std::string_view reference, std::string_view hypothesis,
                       const NormalizeOptions& options = {});
EditCounts word_counts(std::string_view reference, std::string_view hypothesis,
                       const NormalizeOptions& options = {});

/// (S + D + I) / N over Unicode scalar values of the reference.
double cer(std::string_view reference, std::string_view hypothesis, const NormalizeOptions& options = {});
/// (S + D + I) / M over whitespace-delimited reference words.
double wer(std::string_view reference, std::string_view hypothesis, const NormalizeOptions& options = {});

using TextPair = std::pair<std::string, std::string>;

/// Micro (sum of errors over sum of lengths) and macro (mean of per-line
/// rates) CER and WER. Per-line values go to details["lines"].
MetricReport corpus_error_rates(std::span<const TextPair> pairs, const NormalizeOptions& options = {});

/// One "reference<TAB>hypothesis" pair per line.
std::vector<TextPair> read_pairs_tsv(const std::filesystem::path& path);

}  // namespace lextopic::eval_text
