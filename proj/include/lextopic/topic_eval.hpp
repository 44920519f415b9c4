#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lextopic/topic_rep.hpp"

namespace lextopic::topic_eval {

/// Unique words across all topics divided by K * N. Lists must share one
/// length N >= 1.
double topic_diversity(std::span<const std::vector<std::string>> topics);

struct CooccurrenceConfig {
  std::size_t window = 110;
  double epsilon = 1e-12;
};

/// Boolean sliding-window counts over a tokenized reference corpus.
/// Terms may be unigrams or space-joined bigrams; a bigram is present in
/// a window when both of its tokens appear adjacent inside the window.
struct CooccurrenceStats {
  std::size_t windows = 0;
  std::size_t window_width = 110;
  double epsilon = 1e-12;
  std::vector<std::string> terms;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> term_count;
  /// Row-major |terms| x |terms|, symmetric; the diagonal equals term_count.
  std::vector<std::size_t> pair_count;

  bool contains(const std::string& term) const { return index.contains(term); }
  double p(const std::string& term) const;
  double p(const std::string& x, const std::string& y) const;
};

/// Segments shorter than the window form one window; empty segments none.
CooccurrenceStats cooccurrence(std::span<const std::vector<std::string>> segments,
                               std::span<const std::string> terms, const CooccurrenceConfig& config = {});

/// ln((p(x,y)+eps) / (p(x) p(y))) / -ln(p(x,y)+eps), clamped to [-1, 1].
/// Terms never seen give 0. A pair present in every window gives 1.
double npmi(const CooccurrenceStats& stats, const std::string& x, const std::string& y);

struct CoherenceResult {
  double value = 0;
  std::vector<double> per_topic;
  /// Some topic had only zero NPMI vectors; its score counts as 0.
  bool degenerate = false;
};

/// C_v: for every topic, mean over its top words of
/// cos(v(w_i), sum_j v(w_j)) with v(w) = (npmi(w, w_j))_j.
CoherenceResult coherence_cv(std::span<const std::vector<std::string>> topics, const CooccurrenceStats& stats,
                             std::size_t topn = 10);

struct SweepConfig {
  topics::TopicConfig topic;
  CooccurrenceConfig cooccurrence;
  std::size_t coherence_topn = 10;
};

struct SweepRow {
  int k = 0;
  double topic_diversity = 0;
  double coherence_cv = 0;
  bool degenerate = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// The model behind each row, same order.
  std::vector<topics::TopicModel> models;
};

/// Evaluates one model: TD on word lists cut to the shortest list, C_v
/// against the inputs' own tokens.
SweepRow evaluate(const topics::TopicModel& model, const topics::TopicInputs& inputs, const SweepConfig& config);

/// Reduces the base labels to K = min(k_max, base count) down to k_min
/// and evaluates each. Rows come out in ascending K.
SweepResult sweep(const topics::TopicInputs& inputs, std::span<const int> base_labels, const SweepConfig& config,
                  int k_min = 2, int k_max = 50);

std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace lextopic::topic_eval
