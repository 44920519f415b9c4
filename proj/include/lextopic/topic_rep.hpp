#pragma once

/**
 * @file topic_rep.hpp
 *
 * @brief Topic words from clustered segments.
 *
 * Segments are tokenized (lowercase letter/digit runs, stopwords and
 * anonymization tags removed), counted per cluster as unigrams and
 * bigrams, and weighted with the bm25 flavour of class-based TF-IDF:
 *
 *     w(x, C) = tf(x, C) * log(1 + (A - f(x) + 0.5) / (f(x) + 0.5))
 *
 * where f(x) is the total count of x over all clusters and A the mean
 * number of counted words per cluster. The best 2 * top_n candidates of
 * each cluster are then diversified with maximal marginal relevance.
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "lextopic/anonymize.hpp"
#include "lextopic/embed_store.hpp"

namespace lextopic::topics {

class Stopwords {
 public:
  Stopwords() = default;
  explicit Stopwords(std::unordered_set<std::string> words);

  /// The shipped Italian list (function words, domain terms, tag names).
  static const Stopwords& builtin();
  /// One term per line; blank lines and lines starting with '#' ignored.
  static Stopwords from_file(const std::filesystem::path& path);
  static Stopwords from_text(std::string_view text);

  bool contains(const std::string& word) const { return words_.contains(word); }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

/// Lowercased runs of Unicode letters/digits, at least 2 scalars long,
/// stopwords removed. Placeholder tags such as "<PERSONA>" are removed
/// before tokenizing.
std::vector<std::string> tokenize(std::string_view text, const Stopwords& stopwords = Stopwords::builtin(),
                                  const anonymize::TagTable& tags = anonymize::TagTable::defaults());

/// n-grams of adjacent tokens joined with one space, for n in [min_n, max_n].
std::vector<std::string> ngrams(std::span<const std::string> tokens, int min_n, int max_n);

struct VectorizerConfig {
  int ngram_min = 1;
  int ngram_max = 2;
  int min_df = 2;
};

struct Vocabulary {
  /// Sorted terms; a term's index is its column.
  std::vector<std::string> terms;
  std::vector<std::size_t> doc_freq;
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const { return terms.size(); }
};

/// Bag-of-words counts per cluster.
struct ClusterCounts {
  Vocabulary vocab;
  std::size_t n_clusters = 0;
  /// tf[c][t]: occurrences of term t in cluster c.
  std::vector<std::vector<double>> tf;
  /// Sorted unique vocabulary indices present in each segment (empty for noise).
  std::vector<std::vector<std::size_t>> segment_terms;
};

/// Noise segments (label -1) are left out entirely. Labels must be dense
/// 0..k-1. Throws if no cluster exists or the pruned vocabulary is empty.
ClusterCounts build_vocab(std::span<const std::vector<std::string>> segment_tokens, std::span<const int> labels,
                          const VectorizerConfig& config = {});

struct CtfidfInputs {
  std::vector<std::vector<double>> tf;
  /// Total count of each term across clusters.
  std::vector<double> term_total;
  /// Mean number of counted words per cluster.
  double avg_words = 0;
};

CtfidfInputs ctfidf_inputs(const ClusterCounts& counts);

inline double ctfidf_weight(double tf, double avg_words, double term_total, double log_base = std::numbers::e) {
  return tf * std::log(1.0 + (avg_words - term_total + 0.5) / (term_total + 0.5)) / std::log(log_base);
}

std::vector<std::vector<double>> ctfidf_bm25(const CtfidfInputs& inputs, double log_base = std::numbers::e);

/// Per row, indices of terms with tf > 0 ranked by weight (descending,
/// ties alphabetical), truncated to `count`.
std::vector<std::vector<std::size_t>> top_words(const std::vector<std::vector<double>>& weights,
                                                const std::vector<std::vector<double>>& tf, const Vocabulary& vocab,
                                                std::size_t count);

struct MmrResult {
  /// Candidate indices in selection order.
  std::vector<std::size_t> selected;
  /// Fewer candidates than requested.
  bool short_list = false;
};

/// Greedy maximal marginal relevance with lambda = 1 - diversity.
/// Candidates are given in c-TF-IDF rank order, which also breaks ties.
/// Zero vectors have similarity 0 to everything.
MmrResult mmr_diversify(std::span<const std::vector<double>> candidate_vectors, std::span<const double> topic_vector,
                        double diversity, std::size_t top_n);

/// Per topic, the `n` member rows most cosine-similar to the topic
/// centroid; ties by segment id.
std::vector<std::vector<std::size_t>> representative_docs(std::span<const int> labels,
                                                          const embed::EmbeddingMatrix& embeddings, std::size_t n);

struct TopicConfig {
  VectorizerConfig vectorizer;
  std::size_t top_n_words = 15;
  double diversity = 0.35;
  std::size_t n_representative = 3;
  double log_base = std::numbers::e;
};

struct WordWeight {
  std::string term;
  double weight = 0;

  friend bool operator==(const WordWeight&, const WordWeight&) = default;
};

struct Topic {
  int id = 0;
  std::size_t size = 0;
  std::vector<WordWeight> words;
  std::vector<std::string> representative_docs;
  std::vector<double> centroid;
  bool short_word_list = false;
};

struct TopicModel {
  std::vector<std::string> segment_ids;
  std::vector<int> labels;
  /// Non-noise topics ordered by id 0..k-1.
  std::vector<Topic> topics;

  std::size_t noise_count() const;
  std::vector<std::vector<std::string>> word_lists(std::size_t limit = SIZE_MAX) const;
};

/// Segments prepared for representation: ids, tokens and the original
/// embeddings, row-aligned.
struct TopicInputs {
  std::vector<std::string> segment_ids;
  std::vector<std::string> texts;
  std::vector<std::vector<std::string>> tokens;
  embed::EmbeddingMatrix embeddings;

  static TopicInputs make(std::vector<std::string> segment_ids, std::vector<std::string> texts,
                          embed::EmbeddingMatrix embeddings, const Stopwords& stopwords = Stopwords::builtin());
};

TopicModel represent(const TopicInputs& inputs, std::span<const int> labels, const TopicConfig& config);

/// Merges, one pair at a time, the two topics whose centroids are most
/// cosine-similar (ties: smallest index pair) until `k` remain. Merged
/// topics keep the smaller id; higher ids shift down. Noise is untouched.
std::vector<int> merge_to_k(const TopicInputs& inputs, std::span<const int> labels, int k);

TopicModel reduce_to_k(const TopicModel& model, const TopicInputs& inputs, int k, const TopicConfig& config);

/// Renumbers labels densely by first appearance; -1 kept.
std::vector<int> relabel_dense(std::span<const int> labels);

nlohmann::json topics_to_json(const TopicModel& model);
/// Restores topic words and representative docs; labels come from the CSV.
std::vector<Topic> topics_from_json(const nlohmann::json& j);

void write_labels_csv(const std::filesystem::path& path, const TopicModel& model);
/// (segment_id, topic_id) rows in file order.
std::vector<std::pair<std::string, int>> read_labels_csv(const std::filesystem::path& path);

}  // namespace lextopic::topics
