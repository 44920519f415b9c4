#include "lextopic/topic_eval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>

#include "lextopic/error.hpp"

namespace lextopic::topic_eval {

double topic_diversity(std::span<const std::vector<std::string>> topics) {
  if (topics.empty()) throw ValidationError("topic diversity needs at least one topic");
  const std::size_t n = topics.front().size();
  if (n == 0) throw ValidationError("topic word lists are empty");
  std::set<std::string_view> unique;
  for (const auto& t : topics) {
    if (t.size() != n) throw ValidationError("topic word lists must all have the same length");
    unique.insert(t.begin(), t.end());
  }
  return static_cast<double>(unique.size()) / static_cast<double>(topics.size() * n);
}

double CooccurrenceStats::p(const std::string& term) const {
  auto it = index.find(term);
  if (it == index.end() || windows == 0) return 0.0;
  return static_cast<double>(term_count[it->second]) / static_cast<double>(windows);
}

double CooccurrenceStats::p(const std::string& x, const std::string& y) const {
  auto ix = index.find(x);
  auto iy = index.find(y);
  if (ix == index.end() || iy == index.end() || windows == 0) return 0.0;
  return static_cast<double>(pair_count[ix->second * terms.size() + iy->second]) / static_cast<double>(windows);
}

namespace {

std::vector<std::string> split_term(const std::string& term) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= term.size()) {
    auto end = term.find(' ', start);
    if (end == std::string::npos) end = term.size();
    if (end > start) parts.push_back(term.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

}  // namespace

CooccurrenceStats cooccurrence(std::span<const std::vector<std::string>> segments, std::span<const std::string> terms,
                               const CooccurrenceConfig& config) {
  if (config.window == 0) throw ValidationError("coherence window must be >= 1");
  if (!(config.epsilon > 0)) throw ValidationError("coherence epsilon must be > 0");

  CooccurrenceStats stats;
  stats.window_width = config.window;
  stats.epsilon = config.epsilon;
  std::vector<std::vector<std::string>> parts;
  for (const auto& t : terms) {
    if (stats.index.contains(t)) continue;
    auto p = split_term(t);
    if (p.empty()) throw ValidationError("empty coherence term");
    stats.index.emplace(t, stats.terms.size());
    stats.terms.push_back(t);
    parts.push_back(std::move(p));
  }
  const std::size_t m = stats.terms.size();
  stats.term_count.assign(m, 0);
  stats.pair_count.assign(m * m, 0);

  std::unordered_map<std::string_view, std::vector<std::size_t>> by_first;
  for (std::size_t t = 0; t < m; ++t) by_first[parts[t].front()].push_back(t);

  bool any_tokens = false;
  for (const auto& seg : segments) {
    if (seg.empty()) continue;
    any_tokens = true;
    const std::size_t len = seg.size();
    const std::size_t width = std::min(config.window, len);
    const std::size_t n_windows = len - width + 1;
    const std::size_t words = (n_windows + 63) / 64;

    // For each term, the set of windows containing it, as a bitset.
    std::unordered_map<std::size_t, std::vector<std::uint64_t>> present;
    for (std::size_t pos = 0; pos < len; ++pos) {
      auto it = by_first.find(seg[pos]);
      if (it == by_first.end()) continue;
      for (std::size_t t : it->second) {
        const auto& p = parts[t];
        if (p.size() > width || pos + p.size() > len) continue;
        bool match = true;
        for (std::size_t k = 1; k < p.size() && match; ++k) match = seg[pos + k] == p[k];
        if (!match) continue;
        // Windows starting at s cover [s, s + width); the occurrence needs s <= pos and pos + |p| <= s + width.
        const std::size_t lo = pos + p.size() > width ? pos + p.size() - width : 0;
        const std::size_t hi = std::min(pos, n_windows - 1);
        auto& bits = present[t];
        if (bits.empty()) bits.assign(words, 0);
        for (std::size_t s = lo; s <= hi; ++s) bits[s / 64] |= std::uint64_t{1} << (s % 64);
      }
    }

    std::vector<std::pair<std::size_t, const std::vector<std::uint64_t>*>> found;
    for (const auto& [t, bits] : present) found.emplace_back(t, &bits);
    for (std::size_t a = 0; a < found.size(); ++a) {
      for (std::size_t b = a; b < found.size(); ++b) {
        std::size_t both = 0;
        for (std::size_t w = 0; w < words; ++w) both += std::popcount((*found[a].second)[w] & (*found[b].second)[w]);
        const auto ta = found[a].first;
        const auto tb = found[b].first;
        stats.pair_count[ta * m + tb] += both;
        if (ta != tb) stats.pair_count[tb * m + ta] += both;
      }
    }
    stats.windows += n_windows;
  }
  if (!any_tokens) throw ValidationError("reference corpus for coherence is empty");
  for (std::size_t t = 0; t < m; ++t) stats.term_count[t] = stats.pair_count[t * m + t];
  return stats;
}

double npmi(const CooccurrenceStats& stats, const std::string& x, const std::string& y) {
  const double px = stats.p(x);
  const double py = stats.p(y);
  if (px <= 0.0 || py <= 0.0) return 0.0;
  const double pxy = stats.p(x, y);
  const double joint = pxy + stats.epsilon;
  // Present in every window: the denominator vanishes and the limit is perfect association.
  if (joint >= 1.0) return 1.0;
  const double value = std::log(joint / (px * py)) / -std::log(joint);
  return std::clamp(value, -1.0, 1.0);
}

CoherenceResult coherence_cv(std::span<const std::vector<std::string>> topics, const CooccurrenceStats& stats,
                             std::size_t topn) {
  if (topics.empty()) throw ValidationError("coherence needs at least one topic");
  if (topn == 0) throw ValidationError("coherence topn must be >= 1");
  CoherenceResult result;
  for (const auto& topic : topics) {
    const std::size_t n = std::min(topn, topic.size());
    if (n == 0) throw ValidationError("topic without words");
    std::vector<std::vector<double>> v(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) v[i][j] = npmi(stats, topic[i], topic[j]);
    }
    std::vector<double> total(n, 0.0);
    for (const auto& row : v) {
      for (std::size_t j = 0; j < n; ++j) total[j] += row[j];
    }
    double total_norm = 0;
    for (double t : total) total_norm += t * t;
    total_norm = std::sqrt(total_norm);

    double score = 0;
    bool any = false;
    for (const auto& row : v) {
      double dot = 0, norm = 0;
      for (std::size_t j = 0; j < n; ++j) {
        dot += row[j] * total[j];
        norm += row[j] * row[j];
      }
      if (norm <= 0 || total_norm <= 0) continue;
      any = true;
      score += std::clamp(dot / (std::sqrt(norm) * total_norm), -1.0, 1.0);
    }
    if (!any) result.degenerate = true;
    result.per_topic.push_back(score / static_cast<double>(n));
  }
  double sum = 0;
  for (double s : result.per_topic) sum += s;
  result.value = sum / static_cast<double>(result.per_topic.size());
  return result;
}

SweepRow evaluate(const topics::TopicModel& model, const topics::TopicInputs& inputs, const SweepConfig& config) {
  SweepRow row;
  row.k = static_cast<int>(model.topics.size());
  std::size_t common = SIZE_MAX;
  for (const auto& t : model.topics) common = std::min(common, t.words.size());
  if (model.topics.empty() || common == 0) throw ValidationError("model has no topic words to evaluate");
  row.topic_diversity = topic_diversity(model.word_lists(common));

  const auto lists = model.word_lists(config.coherence_topn);
  std::vector<std::string> terms;
  for (const auto& l : lists) terms.insert(terms.end(), l.begin(), l.end());
  const auto stats = cooccurrence(inputs.tokens, terms, config.cooccurrence);
  const auto cv = coherence_cv(lists, stats, config.coherence_topn);
  row.coherence_cv = cv.value;
  row.degenerate = cv.degenerate;
  return row;
}

SweepResult sweep(const topics::TopicInputs& inputs, std::span<const int> base_labels, const SweepConfig& config,
                  int k_min, int k_max) {
  if (k_min < 2) throw ValidationError("kmin must be >= 2");
  if (k_max < k_min) throw ValidationError("kmax must be >= kmin");
  int base = 0;
  for (int l : base_labels) base = std::max(base, l + 1);
  if (base < k_min) {
    throw ValidationError("base model has " + std::to_string(base) + " topics, fewer than kmin=" + std::to_string(k_min));
  }

  SweepResult result;
  std::vector<int> labels(base_labels.begin(), base_labels.end());
  // Merging is greedy, so reducing K+1 topics by one merge equals reducing the base directly to K.
  for (int k = std::min(k_max, base); k >= k_min; --k) {
    labels = topics::merge_to_k(inputs, labels, k);
    auto model = topics::represent(inputs, labels, config.topic);
    result.rows.push_back(evaluate(model, inputs, config));
    result.models.push_back(std::move(model));
  }
  std::reverse(result.rows.begin(), result.rows.end());
  std::reverse(result.models.begin(), result.models.end());
  return result;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "K,topic_diversity,coherence_cv\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f\n", r.k, r.topic_diversity, r.coherence_cv);
    out += buf;
  }
  return out;
}

}  // namespace lextopic::topic_eval
