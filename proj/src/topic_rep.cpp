#include "lextopic/topic_rep.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "lextopic/error.hpp"
#include "lextopic/text.hpp"

namespace lextopic::detail {
std::string_view builtin_stopwords_text();
}

namespace lextopic::topics {

using embed::EmbeddingMatrix;
using nlohmann::json;

Stopwords::Stopwords(std::unordered_set<std::string> words) : words_(std::move(words)) {}

Stopwords Stopwords::from_text(std::string_view contents) {
  std::unordered_set<std::string> words;
  std::size_t start = 0;
  while (start <= contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    const auto line = text::trim(contents.substr(start, end - start));
    if (!line.empty() && line.front() != '#') words.insert(text::to_lower(line));
    start = end + 1;
  }
  return Stopwords(std::move(words));
}

const Stopwords& Stopwords::builtin() {
  static const Stopwords list = from_text(detail::builtin_stopwords_text());
  return list;
}

Stopwords Stopwords::from_file(const std::filesystem::path& path) { return from_text(text::read_file(path)); }

std::vector<std::string> tokenize(std::string_view input, const Stopwords& stopwords,
                                  const anonymize::TagTable& tags) {
  std::string cleaned(input);
  for (auto label : anonymize::kAllLabels) {
    const std::string tag = tags.tag(label);
    for (auto pos = cleaned.find(tag); pos != std::string::npos; pos = cleaned.find(tag, pos)) {
      cleaned.replace(pos, tag.size(), " ");
    }
  }

  std::vector<std::string> tokens;
  std::u32string current;
  auto flush = [&] {
    if (current.size() >= 2) {
      auto word = text::encode_utf8(current);
      if (!stopwords.contains(word)) tokens.push_back(std::move(word));
    }
    current.clear();
  };
  for (char32_t c : text::to_lower(text::decode_utf8(cleaned))) {
    if (text::is_alnum(c)) {
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> ngrams(std::span<const std::string> tokens, int min_n, int max_n) {
  std::vector<std::string> out;
  for (int n = std::max(1, min_n); n <= max_n; ++n) {
    const auto len = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + len <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t k = 1; k < len; ++k) gram += " " + tokens[i + k];
      out.push_back(std::move(gram));
    }
  }
  return out;
}

ClusterCounts build_vocab(std::span<const std::vector<std::string>> segment_tokens, std::span<const int> labels,
                          const VectorizerConfig& config) {
  if (segment_tokens.size() != labels.size()) throw ValidationError("tokens and labels differ in length");
  if (config.ngram_min < 1 || config.ngram_max < config.ngram_min) throw ValidationError("invalid ngram_range");
  int n_clusters = 0;
  for (int l : labels) {
    if (l < -1) throw ValidationError("labels must be >= -1");
    n_clusters = std::max(n_clusters, l + 1);
  }
  if (n_clusters == 0) throw ValidationError("no non-noise cluster to represent");

  std::vector<std::vector<std::string>> grams(segment_tokens.size());
  std::map<std::string, std::size_t> df;
  for (std::size_t s = 0; s < segment_tokens.size(); ++s) {
    if (labels[s] < 0) continue;
    grams[s] = ngrams(segment_tokens[s], config.ngram_min, config.ngram_max);
    std::set<std::string_view> unique(grams[s].begin(), grams[s].end());
    for (auto g : unique) ++df[std::string(g)];
  }

  ClusterCounts out;
  out.n_clusters = static_cast<std::size_t>(n_clusters);
  for (const auto& [term, count] : df) {
    if (count < static_cast<std::size_t>(std::max(config.min_df, 1))) continue;
    out.vocab.index.emplace(term, out.vocab.terms.size());
    out.vocab.terms.push_back(term);
    out.vocab.doc_freq.push_back(count);
  }
  if (out.vocab.terms.empty()) throw ValidationError("vocabulary is empty after min_df pruning");

  out.tf.assign(out.n_clusters, std::vector<double>(out.vocab.size(), 0.0));
  out.segment_terms.resize(segment_tokens.size());
  for (std::size_t s = 0; s < segment_tokens.size(); ++s) {
    if (labels[s] < 0) continue;
    auto& present = out.segment_terms[s];
    for (const auto& g : grams[s]) {
      auto it = out.vocab.index.find(g);
      if (it == out.vocab.index.end()) continue;
      out.tf[static_cast<std::size_t>(labels[s])][it->second] += 1.0;
      present.push_back(it->second);
    }
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
  }
  return out;
}

CtfidfInputs ctfidf_inputs(const ClusterCounts& counts) {
  CtfidfInputs in;
  in.tf = counts.tf;
  in.term_total.assign(counts.vocab.size(), 0.0);
  double words = 0;
  for (const auto& row : counts.tf) {
    for (std::size_t t = 0; t < row.size(); ++t) {
      in.term_total[t] += row[t];
      words += row[t];
    }
  }
  in.avg_words = words / static_cast<double>(counts.n_clusters);
  return in;
}

std::vector<std::vector<double>> ctfidf_bm25(const CtfidfInputs& inputs, double log_base) {
  if (!(log_base > 1.0)) throw ValidationError("log base must be > 1");
  std::vector<std::vector<double>> w(inputs.tf.size());
  for (std::size_t c = 0; c < inputs.tf.size(); ++c) {
    w[c].resize(inputs.tf[c].size());
    for (std::size_t t = 0; t < inputs.tf[c].size(); ++t) {
      w[c][t] = inputs.tf[c][t] == 0.0 ? 0.0 : ctfidf_weight(inputs.tf[c][t], inputs.avg_words, inputs.term_total[t], log_base);
    }
  }
  return w;
}

std::vector<std::vector<std::size_t>> top_words(const std::vector<std::vector<double>>& weights,
                                                const std::vector<std::vector<double>>& tf, const Vocabulary& vocab,
                                                std::size_t count) {
  std::vector<std::vector<std::size_t>> out(weights.size());
  for (std::size_t c = 0; c < weights.size(); ++c) {
    auto& ranked = out[c];
    for (std::size_t t = 0; t < weights[c].size(); ++t) {
      if (tf[c][t] > 0) ranked.push_back(t);
    }
    std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
      if (weights[c][a] != weights[c][b]) return weights[c][a] > weights[c][b];
      return vocab.terms[a] < vocab.terms[b];
    });
    if (ranked.size() > count) ranked.resize(count);
  }
  return out;
}

namespace {

double safe_cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0 || nb <= 0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace

MmrResult mmr_diversify(std::span<const std::vector<double>> candidate_vectors, std::span<const double> topic_vector,
                        double diversity, std::size_t top_n) {
  MmrResult result;
  const std::size_t n = candidate_vectors.size();
  result.short_list = n < top_n;
  const std::size_t wanted = std::min(n, top_n);
  if (wanted == 0) return result;

  const double lambda = 1.0 - diversity;
  std::vector<double> relevance(n);
  for (std::size_t i = 0; i < n; ++i) relevance[i] = safe_cosine(candidate_vectors[i], topic_vector);
  // Highest similarity to any already selected candidate.
  std::vector<double> redundancy(n, -INFINITY);
  std::vector<bool> taken(n, false);

  for (std::size_t step = 0; step < wanted; ++step) {
    std::size_t best = n;
    double best_score = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double score = step == 0 ? relevance[i] : lambda * relevance[i] - (1.0 - lambda) * redundancy[i];
      if (best == n || score > best_score) {
        best = i;
        best_score = score;
      }
    }
    taken[best] = true;
    result.selected.push_back(best);
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) redundancy[i] = std::max(redundancy[i], safe_cosine(candidate_vectors[i], candidate_vectors[best]));
    }
  }
  return result;
}

namespace {

std::vector<std::vector<std::size_t>> members_by_label(std::span<const int> labels, std::size_t n_topics) {
  std::vector<std::vector<std::size_t>> members(n_topics);
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (labels[s] >= 0) members[static_cast<std::size_t>(labels[s])].push_back(s);
  }
  return members;
}

std::size_t topic_count(std::span<const int> labels) {
  int n = 0;
  for (int l : labels) n = std::max(n, l + 1);
  return static_cast<std::size_t>(n);
}

double cosine_to(const EmbeddingMatrix& m, std::size_t row, std::span<const double> v) {
  auto r = m.row(row);
  std::vector<double> rd(r.begin(), r.end());
  return safe_cosine(rd, v);
}

}  // namespace

std::vector<std::vector<std::size_t>> representative_docs(std::span<const int> labels, const EmbeddingMatrix& embeddings,
                                                          std::size_t n) {
  if (labels.size() != embeddings.rows()) throw ValidationError("labels and embeddings differ in length");
  const auto members = members_by_label(labels, topic_count(labels));
  std::vector<std::vector<std::size_t>> out(members.size());
  for (std::size_t t = 0; t < members.size(); ++t) {
    if (members[t].empty()) continue;
    const auto center = embed::centroid(embeddings, members[t]);
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t row : members[t]) scored.emplace_back(cosine_to(embeddings, row, center), row);
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return embeddings.ids()[a.second] < embeddings.ids()[b.second];
    });
    for (std::size_t i = 0; i < std::min(n, scored.size()); ++i) out[t].push_back(scored[i].second);
  }
  return out;
}

std::size_t TopicModel::noise_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), -1));
}

std::vector<std::vector<std::string>> TopicModel::word_lists(std::size_t limit) const {
  std::vector<std::vector<std::string>> out;
  for (const auto& t : topics) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < std::min(limit, t.words.size()); ++i) words.push_back(t.words[i].term);
    out.push_back(std::move(words));
  }
  return out;
}

TopicInputs TopicInputs::make(std::vector<std::string> segment_ids, std::vector<std::string> texts,
                              EmbeddingMatrix embeddings, const Stopwords& stopwords) {
  if (segment_ids.size() != texts.size() || segment_ids.size() != embeddings.rows()) {
    throw ValidationError("segment ids, texts and embeddings must be row-aligned");
  }
  TopicInputs in;
  in.tokens.reserve(texts.size());
  for (const auto& t : texts) in.tokens.push_back(tokenize(t, stopwords));
  in.segment_ids = std::move(segment_ids);
  in.texts = std::move(texts);
  in.embeddings = std::move(embeddings);
  return in;
}

std::vector<int> relabel_dense(std::span<const int> labels) {
  std::map<int, int> mapping;
  std::vector<int> out(labels.size(), -1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    auto [it, inserted] = mapping.emplace(labels[i], static_cast<int>(mapping.size()));
    out[i] = it->second;
  }
  return out;
}

TopicModel represent(const TopicInputs& inputs, std::span<const int> labels, const TopicConfig& config) {
  if (labels.size() != inputs.segment_ids.size()) throw ValidationError("labels and segments differ in length");
  if (config.top_n_words == 0) throw ValidationError("top_n_words must be >= 1");
  if (config.diversity < 0 || config.diversity > 1) throw ValidationError("diversity must lie in [0, 1]");

  const ClusterCounts counts = build_vocab(inputs.tokens, labels, config.vectorizer);
  const auto weights = ctfidf_bm25(ctfidf_inputs(counts), config.log_base);
  const auto candidates = top_words(weights, counts.tf, counts.vocab, 2 * config.top_n_words);
  const auto members = members_by_label(labels, counts.n_clusters);
  const auto reps = representative_docs(labels, inputs.embeddings, config.n_representative);
  const std::size_t dims = inputs.embeddings.dims();

  TopicModel model;
  model.segment_ids = inputs.segment_ids;
  model.labels.assign(labels.begin(), labels.end());
  for (std::size_t c = 0; c < counts.n_clusters; ++c) {
    Topic topic;
    topic.id = static_cast<int>(c);
    topic.size = members[c].size();
    if (!members[c].empty()) topic.centroid = embed::centroid(inputs.embeddings, members[c]);

    // Word vector: normalized mean embedding of the cluster's segments containing the word.
    std::vector<std::vector<double>> vectors;
    for (std::size_t term : candidates[c]) {
      std::vector<double> v(dims, 0.0);
      for (std::size_t row : members[c]) {
        const auto& present = counts.segment_terms[row];
        if (!std::binary_search(present.begin(), present.end(), term)) continue;
        auto r = inputs.embeddings.row(row);
        for (std::size_t d = 0; d < dims; ++d) v[d] += r[d];
      }
      double norm = 0;
      for (double x : v) norm += x * x;
      if (norm > 0) {
        for (double& x : v) x /= std::sqrt(norm);
      }
      vectors.push_back(std::move(v));
    }
    const auto mmr = mmr_diversify(vectors, topic.centroid, config.diversity, config.top_n_words);
    topic.short_word_list = mmr.short_list;
    // Keep the c-TF-IDF order of the chosen words.
    std::vector<std::size_t> chosen = mmr.selected;
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t k : chosen) {
      const std::size_t term = candidates[c][k];
      topic.words.push_back({counts.vocab.terms[term], weights[c][term]});
    }
    for (std::size_t row : reps[c]) topic.representative_docs.push_back(inputs.segment_ids[row]);
    model.topics.push_back(std::move(topic));
  }
  return model;
}

std::vector<int> merge_to_k(const TopicInputs& inputs, std::span<const int> labels, int k) {
  std::vector<int> out(labels.begin(), labels.end());
  const auto current = static_cast<int>(topic_count(out));
  if (k < 2) throw ValidationError("target topic count must be >= 2");
  if (k > current) {
    throw ValidationError("cannot reduce " + std::to_string(current) + " topics to " + std::to_string(k));
  }
  auto members = members_by_label(out, static_cast<std::size_t>(current));
  std::vector<std::vector<double>> centroids;
  for (const auto& m : members) {
    if (m.empty()) throw ValidationError("topic labels must be dense");
    centroids.push_back(embed::centroid(inputs.embeddings, m));
  }

  while (static_cast<int>(centroids.size()) > k) {
    std::size_t bi = 0, bj = 1;
    double best = -INFINITY;
    for (std::size_t i = 0; i < centroids.size(); ++i) {
      for (std::size_t j = i + 1; j < centroids.size(); ++j) {
        const double s = safe_cosine(centroids[i], centroids[j]);
        if (s > best) {
          best = s;
          bi = i;
          bj = j;
        }
      }
    }
    for (int& l : out) {
      if (l == static_cast<int>(bj)) {
        l = static_cast<int>(bi);
      } else if (l > static_cast<int>(bj)) {
        --l;
      }
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    std::sort(members[bi].begin(), members[bi].end());
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(bj));
    centroids.erase(centroids.begin() + static_cast<std::ptrdiff_t>(bj));
    centroids[bi] = embed::centroid(inputs.embeddings, members[bi]);
  }
  return out;
}

TopicModel reduce_to_k(const TopicModel& model, const TopicInputs& inputs, int k, const TopicConfig& config) {
  const auto labels = merge_to_k(inputs, model.labels, k);
  return represent(inputs, labels, config);
}

json topics_to_json(const TopicModel& model) {
  json topics = json::array();
  if (const auto noise = model.noise_count(); noise > 0) {
    topics.push_back({{"id", -1}, {"size", noise}, {"words", json::array()}, {"representative_docs", json::array()}});
  }
  for (const auto& t : model.topics) {
    json words = json::array();
    for (const auto& w : t.words) words.push_back({{"term", w.term}, {"weight", w.weight}});
    topics.push_back({{"id", t.id}, {"size", t.size}, {"words", words}, {"representative_docs", t.representative_docs}});
  }
  return {{"topics", topics}};
}

std::vector<Topic> topics_from_json(const json& j) {
  std::vector<Topic> out;
  try {
    for (const auto& t : j.at("topics")) {
      Topic topic;
      topic.id = t.at("id").get<int>();
      if (topic.id < 0) continue;
      topic.size = t.at("size").get<std::size_t>();
      for (const auto& w : t.at("words")) topic.words.push_back({w.at("term").get<std::string>(), w.at("weight").get<double>()});
      topic.representative_docs = t.at("representative_docs").get<std::vector<std::string>>();
      out.push_back(std::move(topic));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("topics.json schema: ") + e.what());
  }
  std::sort(out.begin(), out.end(), [](const Topic& a, const Topic& b) { return a.id < b.id; });
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

void write_labels_csv(const std::filesystem::path& path, const TopicModel& model) {
  std::string out = "segment_id,topic_id\n";
  for (std::size_t i = 0; i < model.segment_ids.size(); ++i) {
    out += csv_field(model.segment_ids[i]) + "," + std::to_string(model.labels[i]) + "\n";
  }
  text::write_file(path, out);
}

std::vector<std::pair<std::string, int>> read_labels_csv(const std::filesystem::path& path) {
  std::vector<std::pair<std::string, int>> rows;
  const auto lines = text::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() || (i == 0 && lines[i].rfind("segment_id", 0) == 0)) continue;
    const auto comma = lines[i].rfind(',');
    if (comma == std::string::npos) throw ValidationError(path.string() + ":" + std::to_string(i + 1) + ": expected segment_id,topic_id");
    std::string id = lines[i].substr(0, comma);
    if (id.size() >= 2 && id.front() == '"' && id.back() == '"') {
      std::string unq;
      for (std::size_t k = 1; k + 1 < id.size(); ++k) {
        unq += id[k];
        if (id[k] == '"' && k + 2 < id.size() && id[k + 1] == '"') ++k;
      }
      id = unq;
    }
    try {
      rows.emplace_back(id, std::stoi(lines[i].substr(comma + 1)));
    } catch (const std::exception&) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) + ": topic_id is not an integer");
    }
  }
  return rows;
}

}  // namespace lextopic::topics
