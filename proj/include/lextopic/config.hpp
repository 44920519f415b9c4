#pragma once

// Toolkit configuration file: UTF-8 INI with "[section]" headers,
// "key = value" lines and "#" comments. Unknown sections and keys are
// rejected. Every key is optional; defaults are the values below.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "lextopic/cluster.hpp"
#include "lextopic/interpret.hpp"
#include "lextopic/reduce.hpp"
#include "lextopic/topic_eval.hpp"
#include "lextopic/topic_rep.hpp"

namespace lextopic::config {

struct EmbeddingSection {
  std::string id_model = "dlicari/distil-ita-legal-bert";
  int max_seq_length = 512;
  int batch_size = 32;
};

struct LlmSection {
  interpret::Provider provider;
  std::size_t parallelism = 2;
};

struct ToolkitConfig {
  EmbeddingSection embedding;
  reduce::ReduceConfig umap;
  cluster::ClusterConfig hdbscan;
  /// "builtin" or a path to a stopword file, one term per line.
  std::string stop_words = "builtin";
  topics::TopicConfig topics;
  topic_eval::CooccurrenceConfig coherence;
  std::size_t coherence_topn = 10;
  std::map<std::string, LlmSection> llm;

  static ToolkitConfig parse(std::string_view contents, const std::string& source = "<config>");
  static ToolkitConfig load(const std::filesystem::path& path);

  /// Resolves stop_words relative to `base` when it is a relative path.
  topics::Stopwords stopwords(const std::filesystem::path& base = {}) const;
  topic_eval::SweepConfig sweep_config() const;
  nlohmann::json to_json() const;
};

/// The documented defaults as a commented config file.
std::string default_config_text();

}  // namespace lextopic::config
