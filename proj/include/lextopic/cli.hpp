#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lextopic/config.hpp"
#include "lextopic/embed_store.hpp"
#include "lextopic/topic_rep.hpp"

namespace lextopic::cli {

/// Runs one command line. Returns 0 on success, 1 on validation errors
/// (including bad arguments) and 2 on I/O errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

/// Segments and embeddings joined by segment id, in corpus order.
topics::TopicInputs load_inputs(const std::filesystem::path& corpus, const std::filesystem::path& embeddings,
                                const topics::Stopwords& stopwords);

struct FitResult {
  topics::TopicModel model;
  embed::EmbeddingMatrix reduced;
};

/// Reduce, cluster and represent.
FitResult fit(const topics::TopicInputs& inputs, const config::ToolkitConfig& config);

/// Writes labels.csv, topics.json and reduced.emb (with its .ids sidecar).
void write_model_dir(const std::filesystem::path& dir, const FitResult& result, const nlohmann::json& provenance);

struct ModelDir {
  std::vector<std::string> segment_ids;
  std::vector<int> labels;
  std::vector<topics::Topic> topics;
  nlohmann::json topics_json;
};

ModelDir read_model_dir(const std::filesystem::path& dir);

}  // namespace lextopic::cli
