#pragma once

// BERTScore over precomputed token embeddings. No IDF weighting and no
// baseline rescaling.

#include <filesystem>

#include "lextopic/embed_store.hpp"
#include "lextopic/report.hpp"

namespace lextopic::gen_eval {

struct BertScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

/// Rows are token vectors. P averages each candidate token's best match
/// over the reference, R the reverse; F1 is 0 when P + R = 0.
BertScore bertscore(const embed::EmbeddingMatrix& candidate, const embed::EmbeddingMatrix& reference);

/// Manifest rows: system,topic_id,candidate_emb_path,reference_emb_path.
/// A header line starting with "system" is skipped; relative paths
/// resolve against the manifest's directory. Reports P/R/F1 means per
/// system as "<system>.P", "<system>.R", "<system>.F1".
MetricReport batch_report(const std::filesystem::path& manifest);

}  // namespace lextopic::gen_eval
