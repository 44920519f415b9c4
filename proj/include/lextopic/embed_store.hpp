#pragma once

/**
 * @file embed_store.hpp
 *
 * @brief Embedding matrices and the EMB1 file format.
 *
 * EMB1 layout: the 4 ASCII bytes "EMB1", u32 little-endian row count,
 * u32 little-endian dimension, then rows*dims little-endian IEEE-754 f32
 * values in row-major order. Row ids live in a sibling "<path>.ids" text
 * file, one UTF-8 id per line.
 */

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lextopic/error.hpp"

namespace lextopic::embed {

class EmbeddingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Row-major dense float matrix with one unique id per row.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Validates shape, finiteness and id uniqueness; throws EmbeddingError.
  EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> data, std::vector<std::string> ids);

  std::size_t rows() const { return rows_; }
  std::size_t dims() const { return dims_; }
  std::span<const float> row(std::size_t i) const { return {data_.data() + i * dims_, dims_}; }
  std::span<const float> data() const { return data_; }
  const std::vector<std::string>& ids() const { return ids_; }

  /// Row index for an id; throws EmbeddingError when absent.
  std::size_t index_of(const std::string& id) const;
  /// New matrix holding the given rows in the given order.
  EmbeddingMatrix select(std::span<const std::size_t> rows) const;

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dims_ = 0;
  std::vector<float> data_;
  std::vector<std::string> ids_;
};

std::filesystem::path ids_path(const std::filesystem::path& path);

EmbeddingMatrix read_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path);

/// Clamped to [-1, 1]. Throws EmbeddingError on a zero-norm vector.
double cosine_similarity(std::span<const float> u, std::span<const float> v);
double cosine_similarity(std::span<const double> u, std::span<const double> v);

/// Mean of the selected rows. Throws EmbeddingError on an empty selection.
std::vector<double> centroid(const EmbeddingMatrix& matrix, std::span<const std::size_t> rows);

}  // namespace lextopic::embed
