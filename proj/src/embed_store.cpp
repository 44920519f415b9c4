#include "lextopic/embed_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <unordered_set>

#include "lextopic/text.hpp"

namespace lextopic::embed {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::size_t kHeaderBytes = 12;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string& in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  return v;
}

template <typename T>
double cosine_impl(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size()) throw EmbeddingError("cosine of vectors with different dimensions");
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<double>(u[i]) * static_cast<double>(v[i]);
    nu += static_cast<double>(u[i]) * static_cast<double>(u[i]);
    nv += static_cast<double>(v[i]) * static_cast<double>(v[i]);
  }
  if (nu <= 0 || nv <= 0) throw EmbeddingError("cosine similarity of a zero-norm vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> data,
                                 std::vector<std::string> ids)
    : rows_(rows), dims_(dims), data_(std::move(data)), ids_(std::move(ids)) {
  if (rows_ == 0 || dims_ == 0) throw EmbeddingError("embedding matrix needs at least one row and one dimension");
  if (data_.size() != rows_ * dims_) throw EmbeddingError("embedding payload size does not match rows x dims");
  if (ids_.size() != rows_) {
    throw EmbeddingError("id count " + std::to_string(ids_.size()) + " does not match row count " +
                         std::to_string(rows_));
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t d = 0; d < dims_; ++d) {
      if (!std::isfinite(data_[r * dims_ + d])) {
        throw EmbeddingError("non-finite value in row " + std::to_string(r) + " (id " + ids_[r] + ")");
      }
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw EmbeddingError("duplicate row id \"" + id + "\"");
  }
}

std::size_t EmbeddingMatrix::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return i;
  }
  throw EmbeddingError("no embedding row with id \"" + id + "\"");
}

EmbeddingMatrix EmbeddingMatrix::select(std::span<const std::size_t> rows) const {
  std::vector<float> data;
  std::vector<std::string> ids;
  data.reserve(rows.size() * dims_);
  for (std::size_t r : rows) {
    if (r >= rows_) throw EmbeddingError("row index out of range");
    auto src = row(r);
    data.insert(data.end(), src.begin(), src.end());
    ids.push_back(ids_[r]);
  }
  return EmbeddingMatrix(rows.size(), dims_, std::move(data), std::move(ids));
}

fs::path ids_path(const fs::path& path) { return fs::path(path.string() + ".ids"); }

EmbeddingMatrix read_embeddings(const fs::path& path) {
  const std::string bytes = text::read_file(path);
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw EmbeddingError(path.string() + ": not an EMB1 file (magic mismatch)");
  }
  const std::size_t rows = get_u32(bytes, 4);
  const std::size_t dims = get_u32(bytes, 8);
  const std::size_t expected = kHeaderBytes + rows * dims * 4;
  if (bytes.size() < expected) {
    throw EmbeddingError(path.string() + ": truncated payload (" + std::to_string(rows) + " rows declared, " +
                         std::to_string((bytes.size() - kHeaderBytes) / 4 / std::max<std::size_t>(dims, 1)) +
                         " present)");
  }
  if (bytes.size() > expected) throw EmbeddingError(path.string() + ": trailing bytes after payload");

  std::vector<float> data(rows * dims);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
  }

  const auto id_file = ids_path(path);
  if (!fs::exists(id_file)) throw IoError("missing id sidecar " + id_file.string());
  auto ids = text::read_lines(id_file);
  try {
    return EmbeddingMatrix(rows, dims, std::move(data), std::move(ids));
  } catch (const EmbeddingError& e) {
    throw EmbeddingError(path.string() + ": " + e.what());
  }
}

void write_embeddings(const EmbeddingMatrix& matrix, const fs::path& path) {
  std::string out(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(matrix.rows()));
  put_u32(out, static_cast<std::uint32_t>(matrix.dims()));
  out.reserve(kHeaderBytes + matrix.data().size() * 4);
  for (float v : matrix.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  text::write_file(path, out);

  std::string ids;
  for (const auto& id : matrix.ids()) {
    if (id.find('\n') != std::string::npos) throw EmbeddingError("row id contains a newline");
    ids += id + "\n";
  }
  text::write_file(ids_path(path), ids);
}

double cosine_similarity(std::span<const float> u, std::span<const float> v) { return cosine_impl(u, v); }
double cosine_similarity(std::span<const double> u, std::span<const double> v) { return cosine_impl(u, v); }

std::vector<double> centroid(const EmbeddingMatrix& matrix, std::span<const std::size_t> rows) {
  if (rows.empty()) throw EmbeddingError("centroid of an empty row set");
  std::vector<double> mean(matrix.dims(), 0.0);
  for (std::size_t r : rows) {
    auto src = matrix.row(r);
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += src[d];
  }
  for (auto& v : mean) v /= static_cast<double>(rows.size());
  return mean;
}

}  // namespace lextopic::embed
