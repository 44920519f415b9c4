#include "lextopic/gen_eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lextopic/error.hpp"
#include "lextopic/text.hpp"

namespace lextopic::gen_eval {

using embed::EmbeddingMatrix;

namespace {

std::vector<double> unit_rows(const EmbeddingMatrix& m, const char* which) {
  std::vector<double> out(m.rows() * m.dims());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    double norm = 0;
    for (float x : r) norm += static_cast<double>(x) * x;
    if (norm <= 0) throw embed::EmbeddingError(std::string(which) + " token " + std::to_string(i) + " has zero norm");
    norm = std::sqrt(norm);
    for (std::size_t d = 0; d < m.dims(); ++d) out[i * m.dims() + d] = r[d] / norm;
  }
  return out;
}

}  // namespace

BertScore bertscore(const EmbeddingMatrix& candidate, const EmbeddingMatrix& reference) {
  if (candidate.rows() == 0 || reference.rows() == 0) throw ValidationError("bertscore needs at least one token on each side");
  if (candidate.dims() != reference.dims()) {
    throw ValidationError("token dimension mismatch: " + std::to_string(candidate.dims()) + " vs " +
                          std::to_string(reference.dims()));
  }
  const std::size_t m = candidate.rows();
  const std::size_t n = reference.rows();
  const std::size_t dims = candidate.dims();
  const auto c = unit_rows(candidate, "candidate");
  const auto r = unit_rows(reference, "reference");

  std::vector<double> best_row(m, -INFINITY);
  std::vector<double> best_col(n, -INFINITY);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t d = 0; d < dims; ++d) s += c[i * dims + d] * r[j * dims + d];
      s = std::clamp(s, -1.0, 1.0);
      best_row[i] = std::max(best_row[i], s);
      best_col[j] = std::max(best_col[j], s);
    }
  }
  BertScore out;
  for (double s : best_row) out.precision += s;
  for (double s : best_col) out.recall += s;
  out.precision /= static_cast<double>(m);
  out.recall /= static_cast<double>(n);
  const double sum = out.precision + out.recall;
  out.f1 = sum == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / sum;
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back(text::trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.emplace_back(text::trim(cur));
  return fields;
}

EmbeddingMatrix load(const std::filesystem::path& path, const std::string& where) {
  if (!std::filesystem::exists(path)) throw IoError(where + ": missing embedding file " + path.string());
  return embed::read_embeddings(path);
}

}  // namespace

MetricReport batch_report(const std::filesystem::path& manifest) {
  const auto lines = text::read_lines(manifest);
  const auto base = manifest.parent_path();

  struct Sums {
    double p = 0, r = 0, f = 0;
    std::size_t n = 0;
  };
  std::map<std::string, Sums> systems;
  MetricReport report;
  report.name = "bertscore";
  report.details["pairs"] = nlohmann::json::array();

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    const auto fields = split_csv(lines[i]);
    const std::string where = manifest.string() + ":" + std::to_string(i + 1);
    if (i == 0 && !fields.empty() && fields[0] == "system") continue;
    if (fields.size() != 4) throw ValidationError(where + ": expected system,topic_id,candidate,reference");
    auto resolve = [&](const std::string& p) {
      std::filesystem::path path(p);
      return path.is_absolute() ? path : base / path;
    };
    const auto score = bertscore(load(resolve(fields[2]), where), load(resolve(fields[3]), where));
    auto& s = systems[fields[0]];
    s.p += score.precision;
    s.r += score.recall;
    s.f += score.f1;
    ++s.n;
    report.details["pairs"].push_back({{"system", fields[0]},
                                       {"topic_id", fields[1]},
                                       {"P", score.precision},
                                       {"R", score.recall},
                                       {"F1", score.f1}});
  }
  if (systems.empty()) throw ValidationError(manifest.string() + ": manifest lists no pairs");
  for (const auto& [name, s] : systems) {
    const auto n = static_cast<double>(s.n);
    report.set(name + ".P", s.p / n);
    report.set(name + ".R", s.r / n);
    report.set(name + ".F1", s.f / n);
  }
  report.config["manifest"] = manifest.string();
  return report;
}

}  // namespace lextopic::gen_eval
