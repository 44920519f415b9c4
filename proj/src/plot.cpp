#include "lextopic/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lextopic/error.hpp"

namespace lextopic::plot {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
constexpr const char* kNoiseColor = "#c8c8c8";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(double width, double height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string scatter_svg(const embed::EmbeddingMatrix& points, std::span<const int> labels) {
  if (points.dims() != 2) throw ValidationError("scatter needs a 2-D projection");
  if (points.rows() != labels.size()) throw ValidationError("points and labels differ in length");
  constexpr double size = 600, margin = 20;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    x0 = std::min<double>(x0, points.row(i)[0]);
    x1 = std::max<double>(x1, points.row(i)[0]);
    y0 = std::min<double>(y0, points.row(i)[1]);
    y1 = std::max<double>(y1, points.row(i)[1]);
  }
  const double sx = x1 > x0 ? (size - 2 * margin) / (x1 - x0) : 1.0;
  const double sy = y1 > y0 ? (size - 2 * margin) / (y1 - y0) : 1.0;

  std::string svg = header(size, size);
  // Noise first so clustered points stay visible on top.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < points.rows(); ++i) {
      const bool noise = labels[i] < 0;
      if (noise != (pass == 0)) continue;
      const double x = margin + (points.row(i)[0] - x0) * sx;
      const double y = size - margin - (points.row(i)[1] - y0) * sy;
      const char* color = noise ? kNoiseColor : kPalette[static_cast<std::size_t>(labels[i]) % std::size(kPalette)];
      svg += "<circle class=\"point\" data-topic=\"" + std::to_string(labels[i]) + "\" cx=\"" + num(x) + "\" cy=\"" +
             num(y) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
  }
  return svg + "</svg>\n";
}

std::string bars_svg(std::span<const topics::Topic> topics) {
  if (topics.empty()) throw ValidationError("no topics to plot");
  constexpr double panel_w = 320, bar_h = 16, label_w = 130, gap = 30;
  std::size_t rows = 0;
  for (const auto& t : topics) rows = std::max(rows, t.words.size());
  const std::size_t columns = std::min<std::size_t>(topics.size(), 4);
  const std::size_t grid_rows = (topics.size() + columns - 1) / columns;
  const double panel_h = 24 + static_cast<double>(rows) * bar_h;
  const double width = static_cast<double>(columns) * (panel_w + gap);
  const double height = static_cast<double>(grid_rows) * (panel_h + gap);

  std::string svg = header(width, height);
  for (std::size_t k = 0; k < topics.size(); ++k) {
    const auto& t = topics[k];
    const double ox = static_cast<double>(k % columns) * (panel_w + gap) + 10;
    const double oy = static_cast<double>(k / columns) * (panel_h + gap) + 16;
    const char* color = kPalette[k % std::size(kPalette)];
    svg += "<g class=\"topic\" data-topic=\"" + std::to_string(t.id) + "\">\n";
    svg += "<text x=\"" + num(ox) + "\" y=\"" + num(oy) + "\" font-weight=\"bold\">Topic " + std::to_string(t.id) +
           "</text>\n";
    double max_w = 0;
    for (const auto& w : t.words) max_w = std::max(max_w, w.weight);
    for (std::size_t i = 0; i < t.words.size(); ++i) {
      const double y = oy + 8 + static_cast<double>(i) * bar_h;
      const double len = max_w > 0 ? std::max(0.0, t.words[i].weight / max_w) * (panel_w - label_w - 10) : 0.0;
      svg += "<text x=\"" + num(ox + label_w - 4) + "\" y=\"" + num(y + bar_h * 0.7) + "\" text-anchor=\"end\">" +
             escape(t.words[i].term) + "</text>\n";
      svg += "<rect class=\"bar\" x=\"" + num(ox + label_w) + "\" y=\"" + num(y + 2) + "\" width=\"" + num(len) +
             "\" height=\"" + num(bar_h - 4) + "\" fill=\"" + color + "\"/>\n";
    }
    svg += "</g>\n";
  }
  return svg + "</svg>\n";
}

std::string sweep_svg(std::span<const topic_eval::SweepRow> rows) {
  if (rows.empty()) throw ValidationError("no sweep rows to plot");
  constexpr double width = 640, height = 360, left = 50, right = 20, top = 20, bottom = 40;
  int k0 = rows.front().k, k1 = rows.front().k;
  double v0 = 0, v1 = 1;
  for (const auto& r : rows) {
    k0 = std::min(k0, r.k);
    k1 = std::max(k1, r.k);
    v0 = std::min({v0, r.topic_diversity, r.coherence_cv});
    v1 = std::max({v1, r.topic_diversity, r.coherence_cv});
  }
  auto px = [&](int k) {
    return k1 == k0 ? (left + width - right) / 2 : left + (k - k0) * (width - left - right) / (k1 - k0);
  };
  auto py = [&](double v) { return height - bottom - (v - v0) * (height - top - bottom) / (v1 - v0); };

  std::string svg = header(width, height);
  svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(height - bottom) + "\" x2=\"" + num(width - right) + "\" y2=\"" +
         num(height - bottom) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" +
         num(height - bottom) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(width / 2) + "\" y=\"" + num(height - 8) + "\" text-anchor=\"middle\">K</text>\n";
  for (const auto& r : rows) {
    svg += "<text x=\"" + num(px(r.k)) + "\" y=\"" + num(height - bottom + 14) + "\" text-anchor=\"middle\">" +
           std::to_string(r.k) + "</text>\n";
  }

  const std::pair<const char*, double topic_eval::SweepRow::*> series[] = {
      {"topic_diversity", &topic_eval::SweepRow::topic_diversity}, {"coherence_cv", &topic_eval::SweepRow::coherence_cv}};
  for (std::size_t s = 0; s < std::size(series); ++s) {
    std::string pts;
    for (const auto& r : rows) pts += num(px(r.k)) + "," + num(py(r.*series[s].second)) + " ";
    svg += "<polyline class=\"series\" data-series=\"" + std::string(series[s].first) + "\" points=\"" + pts +
           "\" fill=\"none\" stroke=\"" + kPalette[s] + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(left + 10) + "\" y=\"" + num(top + 14 * static_cast<double>(s + 1)) + "\" fill=\"" +
           kPalette[s] + "\">" + series[s].first + "</text>\n";
  }
  return svg + "</svg>\n";
}

}  // namespace lextopic::plot
