#include "lextopic/eval_detect.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "lextopic/error.hpp"
#include "lextopic/text.hpp"

namespace lextopic::eval_detect {

using nlohmann::json;

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

namespace {

std::vector<std::size_t> score_order(std::span<const Detection> preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });
  return order;
}

// Picks the unmatched GT with the highest IoU >= threshold; first index on ties.
std::optional<std::size_t> best_match(const BoundingBox& box, std::span<const GroundTruthBox> gts,
                                      std::span<const std::size_t> candidates,
                                      const std::vector<bool>& used, double threshold) {
  std::optional<std::size_t> best;
  double best_iou = -1.0;
  for (std::size_t g : candidates) {
    if (used[g]) continue;
    const double v = iou(box, gts[g].box);
    if (v >= threshold && v > best_iou) {
      best_iou = v;
      best = g;
    }
  }
  return best;
}

}  // namespace

MatchResult match_detections(std::span<const Detection> preds, std::span<const GroundTruthBox> gts,
                             double iou_threshold) {
  MatchResult result;
  result.order = score_order(preds);
  std::vector<std::size_t> all(gts.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<bool> used(gts.size(), false);
  std::size_t matched = 0;
  for (std::size_t p : result.order) {
    auto g = best_match(preds[p].box, gts, all, used, iou_threshold);
    if (g) {
      used[*g] = true;
      ++matched;
    }
    result.true_positive.push_back(g.has_value());
  }
  result.false_negatives = gts.size() - matched;
  return result;
}

std::vector<PRPoint> pr_curve(const std::vector<bool>& flags, std::size_t n_gt) {
  std::vector<PRPoint> curve;
  curve.reserve(flags.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) ++tp;
    PRPoint pt;
    pt.precision = static_cast<double>(tp) / static_cast<double>(i + 1);
    pt.recall = n_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gt);
    curve.push_back(pt);
  }
  return curve;
}

APResult average_precision(const std::vector<bool>& flags, std::size_t n_gt) {
  if (n_gt == 0) return {0.0, true};
  const auto curve = pr_curve(flags, n_gt);
  // Running maximum from the right gives max precision over recall >= r.
  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }
  double sum = 0.0;
  std::size_t pos = 0;
  for (int step = 0; step <= 100; ++step) {
    const double r = step / 100.0;
    while (pos < curve.size() && curve[pos].recall < r - 1e-12) ++pos;
    if (pos < curve.size()) sum += envelope[pos];
  }
  return {sum / 101.0, false};
}

std::vector<double> coco_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

MetricReport mean_ap(std::span<const Detection> preds, std::span<const GroundTruthBox> gts,
                     std::span<const double> thresholds) {
  if (gts.empty()) throw ValidationError("no ground-truth boxes in any class");
  if (thresholds.empty()) throw ValidationError("at least one IoU threshold is required");

  std::set<int> gt_classes;
  for (const auto& g : gts) gt_classes.insert(g.class_id);

  // Per class: GT indices grouped by image, predictions in score order.
  struct ClassData {
    std::map<std::string, std::vector<std::size_t>> gt_by_image;
    std::size_t n_gt = 0;
    std::vector<std::size_t> preds;
  };
  std::map<int, ClassData> classes;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    auto& cd = classes[gts[i].class_id];
    cd.gt_by_image[gts[i].image].push_back(i);
    ++cd.n_gt;
  }
  std::map<int, std::size_t> unscored;
  for (std::size_t p : score_order(preds)) {
    if (!gt_classes.contains(preds[p].class_id)) {
      ++unscored[preds[p].class_id];
      continue;
    }
    classes[preds[p].class_id].preds.push_back(p);
  }

  MetricReport report;
  report.name = "detection";
  json per_class = json::object();
  json thresholds_json = json::array();
  double mean_over_thresholds = 0.0;
  for (double t : thresholds) {
    thresholds_json.push_back(t);
    double sum_ap = 0.0;
    for (auto& [cls, cd] : classes) {
      std::vector<bool> used(gts.size(), false);
      std::vector<bool> flags;
      flags.reserve(cd.preds.size());
      std::size_t tp = 0;
      for (std::size_t p : cd.preds) {
        auto it = cd.gt_by_image.find(preds[p].image);
        std::optional<std::size_t> g;
        if (it != cd.gt_by_image.end()) g = best_match(preds[p].box, gts, it->second, used, t);
        if (g) {
          used[*g] = true;
          ++tp;
        }
        flags.push_back(g.has_value());
      }
      const double ap = average_precision(flags, cd.n_gt).ap;
      sum_ap += ap;
      auto& entry = per_class[std::to_string(cls)];
      entry["ap"].push_back(ap);
      entry["precision"].push_back(flags.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(flags.size()));
      entry["recall"].push_back(static_cast<double>(tp) / static_cast<double>(cd.n_gt));
      entry["n_gt"] = cd.n_gt;
    }
    const double map = sum_ap / static_cast<double>(classes.size());
    char key[32];
    std::snprintf(key, sizeof(key), "mAP@%.2f", t);
    report.set(key, map);
    mean_over_thresholds += map;
  }
  mean_over_thresholds /= static_cast<double>(thresholds.size());
  report.set("mAP", mean_over_thresholds);

  report.config = {{"iou_thresholds", thresholds_json}, {"interpolation", "101-point"}};
  report.details["per_class"] = per_class;
  json unscored_json = json::object();
  for (auto [cls, n] : unscored) unscored_json[std::to_string(cls)] = n;
  report.details["unscored_prediction_classes"] = unscored_json;
  if (!unscored.empty()) report.warnings.push_back("predictions for classes absent from ground truth were not scored");
  return report;
}

namespace {

BoundingBox parse_bbox(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ValidationError("bbox must be [xmin, ymin, xmax, ymax]");
  BoundingBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!b.valid()) throw ValidationError("invalid bbox");
  return b;
}

template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
  const auto lines = text::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    try {
      fn(json::parse(lines[i]));
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
}

}  // namespace

DetectionFiles load_detection_files(const std::filesystem::path& pred_path,
                                    const std::filesystem::path& gt_path) {
  std::vector<json> gt_records;
  std::vector<json> pred_records;
  std::set<std::string> names;
  for_each_record(gt_path, [&](json j) {
    names.insert(j.at("class").get<std::string>());
    gt_records.push_back(std::move(j));
  });
  for_each_record(pred_path, [&](json j) {
    names.insert(j.at("class").get<std::string>());
    pred_records.push_back(std::move(j));
  });

  DetectionFiles files;
  files.class_names.assign(names.begin(), names.end());
  auto class_id = [&](const std::string& n) {
    return static_cast<int>(std::lower_bound(files.class_names.begin(), files.class_names.end(), n) -
                            files.class_names.begin());
  };
  auto wrap = [](const std::filesystem::path& path, std::size_t i, auto&& fn) {
    try {
      fn();
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ": record " + std::to_string(i + 1) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ": record " + std::to_string(i + 1) + ": " + e.what());
    }
  };
  for (std::size_t i = 0; i < gt_records.size(); ++i) {
    wrap(gt_path, i, [&] {
      const auto& r = gt_records[i];
      files.ground_truth.push_back({r.at("image").get<std::string>(), parse_bbox(r.at("bbox")),
                                    class_id(r.at("class").get<std::string>())});
    });
  }
  for (std::size_t i = 0; i < pred_records.size(); ++i) {
    wrap(pred_path, i, [&] {
      const auto& r = pred_records[i];
      const double score = r.at("score").get<double>();
      if (!std::isfinite(score)) throw ValidationError("score must be finite");
      files.predictions.push_back({r.at("image").get<std::string>(), parse_bbox(r.at("bbox")),
                                   class_id(r.at("class").get<std::string>()), score});
    });
  }
  return files;
}

}  // namespace lextopic::eval_detect
