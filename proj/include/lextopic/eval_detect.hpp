#pragma once

/**
 * @file eval_detect.hpp
 *
 * @brief IoU, greedy matching and COCO-style average precision for layout
 * and text-line detectors.
 */

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lextopic/corpus.hpp"
#include "lextopic/report.hpp"

namespace lextopic::eval_detect {

using corpus::BoundingBox;

struct Detection {
  std::string image;
  BoundingBox box;
  int class_id = 0;
  double score = 0;
};

struct GroundTruthBox {
  std::string image;
  BoundingBox box;
  int class_id = 0;
};

struct PRPoint {
  double recall = 0;
  double precision = 0;
};

/// Intersection over union; 0 when the boxes are disjoint.
double iou(const BoundingBox& a, const BoundingBox& b);

struct MatchResult {
  /// Prediction indices in processing order (descending score, input order on ties).
  std::vector<std::size_t> order;
  /// TP flag for each entry of `order`.
  std::vector<bool> true_positive;
  std::size_t false_negatives = 0;
};

/// Greedy one-to-one matching for a single image and class: each prediction,
/// highest score first, takes the unmatched ground truth with the highest
/// IoU >= `iou_threshold`.
MatchResult match_detections(std::span<const Detection> preds, std::span<const GroundTruthBox> gts,
                             double iou_threshold);

std::vector<PRPoint> pr_curve(const std::vector<bool>& flags, std::size_t n_gt);

struct APResult {
  double ap = 0;
  /// Set when n_gt == 0: AP is reported as 0.
  bool undefined = false;
};

/// 101-point interpolated AP over flags ordered by descending score.
APResult average_precision(const std::vector<bool>& flags, std::size_t n_gt);

/// {0.50, 0.55, ..., 0.95}.
std::vector<double> coco_thresholds();

/// Per-class AP for every threshold, mAP per threshold and the mean over
/// thresholds. Classes absent from the ground truth are listed under
/// details["unscored_prediction_classes"]. Throws if there is no ground truth.
MetricReport mean_ap(std::span<const Detection> preds, std::span<const GroundTruthBox> gts,
                     std::span<const double> thresholds);

/// JSON Lines loaders. Class names from both files are sorted and mapped to
/// dense ids (index into `class_names`).
struct DetectionFiles {
  std::vector<std::string> class_names;
  std::vector<Detection> predictions;
  std::vector<GroundTruthBox> ground_truth;
};
DetectionFiles load_detection_files(const std::filesystem::path& pred_path,
                                    const std::filesystem::path& gt_path);

}  // namespace lextopic::eval_detect
