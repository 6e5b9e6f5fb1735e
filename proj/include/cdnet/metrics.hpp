#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdnet/grid.hpp"

namespace cdnet {

/// Pixel tallies with "changed" as the positive class.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Throws ShapeError on size mismatch and std::invalid_argument on non-binary values.
ConfusionCounts confusion(const BinaryMap& pred, const BinaryMap& gt);

/// std::nullopt marks a ratio whose denominator is zero.
using Metric = std::optional<double>;

struct Rates {
  Metric mar;        // FN / (TP + FN)
  Metric far;        // FP / (FP + TN)
  Metric oer;        // (FP + FN) / total
  Metric pcc;        // (TP + TN) / total
  Metric pre;        // expected chance agreement
  Metric kappa;      // (PCC - PRE) / (1 - PRE)
  Metric precision;  // TP / (TP + FP)
  Metric recall;     // TP / (TP + FN)
};

Rates rates(const ConfusionCounts& c);

struct CurvePoint {
  double threshold = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Points in ascending threshold order; auc is the trapezoidal area of the
/// polyline after sorting by x.
struct Curve {
  std::string x_label;
  std::string y_label;
  std::vector<CurvePoint> points;
  double auc = 0.0;
};

double trapezoid_auc(std::vector<CurvePoint> points);

/// Per-threshold evaluation shared by both curves.
struct ThresholdRow {
  double threshold = 0.0;
  ConfusionCounts counts;
  Rates rates;
};

struct CurveSet {
  Curve fm;  // x = MAR, y = FAR; smaller area is better
  Curve pr;  // x = recall, y = precision
  std::vector<ThresholdRow> rows;
  std::size_t dropped_pr_points = 0;  // thresholds where precision is undefined
};

/// Sweeps n_thresholds uniform thresholds over [0,1]; pixel changed iff p > t.
/// Throws std::invalid_argument when n_thresholds < 2 or gt has a single class.
CurveSet sweep_curves(const ProbMap& prob, const BinaryMap& gt, int n_thresholds = 101);

/// Header plus one row per threshold: threshold,far,mar,precision,recall.
/// Undefined values are written as empty fields.
std::string curves_csv(const CurveSet& curves);

nlohmann::json metrics_json(const ConfusionCounts& c);

}  // namespace cdnet
