#include "cdnet/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "cdnet/errors.hpp"

namespace cdnet {

namespace {

Metric ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

void require_binary(const BinaryMap& m, const char* what) {
  for (auto v : m.values) {
    if (v > 1) throw std::invalid_argument(std::string(what) + ": map is not binary");
  }
}

nlohmann::json to_json(const Metric& m) { return m ? nlohmann::json(*m) : nlohmann::json(nullptr); }

std::string csv_field(const Metric& m) {
  if (!m) return "";
  std::ostringstream os;
  os << std::setprecision(17) << *m;
  return os.str();
}

}  // namespace

ConfusionCounts confusion(const BinaryMap& pred, const BinaryMap& gt) {
  if (!pred.same_size(gt)) {
    throw ShapeError("confusion: prediction is " + std::to_string(pred.width) + "x" + std::to_string(pred.height) +
                     " but ground truth is " + std::to_string(gt.width) + "x" + std::to_string(gt.height));
  }
  require_binary(pred, "confusion (prediction)");
  require_binary(gt, "confusion (ground truth)");
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.values[i] != 0;
    const bool g = gt.values[i] != 0;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Rates rates(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  const double total = tp + fp + tn + fn;
  Rates r;
  r.mar = ratio(fn, tp + fn);
  r.far = ratio(fp, fp + tn);
  r.oer = ratio(fp + fn, total);
  r.pcc = ratio(tp + tn, total);
  if (total > 0.0) r.pre = ((tp + fn) * (tp + fp) + (tn + fp) * (tn + fn)) / (total * total);
  if (r.pcc && r.pre) r.kappa = ratio(*r.pcc - *r.pre, 1.0 - *r.pre);
  r.precision = ratio(tp, tp + fp);
  r.recall = ratio(tp, tp + fn);
  return r;
}

double trapezoid_auc(std::vector<CurvePoint> points) {
  std::stable_sort(points.begin(), points.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.x < b.x; });
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].x - points[i - 1].x) * (points[i].y + points[i - 1].y) * 0.5;
  }
  return area;
}

CurveSet sweep_curves(const ProbMap& prob, const BinaryMap& gt, int n_thresholds) {
  if (n_thresholds < 2) throw std::invalid_argument("sweep_curves: need at least 2 thresholds");
  if (!prob.same_size(gt)) throw ShapeError("sweep_curves: probability map and ground truth differ in size");
  require_binary(gt, "sweep_curves (ground truth)");

  std::vector<float> changed, unchanged;
  for (std::size_t i = 0; i < prob.size(); ++i) (gt.values[i] ? changed : unchanged).push_back(prob.values[i]);
  if (changed.empty() || unchanged.empty()) {
    throw std::invalid_argument("sweep_curves: ground truth contains a single class; FAR/MAR/precision undefined");
  }
  std::sort(changed.begin(), changed.end());
  std::sort(unchanged.begin(), unchanged.end());
  auto above = [](const std::vector<float>& sorted, double t) {
    // values strictly greater than t
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), t,
                                     [](double v, float e) { return v < static_cast<double>(e); });
    return static_cast<std::int64_t>(sorted.end() - it);
  };

  CurveSet out;
  out.fm = {"mar", "far", {}, 0.0};
  out.pr = {"recall", "precision", {}, 0.0};
  for (int i = 0; i < n_thresholds; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_thresholds - 1);
    ThresholdRow row;
    row.threshold = t;
    row.counts.tp = above(changed, t);
    row.counts.fn = static_cast<std::int64_t>(changed.size()) - row.counts.tp;
    row.counts.fp = above(unchanged, t);
    row.counts.tn = static_cast<std::int64_t>(unchanged.size()) - row.counts.fp;
    row.rates = rates(row.counts);
    out.fm.points.push_back({t, *row.rates.mar, *row.rates.far});
    if (row.rates.precision) {
      out.pr.points.push_back({t, *row.rates.recall, *row.rates.precision});
    } else {
      ++out.dropped_pr_points;
    }
    out.rows.push_back(row);
  }
  out.fm.auc = trapezoid_auc(out.fm.points);
  out.pr.auc = trapezoid_auc(out.pr.points);
  return out;
}

std::string curves_csv(const CurveSet& curves) {
  std::ostringstream os;
  os << "threshold,far,mar,precision,recall\n";
  for (const auto& row : curves.rows) {
    os << csv_field(row.threshold) << ',' << csv_field(row.rates.far) << ',' << csv_field(row.rates.mar) << ','
       << csv_field(row.rates.precision) << ',' << csv_field(row.rates.recall) << '\n';
  }
  return os.str();
}

nlohmann::json metrics_json(const ConfusionCounts& c) {
  const Rates r = rates(c);
  return nlohmann::json{{"tp", c.tp},
                        {"fp", c.fp},
                        {"tn", c.tn},
                        {"fn", c.fn},
                        {"mar", to_json(r.mar)},
                        {"far", to_json(r.far)},
                        {"oer", to_json(r.oer)},
                        {"pcc", to_json(r.pcc)},
                        {"pre", to_json(r.pre)},
                        {"kappa", to_json(r.kappa)},
                        {"precision", to_json(r.precision)},
                        {"recall", to_json(r.recall)}};
}

}  // namespace cdnet
