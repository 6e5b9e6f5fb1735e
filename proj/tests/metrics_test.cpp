#include <gtest/gtest.h>

#include <sstream>

#include "cdnet/errors.hpp"
#include "cdnet/metrics.hpp"
#include "cdnet/rng.hpp"
#include "cdnet/tiling.hpp"
#include "support/oracles.hpp"

using namespace cdnet;
using namespace cdnet::testing;

namespace {

BinaryMap map_from(std::int64_t w, std::int64_t h, std::vector<std::uint8_t> v) {
  BinaryMap m(w, h);
  m.values = std::move(v);
  return m;
}

}  // namespace

TEST(Rates, HandDerivedOracle) {
  const Rates r = rates(ConfusionCounts{50, 10, 900, 40});
  EXPECT_NEAR(*r.mar, kOracleMar, kOracleMetricTol);
  EXPECT_NEAR(*r.far, kOracleFar, kOracleMetricTol);
  EXPECT_NEAR(*r.oer, kOracleOer, kOracleMetricTol);
  EXPECT_NEAR(*r.kappa, kOracleKappa, kOracleMetricTol);
  EXPECT_NEAR(*r.precision, 50.0 / 60.0, 1e-15);
  EXPECT_NEAR(*r.recall, 50.0 / 90.0, 1e-15);
}

TEST(Rates, PerfectPredictionIsExact) {
  const Rates r = rates(ConfusionCounts{123, 0, 877, 0});
  EXPECT_EQ(*r.kappa, 1.0);
  EXPECT_EQ(*r.oer, 0.0);
  EXPECT_EQ(*r.mar, 0.0);
  EXPECT_EQ(*r.far, 0.0);
}

TEST(Rates, UndefinedRatiosAreEmpty) {
  const Rates no_change = rates(ConfusionCounts{0, 0, 100, 0});
  EXPECT_FALSE(no_change.mar.has_value());
  EXPECT_FALSE(no_change.recall.has_value());
  EXPECT_FALSE(no_change.precision.has_value());
  EXPECT_FALSE(no_change.kappa.has_value());
  EXPECT_EQ(*no_change.far, 0.0);
  const Rates empty = rates(ConfusionCounts{});
  EXPECT_FALSE(empty.oer.has_value());
}

TEST(Rates, ComplementaryPredictionHasNegativeKappa) {
  EXPECT_LT(*rates(ConfusionCounts{0, 50, 0, 50}).kappa, 0.0);
}

TEST(Rates, IndependentRandomPredictionHasNearZeroKappa) {
  RngStream rng(42);
  const std::int64_t side = 1000;
  BinaryMap pred(side, side), gt(side, side);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    pred.values[i] = rng.uniform() < 0.3;
    gt.values[i] = rng.uniform() < 0.2;
  }
  EXPECT_LT(std::abs(*rates(confusion(pred, gt)).kappa), 0.01);
}

TEST(Confusion, CountsAndValidation) {
  const auto pred = map_from(2, 2, {1, 1, 0, 0});
  const auto gt = map_from(2, 2, {1, 0, 1, 0});
  EXPECT_EQ(confusion(pred, gt), (ConfusionCounts{1, 1, 1, 1}));
  EXPECT_THROW(confusion(pred, BinaryMap(3, 2)), ShapeError);
  EXPECT_THROW(confusion(map_from(2, 2, {2, 0, 0, 0}), gt), std::invalid_argument);
}

TEST(Curves, SortedCountsMatchBruteForceThresholding) {
  RngStream rng(3);
  ProbMap prob(37, 23);
  BinaryMap gt(37, 23);
  for (std::size_t i = 0; i < prob.size(); ++i) {
    gt.values[i] = rng.uniform() < 0.25;
    // quantized so that ties with thresholds occur
    prob.values[i] = static_cast<float>(rng.uniform_int(0, 20)) / 20.0f;
  }
  const CurveSet cs = sweep_curves(prob, gt, 21);
  ASSERT_EQ(cs.rows.size(), 21u);
  for (const auto& row : cs.rows) {
    EXPECT_EQ(row.counts, confusion(threshold(prob, row.threshold), gt)) << row.threshold;
  }
}

TEST(Curves, PerfectRankingHasZeroFmArea) {
  ProbMap prob(10, 1);
  BinaryMap gt(10, 1);
  for (int i = 0; i < 10; ++i) {
    gt.values[static_cast<std::size_t>(i)] = i >= 5;
    prob.values[static_cast<std::size_t>(i)] = i >= 5 ? 0.9f : 0.1f;
  }
  const CurveSet cs = sweep_curves(prob, gt, 101);
  EXPECT_DOUBLE_EQ(cs.fm.auc, 0.0);
  for (const auto& p : cs.pr.points) EXPECT_EQ(p.x, 1.0);
}

TEST(Curves, GroundTruthFromSameRuleBeatsShuffledMap) {
  RngStream rng(5);
  ProbMap prob(64, 64), shuffled(64, 64);
  BinaryMap gt(64, 64);
  for (std::size_t i = 0; i < prob.size(); ++i) {
    prob.values[i] = static_cast<float>(rng.uniform());
    gt.values[i] = prob.values[i] > 0.5f;
  }
  shuffled.values = prob.values;
  for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
    std::swap(shuffled.values[i], shuffled.values[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
  }
  EXPECT_LT(sweep_curves(prob, gt).fm.auc, sweep_curves(shuffled, gt).fm.auc);
}

TEST(Curves, InvertedRankingIsWorseThanCorrectRanking) {
  RngStream rng(4);
  ProbMap good(50, 50), bad(50, 50);
  BinaryMap gt(50, 50);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    gt.values[i] = rng.uniform() < 0.3;
    const float noise = static_cast<float>(rng.uniform(0.0, 0.4));
    good.values[i] = gt.values[i] ? 0.6f - noise + 0.3f : 0.1f + noise;
    bad.values[i] = 1.0f - good.values[i];
  }
  const auto g = sweep_curves(good, gt), b = sweep_curves(bad, gt);
  EXPECT_LT(g.fm.auc, b.fm.auc);
  EXPECT_GT(g.pr.auc, b.pr.auc);
}

TEST(Curves, DropsThresholdsWithUndefinedPrecision) {
  ProbMap prob(4, 1, 0.5f);
  BinaryMap gt = map_from(4, 1, {1, 0, 1, 0});
  const CurveSet cs = sweep_curves(prob, gt, 11);
  // thresholds >= 0.5 predict nothing changed
  EXPECT_EQ(cs.dropped_pr_points, 6u);
  EXPECT_EQ(cs.pr.points.size(), 5u);
  EXPECT_EQ(cs.fm.points.size(), 11u);
}

TEST(Curves, RejectsSingleClassAndTooFewThresholds) {
  ProbMap prob(2, 2, 0.3f);
  EXPECT_THROW(sweep_curves(prob, BinaryMap(2, 2, 0)), std::invalid_argument);
  EXPECT_THROW(sweep_curves(prob, map_from(2, 2, {1, 0, 0, 0}), 1), std::invalid_argument);
  EXPECT_THROW(sweep_curves(prob, BinaryMap(3, 2)), ShapeError);
}

TEST(Curves, TrapezoidAreaSortsByX) {
  EXPECT_DOUBLE_EQ(trapezoid_auc({{0, 1, 1}, {0, 0, 0}}), 0.5);
  EXPECT_DOUBLE_EQ(trapezoid_auc({{0, 0.5, 1}}), 0.0);
}

TEST(Curves, CsvLeavesUndefinedFieldsEmpty) {
  ProbMap prob(4, 1, 0.5f);
  const CurveSet cs = sweep_curves(prob, map_from(4, 1, {1, 0, 1, 0}), 3);
  std::istringstream in(curves_csv(cs));
  std::string header, first, mid, last;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, mid);
  std::getline(in, last);
  EXPECT_EQ(header, "threshold,far,mar,precision,recall");
  EXPECT_EQ(first, "0,1,0,0.5,1");
  EXPECT_EQ(last, "1,0,1,,0");
}

TEST(MetricsJson, UsesNullForUndefined) {
  const auto j = metrics_json(ConfusionCounts{0, 0, 10, 0});
  EXPECT_TRUE(j.at("mar").is_null());
  EXPECT_TRUE(j.at("kappa").is_null());
  EXPECT_EQ(j.at("far").get<double>(), 0.0);
  EXPECT_EQ(j.at("tn").get<std::int64_t>(), 10);
}
