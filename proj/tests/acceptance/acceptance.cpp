// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cdnet/cdgan.hpp"
#include "cdnet/cli.hpp"
#include "cdnet/detector.hpp"
#include "cdnet/losses.hpp"
#include "cdnet/metrics.hpp"
#include "cdnet/optim.hpp"
#include "cdnet/synth.hpp"
#include "cdnet/tiling.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

using namespace cdnet;
using namespace cdnet::testing;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kPrimitiveGradTol = 1e-4;
constexpr double kNetworkGradTol = 1e-3;
constexpr double kGradientBudgetS = 60.0;
constexpr double kAdamFirstStepTol = 1e-11;
constexpr double kAdamTarget = 0.01;
constexpr int kAdamMaxSteps = 10'000;
constexpr double kOverfitAccuracy = 0.99;
constexpr std::int64_t kOverfitMaxSteps = 2000;
constexpr double kOverfitBudgetS = 15 * 60.0;
constexpr int kGanSteps = 50;
constexpr double kTwoLnTwoTol = 1e-6;
constexpr double kFarLimit = 0.10;
constexpr double kChangeThreshold = 0.5;
constexpr double kGeneralizationBudgetS = 20 * 60.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path work_dir() {
  const auto dir = fs::temp_directory_path() / "cdnet_acceptance";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// ---------------------------------------------------------------- 1

double primitive_error(std::uint64_t seed) {
  RngStream rng(seed);
  const auto dim = [&] { return rng.uniform_int(1, 3); };
  const std::int64_t n = dim(), cin = dim(), cout = dim();
  const std::int64_t h = rng.uniform_int(3, 6);
  const int k = static_cast<int>(2 * rng.uniform_int(0, 2) + 1);
  const int stride = static_cast<int>(rng.uniform_int(1, 2));
  const int pad = k / 2;
  double worst = 0.0;
  auto check = [&](const LossFn& f, std::vector<Var> in) {
    worst = std::max(worst, check_coordinates(f, std::move(in)).max_rel_error);
  };

  {
    Var x = leaf(randn(rng, Shape{n, cin, h, h})), w = leaf(randn(rng, Shape{cout, cin, k, k}));
    Var b = leaf(randn(rng, Shape{cout}));
    const auto oh = conv_out_extent(h, k, stride, pad);
    const Tens probe = randn(rng, Shape{n, cout, oh, oh});
    check([&](Tape<double>& t) { return weighted_sum(t, conv2d(t, x, w, b, stride, pad), probe); }, {x, w, b});
  }
  {
    const int op = stride - 1;
    Var x = leaf(randn(rng, Shape{n, cin, h, h})), w = leaf(randn(rng, Shape{cin, cout, k, k}));
    Var b = leaf(randn(rng, Shape{cout}));
    const auto oh = conv_transpose_out_extent(h, k, stride, pad, op);
    const Tens probe = randn(rng, Shape{n, cout, oh, oh});
    check([&](Tape<double>& t) { return weighted_sum(t, conv_transpose2d(t, x, w, b, stride, pad, op), probe); },
          {x, w, b});
  }
  {
    Var a = leaf(randn(rng, Shape{n, cin, h, h})), c = leaf(randn(rng, Shape{n, cout, h, h}));
    const Tens probe = randn(rng, Shape{n, cin + cout, h, h});
    check([&](Tape<double>& t) { return weighted_sum(t, concat_channels<double>(t, {a, c}), probe); }, {a, c});
  }
  for (auto act : {Activation::relu(), Activation::leaky_relu(0.2), Activation::sigmoid(), Activation::tanh(),
                   Activation::identity()}) {
    Var x = leaf(randn(rng, Shape{n, cin, h, h}));
    const Tens probe = randn(rng, x.shape());
    check([&](Tape<double>& t) { return weighted_sum(t, activation(t, act, x), probe); }, {x});
  }
  {
    const auto f_in = cin * h, m = cout;
    Var x = leaf(randn(rng, Shape{n, f_in})), w = leaf(randn(rng, Shape{f_in, m})), b = leaf(randn(rng, Shape{m}));
    const Tens probe = randn(rng, Shape{n, m});
    check([&](Tape<double>& t) { return weighted_sum(t, dense(t, x, w, b), probe); }, {x, w, b});
  }
  {
    Var x = leaf(randn(rng, Shape{n, cin, h, h}));
    const Tens probe = randn(rng, Shape{n, cin * h * h});
    check([&](Tape<double>& t) { return weighted_sum(t, flatten(t, x), probe); }, {x});
  }
  {
    Var a = leaf(randn(rng, Shape{n, h})), c = leaf(randn(rng, Shape{n, h}));
    check([&](Tape<double>& t) { return mean(t, scale(t, mul(t, add(t, a, c), a), 1.7)); }, {a, c});
    check([&](Tape<double>& t) { return sum(t, mul(t, a, c)); }, {a, c});
  }
  {
    Var l = leaf(randn(rng, Shape{n, 1, h, h}, 3.0)), l2 = leaf(randn(rng, Shape{n, 1}, 3.0));
    Tens y(l.shape());
    for (std::int64_t i = 0; i < y.numel(); ++i) y[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
    const Tens target = randn(rng, l.shape());
    check([&](Tape<double>& t) { return sigmoid_cross_entropy(t, l, y); }, {l});
    check([&](Tape<double>& t) { return l1_loss(t, l, target); }, {l});
    Var real = leaf(randn(rng, Shape{n, 1}, 3.0));
    check([&](Tape<double>& t) { return discriminator_loss(t, real, l2); }, {real, l2});
    check([&](Tape<double>& t) { return generator_adversarial_loss(t, l2); }, {l2});
  }
  return worst;
}

Outcome criterion_gradients() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double prim = 0.0;
  for (std::uint64_t s = 0; s < 8; ++s) prim = std::max(prim, primitive_error(2000 + s));
  o.require(prim <= kPrimitiveGradTol, "primitive error " + fmt(prim));

  RngStream rng(31);
  WNetConfig wc;
  wc.input_size = 16;
  wc.base_width = 0.0625;
  wc.init_std = 0.25;
  const WNet<double> net(wc, rng);
  const Tens x1 = gaussian_init<double>(rng, Shape{1, 3, 16, 16}, 0.5);
  const Tens x2 = gaussian_init<double>(rng, Shape{1, 3, 16, 16}, 0.5);
  Tens y(Shape{1, 1, 16, 16});
  for (std::int64_t i = 0; i < y.numel(); ++i) y[i] = rng.uniform() < 0.3 ? 1.0 : 0.0;
  const LossFn wnet_loss = [&](Tape<double>& t) { return sigmoid_cross_entropy(t, net.forward(t, Var(x1), Var(x2)), y); };
  double e2e = check_directions(wnet_loss, net.parameters().variables(), 8).max_rel_error;
  e2e = std::max(e2e, check_coordinates(wnet_loss, net.parameters().variables(), 1e-6, 6).max_rel_error);

  auto gc = GeneratorConfig::make(16, 0.0625, 1);
  gc.wnet.init_std = 0.25;
  DiscriminatorConfig dc;
  dc.input_size = 16;
  dc.base_width = 0.0625;
  dc.init_std = 0.25;
  const Generator<double> g(gc, rng);
  const Discriminator<double> d(dc, rng);
  Tens gt(Shape{1, 1, 16, 16});
  for (std::int64_t i = 0; i < gt.numel(); ++i) gt[i] = rng.uniform() < 0.3 ? 1.0 : -1.0;
  const Tens z = g.sample_noise(rng, 1);
  const LossFn gen_loss = [&](Tape<double>& t) {
    auto fake = g.forward(t, Var(x1), Var(x2), Var(z));
    auto adv = generator_adversarial_loss(t, d.logits(t, Var(x1), Var(x2), fake));
    return add(t, adv, scale(t, l1_loss(t, fake, gt), 100.0));
  };
  const LossFn disc_loss = [&](Tape<double>& t) {
    auto inference = Tape<double>::inference();
    const Tens fake = g.forward(inference, Var(x1), Var(x2), Var(z)).value();
    auto real_logits = d.logits(t, Var(x1), Var(x2), Var(gt));
    auto fake_logits = d.logits(t, Var(x1), Var(x2), Var(fake));
    return discriminator_loss(t, real_logits, fake_logits);
  };
  e2e = std::max(e2e, check_directions(gen_loss, g.parameters().variables(), 6).max_rel_error);
  e2e = std::max(e2e, check_directions(disc_loss, d.parameters().variables(), 6).max_rel_error);
  e2e = std::max(e2e, check_coordinates(disc_loss, d.parameters().variables(), 1e-6, 6).max_rel_error);
  o.require(e2e <= kNetworkGradTol, "end-to-end error " + fmt(e2e));

  const double secs = seconds_since(t0);
  o.require(secs < kGradientBudgetS, "runtime " + fmt(secs, 3) + " s");
  o.note("primitives max rel err " + fmt(prim, 3) + ", networks " + fmt(e2e, 3) + ", " + fmt(secs, 3) + " s");
  return o;
}

// ---------------------------------------------------------------- 2

Outcome criterion_shapes() {
  Outcome o;
  const auto r = cli({"inspect", "--model", "wnet", "--base-width", "1.0", "--input-size", "256"});
  o.require(r.code == 0, "inspect exit code " + std::to_string(r.code) + " " + r.err);
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> rows;
  std::int64_t walked = -1, closed = -1;
  std::string delta;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '"') rows.push_back(line);
    if (line.rfind("parameters (graph walk): ", 0) == 0) walked = std::stoll(line.substr(25));
    if (line.rfind("parameters (closed form): ", 0) == 0) closed = std::stoll(line.substr(26));
    if (line.rfind("delta vs reported: ", 0) == 0) delta = line.substr(19);
  }
  o.require(rows.size() == kWNetTable.size(), std::to_string(rows.size()) + " rows");
  int matched = 0;
  for (std::size_t i = 0; i < std::min(rows.size(), kWNetTable.size()); ++i) {
    const auto& want = kWNetTable[i];
    const std::string kernel = want.kernel ? std::to_string(want.kernel) + "x" + std::to_string(want.kernel) : "-";
    const std::string stride = want.stride ? std::to_string(want.stride) : "-";
    const std::string prefix = '"' + std::string(want.name) + "\"," + kernel + ',' + stride + ',' + want.out_shape + ',';
    if (rows[i].rfind(prefix, 0) == 0) {
      ++matched;
    } else {
      o.require(false, "row " + std::to_string(i) + " is " + rows[i]);
    }
  }
  o.require(walked > 0 && walked == closed, "graph walk " + std::to_string(walked) + " vs closed form " +
                                                std::to_string(closed));
  o.require(!delta.empty(), "delta line missing");
  o.note(std::to_string(matched) + "/17 shapes, " + std::to_string(walked) + " parameters by both methods, delta vs "
         "reported " + delta);
  return o;
}

// ---------------------------------------------------------------- 3

Outcome criterion_metrics() {
  Outcome o;
  const Rates r = rates(ConfusionCounts{50, 10, 900, 40});
  o.require(r.mar && std::abs(*r.mar - kOracleMar) <= kOracleMetricTol, "mar");
  o.require(r.far && std::abs(*r.far - kOracleFar) <= kOracleMetricTol, "far");
  o.require(r.oer && std::abs(*r.oer - kOracleOer) <= kOracleMetricTol, "oer");
  o.require(r.kappa && std::abs(*r.kappa - kOracleKappa) <= kOracleMetricTol, "kappa");
  const Rates perfect = rates(ConfusionCounts{123, 0, 877, 0});
  o.require(perfect.kappa && *perfect.kappa == 1.0, "perfect kappa");
  o.require(perfect.oer && *perfect.oer == 0.0, "perfect oer");
  o.note("mar " + fmt(*r.mar) + ", far " + fmt(*r.far) + ", oer " + fmt(*r.oer) + ", kappa " + fmt(*r.kappa));
  return o;
}

// ---------------------------------------------------------------- 4

double adam_quadratic_step(Var& x, Adam<double>& opt) {
  Tape<double> tape;
  auto loss = mul(tape, x, x);
  tape.backward(loss);
  opt.step();
  opt.zero_grad();
  return x.value()[0];
}

Outcome criterion_adam() {
  Outcome o;
  Var x(Tens(Shape{1}, 1.0), true);
  Adam<double> opt({x});
  const double x1 = adam_quadratic_step(x, opt);
  o.require(std::abs(x1 - kAdamFirstStep) <= kAdamFirstStepTol, "x1 = " + fmt(x1, 15));
  int steps = 1;
  while (std::abs(x.value()[0]) >= kAdamTarget && steps < kAdamMaxSteps) {
    adam_quadratic_step(x, opt);
    ++steps;
  }
  o.require(std::abs(x.value()[0]) < kAdamTarget, "|x| = " + fmt(std::abs(x.value()[0])));
  o.note("x1 = " + fmt(x1, 12) + ", |x| < 0.01 after " + std::to_string(steps) + " steps");
  return o;
}

// ---------------------------------------------------------------- 5

std::vector<PairSample> synthetic_pairs(int count, std::int64_t size, std::uint64_t seed, double change_fraction,
                                        const ScenePairSpec& base = {}) {
  std::vector<PairSample> out;
  RngStream master(seed);
  for (int i = 0; i < count; ++i) {
    ScenePairSpec s = base;
    s.size = size;
    s.change_fraction = change_fraction;
    s.seed = master.next_u64();
    auto p = generate_pair(s);
    out.push_back({std::move(p.t1), std::move(p.t2), std::move(p.gt)});
  }
  return out;
}

struct AccuracyReached {};

Outcome criterion_overfit() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto pairs = synthetic_pairs(8, 64, 501, 0.5);
  ModelSpec spec;
  spec.input_size = 64;
  spec.base_width = 0.125;
  spec.seed = 502;
  ChangeDetector det(spec);
  TrainConfig config;
  config.epochs = static_cast<int>(kOverfitMaxSteps);
  config.batch = 8;
  config.max_steps = kOverfitMaxSteps;
  config.seed = 503;
  double accuracy = 0.0;
  std::int64_t reached_at = -1;
  try {
    train(det, pairs, {}, config, [&](const StepLog& s) {
      if (s.step % 25 != 0 && s.step != kOverfitMaxSteps) return;
      RngStream noise(0);
      accuracy = pixel_accuracy(det, pairs, kChangeThreshold, noise);
      if (accuracy >= kOverfitAccuracy) {
        reached_at = s.step;
        throw AccuracyReached{};
      }
    });
  } catch (const AccuracyReached&) {
  }
  const double secs = seconds_since(t0);
  o.require(reached_at > 0, "accuracy " + fmt(accuracy) + " after " + std::to_string(kOverfitMaxSteps) + " steps");
  o.require(secs < kOverfitBudgetS, "runtime " + fmt(secs, 4) + " s");
  if (reached_at > 0) o.note("accuracy " + fmt(accuracy, 5) + " at step " + std::to_string(reached_at));
  o.note(fmt(secs, 4) + " s");
  return o;
}

// ---------------------------------------------------------------- 6

template <typename T>
std::vector<Tensor<T>> snapshot(const ParameterSet<T>& p) {
  std::vector<Tensor<T>> out;
  for (const auto& v : p.variables()) out.push_back(v.value());
  return out;
}

bool any_grad(const ParameterSet<float>& p) {
  for (const auto& v : p.variables()) {
    if (v.has_grad()) return true;
  }
  return false;
}

bool in_signed_range(const Tensor<float>& t) {
  for (auto v : t.data()) {
    if (!(v >= -1.0f && v <= 1.0f)) return false;
  }
  return true;
}

// Replays one trainer step as separate updates, each with the opposing network
// frozen, on an independent copy of both networks.
class ReferenceAlternation {
 public:
  ReferenceAlternation(const GeneratorConfig& gc, const DiscriminatorConfig& dc, std::uint64_t seed,
                       const GanTrainerConfig& config)
      : rng_(seed), g_(gc, rng_), d_(dc, rng_), config_(config), g_opt_(g_.parameters().variables(), config.adam),
        d_opt_(d_.parameters().variables(), config.adam) {}

  const Generator<float>& generator() const { return g_; }
  const Discriminator<float>& discriminator() const { return d_; }

  // Returns false if a frozen network accumulated a gradient.
  bool step(const GanBatch<float>& batch, RngStream& rng) {
    bool clean = true;
    const Variable<float> x1(batch.x1), x2(batch.x2);
    const auto n = batch.x1.dim(0);
    {
      g_.parameters().set_trainable(false);
      d_.parameters().set_trainable(true);
      Tape<float> tape;
      const Variable<float> z(g_.sample_noise(rng, n));
      const Variable<float> fake(g_.forward(tape, x1, x2, z).value());
      auto real_logits = d_.logits(tape, x1, x2, Variable<float>(batch.gt));
      auto fake_logits = d_.logits(tape, x1, x2, fake);
      auto loss = discriminator_loss(tape, real_logits, fake_logits);
      tape.backward(loss);
      clean &= !any_grad(g_.parameters());
      d_opt_.step();
      d_opt_.zero_grad();
    }
    for (int k = 0; k < config_.generator_updates_per_step; ++k) {
      g_.parameters().set_trainable(true);
      d_.parameters().set_trainable(false);
      Tape<float> tape;
      const Variable<float> z(g_.sample_noise(rng, n));
      auto fake = g_.forward(tape, x1, x2, z);
      auto fake_logits = d_.logits(tape, x1, x2, fake);
      auto adv = generator_adversarial_loss(tape, fake_logits);
      auto l1 = l1_loss(tape, fake, batch.gt);
      auto loss = add(tape, adv, scale(tape, l1, static_cast<float>(config_.lambda)));
      tape.backward(loss);
      clean &= !any_grad(d_.parameters());
      g_opt_.step();
      g_opt_.zero_grad();
    }
    d_.parameters().set_trainable(true);
    return clean;
  }

 private:
  RngStream rng_;
  Generator<float> g_;
  Discriminator<float> d_;
  GanTrainerConfig config_;
  Adam<float> g_opt_;
  Adam<float> d_opt_;
};

Outcome criterion_gan() {
  Outcome o;
  constexpr std::int64_t size = 32;
  constexpr std::uint64_t init_seed = 601;
  const auto gc = GeneratorConfig::make(size, 0.125, 1);
  DiscriminatorConfig dc;
  dc.input_size = size;
  dc.base_width = 0.125;
  const GanTrainerConfig tc;

  RngStream init(init_seed);
  Generator<float> g(gc, init);
  Discriminator<float> d(dc, init);
  GanTrainer<float> trainer(g, d, tc);
  ReferenceAlternation reference(gc, dc, init_seed, tc);

  ScenePairSpec small;
  small.min_buildings = 3;
  small.max_buildings = 6;
  small.min_building_size = 4;
  small.max_building_size = 12;
  const auto pairs = synthetic_pairs(4, size, 602, 0.5, small);
  RngStream step_rng(603);
  bool isolated = true, ranged = true, clean = true;
  for (int s = 0; s < kGanSteps; ++s) {
    const auto& p = pairs[static_cast<std::size_t>(s) % pairs.size()];
    const GanBatch<float> batch{image_to_tensor<float>(p.t1), image_to_tensor<float>(p.t2),
                                mask_to_signed(mask_to_tensor<float>(p.gt))};
    RngStream reference_rng = step_rng;
    trainer.step(batch, step_rng);
    clean &= reference.step(batch, reference_rng);
    isolated &= snapshot(g.parameters()) == snapshot(reference.generator().parameters());
    isolated &= snapshot(d.parameters()) == snapshot(reference.discriminator().parameters());

    auto tape = Tape<float>::inference();
    RngStream noise(static_cast<std::uint64_t>(s));
    const auto out = g.forward(tape, Variable<float>(batch.x1), Variable<float>(batch.x2),
                               Variable<float>(g.sample_noise(noise, 1)));
    ranged &= in_signed_range(out.value());
  }
  o.require(trainer.g_updates() == 2 * trainer.d_updates() && trainer.d_updates() == kGanSteps,
            "counters D " + std::to_string(trainer.d_updates()) + " G " + std::to_string(trainer.g_updates()));
  o.require(isolated, "trainer diverged bitwise from the frozen-opponent reference");
  o.require(clean, "frozen network received a gradient");
  o.require(ranged, "generator output outside [-1, 1]");

  RngStream zero_rng(604);
  Discriminator<double> half(DiscriminatorConfig{.input_size = size, .base_width = 0.125}, zero_rng);
  for (auto& v : half.parameters().variables()) v.mutable_value().fill(0.0);
  const auto pair = synthetic_pairs(1, size, 605, 0.5, small).front();
  Tape<double> tape;
  const Var x1(image_to_tensor<double>(pair.t1)), x2(image_to_tensor<double>(pair.t2));
  const Var real(mask_to_signed(mask_to_tensor<double>(pair.gt)));
  const Var fake(Tens(Shape{1, 1, size, size}, 0.3));
  auto real_logits = half.logits(tape, x1, x2, real);
  auto fake_logits = half.logits(tape, x1, x2, fake);
  const double d_loss = discriminator_loss(tape, real_logits, fake_logits).value()[0];
  o.require(std::abs(d_loss - 2.0 * std::log(2.0)) <= kTwoLnTwoTol, "d_loss " + fmt(d_loss, 12));

  o.note("D " + std::to_string(trainer.d_updates()) + " / G " + std::to_string(trainer.g_updates()) +
         " updates, bit-exact match with the frozen-opponent reference over " + std::to_string(kGanSteps) +
         " steps, d_loss at D = 0.5 is " + fmt(d_loss, 12));
  return o;
}

// ---------------------------------------------------------------- 7

Outcome criterion_tiling() {
  Outcome o;
  const TilePlan plan = plan_tiles(500, 500, 256, 128);
  const std::vector<std::int64_t> want = {0, 128, 244};
  o.require(plan.windows.size() == 9, std::to_string(plan.windows.size()) + " windows");
  o.require(plan.x_origins == want && plan.y_origins == want, "origins");

  std::vector<PatchPrediction> constant;
  for (const auto& w : plan.windows) constant.push_back({w, ProbMap(256, 256, 0.37f)});
  const ProbMap stitched = stitch(constant, plan);
  bool same = true;
  for (auto v : stitched.values) same &= v == 0.37f;
  o.require(same, "constant stitch");

  const TilePlan pair_plan = plan_tiles(6, 4, 4, 2);
  const ProbMap avg = stitch({{pair_plan.windows.at(0), ProbMap(4, 4, 0.25f)},
                              {pair_plan.windows.at(1), ProbMap(4, 4, 0.75f)}},
                             pair_plan);
  o.require(avg.at(2, 0) == 0.5f && avg.at(3, 3) == 0.5f && avg.at(0, 0) == 0.25f && avg.at(5, 0) == 0.75f,
            "overlap average");
  o.note("9 windows, origins {0,128,244}, constant and overlap average exact");
  return o;
}

// ---------------------------------------------------------------- 8

std::string cli_pipeline(const fs::path& root, Outcome& o) {
  const auto p = [&](const std::string& rel) { return (root / rel).string(); };
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> steps = {
      {"gen-data", "--out", p("data"), "--pairs", "4", "--size", "64", "--seed", "801"},
      {"train", "--model", "wnet", "--data", p("data"), "--out", p("run"), "--patch", "32", "--base-width", "0.125",
       "--batch", "2", "--epochs", "100", "--patches-per-pair", "2", "--max-steps", "100", "--seed", "802"},
      {"infer", "--checkpoint", p("run/checkpoint.cdck"), "--t1", p("data/pairs/0000_t1.png"), "--t2",
       p("data/pairs/0000_t2.png"), "--stride", "16", "--out", p("infer")},
      {"eval", "--pred", p("infer/change.png"), "--gt", p("data/pairs/0000_gt.png"), "--prob", p("infer/prob.raw"),
       "--curves", p("eval/curves.csv"), "--summary", p("eval/metrics.json")},
  };
  for (const auto& args : steps) {
    const auto r = cli(args);
    o.require(r.code == 0, args.front() + ": " + r.err);
  }
  return slurp(p("eval/metrics.json"));
}

Outcome criterion_determinism() {
  Outcome o;
  const auto a = cli_pipeline(work_dir() / "run_a", o);
  const auto b = cli_pipeline(work_dir() / "run_b", o);
  o.require(!a.empty(), "metrics JSON missing");
  o.require(a == b, "metrics JSON differs between runs");
  const auto steps = slurp(work_dir() / "run_a" / "run" / "train_log.csv");
  const auto lines = std::count(steps.begin(), steps.end(), '\n');
  o.require(lines == 101, "train log has " + std::to_string(lines - 1) + " steps");
  o.note(std::to_string(a.size()) + "-byte metrics JSON identical across two 100-step runs");
  return o;
}

// ---------------------------------------------------------------- 9

// Per-pixel Euclidean RGB difference, min-max normalised over the image.
ProbMap naive_difference(const Image& t1, const Image& t2) {
  ProbMap out(t1.width, t1.height);
  for (std::int64_t y = 0; y < t1.height; ++y) {
    for (std::int64_t x = 0; x < t1.width; ++x) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double d = (t1.at(x, y, c) - t2.at(x, y, c)) / 255.0;
        s += d * d;
      }
      out.at(x, y) = static_cast<float>(std::sqrt(s));
    }
  }
  const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
  const float min = *lo, range = *hi - *lo;
  for (auto& v : out.values) v = range > 0.0f ? (v - min) / range : 0.0f;
  return out;
}

Outcome criterion_generalization() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::int64_t size = 64;
  const auto train_pairs = synthetic_pairs(24, size, 901, 0.5);
  const auto held_out = synthetic_pairs(4, size, 902, 0.0);

  ModelSpec spec;
  spec.input_size = size;
  spec.base_width = 0.125;
  spec.seed = 903;
  ChangeDetector det(spec);
  TrainConfig config;
  config.epochs = 200;
  config.batch = 8;
  config.max_steps = 600;
  config.seed = 904;
  train(det, train_pairs, {}, config);

  ConfusionCounts model_counts, naive_counts;
  for (const auto& p : held_out) {
    RngStream noise(0);
    const BinaryMap pred = threshold(det.predict_image(p.t1, p.t2, size, noise), kChangeThreshold);
    const BinaryMap naive = threshold(naive_difference(p.t1, p.t2), kChangeThreshold);
    const auto m = confusion(pred, p.gt), n = confusion(naive, p.gt);
    model_counts.tp += m.tp, model_counts.fp += m.fp, model_counts.tn += m.tn, model_counts.fn += m.fn;
    naive_counts.tp += n.tp, naive_counts.fp += n.fp, naive_counts.tn += n.tn, naive_counts.fn += n.fn;
  }
  const double model_far = *rates(model_counts).far;
  const double naive_far = *rates(naive_counts).far;
  const double secs = seconds_since(t0);
  o.require(model_far < kFarLimit, "W-Net FAR " + fmt(model_far));
  o.require(naive_far > kFarLimit, "naive differencing FAR " + fmt(naive_far));
  o.require(secs < kGeneralizationBudgetS, "runtime " + fmt(secs, 4) + " s");
  o.note("W-Net FAR " + fmt(model_far, 4) + " vs naive differencing " + fmt(naive_far, 4) + " on jitter-only pairs, " +
         fmt(secs, 4) + " s");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient checks", criterion_gradients},
      {"layer table shapes and parameter counts", criterion_shapes},
      {"metric oracle", criterion_metrics},
      {"Adam oracle", criterion_adam},
      {"W-Net overfit", criterion_overfit},
      {"GAN schedule and isolation", criterion_gan},
      {"tiling", criterion_tiling},
      {"end-to-end determinism", criterion_determinism},
      {"pseudo-change robustness", criterion_generalization},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
              << o.detail << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
