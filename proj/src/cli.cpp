#include "cdnet/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cdnet/checkpoint.hpp"
#include "cdnet/dataset.hpp"
#include "cdnet/detector.hpp"
#include "cdnet/errors.hpp"
#include "cdnet/metrics.hpp"

namespace cdnet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kRunRecord = "run_config.json";

struct GenDataArgs {
  std::string out;
  std::int64_t pairs = 10;
  std::int64_t size = 256;
  std::uint64_t seed = 0;
  double change_frac = 0.3;
};

struct TrainArgs {
  std::string model = "wnet";
  std::string data;
  int epochs = 1;
  int batch = 4;
  double base_width = 0.125;
  double lr = 2e-4;
  double beta1 = 0.5;
  double lambda = 100.0;
  std::uint64_t seed = 0;
  std::string out;
  std::int64_t patch = 256;
  int g_per_d = 2;
  int patience = 5;
  double decay = 0.5;
  std::int64_t max_steps = 0;
  int patches_per_pair = 1;
};

struct InferArgs {
  std::string checkpoint;
  std::string t1;
  std::string t2;
  std::int64_t stride = 128;
  std::int64_t patch = 0;  // 0: the model's input size
  double threshold = 0.5;
  std::string out;
};

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string prob;
  std::string curves;
  std::string summary;
  int thresholds = 101;
};

struct InspectArgs {
  std::string model = "wnet";
  double base_width = 1.0;
  std::int64_t input_size = 256;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

void write_run_record(const fs::path& dir, const std::string& command, const json& config) {
  fs::create_directories(dir);
  write_text(dir / kRunRecord, json{{"command", command}, {"config", config}}.dump(2) + "\n");
}

fs::path manifest_path(const std::string& data) {
  const fs::path p(data);
  return fs::is_directory(p) ? p / "manifest.jsonl" : p;
}

int gen_data(const GenDataArgs& a, std::ostream& out) {
  DatasetSpec spec;
  spec.pairs = a.pairs;
  spec.size = a.size;
  spec.seed = a.seed;
  spec.change_fraction = a.change_frac;
  const Manifest m = generate_dataset(a.out, spec);
  write_run_record(a.out, "gen-data",
                   {{"out", a.out}, {"pairs", a.pairs}, {"size", a.size}, {"seed", a.seed},
                    {"change_frac", a.change_frac}, {"train_fraction", spec.train_fraction}});
  out << "wrote " << m.records.size() << " pairs (" << m.split("train").size() << " train, "
      << m.split("val").size() << " val) to " << a.out << "\n";
  return 0;
}

int train_cmd(const TrainArgs& a, std::ostream& out) {
  ModelSpec spec;
  spec.kind = parse_model_kind(a.model);
  spec.input_size = a.patch;
  spec.base_width = a.base_width;
  spec.seed = a.seed;

  const Manifest manifest = read_manifest(manifest_path(a.data));
  std::vector<PairSample> train_set, val_set;
  for (const auto& r : manifest.split("train")) train_set.push_back(manifest.load(r));
  for (const auto& r : manifest.split("val")) val_set.push_back(manifest.load(r));
  if (train_set.empty()) throw std::invalid_argument("train: manifest has no training records");

  TrainConfig config;
  config.epochs = a.epochs;
  config.batch = a.batch;
  config.adam.lr = a.lr;
  config.adam.beta1 = a.beta1;
  config.lambda = a.lambda;
  config.generator_updates_per_step = a.g_per_d;
  config.patience = a.patience;
  config.decay = a.decay;
  config.max_steps = a.max_steps;
  config.patches_per_pair = a.patches_per_pair;
  config.seed = a.seed;

  const fs::path dir(a.out);
  write_run_record(dir, "train",
                   {{"model", a.model}, {"data", a.data}, {"epochs", a.epochs}, {"batch", a.batch},
                    {"base_width", a.base_width}, {"lr", a.lr}, {"beta1", a.beta1}, {"beta2", config.adam.beta2},
                    {"eps", config.adam.eps}, {"lambda", a.lambda}, {"seed", a.seed}, {"patch", a.patch},
                    {"g_per_d", a.g_per_d}, {"patience", a.patience}, {"decay", a.decay},
                    {"lr_floor", config.lr_floor}, {"max_steps", a.max_steps},
                    {"patches_per_pair", a.patches_per_pair}});

  ChangeDetector detector(spec);
  std::ofstream log(dir / "train_log.csv", std::ios::trunc);
  if (spec.kind == ModelKind::wnet) {
    log << "step,epoch,loss,lr,wall_ms\n";
  } else {
    log << "step,d_loss,g_loss_adv,g_loss_l1,wall_ms\n";
  }
  log << std::setprecision(9);
  const TrainSummary summary = train(detector, train_set, val_set, config, [&](const StepLog& s) {
    if (spec.kind == ModelKind::wnet) {
      log << s.step << ',' << s.epoch << ',' << s.loss << ',' << s.lr << ',' << s.wall_ms << '\n';
    } else {
      log << s.step << ',' << s.d_loss << ',' << s.g_loss_adv << ',' << s.g_loss_l1 << ',' << s.wall_ms << '\n';
    }
  });
  save_checkpoint(dir / "checkpoint.cdck", detector.parameters(),
                  CheckpointMeta{static_cast<std::uint64_t>(summary.steps), summary.final_lr, a.seed, spec.to_json()});
  out << "trained " << a.model << " for " << summary.steps << " steps";
  if (spec.kind == ModelKind::cdgan) out << " (" << summary.d_updates << " D / " << summary.g_updates << " G updates)";
  out << ", final lr " << summary.final_lr << "; checkpoint " << (dir / "checkpoint.cdck").string() << "\n";
  return 0;
}

std::string join(const std::vector<std::int64_t>& v) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << '}';
  return os.str();
}

int infer_cmd(const InferArgs& a, std::ostream& out) {
  const Checkpoint ck = read_checkpoint(a.checkpoint);
  const ModelSpec spec = ModelSpec::from_json(ck.meta.config);
  if (a.patch != 0 && a.patch != spec.input_size) {
    throw std::invalid_argument("infer: --patch " + std::to_string(a.patch) + " does not match the model input size " +
                                std::to_string(spec.input_size));
  }
  if (!(a.threshold >= 0.0 && a.threshold <= 1.0)) throw std::invalid_argument("infer: --threshold must lie in [0,1]");
  ChangeDetector detector(spec);
  load_parameters(detector.parameters(), ck);
  const Image t1 = read_png(a.t1);
  const Image t2 = read_png(a.t2);
  if (t1.channels != 3 || t2.channels != 3) throw FormatError("infer: inputs must be RGB images");
  if (t1.width != t2.width || t1.height != t2.height) throw ShapeError("infer: t1 and t2 differ in size");

  TilePlan plan;
  RngStream noise(ck.meta.seed ^ 0x5eedULL);
  const ProbMap prob = detector.predict_image(t1, t2, a.stride, noise, &plan);
  out << "tile plan: " << plan.windows.size() << " windows, x-origins " << join(plan.x_origins) << ", y-origins "
      << join(plan.y_origins) << "\n";
  const fs::path dir(a.out);
  write_run_record(dir, "infer",
                   {{"checkpoint", a.checkpoint}, {"t1", a.t1}, {"t2", a.t2}, {"stride", a.stride},
                    {"patch", spec.input_size}, {"threshold", a.threshold}, {"model", json::parse(spec.to_json())}});
  write_png(dir / "prob.png", probability_to_image(prob));
  write_prob_raw(dir / "prob.raw", prob);
  write_png(dir / "change.png", mask_to_image(threshold(prob, a.threshold)));
  out << "wrote " << (dir / "prob.png").string() << ", " << (dir / "prob.raw").string() << ", "
      << (dir / "change.png").string() << "\n";
  return 0;
}

int eval_cmd(const EvalArgs& a, std::ostream& out) {
  const BinaryMap pred = image_to_mask(read_png(a.pred));
  const BinaryMap gt = image_to_mask(read_png(a.gt));
  if (!pred.same_size(gt)) {
    throw ShapeError("eval: prediction is " + std::to_string(pred.width) + "x" + std::to_string(pred.height) +
                     " but ground truth is " + std::to_string(gt.width) + "x" + std::to_string(gt.height));
  }
  if (!a.curves.empty() && a.prob.empty()) throw std::invalid_argument("eval: --curves requires --prob");
  json summary = metrics_json(confusion(pred, gt));
  if (!a.prob.empty()) {
    const ProbMap prob = read_prob_raw(a.prob);
    if (!prob.same_size(gt)) throw ShapeError("eval: probability map and ground truth differ in size");
    const CurveSet curves = sweep_curves(prob, gt, a.thresholds);
    summary["fm_auc"] = curves.fm.auc;
    summary["pr_auc"] = curves.pr.auc;
    summary["pr_points_dropped"] = curves.dropped_pr_points;
    summary["thresholds"] = a.thresholds;
    if (!a.curves.empty()) write_text(a.curves, curves_csv(curves));
  }
  const fs::path summary_path(a.summary);
  const fs::path dir = summary_path.has_parent_path() ? summary_path.parent_path() : fs::path(".");
  write_run_record(dir, "eval",
                   {{"pred", a.pred}, {"gt", a.gt}, {"prob", a.prob}, {"curves", a.curves}, {"summary", a.summary},
                    {"thresholds", a.thresholds}});
  write_text(summary_path, summary.dump(2) + "\n");
  out << summary.dump() << "\n";
  return 0;
}

void print_manifest(std::ostream& out, const std::vector<LayerInfo>& rows) {
  out << "name,kernel,stride,out_shape,param_count\n";
  for (const auto& r : rows) {
    const std::string k = r.kernel ? std::to_string(r.kernel) + "x" + std::to_string(r.kernel) : "-";
    const std::string s = r.stride ? std::to_string(r.stride) : "-";
    out << '"' << r.name << "\"," << k << ',' << s << ',' << r.out_shape() << ',' << r.param_count << '\n';
  }
}

int inspect_cmd(const InspectArgs& a, std::ostream& out) {
  ModelSpec spec;
  spec.kind = parse_model_kind(a.model);
  spec.input_size = a.input_size;
  spec.base_width = a.base_width;
  ChangeDetector detector(spec);
  std::int64_t closed_form = 0;
  std::int64_t reported = 0;
  if (auto* net = detector.wnet()) {
    print_manifest(out, net->manifest());
    closed_form = WNet<float>::closed_form_parameter_count(net->config());
    reported = kReportedWNetParameters;
  } else {
    out << "# generator\n";
    print_manifest(out, detector.generator()->net().manifest());
    out << "# discriminator\n";
    const auto disc_rows = detector.discriminator()->manifest();
    print_manifest(out, disc_rows);
    std::int64_t disc = 0;
    for (const auto& r : disc_rows) disc += r.param_count;
    closed_form = WNet<float>::closed_form_parameter_count(detector.generator()->config().wnet) + disc;
    reported = kReportedCdganParameters;
  }
  const std::int64_t walked = detector.parameters().element_count();
  out << "parameters (graph walk): " << walked << "\n";
  out << "parameters (closed form): " << closed_form << "\n";
  if (a.base_width == 1.0 && a.input_size == 256) {
    out << "reported parameters: " << reported << "\n";
    out << "delta vs reported: " << (walked - reported) << "\n";
  }
  if (walked != closed_form) throw std::logic_error("inspect: parameter counts disagree");
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bi-temporal change detection with W-Net and CDGAN"};
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic bi-temporal dataset");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--pairs", gen.pairs, "Number of image pairs")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--size", gen.size, "Image side length in pixels")->check(CLI::Range(8, 1 << 14));
  gen_cmd->add_option("--seed", gen.seed, "Master seed");
  gen_cmd->add_option("--change-frac", gen.change_frac, "Fraction of buildings changed")->check(CLI::Range(0.0, 1.0));

  TrainArgs tr;
  auto* train_sub = app.add_subcommand("train", "Train a W-Net or CDGAN model");
  train_sub->add_option("--model", tr.model, "wnet or cdgan")->check(CLI::IsMember({"wnet", "cdgan"}));
  train_sub->add_option("--data", tr.data, "Dataset directory or manifest.jsonl")->required();
  train_sub->add_option("--epochs", tr.epochs)->check(CLI::PositiveNumber);
  train_sub->add_option("--batch", tr.batch)->check(CLI::PositiveNumber);
  train_sub->add_option("--base-width", tr.base_width, "Channel width multiplier")->check(CLI::PositiveNumber);
  train_sub->add_option("--lr", tr.lr)->check(CLI::PositiveNumber);
  train_sub->add_option("--beta1", tr.beta1)->check(CLI::Range(0.0, 0.999999));
  train_sub->add_option("--lambda", tr.lambda, "L1 weight for the CDGAN generator")->check(CLI::NonNegativeNumber);
  train_sub->add_option("--seed", tr.seed);
  train_sub->add_option("--out", tr.out, "Output directory")->required();
  train_sub->add_option("--patch", tr.patch, "Training patch size (model input size)");
  train_sub->add_option("--g-per-d", tr.g_per_d, "Generator updates per discriminator update")
      ->check(CLI::PositiveNumber);
  train_sub->add_option("--patience", tr.patience, "Plateau epochs before decaying lr")->check(CLI::PositiveNumber);
  train_sub->add_option("--decay", tr.decay, "Learning-rate decay factor")->check(CLI::Range(0.0, 1.0));
  train_sub->add_option("--max-steps", tr.max_steps, "Stop after this many steps (0 = no limit)");
  train_sub->add_option("--patches-per-pair", tr.patches_per_pair)->check(CLI::PositiveNumber);

  InferArgs inf;
  auto* infer_sub = app.add_subcommand("infer", "Tiled inference on a full image pair");
  infer_sub->add_option("--checkpoint", inf.checkpoint)->required()->check(CLI::ExistingFile);
  infer_sub->add_option("--t1", inf.t1)->required()->check(CLI::ExistingFile);
  infer_sub->add_option("--t2", inf.t2)->required()->check(CLI::ExistingFile);
  infer_sub->add_option("--stride", inf.stride)->check(CLI::PositiveNumber);
  infer_sub->add_option("--patch", inf.patch, "Must equal the model input size");
  infer_sub->add_option("--threshold", inf.threshold);
  infer_sub->add_option("--out", inf.out)->required();

  EvalArgs ev;
  auto* eval_sub = app.add_subcommand("eval", "Score a change map against ground truth");
  eval_sub->add_option("--pred", ev.pred, "Binary change map PNG")->required()->check(CLI::ExistingFile);
  eval_sub->add_option("--gt", ev.gt, "Ground-truth mask PNG")->required()->check(CLI::ExistingFile);
  eval_sub->add_option("--prob", ev.prob, "Raw probability dump from infer")->check(CLI::ExistingFile);
  eval_sub->add_option("--curves", ev.curves, "Curve CSV output path");
  eval_sub->add_option("--summary", ev.summary, "Metrics JSON output path")->required();

  InspectArgs ins;
  auto* inspect_sub = app.add_subcommand("inspect", "Print the layer table and parameter counts");
  inspect_sub->add_option("--model", ins.model)->check(CLI::IsMember({"wnet", "cdgan"}));
  inspect_sub->add_option("--base-width", ins.base_width)->check(CLI::PositiveNumber);
  inspect_sub->add_option("--input-size", ins.input_size)->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*gen_cmd) return gen_data(gen, out);
    if (*train_sub) return train_cmd(tr, out);
    if (*infer_sub) return infer_cmd(inf, out);
    if (*eval_sub) return eval_cmd(ev, out);
    if (*inspect_sub) return inspect_cmd(ins, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace cdnet::cli
