// sspr: strength-preserving rewiring toward target assortativity.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sspr/errors.hpp"
#include "sspr/pipeline.hpp"

using namespace sspr;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kUsage = 2, kParse = 3, kInfeasible = 4, kStall = 5 };

struct GeneratorFlags {
  std::size_t n = 50;
  double p = 0.1;
  std::size_t steps = 300;
  double beta = 0.7;
  std::optional<double> alpha, gamma;
  double delta_out = 1.0, delta_in = 1.0;
  double shape = 5.0, scale = 0.2;
  std::optional<double> constant;

  void add_er(CLI::App* app) {
    app->add_option("--n", n, "node count");
    app->add_option("--p", p, "edge probability");
    add_weights(app);
  }
  void add_pa(CLI::App* app) {
    app->add_option("--steps", steps, "growth steps");
    app->add_option("--beta", beta, "probability of linking two existing nodes");
    app->add_option("--alpha", alpha, "probability of a new source node (default (1-beta)/2)");
    app->add_option("--gamma", gamma, "probability of a new target node (default (1-beta)/2)");
    app->add_option("--delta-out", delta_out);
    app->add_option("--delta-in", delta_in);
    add_weights(app);
  }
  void add_weights(CLI::App* app) {
    app->add_option("--weight-shape", shape, "gamma shape of edge weights");
    app->add_option("--weight-scale", scale, "gamma scale of edge weights");
    app->add_option("--weight-constant", constant, "use a constant edge weight instead");
  }

  WeightLaw law() const {
    WeightLaw w;
    if (constant) {
      w.kind = WeightLaw::Kind::Constant;
      w.value = *constant;
    } else {
      w.shape = shape;
      w.scale = scale;
    }
    return w;
  }

  GeneratorSpec spec(bool pa) const {
    GeneratorSpec g;
    if (!pa) {
      g.kind = GeneratorSpec::Kind::Er;
      g.er.n = n;
      g.er.p = p;
      g.er.weights = law();
      g.er.validate();
      return g;
    }
    g.kind = GeneratorSpec::Kind::Pa;
    g.pa.steps = steps;
    g.pa.beta = beta;
    g.pa.alpha = alpha.value_or((1.0 - beta) / 2.0);
    g.pa.gamma = gamma.value_or((1.0 - beta) / 2.0);
    g.pa.delta_out = delta_out;
    g.pa.delta_in = delta_in;
    g.pa.weights = law();
    g.pa.validate();
    return g;
  }
};

std::optional<KappaBounds> kappa_from(const std::optional<double>& lo, const std::optional<double>& hi,
                                      const WeightedDigraph* g) {
  if (!lo && !hi) return std::nullopt;
  KappaBounds k = g ? default_kappa(*g) : KappaBounds{};
  if (lo) k.lower = *lo;
  if (hi) k.upper = *hi;
  if (!(k.lower >= 0.0) || !(k.upper >= k.lower)) throw ConfigError("kappa bounds must satisfy 0 <= lower <= upper");
  return k;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strength-preserving rewiring of weighted directed networks toward target assortativity"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  fs::path out_dir = ".";
  app.add_option("--seed", seed, "base seed; replicate r uses seed + r");
  app.add_option("--jobs", jobs, "parallel replicate workers")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", out_dir, "output directory");

  GeneratorFlags gen;
  std::size_t replicates = 1;

  auto* generate = app.add_subcommand("generate", "draw random networks");
  generate->require_subcommand(1);
  auto* gen_er = generate->add_subcommand("er", "directed Erdos-Renyi with weighted edges");
  auto* gen_pa = generate->add_subcommand("pa", "weighted directed preferential attachment");
  gen.add_er(gen_er);
  gen.add_pa(gen_pa);
  for (auto* sub : {gen_er, gen_pa}) sub->add_option("--replicates", replicates)->check(CLI::PositiveNumber);

  std::string input, target_path;
  auto* measure = app.add_subcommand("measure", "print the four assortativity coefficients");
  measure->add_option("input", input, "edge-list CSV")->required();

  std::optional<double> kappa_lo, kappa_hi;
  std::string support = "fixed";
  auto* bounds = app.add_subcommand("bounds", "attainable range of each coefficient");
  bounds->add_option("input", input, "edge-list CSV")->required();

  std::string targets_text, objective = "zero";
  std::optional<std::string> out_file, export_mps, import_sol, trace_file, record_file;
  auto* target = app.add_subcommand("target", "solve for a target weight matrix");
  target->add_option("input", input, "edge-list CSV")->required();
  target->add_option("--targets", targets_text, "r11,r12,r21,r22 (use none to leave one free)")->required();
  target->add_option("--objective", objective, "zero | l1 | bound-min | bound-max");
  target->add_option("--out", out_file, "target edge list (default <out-dir>/target.csv)");
  target->add_option("--export-mps", export_mps, "write the problem as MPS instead of solving");
  target->add_option("--import-solution", import_sol, "read an external solver's solution");

  for (auto* sub : {bounds, target}) {
    sub->add_option("--kappa-lower", kappa_lo, "lower bound on target weights");
    sub->add_option("--kappa-upper", kappa_hi, "upper bound on target weights");
    sub->add_option("--support", support, "fixed | free");
  }

  bool no_reorder = false;
  std::size_t stride = 1;
  auto* rewire = app.add_subcommand("rewire", "rewire a network onto a target matrix");
  rewire->add_option("input", input, "initial edge-list CSV")->required();
  rewire->add_option("target", target_path, "target edge-list CSV")->required();
  rewire->add_option("--out", out_file, "rewired edge list (default <out-dir>/final.csv)");
  rewire->add_option("--trace", trace_file, "trace CSV (default <out-dir>/trace.csv)");
  rewire->add_option("--record", record_file, "rewiring record CSV (default <out-dir>/record.csv)");

  std::string model = "er";
  double clip = 0.0;
  auto* pipeline = app.add_subcommand("pipeline", "generate, target and rewire a batch of replicates");
  pipeline->add_option("--model", model, "er | pa")->check(CLI::IsMember({"er", "pa"}));
  pipeline->add_option("--n", gen.n);
  pipeline->add_option("--p", gen.p);
  pipeline->add_option("--steps", gen.steps);
  pipeline->add_option("--beta", gen.beta);
  pipeline->add_option("--alpha", gen.alpha);
  pipeline->add_option("--gamma", gen.gamma);
  pipeline->add_option("--delta-out", gen.delta_out);
  pipeline->add_option("--delta-in", gen.delta_in);
  gen.add_weights(pipeline);
  pipeline->add_option("--replicates", replicates)->check(CLI::PositiveNumber);
  pipeline->add_option("--targets", targets_text, "r11,r12,r21,r22")->required();
  pipeline->add_option("--clip", clip, "clip each target into this fraction of its attainable range");
  pipeline->add_option("--objective", objective, "zero | l1");
  pipeline->add_option("--kappa-lower", kappa_lo);
  pipeline->add_option("--kappa-upper", kappa_hi);

  for (auto* sub : {rewire, pipeline}) {
    sub->add_flag("--no-reorder", no_reorder, "sweep in the input order");
    sub->add_option("--stride", stride, "trace every stride-th step")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (generate->parsed()) {
      GenerateOptions o;
      o.generator = gen.spec(gen_pa->parsed());
      o.replicates = replicates;
      o.seed = seed;
      o.jobs = jobs;
      o.out_dir = out_dir;
      for (const auto& path : cmd_generate(o)) std::cout << path.string() << '\n';
    } else if (measure->parsed()) {
      std::cout << cmd_measure(load_graph(input)).dump(2) << '\n';
    } else if (bounds->parsed()) {
      const WeightedDigraph g = load_graph(input);
      std::cout << cmd_bounds(g, kappa_from(kappa_lo, kappa_hi, &g), parse_support_mode(support)).dump(2)
                << '\n';
    } else if (target->parsed()) {
      const WeightedDigraph g = load_graph(input);
      TargetOptions o;
      o.targets = parse_targets(targets_text);
      o.objective = parse_objective(objective);
      o.kappa = kappa_from(kappa_lo, kappa_hi, &g);
      o.support = parse_support_mode(support);
      if (export_mps) o.export_mps = *export_mps;
      if (import_sol) o.import_solution = *import_sol;
      if (!export_mps) {
        fs::create_directories(out_dir);
        o.out = out_file ? fs::path(*out_file) : out_dir / "target.csv";
      }
      const TargetOutcome outcome = cmd_target(g, o);
      std::cout << outcome.report.dump(2) << '\n';
      if (outcome.matrix.status == TargetStatus::Infeasible) return kInfeasible;
    } else if (rewire->parsed()) {
      const WeightedDigraph g = load_graph(input);
      const WeightedDigraph h = load_graph(target_path);
      fs::create_directories(out_dir);
      RewireOptions o;
      o.reorder = !no_reorder;
      o.stride = stride;
      o.out = out_file ? fs::path(*out_file) : out_dir / "final.csv";
      o.trace_out = trace_file ? fs::path(*trace_file) : out_dir / "trace.csv";
      o.record_out = record_file ? fs::path(*record_file) : out_dir / "record.csv";
      std::cout << cmd_rewire(g, h, o).dump(2) << '\n';
    } else if (pipeline->parsed()) {
      PipelineConfig cfg;
      cfg.generator = gen.spec(model == "pa");
      cfg.replicates = replicates;
      cfg.seed = seed;
      cfg.jobs = jobs;
      cfg.out_dir = out_dir;
      cfg.targets = parse_targets(targets_text);
      cfg.clip_to_bounds = clip;
      cfg.objective = parse_objective(objective);
      cfg.kappa = kappa_from(kappa_lo, kappa_hi, nullptr);
      cfg.reorder = !no_reorder;
      cfg.stride = stride;
      const Json summary = cmd_pipeline(cfg);
      std::cout << summary.dump(2) << '\n';
      if (summary.at("infeasible").get<std::size_t>() > 0) return kInfeasible;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kParse;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const StallError& e) {
    std::cerr << "stalled: " << e.what() << '\n';
    return kStall;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOk;
}
