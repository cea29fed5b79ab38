#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sspr/batch.hpp"
#include "sspr/errors.hpp"
#include "sspr/pipeline.hpp"

using namespace sspr;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sspr_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig small_config(const fs::path& out) {
  PipelineConfig cfg;
  cfg.generator.er.n = 20;
  cfg.generator.er.p = 0.2;
  cfg.replicates = 3;
  cfg.seed = 100;
  cfg.out_dir = out;
  cfg.targets = parse_targets("0.1,none,-0.1,none");
  cfg.clip_to_bounds = 0.8;
  return cfg;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("target parsing") {
  const auto q = parse_targets("0.3, 0.3,-0.3,none");
  CHECK(*q[0] == 0.3);
  CHECK(*q[2] == -0.3);
  CHECK_FALSE(q[3].has_value());
  CHECK_THROWS_AS(parse_targets("0.1,0.2"), ConfigError);
  CHECK_THROWS_AS(parse_targets("0.1,0.2,0.3,0.4,0.5"), ConfigError);
  CHECK_THROWS_AS(parse_targets("0.1,x,0.3,0.4"), ConfigError);
  CHECK_THROWS_AS(parse_targets("1.5,0,0,0"), ConfigError);
}

TEST_CASE("weight histogram") {
  const std::vector<double> w{0.0, 0.5, 1.0, 2.0};
  const auto h = weight_histogram(w, 2.0, 4);
  CHECK(h == std::vector<double>{0.25, 0.25, 0.25, 0.25});
  CHECK(histogram_l1(h, weight_histogram(std::vector<double>{2.0}, 2.0, 4)) == doctest::Approx(1.5));
  CHECK(weight_histogram(w, 2.0).size() == 64);
}

TEST_CASE("parallel batches match the serial reference") {
  auto work = [](std::size_t r) {
    ErConfig cfg;
    cfg.n = 30;
    cfg.seed = replicate_seed(7, r);
    const WeightedDigraph g = erdos_renyi(cfg);
    return g.total_weight() + static_cast<double>(g.nnz());
  };
  const auto serial = run_replicates_serial<double>(16, work);
  CHECK(run_replicates<double>(16, 4, work) == serial);
  CHECK(run_replicates<double>(16, 1, work) == serial);
}

TEST_CASE("batch errors propagate") {
  auto work = [](std::size_t r) -> int {
    if (r == 3) throw ConfigError("bad replicate");
    return static_cast<int>(r);
  };
  CHECK_THROWS_AS(run_replicates<int>(8, 2, work), ConfigError);
  CHECK_THROWS_AS(run_replicates_serial<int>(8, work), ConfigError);
}

TEST_CASE("generate writes one file pair per replicate, deterministically") {
  const fs::path a = scratch("gen_a"), b = scratch("gen_b");
  GenerateOptions o;
  o.replicates = 4;
  o.seed = 9;
  o.out_dir = a;
  const auto files = cmd_generate(o);
  CHECK(files.size() == 4);
  o.out_dir = b;
  o.jobs = 3;
  cmd_generate(o);
  for (const char* f : {"graph_0000.csv", "graph_0003.csv", "graph_0002.json"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const Json meta = read_json(a / "graph_0002.json");
  CHECK(meta.at("seed") == 11);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("pipeline output is reproducible and resumable") {
  const fs::path a = scratch("pipe_a"), b = scratch("pipe_b");
  PipelineConfig cfg = small_config(a);
  const Json summary = cmd_pipeline(cfg);
  CHECK(summary.at("replicates") == 3);
  CHECK(summary.at("optimal") == 3);

  cfg.out_dir = b;
  cfg.jobs = 2;
  cmd_pipeline(cfg);
  for (const char* f : {"rep_0001/trace.csv", "rep_0002/final.csv", "rep_0000/summary.json",
                        "aggregate/mean_trace.csv", "aggregate/summary.json", "aggregate/weight_histogram.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }

  // Aggregate rows track the longest trace.
  std::size_t longest = 0;
  for (int r = 0; r < 3; ++r) longest = std::max(longest, line_count(replicate_dir(a, r) / "trace.csv") - 1);
  CHECK(line_count(a / "aggregate/mean_trace.csv") - 1 == longest);
  CHECK(line_count(a / "aggregate/weight_histogram.csv") == 65);

  // A finished replicate is skipped; a removed one is rebuilt identically.
  const std::string before = slurp(a / "rep_0001/final.csv");
  std::ofstream(a / "rep_0000/record.csv") << "sentinel";
  fs::remove_all(a / "rep_0001");
  cfg.out_dir = a;
  cmd_pipeline(cfg);
  CHECK(slurp(a / "rep_0000/record.csv") == "sentinel");
  CHECK(slurp(a / "rep_0001/final.csv") == before);

  // Aggregation reads only replicate files.
  const std::string agg = slurp(b / "aggregate/summary.json");
  fs::remove_all(b / "aggregate");
  aggregate(b, 3);
  CHECK(slurp(b / "aggregate/summary.json") == agg);

  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("pipeline meets clipped targets") {
  const fs::path a = scratch("pipe_targets");
  const PipelineConfig cfg = small_config(a);
  cmd_pipeline(cfg);
  for (int r = 0; r < 3; ++r) {
    const Json s = read_json(replicate_dir(a, r) / "summary.json");
    CHECK(std::abs(s.at("final").at("r11").get<double>() - s.at("targets").at("r11").get<double>()) <= 1e-6);
    CHECK(std::abs(s.at("final").at("r21").get<double>() - s.at("targets").at("r21").get<double>()) <= 1e-6);
    CHECK(s.at("max_out_strength_gap").get<double>() <= 1e-7);
    CHECK(s.at("nnz_final") == s.at("nnz"));
  }
  fs::remove_all(a);
}

TEST_CASE("measure, bounds and target commands") {
  const fs::path dir = scratch("cmds");
  fs::create_directories(dir);
  ErConfig er;
  er.n = 30;
  er.p = 0.2;
  const WeightedDigraph g = erdos_renyi(er);
  const Json m = cmd_measure(g);
  CHECK(m.at("nnz") == g.nnz());
  CHECK(m.at("assortativity").at("r12").is_number());

  const Json b = cmd_bounds(g, std::nullopt, SupportMode::Fixed);
  CHECK(b.at("bounds").at("r22").at("lo").get<double>() <= b.at("bounds").at("r22").at("initial").get<double>());

  TargetOptions o;
  o.targets = assortativity_all(g);
  o.objective = Objective::L1ToW;
  o.out = dir / "target.csv";
  const TargetOutcome t = cmd_target(g, o);
  CHECK(t.matrix.status == TargetStatus::Optimal);
  CHECK(t.report.at("l1_change").get<double>() <= 1e-6);

  RewireOptions ro;
  ro.trace_out = dir / "trace.csv";
  const Json rw = cmd_rewire(g, load_graph(dir / "target.csv"), ro);
  CHECK(rw.at("max_deviation_from_target").get<double>() <= 1e-7);

  o.export_mps = dir / "free.mps";
  o.support = SupportMode::Free;
  CHECK(cmd_target(g, o).matrix.status == TargetStatus::Exported);
  CHECK(fs::file_size(dir / "free.mps") > 0);
  o.export_mps.reset();
  CHECK_THROWS_AS(cmd_target(g, o), ConfigError);
  fs::remove_all(dir);
}

}
