#include "sspr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sspr/batch.hpp"
#include "sspr/errors.hpp"
#include "sspr/mps.hpp"

namespace sspr {

namespace {

Json law_to_json(const WeightLaw& w) {
  if (w.kind == WeightLaw::Kind::Constant) return Json{{"law", "constant"}, {"value", w.value}};
  return Json{{"law", "gamma"}, {"shape", w.shape}, {"scale", w.scale}};
}

std::string padded_index(std::size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", r);
  return buf;
}

Json strength_summary(const Vector& s) {
  if (s.size() == 0) return Json{{"min", 0.0}, {"max", 0.0}, {"mean", 0.0}};
  return Json{{"min", s.minCoeff()}, {"max", s.maxCoeff()}, {"mean", s.mean()}};
}

}  // namespace

WeightedDigraph GeneratorSpec::generate(std::uint64_t seed) const {
  if (kind == Kind::Er) {
    ErConfig cfg = er;
    cfg.seed = seed;
    return erdos_renyi(cfg);
  }
  PaConfig cfg = pa;
  cfg.seed = seed;
  return preferential_attachment(cfg);
}

Json GeneratorSpec::to_json() const {
  if (kind == Kind::Er) {
    return Json{{"model", "er"}, {"n", er.n}, {"p", er.p}, {"weights", law_to_json(er.weights)}};
  }
  Json seed_graph = Json::array();
  for (const auto& e : pa.seed_graph) seed_graph.push_back({e.src, e.dst, e.weight});
  return Json{{"model", "pa"},          {"steps", pa.steps},         {"alpha", pa.alpha},
              {"beta", pa.beta},        {"gamma", pa.gamma},         {"delta_out", pa.delta_out},
              {"delta_in", pa.delta_in}, {"weights", law_to_json(pa.weights)},
              {"seed_graph", seed_graph}};
}

Json quad_to_json(const AssortativityQuad& q) {
  Json j = Json::object();
  for (std::size_t x = 0; x < 4; ++x) {
    if (q[x]) j[kQuadNames[x]] = *q[x];
    else j[kQuadNames[x]] = "undefined";
  }
  return j;
}

AssortativityQuad parse_targets(const std::string& text) {
  AssortativityQuad q;
  std::stringstream ss(text);
  std::string field;
  std::size_t x = 0;
  while (std::getline(ss, field, ',')) {
    if (x >= 4) throw ConfigError("targets take exactly four comma-separated values");
    field.erase(0, field.find_first_not_of(' '));
    field.erase(field.find_last_not_of(' ') + 1);
    if (field != "none") {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != field.size() || field.empty()) throw ConfigError("invalid target value '" + field + "'");
      if (v < -1.0 || v > 1.0) throw ConfigError("targets must lie in [-1, 1]");
      q[x] = v;
    }
    ++x;
  }
  if (x != 4) throw ConfigError("targets take exactly four comma-separated values");
  return q;
}

std::vector<double> weight_histogram(std::span<const double> weights, double max_weight,
                                     std::size_t bins) {
  std::vector<double> h(bins, 0.0);
  if (weights.empty() || bins == 0) return h;
  if (!(max_weight > 0.0)) throw ConfigError("histogram range must be positive");
  for (double w : weights) {
    auto b = static_cast<std::size_t>(std::floor(w / max_weight * static_cast<double>(bins)));
    h[std::min(b, bins - 1)] += 1.0;
  }
  for (double& v : h) v /= static_cast<double>(weights.size());
  return h;
}

double histogram_l1(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("histograms differ in bin count");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

std::vector<double> edge_weights(const WeightedDigraph& g) {
  std::vector<double> w;
  for (const auto& row : to_edge_list(g)) w.push_back(row.weight);
  return w;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

WeightedDigraph load_graph(const fs::path& path) {
  const auto rows = read_edge_list_csv(path.string());
  return from_edge_list(rows);
}

std::vector<fs::path> cmd_generate(const GenerateOptions& options) {
  if (options.replicates == 0) throw ConfigError("replicate count must be at least 1");
  fs::create_directories(options.out_dir);
  return run_replicates<fs::path>(options.replicates, options.jobs, [&](std::size_t r) {
    const std::uint64_t seed = replicate_seed(options.seed, r);
    const WeightedDigraph g = options.generator.generate(seed);
    const fs::path csv = options.out_dir / ("graph_" + padded_index(r) + ".csv");
    write_edge_list_csv(csv.string(), g);
    write_json(options.out_dir / ("graph_" + padded_index(r) + ".json"),
               Json{{"replicate", r},
                    {"seed", seed},
                    {"config", options.generator.to_json()},
                    {"nodes", g.size()},
                    {"nnz", g.nnz()},
                    {"tau", g.total_weight()}});
    return csv;
  });
}

Json cmd_measure(const WeightedDigraph& g) {
  Json j{{"nodes", g.size()}, {"nnz", g.nnz()}, {"tau", g.total_weight()}};
  j["out_strength"] = strength_summary(g.out_strength());
  j["in_strength"] = strength_summary(g.in_strength());
  if (g.total_weight() > 0.0) {
    const StrengthProfile p = strength_profile(g);
    j["assortativity"] = quad_to_json(assortativity_all(g, p));
  } else {
    j["assortativity"] = quad_to_json(AssortativityQuad{});
  }
  return j;
}

Json cmd_bounds(const WeightedDigraph& g, std::optional<KappaBounds> kappa, SupportMode support) {
  const KappaBounds k = kappa.value_or(default_kappa(g));
  const StrengthProfile p = strength_profile(g);
  Json j{{"kappa_lower", k.lower}, {"kappa_upper", k.upper}, {"support", to_string(support)}};
  Json coefficients = Json::object();
  for (StrengthType a : kStrengthTypes) {
    for (StrengthType b : kStrengthTypes) {
      const char* name = kQuadNames[quad_index(a, b)];
      if (undefined_reason(p, a, b)) {
        coefficients[name] = "undefined";
        continue;
      }
      const auto bounds = assortativity_bounds(g, a, b, k, support);
      coefficients[name] = Json{{"lo", bounds.lo}, {"hi", bounds.hi}, {"initial", assortativity(g, p, a, b)}};
    }
  }
  j["bounds"] = coefficients;
  return j;
}

TargetOutcome cmd_target(const WeightedDigraph& g, const TargetOptions& options) {
  TargetProblem tp;
  tp.graph = g;
  tp.targets = options.targets;
  tp.kappa = options.kappa.value_or(default_kappa(g));
  tp.objective = options.objective;
  tp.support = options.support;

  TargetOutcome outcome;
  Json& report = outcome.report;
  report["objective"] = to_string(options.objective);
  report["support"] = to_string(options.support);
  report["kappa_lower"] = tp.kappa.lower;
  report["kappa_upper"] = tp.kappa.upper;
  report["targets"] = Json::object();
  for (std::size_t x = 0; x < 4; ++x) {
    report["targets"][kQuadNames[x]] = options.targets[x] ? Json(*options.targets[x]) : Json(nullptr);
  }

  if (options.export_mps) {
    export_mip(tp, options.export_mps->string());
    outcome.matrix.status = TargetStatus::Exported;
    report["status"] = to_string(TargetStatus::Exported);
    report["mps"] = options.export_mps->string();
    return outcome;
  }
  if (options.import_solution) {
    outcome.matrix = import_solution(tp, options.import_solution->string());
  } else {
    if (options.support == SupportMode::Free) {
      throw ConfigError("free support cannot be solved in-process; use --export-mps and --import-solution");
    }
    outcome.matrix = solve_target(tp);
  }
  report["status"] = to_string(outcome.matrix.status);
  if (outcome.matrix.status == TargetStatus::Infeasible) return outcome;
  const WeightedDigraph h = outcome.matrix.as_graph(g);
  report["achieved"] = quad_to_json(outcome.matrix.achieved);
  report["objective_value"] = outcome.matrix.objective;
  report["l1_change"] = (h.weights() - g.weights()).cwiseAbs().sum();
  report["nnz"] = h.nnz();
  if (options.out) write_edge_list_csv(options.out->string(), h);
  return outcome;
}

Json cmd_rewire(const WeightedDigraph& initial, const WeightedDigraph& target,
                const RewireOptions& options) {
  const RewiringRecordList record = sweep(initial, target, {options.reorder});
  const ReplayResult replayed = replay(initial, record, options.stride);
  if (options.out) write_edge_list_csv(options.out->string(), replayed.final_graph);
  if (options.trace_out) {
    std::ofstream out(*options.trace_out);
    if (!out) throw InputError("cannot write " + options.trace_out->string());
    write_trace_csv(out, replayed.trace);
  }
  if (options.record_out) {
    std::ofstream out(*options.record_out);
    if (!out) throw InputError("cannot write " + options.record_out->string());
    write_record_csv(out, record);
  }
  const double deviation = (replayed.final_graph.weights() - target.weights()).cwiseAbs().maxCoeff();
  Json j{{"record_length", record.steps.size()},
         {"reorder", options.reorder},
         {"max_deviation_from_target", deviation},
         {"nnz_initial", initial.nnz()},
         {"nnz_final", replayed.final_graph.nnz()}};
  j["initial"] = quad_to_json(replayed.trace.front().quad);
  j["final"] = quad_to_json(assortativity_all(replayed.final_graph));
  return j;
}

fs::path replicate_dir(const fs::path& out_dir, std::size_t r) {
  return out_dir / ("rep_" + padded_index(r));
}

Json run_replicate(const PipelineConfig& cfg, std::size_t r) {
  const fs::path dir = replicate_dir(cfg.out_dir, r);
  fs::create_directories(dir);
  const std::uint64_t seed = replicate_seed(cfg.seed, r);
  const WeightedDigraph g = cfg.generator.generate(seed);
  write_edge_list_csv((dir / "initial.csv").string(), g);
  write_json(dir / "meta.json", Json{{"replicate", r},
                                     {"seed", seed},
                                     {"config", cfg.generator.to_json()},
                                     {"nodes", g.size()},
                                     {"nnz", g.nnz()},
                                     {"tau", g.total_weight()}});

  Json summary{{"replicate", r}, {"seed", seed}, {"nodes", g.size()}, {"nnz", g.nnz()}};
  const StrengthProfile p = strength_profile(g);
  const AssortativityQuad initial = assortativity_all(g, p);
  summary["initial"] = quad_to_json(initial);
  const KappaBounds kappa = cfg.kappa.value_or(default_kappa(g));

  Json bounds = Json::object();
  AssortativityQuad targets = cfg.targets;
  for (StrengthType a : kStrengthTypes) {
    for (StrengthType b : kStrengthTypes) {
      const std::size_t x = quad_index(a, b);
      if (!initial[x]) {
        bounds[kQuadNames[x]] = "undefined";
        targets[x].reset();
        continue;
      }
      const auto cb = assortativity_bounds(g, a, b, kappa);
      bounds[kQuadNames[x]] = Json{{"lo", cb.lo}, {"hi", cb.hi}, {"initial", *initial[x]}};
      if (targets[x] && cfg.clip_to_bounds > 0.0) {
        targets[x] = std::clamp(*targets[x], cfg.clip_to_bounds * cb.lo, cfg.clip_to_bounds * cb.hi);
      }
    }
  }
  write_json(dir / "bounds.json", bounds);
  summary["targets"] = quad_to_json(targets);

  TargetProblem tp;
  tp.graph = g;
  tp.targets = targets;
  tp.kappa = kappa;
  tp.objective = cfg.objective;
  const TargetMatrix tm = solve_target(tp);
  summary["status"] = to_string(tm.status);
  summary["lp_iterations"] = tm.iterations;
  if (tm.status == TargetStatus::Infeasible) {
    write_json(dir / "summary.json", summary);
    return summary;
  }
  const WeightedDigraph h = tm.as_graph(g);
  write_edge_list_csv((dir / "target.csv").string(), h);
  summary["achieved"] = quad_to_json(tm.achieved);

  const RewiringRecordList record = sweep(g, h, {cfg.reorder});
  const ReplayResult replayed = replay(g, record, cfg.stride);
  {
    std::ofstream out(dir / "trace.csv");
    write_trace_csv(out, replayed.trace);
  }
  {
    std::ofstream out(dir / "record.csv");
    write_record_csv(out, record);
  }
  write_edge_list_csv((dir / "final.csv").string(), replayed.final_graph);
  const WeightedDigraph& f = replayed.final_graph;
  summary["record_length"] = record.steps.size();
  summary["final"] = quad_to_json(assortativity_all(f));
  summary["max_out_strength_gap"] = (f.out_strength() - g.out_strength()).cwiseAbs().maxCoeff();
  summary["max_in_strength_gap"] = (f.in_strength() - g.in_strength()).cwiseAbs().maxCoeff();
  summary["nnz_final"] = f.nnz();
  summary["l1_change"] = (f.weights() - g.weights()).cwiseAbs().sum();
  write_json(dir / "summary.json", summary);
  return summary;
}

Json cmd_pipeline(const PipelineConfig& cfg) {
  if (cfg.replicates == 0) throw ConfigError("replicate count must be at least 1");
  if (cfg.stride == 0) throw ConfigError("trace stride must be at least 1");
  fs::create_directories(cfg.out_dir);
  run_replicates<int>(cfg.replicates, cfg.jobs, [&](std::size_t r) {
    if (!fs::exists(replicate_dir(cfg.out_dir, r) / "summary.json")) run_replicate(cfg, r);
    return 0;
  });
  return aggregate(cfg.out_dir, cfg.replicates);
}

namespace {

std::vector<AssortativityQuad> read_trace_quads(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<AssortativityQuad> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    while (fields.size() < 10) fields.emplace_back();
    AssortativityQuad q;
    for (std::size_t x = 0; x < 4; ++x) {
      const std::string& f = fields[6 + x];
      if (f != "undefined" && !f.empty()) q[x] = std::stod(f);
    }
    rows.push_back(q);
  }
  return rows;
}

std::optional<double> json_value(const Json& j) {
  if (j.is_number()) return j.get<double>();
  return std::nullopt;
}

}  // namespace

Json aggregate(const fs::path& out_dir, std::size_t replicates) {
  const fs::path agg = out_dir / "aggregate";
  fs::create_directories(agg);

  std::vector<Json> summaries;
  std::vector<std::vector<AssortativityQuad>> traces;
  std::vector<std::vector<double>> initial_weights;
  std::vector<std::vector<double>> final_weights;
  std::ofstream bounds_csv(agg / "bounds.csv");
  bounds_csv << "replicate,coefficient,lo,hi,initial\n";
  for (std::size_t r = 0; r < replicates; ++r) {
    const fs::path dir = replicate_dir(out_dir, r);
    summaries.push_back(read_json(dir / "summary.json"));
    const Json bounds = read_json(dir / "bounds.json");
    for (const char* name : kQuadNames) {
      const Json& b = bounds.at(name);
      if (!b.is_object()) continue;
      bounds_csv << r << ',' << name << ',' << format_double(b.at("lo").get<double>()) << ','
                 << format_double(b.at("hi").get<double>()) << ','
                 << format_double(b.at("initial").get<double>()) << '\n';
    }
    initial_weights.push_back(edge_weights(load_graph(dir / "initial.csv")));
    if (fs::exists(dir / "trace.csv")) {
      traces.push_back(read_trace_quads(dir / "trace.csv"));
      final_weights.push_back(edge_weights(load_graph(dir / "final.csv")));
    }
  }

  // Mean trace; shorter traces are padded with their final values.
  std::size_t rows = 0;
  for (const auto& t : traces) rows = std::max(rows, t.size());
  {
    std::ofstream out(agg / "mean_trace.csv");
    out << "row,r11,r12,r21,r22,padded\n";
    for (std::size_t t = 0; t < rows; ++t) {
      std::array<double, 4> sum{};
      std::array<std::size_t, 4> count{};
      std::size_t padded = 0;
      for (const auto& trace : traces) {
        if (t >= trace.size()) ++padded;
        const auto& q = trace[std::min(t, trace.size() - 1)];
        for (std::size_t x = 0; x < 4; ++x) {
          if (q[x]) {
            sum[x] += *q[x];
            ++count[x];
          }
        }
      }
      out << t;
      for (std::size_t x = 0; x < 4; ++x) {
        out << ',';
        if (count[x]) out << format_double(sum[x] / static_cast<double>(count[x]));
        else out << "undefined";
      }
      out << ',' << padded << '\n';
    }
  }

  double max_weight = 0.0;
  std::vector<double> all_initial;
  std::vector<double> all_final;
  for (const auto& w : initial_weights) all_initial.insert(all_initial.end(), w.begin(), w.end());
  for (const auto& w : final_weights) all_final.insert(all_final.end(), w.begin(), w.end());
  for (double w : all_initial) max_weight = std::max(max_weight, w);
  for (double w : all_final) max_weight = std::max(max_weight, w);
  constexpr std::size_t kBins = 64;
  if (max_weight > 0.0) {
    const auto hi = weight_histogram(all_initial, max_weight, kBins);
    const auto hf = weight_histogram(all_final, max_weight, kBins);
    std::ofstream out(agg / "weight_histogram.csv");
    out << "bin_lo,bin_hi,initial,final\n";
    for (std::size_t b = 0; b < kBins; ++b) {
      out << format_double(max_weight * static_cast<double>(b) / kBins) << ','
          << format_double(max_weight * static_cast<double>(b + 1) / kBins) << ','
          << format_double(hi[b]) << ',' << format_double(hf[b]) << '\n';
    }
  }

  std::size_t optimal = 0;
  std::vector<double> lengths;
  std::array<double, 4> final_sum{};
  std::array<std::size_t, 4> final_count{};
  for (const auto& s : summaries) {
    if (s.at("status") != "optimal") continue;
    ++optimal;
    lengths.push_back(s.at("record_length").get<double>());
    for (std::size_t x = 0; x < 4; ++x) {
      if (auto v = json_value(s.at("final").at(kQuadNames[x]))) {
        final_sum[x] += *v;
        ++final_count[x];
      }
    }
  }
  Json result{{"replicates", replicates},
              {"optimal", optimal},
              {"infeasible", replicates - optimal},
              {"mean_trace_rows", rows}};
  if (!lengths.empty()) {
    std::sort(lengths.begin(), lengths.end());
    const std::size_t m = lengths.size();
    result["median_record_length"] = m % 2 ? lengths[m / 2] : 0.5 * (lengths[m / 2 - 1] + lengths[m / 2]);
    result["max_record_length"] = lengths.back();
  }
  Json mean_final = Json::object();
  for (std::size_t x = 0; x < 4; ++x) {
    if (final_count[x]) mean_final[kQuadNames[x]] = final_sum[x] / static_cast<double>(final_count[x]);
    else mean_final[kQuadNames[x]] = "undefined";
  }
  result["mean_final"] = mean_final;
  write_json(agg / "summary.json", result);
  return result;
}

}  // namespace sspr
