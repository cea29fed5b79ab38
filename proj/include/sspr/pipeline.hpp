#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sspr/assortativity.hpp"
#include "sspr/generators.hpp"
#include "sspr/rewire.hpp"
#include "sspr/target.hpp"

namespace sspr {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

/// Which random model a batch draws from.
struct GeneratorSpec {
  enum class Kind { Er, Pa };
  Kind kind = Kind::Er;
  ErConfig er;
  PaConfig pa;

  WeightedDigraph generate(std::uint64_t seed) const;
  Json to_json() const;
};

/// Seed of replicate r: base + r.
inline std::uint64_t replicate_seed(std::uint64_t base, std::size_t r) { return base + r; }

Json quad_to_json(const AssortativityQuad& q);
/// Parses "r11,r12,r21,r22"; an entry of `none` leaves that coefficient free.
AssortativityQuad parse_targets(const std::string& text);

/// Normalized histogram (fractions) of the weights over `bins` equal bins
/// on [0, max_weight]; values at max_weight land in the last bin.
std::vector<double> weight_histogram(std::span<const double> weights, double max_weight,
                                     std::size_t bins = 64);
double histogram_l1(std::span<const double> a, std::span<const double> b);
/// Positive entries of the adjacency matrix.
std::vector<double> edge_weights(const WeightedDigraph& g);

struct GenerateOptions {
  GeneratorSpec generator;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  fs::path out_dir = ".";
};

/// Writes graph_NNNN.csv and graph_NNNN.json per replicate; returns the
/// edge-list paths.
std::vector<fs::path> cmd_generate(const GenerateOptions& options);

/// Node/edge counts, strength summary and the four coefficients.
Json cmd_measure(const WeightedDigraph& g);

/// Attainable (lo, hi) per coefficient; undefined coefficients are reported
/// as "undefined".
Json cmd_bounds(const WeightedDigraph& g, std::optional<KappaBounds> kappa, SupportMode support);

struct TargetOptions {
  AssortativityQuad targets;
  Objective objective = Objective::Zero;
  std::optional<KappaBounds> kappa;
  SupportMode support = SupportMode::Fixed;
  std::optional<fs::path> out;         // target edge list
  std::optional<fs::path> export_mps;  // write the problem instead of solving
  std::optional<fs::path> import_solution;
};

struct TargetOutcome {
  TargetMatrix matrix;
  Json report;
};

TargetOutcome cmd_target(const WeightedDigraph& g, const TargetOptions& options);

struct RewireOptions {
  bool reorder = true;
  std::size_t stride = 1;
  std::optional<fs::path> out;
  std::optional<fs::path> trace_out;
  std::optional<fs::path> record_out;
};

Json cmd_rewire(const WeightedDigraph& initial, const WeightedDigraph& target,
                const RewireOptions& options);

struct PipelineConfig {
  GeneratorSpec generator;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  fs::path out_dir = "run";
  AssortativityQuad targets;
  /// When positive, each target is clipped into [c * lo, c * hi] of its
  /// replicate's attainable bounds.
  double clip_to_bounds = 0.0;
  Objective objective = Objective::Zero;
  std::optional<KappaBounds> kappa;
  bool reorder = true;
  std::size_t stride = 1;
};

/// Per-replicate directory name: rep_NNNN.
fs::path replicate_dir(const fs::path& out_dir, std::size_t r);

/// Runs generate -> measure -> bounds -> target -> rewire -> trace for one
/// replicate and writes its files; summary.json is written last and marks
/// the replicate complete. Returns the summary.
Json run_replicate(const PipelineConfig& cfg, std::size_t r);

/// Runs every replicate whose summary.json is missing, then aggregates.
Json cmd_pipeline(const PipelineConfig& cfg);

/// Aggregates finished replicate directories into out_dir/aggregate:
/// mean_trace.csv, bounds.csv, weight_histogram.csv and summary.json.
/// Reads only the replicate files.
Json aggregate(const fs::path& out_dir, std::size_t replicates);

void write_json(const fs::path& path, const Json& j);
Json read_json(const fs::path& path);
WeightedDigraph load_graph(const fs::path& path);

}  // namespace sspr
