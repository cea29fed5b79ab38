#pragma once

#include <cstdint>
#include <vector>

#include "sspr/graph.hpp"
#include "sspr/random.hpp"

namespace sspr {

/// Edge-weight law: gamma(shape, scale) or a fixed constant.
struct WeightLaw {
  enum class Kind { Gamma, Constant };
  Kind kind = Kind::Gamma;
  double shape = 5.0;
  double scale = 0.2;
  double value = 1.0;

  double draw(Rng& rng) const;
  void validate() const;
};

struct ErConfig {
  std::size_t n = 50;
  double p = 0.1;
  WeightLaw weights;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Directed ER graph with self-loops: every ordered pair (i, j), i == j
/// included, carries an edge with probability p. Nodes are labeled 0..n-1;
/// isolated nodes are removed before returning.
WeightedDigraph erdos_renyi(const ErConfig& cfg);

struct PaConfig {
  std::size_t steps = 300;
  double alpha = 0.15;
  double beta = 0.7;
  double gamma = 0.15;
  double delta_out = 1.0;  // offset added to out-strength when picking sources
  double delta_in = 1.0;   // offset added to in-strength when picking targets
  WeightLaw weights;
  std::vector<EdgeRow> seed_graph{{1, 2, 1.0}};
  std::uint64_t seed = 1;

  void validate() const;
};

/// Scenario counts observed while growing a PA graph.
struct PaHistory {
  std::size_t alpha_steps = 0;
  std::size_t beta_steps = 0;
  std::size_t gamma_steps = 0;
  double drawn_weight = 0.0;
};

/// Weighted directed preferential attachment. Per step: with probability
/// alpha a new node links to an existing target, with beta two existing
/// nodes are linked, with gamma an existing source links to a new node.
/// Existing sources are picked with probability proportional to
/// out-strength + delta_out, targets to in-strength + delta_in. Repeated
/// pairs accumulate weight. New nodes get labels max(seed label) + 1, ...
WeightedDigraph preferential_attachment(const PaConfig& cfg, PaHistory* history = nullptr);

}  // namespace sspr
