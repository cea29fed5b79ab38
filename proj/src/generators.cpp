#include "sspr/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "sspr/errors.hpp"

namespace sspr {

double WeightLaw::draw(Rng& rng) const {
  return kind == Kind::Gamma ? gamma_sampler(shape, scale, rng) : value;
}

void WeightLaw::validate() const {
  if (kind == Kind::Gamma) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
      throw ConfigError("gamma weight law needs shape > 0 and scale > 0");
    }
  } else if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError("constant weight must be positive");
  }
}

void ErConfig::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("edge probability p must lie in [0, 1]");
  weights.validate();
}

WeightedDigraph erdos_renyi(const ErConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto n = static_cast<Eigen::Index>(cfg.n);
  Matrix w = Matrix::Zero(n, n);
  // Row-major draw order fixes the stream layout: one uniform per cell, then
  // one weight draw per edge.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (rng.uniform() < cfg.p) w(i, j) = cfg.weights.draw(rng);
    }
  }
  std::vector<Label> labels(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) labels[i] = static_cast<Label>(i);
  return remove_isolated_nodes(WeightedDigraph(std::move(w), std::move(labels)));
}

void PaConfig::validate() const {
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) {
    throw ConfigError("scenario probabilities must be nonnegative");
  }
  if (std::abs(alpha + beta + gamma - 1.0) > 1e-12) {
    throw ConfigError("alpha + beta + gamma must equal 1");
  }
  if (delta_out < 0.0 || delta_in < 0.0) throw ConfigError("delta offsets must be nonnegative");
  if (seed_graph.empty()) throw ConfigError("seed graph must have at least one edge");
  for (const auto& e : seed_graph) {
    if (!(e.weight > 0.0)) throw ConfigError("seed graph weights must be positive");
  }
  weights.validate();
}

namespace {

// Index drawn with probability proportional to strength[i] + delta.
std::size_t sample_proportional(const std::vector<double>& strength, double delta, Rng& rng,
                                const char* role) {
  double total = 0.0;
  for (double s : strength) total += s + delta;
  if (!(total > 0.0)) {
    throw ConfigError(std::string("degenerate ") + role + " sampling mass (all strengths and delta are zero)");
  }
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < strength.size(); ++i) {
    const double mass = strength[i] + delta;
    if (mass <= 0.0) continue;
    acc += mass;
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace

WeightedDigraph preferential_attachment(const PaConfig& cfg, PaHistory* history) {
  cfg.validate();
  Rng rng(cfg.seed);

  std::map<Label, std::size_t> seed_ids;
  for (const auto& e : cfg.seed_graph) {
    seed_ids.emplace(e.src, 0);
    seed_ids.emplace(e.dst, 0);
  }
  std::vector<Label> labels;
  for (auto& [label, idx] : seed_ids) {
    idx = labels.size();
    labels.push_back(label);
  }
  std::vector<double> out(labels.size(), 0.0);
  std::vector<double> in(labels.size(), 0.0);
  std::map<std::pair<std::size_t, std::size_t>, double> edges;
  for (const auto& e : cfg.seed_graph) {
    const std::size_t s = seed_ids[e.src];
    const std::size_t t = seed_ids[e.dst];
    edges[{s, t}] += e.weight;
    out[s] += e.weight;
    in[t] += e.weight;
  }
  Label next_label = labels.back() + 1;
  auto add_node = [&] {
    labels.push_back(next_label++);
    out.push_back(0.0);
    in.push_back(0.0);
    return labels.size() - 1;
  };

  PaHistory h;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const double u = rng.uniform();
    std::size_t src = 0;
    std::size_t dst = 0;
    if (u < cfg.alpha) {
      dst = sample_proportional(in, cfg.delta_in, rng, "target");
      src = add_node();
      ++h.alpha_steps;
    } else if (u < cfg.alpha + cfg.beta) {
      src = sample_proportional(out, cfg.delta_out, rng, "source");
      dst = sample_proportional(in, cfg.delta_in, rng, "target");
      ++h.beta_steps;
    } else {
      src = sample_proportional(out, cfg.delta_out, rng, "source");
      dst = add_node();
      ++h.gamma_steps;
    }
    const double w = cfg.weights.draw(rng);
    h.drawn_weight += w;
    edges[{src, dst}] += w;
    out[src] += w;
    in[dst] += w;
  }
  if (history) *history = h;

  const auto n = static_cast<Eigen::Index>(labels.size());
  Matrix w = Matrix::Zero(n, n);
  for (const auto& [cell, weight] : edges) {
    w(static_cast<Eigen::Index>(cell.first), static_cast<Eigen::Index>(cell.second)) = weight;
  }
  return WeightedDigraph(std::move(w), std::move(labels));
}

}  // namespace sspr
