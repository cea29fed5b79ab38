#include "sspr/target.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sspr/errors.hpp"

namespace sspr {

const char* to_string(Objective o) {
  switch (o) {
    case Objective::Zero: return "zero";
    case Objective::L1ToW: return "l1";
    case Objective::BoundMin: return "bound-min";
    case Objective::BoundMax: return "bound-max";
  }
  return "?";
}

const char* to_string(SupportMode s) { return s == SupportMode::Fixed ? "fixed" : "free"; }

const char* to_string(TargetStatus s) {
  switch (s) {
    case TargetStatus::Optimal: return "optimal";
    case TargetStatus::Feasible: return "feasible";
    case TargetStatus::Infeasible: return "infeasible";
    case TargetStatus::Exported: return "exported";
  }
  return "?";
}

Objective parse_objective(const std::string& text) {
  if (text == "zero") return Objective::Zero;
  if (text == "l1") return Objective::L1ToW;
  if (text == "bound-min") return Objective::BoundMin;
  if (text == "bound-max") return Objective::BoundMax;
  throw ConfigError("unknown objective '" + text + "' (expected zero or l1)");
}

SupportMode parse_support_mode(const std::string& text) {
  if (text == "fixed") return SupportMode::Fixed;
  if (text == "free") return SupportMode::Free;
  throw ConfigError("unknown support mode '" + text + "' (expected fixed or free)");
}

std::string lambda_name(Label src, Label dst) {
  return "L_" + std::to_string(src) + "_" + std::to_string(dst);
}
std::string indicator_name(Label src, Label dst) {
  return "Z_" + std::to_string(src) + "_" + std::to_string(dst);
}
std::string deviation_name(Label src, Label dst) {
  return "T_" + std::to_string(src) + "_" + std::to_string(dst);
}

KappaBounds default_kappa(const WeightedDigraph& g) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double w = g.weight(i, j);
      if (w > kZeroWeight) {
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
    }
  }
  if (hi == 0.0) throw UndefinedError("graph has no edges; kappa bounds are undefined");
  return {0.5 * lo, 2.0 * hi};
}

LinearizedConstraint linearized_assortativity_constraint(const StrengthProfile& p,
                                                         StrengthType a, StrengthType b,
                                                         double r_star) {
  if (auto reason = undefined_reason(p, a, b)) {
    throw UndefinedError("cannot constrain r(" + std::to_string(type_number(a)) + "," +
                         std::to_string(type_number(b)) + "): " + *reason);
  }
  const std::size_t xa = type_index(a);
  const std::size_t xb = type_index(b);
  const Vector src_dev = p.strength(a).array() - p.src_mean[xa];
  const Vector trg_dev = p.strength(b).array() - p.trg_mean[xb];
  LinearizedConstraint c;
  c.coefficients = src_dev * trg_dev.transpose();
  c.scale = p.tau * p.src_sd[xa] * p.trg_sd[xb];
  c.rhs = r_star * c.scale;
  return c;
}

namespace {

void validate_kappa(const TargetProblem& tp) {
  const auto& k = tp.kappa;
  if (!(k.lower > 0.0) || !(k.upper >= k.lower) || !std::isfinite(k.upper)) {
    throw ConfigError("kappa bounds need 0 < kappa_L <= kappa_U < inf");
  }
  if (tp.support != SupportMode::Fixed) return;
  for (std::size_t i = 0; i < tp.graph.size(); ++i) {
    for (std::size_t j = 0; j < tp.graph.size(); ++j) {
      const double w = tp.graph.weight(i, j);
      if (w > kZeroWeight && (w < k.lower || w > k.upper)) {
        throw ConfigError("kappa bounds [" + format_double(k.lower) + ", " +
                          format_double(k.upper) + "] exclude existing weight " +
                          format_double(w));
      }
    }
  }
}

std::string coefficient_row_name(StrengthType a, StrengthType b) {
  return "R" + std::to_string(type_number(a)) + std::to_string(type_number(b));
}

struct CellVars {
  std::vector<std::vector<std::ptrdiff_t>> lambda;  // -1 when the cell has no variable
};

}  // namespace

TargetLp build_problem(const TargetProblem& tp) {
  if (tp.support != SupportMode::Fixed) {
    throw ConfigError("free support needs a MIP solver; use build_mip / export");
  }
  validate_kappa(tp);
  const WeightedDigraph& g = tp.graph;
  const StrengthProfile profile = strength_profile(g);
  const auto& labels = g.labels();
  const std::size_t n = g.size();

  TargetLp out;
  LinearProgram& lp = out.lp;
  lp.name = "SSPR_TARGET";
  std::vector<std::vector<std::ptrdiff_t>> var(n, std::vector<std::ptrdiff_t>(n, -1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (g.weight(i, j) <= kZeroWeight) continue;
      var[i][j] = static_cast<std::ptrdiff_t>(
          lp.add_variable(lambda_name(labels[i], labels[j]), tp.kappa.lower, tp.kappa.upper, 0.0));
      out.cells.emplace_back(i, j);
    }
  }
  const std::size_t num_lambda = out.cells.size();

  // Margin rows. Rows without support variables have zero strength and are
  // satisfied trivially; one column row is implied by the others.
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<std::size_t, double>> coeffs;
    for (std::size_t j = 0; j < n; ++j) {
      if (var[i][j] >= 0) coeffs.emplace_back(static_cast<std::size_t>(var[i][j]), 1.0);
    }
    if (!coeffs.empty()) {
      lp.add_row("OUT_" + std::to_string(labels[i]), RowSense::Equal, profile.out(static_cast<Eigen::Index>(i)), std::move(coeffs));
    }
  }
  std::size_t last_in_row = lp.num_rows();
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::pair<std::size_t, double>> coeffs;
    for (std::size_t i = 0; i < n; ++i) {
      if (var[i][j] >= 0) coeffs.emplace_back(static_cast<std::size_t>(var[i][j]), 1.0);
    }
    if (!coeffs.empty()) {
      last_in_row = lp.add_row("IN_" + std::to_string(labels[j]), RowSense::Equal, profile.in(static_cast<Eigen::Index>(j)), std::move(coeffs));
    }
  }
  if (last_in_row < lp.num_rows()) lp.rows.erase(lp.rows.begin() + static_cast<std::ptrdiff_t>(last_in_row));

  const bool bounding = tp.objective == Objective::BoundMin || tp.objective == Objective::BoundMax;
  if (!bounding) {
    for (StrengthType a : kStrengthTypes) {
      for (StrengthType b : kStrengthTypes) {
        const auto& target = tp.targets(a, b);
        if (!target) continue;
        const auto c = linearized_assortativity_constraint(profile, a, b, *target);
        std::vector<std::pair<std::size_t, double>> coeffs;
        for (std::size_t k = 0; k < num_lambda; ++k) {
          const auto [i, j] = out.cells[k];
          coeffs.emplace_back(k, c.coefficients(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / c.scale);
        }
        lp.add_row(coefficient_row_name(a, b), RowSense::Equal, *target, std::move(coeffs));
      }
    }
  }

  switch (tp.objective) {
    case Objective::Zero:
      break;
    case Objective::L1ToW:
      for (std::size_t k = 0; k < num_lambda; ++k) {
        const auto [i, j] = out.cells[k];
        const double w = g.weight(i, j);
        const std::size_t t = lp.add_variable(deviation_name(labels[i], labels[j]), 0.0, tp.kappa.upper, 1.0);
        lp.add_row("DP_" + std::to_string(labels[i]) + "_" + std::to_string(labels[j]),
                   RowSense::GreaterEqual, -w, {{k, -1.0}, {t, 1.0}});
        lp.add_row("DN_" + std::to_string(labels[i]) + "_" + std::to_string(labels[j]),
                   RowSense::GreaterEqual, w, {{k, 1.0}, {t, 1.0}});
      }
      break;
    case Objective::BoundMin:
    case Objective::BoundMax: {
      const double sign = tp.objective == Objective::BoundMin ? 1.0 : -1.0;
      const auto c = linearized_assortativity_constraint(profile, tp.bound_a, tp.bound_b, 0.0);
      for (std::size_t k = 0; k < num_lambda; ++k) {
        const auto [i, j] = out.cells[k];
        lp.objective[k] = sign * c.coefficients(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / c.scale;
      }
      break;
    }
  }
  return out;
}

LinearProgram build_mip(const TargetProblem& tp) {
  validate_kappa(tp);
  const WeightedDigraph& g = tp.graph;
  const StrengthProfile profile = strength_profile(g);
  const auto& labels = g.labels();
  const std::size_t n = g.size();

  LinearProgram lp;
  lp.name = "SSPR_TARGET";
  auto cell = [n](std::size_t i, std::size_t j) { return i * n + j; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) lp.add_variable(lambda_name(labels[i], labels[j]), 0.0, tp.kappa.upper, 0.0);
  }
  const std::size_t z0 = lp.num_vars();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) lp.add_variable(indicator_name(labels[i], labels[j]), 0.0, 1.0, 0.0, true);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::string suffix = std::to_string(labels[i]) + "_" + std::to_string(labels[j]);
      lp.add_row("UB_" + suffix, RowSense::LessEqual, 0.0, {{cell(i, j), 1.0}, {z0 + cell(i, j), -tp.kappa.upper}});
      lp.add_row("LB_" + suffix, RowSense::GreaterEqual, 0.0, {{cell(i, j), 1.0}, {z0 + cell(i, j), -tp.kappa.lower}});
    }
  }
  {
    std::vector<std::pair<std::size_t, double>> coeffs;
    for (std::size_t c = 0; c < n * n; ++c) coeffs.emplace_back(z0 + c, 1.0);
    lp.add_row("CARD", RowSense::Equal, static_cast<double>(g.nnz()), std::move(coeffs));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<std::size_t, double>> coeffs;
    for (std::size_t j = 0; j < n; ++j) coeffs.emplace_back(cell(i, j), 1.0);
    lp.add_row("OUT_" + std::to_string(labels[i]), RowSense::Equal, profile.out(static_cast<Eigen::Index>(i)), std::move(coeffs));
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::pair<std::size_t, double>> coeffs;
    for (std::size_t i = 0; i < n; ++i) coeffs.emplace_back(cell(i, j), 1.0);
    lp.add_row("IN_" + std::to_string(labels[j]), RowSense::Equal, profile.in(static_cast<Eigen::Index>(j)), std::move(coeffs));
  }
  const bool bounding = tp.objective == Objective::BoundMin || tp.objective == Objective::BoundMax;
  if (!bounding) {
    for (StrengthType a : kStrengthTypes) {
      for (StrengthType b : kStrengthTypes) {
        const auto& target = tp.targets(a, b);
        if (!target) continue;
        const auto c = linearized_assortativity_constraint(profile, a, b, *target);
        std::vector<std::pair<std::size_t, double>> coeffs;
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const double v = c.coefficients(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / c.scale;
            if (v != 0.0) coeffs.emplace_back(cell(i, j), v);
          }
        }
        lp.add_row(coefficient_row_name(a, b), RowSense::Equal, *target, std::move(coeffs));
      }
    }
  }
  if (tp.objective == Objective::L1ToW) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double w = g.weight(i, j);
        const std::size_t t = lp.add_variable(deviation_name(labels[i], labels[j]), 0.0, tp.kappa.upper + w, 1.0);
        const std::string suffix = std::to_string(labels[i]) + "_" + std::to_string(labels[j]);
        lp.add_row("DP_" + suffix, RowSense::GreaterEqual, -w, {{cell(i, j), -1.0}, {t, 1.0}});
        lp.add_row("DN_" + suffix, RowSense::GreaterEqual, w, {{cell(i, j), 1.0}, {t, 1.0}});
      }
    }
  } else if (bounding) {
    const double sign = tp.objective == Objective::BoundMin ? 1.0 : -1.0;
    const auto c = linearized_assortativity_constraint(profile, tp.bound_a, tp.bound_b, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        lp.objective[cell(i, j)] = sign * c.coefficients(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / c.scale;
      }
    }
  }
  return lp;
}

WeightedDigraph TargetMatrix::as_graph(const WeightedDigraph& initial) const {
  Matrix w = lambda.cwiseMax(0.0);
  // Solver residue below the edge threshold is not an edge.
  w = (w.array() > kZeroWeight).select(w, 0.0);
  return WeightedDigraph(std::move(w), initial.labels());
}

std::optional<std::string> verify_target(const WeightedDigraph& initial, const Matrix& lambda,
                                         const AssortativityQuad& targets,
                                         std::optional<KappaBounds> kappa,
                                         const TargetTolerances& tol) {
  const auto n = static_cast<Eigen::Index>(initial.size());
  if (lambda.rows() != n || lambda.cols() != n) return "target matrix has the wrong shape";
  if (!lambda.allFinite()) return "target matrix has non-finite entries";
  const double min_entry = n > 0 ? lambda.minCoeff() : 0.0;
  if (min_entry < -kZeroWeight) {
    return "nonnegativity violated: entry " + format_double(min_entry);
  }
  const Vector row_gap = lambda.rowwise().sum() - initial.out_strength();
  const Vector col_gap = lambda.colwise().sum().transpose() - initial.in_strength();
  const double margin_gap = n > 0 ? std::max(row_gap.cwiseAbs().maxCoeff(), col_gap.cwiseAbs().maxCoeff()) : 0.0;
  if (margin_gap > tol.margin) {
    return "margins violated: max deviation " + format_double(margin_gap);
  }
  const auto lambda_nnz = static_cast<std::size_t>((lambda.array() > kZeroWeight).count());
  if (lambda_nnz != initial.nnz()) {
    return "sparsity violated: nnz " + std::to_string(lambda_nnz) + " != " +
           std::to_string(initial.nnz());
  }
  if (kappa) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = lambda(i, j);
        if (v > kZeroWeight && (v < kappa->lower - tol.kappa || v > kappa->upper + tol.kappa)) {
          return "kappa bounds violated: entry " + format_double(v);
        }
      }
    }
  }
  const Matrix cleaned = (lambda.array() > kZeroWeight).select(lambda, 0.0);
  const WeightedDigraph h(cleaned, initial.labels());
  const StrengthProfile p = strength_profile(h);
  for (StrengthType a : kStrengthTypes) {
    for (StrengthType b : kStrengthTypes) {
      const auto& target = targets(a, b);
      if (!target) continue;
      if (undefined_reason(p, a, b)) return "assortativity undefined for the target";
      const double r = assortativity(h, p, a, b);
      if (std::abs(r - *target) > tol.assortativity) {
        return "assortativity violated: r(" + std::to_string(type_number(a)) + "," +
               std::to_string(type_number(b)) + ") = " + format_double(r) + ", wanted " +
               format_double(*target);
      }
    }
  }
  return std::nullopt;
}

TargetMatrix solve_target(const TargetProblem& tp, const SimplexOptions& options) {
  const TargetLp built = build_problem(tp);
  const LpResult res = solve_lp(built.lp, options);
  TargetMatrix out;
  out.iterations = res.iterations;
  const auto n = static_cast<Eigen::Index>(tp.graph.size());
  out.lambda = Matrix::Zero(n, n);
  if (res.status == LpStatus::Infeasible) {
    out.status = TargetStatus::Infeasible;
    return out;
  }
  for (std::size_t k = 0; k < built.cells.size(); ++k) {
    const auto [i, j] = built.cells[k];
    out.lambda(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = res.x[k];
  }
  out.objective = res.objective;
  if (auto violation = verify_target(tp.graph, out.lambda, tp.targets, tp.kappa)) {
    throw VerificationError("solver answer rejected: " + *violation);
  }
  out.status = TargetStatus::Optimal;
  out.achieved = assortativity_all(out.as_graph(tp.graph));
  return out;
}

CoefficientBounds assortativity_bounds(const WeightedDigraph& g, StrengthType a, StrengthType b,
                                       KappaBounds kappa, SupportMode support,
                                       const SimplexOptions& options) {
  if (support != SupportMode::Fixed) {
    throw ConfigError("free-support bounds need a MIP solver; export the problem instead");
  }
  const StrengthProfile p = strength_profile(g);
  const double r_w = assortativity(g, p, a, b);
  TargetProblem tp;
  tp.graph = g;
  tp.kappa = kappa;
  tp.bound_a = a;
  tp.bound_b = b;
  tp.objective = Objective::BoundMin;
  const LpResult low = solve_lp(build_problem(tp).lp, options);
  tp.objective = Objective::BoundMax;
  const LpResult high = solve_lp(build_problem(tp).lp, options);
  if (low.status != LpStatus::Optimal || high.status != LpStatus::Optimal) {
    throw VerificationError("bounds LP infeasible although the initial graph is feasible");
  }
  // W itself is feasible, so the true optima bracket r_W; the min/max only
  // absorbs solver round-off.
  CoefficientBounds bounds;
  bounds.lo = std::clamp(std::min(low.objective, r_w), -1.0, 1.0);
  bounds.hi = std::clamp(std::max(-high.objective, r_w), -1.0, 1.0);
  return bounds;
}

}  // namespace sspr
