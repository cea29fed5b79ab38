#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sspr/assortativity.hpp"
#include "sspr/graph.hpp"
#include "sspr/lp.hpp"

namespace sspr {

enum class Objective { Zero, L1ToW, BoundMin, BoundMax };
enum class SupportMode { Fixed, Free };

const char* to_string(Objective o);
const char* to_string(SupportMode s);
Objective parse_objective(const std::string& text);
SupportMode parse_support_mode(const std::string& text);

/// Bounds on every nonzero target weight.
struct KappaBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// 0.5 x smallest and 2 x largest positive weight of the graph.
KappaBounds default_kappa(const WeightedDigraph& g);

struct TargetProblem {
  WeightedDigraph graph;
  AssortativityQuad targets;  // empty entries are left unconstrained
  KappaBounds kappa;
  Objective objective = Objective::Zero;
  /// Coefficient optimized by BoundMin / BoundMax.
  StrengthType bound_a = StrengthType::Out;
  StrengthType bound_b = StrengthType::Out;
  SupportMode support = SupportMode::Fixed;
};

/// sum_ij lambda_ij * coefficients(i, j) == rhs is equivalent to
/// r_Lambda(a, b) == r_star for every Lambda with the profile's margins.
/// coefficients(i, j) is the deviation product
/// (s_i^(a) - mean_src^(a)) * (s_j^(b) - mean_trg^(b)); rhs = r_star * scale
/// with scale = tau * sd_src^(a) * sd_trg^(b).
struct LinearizedConstraint {
  Matrix coefficients;
  double rhs = 0.0;
  double scale = 0.0;
};

/// Throws UndefinedError when either SD is zero.
LinearizedConstraint linearized_assortativity_constraint(const StrengthProfile& p,
                                                         StrengthType a, StrengthType b,
                                                         double r_star);

/// LP over the support of W plus the variable-to-cell map.
///
/// Variables `L_<src>_<dst>` (one per support cell, bounds [kappa.lower,
/// kappa.upper]) come first, followed for L1ToW by `T_<src>_<dst>` with
/// T >= |L - w|. Rows `OUT_<v>` / `IN_<v>` fix the margins (empty rows and
/// one redundant IN row are dropped), `R<a><b>` rows fix the requested
/// coefficients, scaled so their right-hand side is r*(a, b) itself.
struct TargetLp {
  LinearProgram lp;
  std::vector<std::pair<std::size_t, std::size_t>> cells;  // lambda variable k -> (i, j)
};

/// Fixed-support LP. Throws ConfigError for Free support (use build_mip) or
/// kappa bounds that exclude existing weights.
TargetLp build_problem(const TargetProblem& tp);

/// Full mixed-integer program for free support: every cell gets L (and T for
/// L1ToW) plus a binary `Z_<src>_<dst>` indicator, linked by big-M rows
/// `UB_*` (L <= kappa_U Z) and `LB_*` (L >= kappa_L Z); `CARD` fixes the
/// number of nonzero cells to nnz(W).
LinearProgram build_mip(const TargetProblem& tp);

enum class TargetStatus { Optimal, Feasible, Infeasible, Exported };
const char* to_string(TargetStatus s);

struct TargetMatrix {
  Matrix lambda;
  TargetStatus status = TargetStatus::Infeasible;
  AssortativityQuad achieved;
  double objective = 0.0;
  std::size_t iterations = 0;

  /// Lambda as a graph on the initial graph's labels.
  WeightedDigraph as_graph(const WeightedDigraph& initial) const;
};

struct TargetTolerances {
  double margin = 1e-7;
  double assortativity = 1e-6;
  double kappa = 1e-7;
};

/// Independent check of the four target conditions (nonnegativity, margins,
/// sparsity, assortativity) plus optional kappa bounds on nonzero entries.
/// Returns a description of the first violated condition, if any.
std::optional<std::string> verify_target(const WeightedDigraph& initial, const Matrix& lambda,
                                         const AssortativityQuad& targets,
                                         std::optional<KappaBounds> kappa,
                                         const TargetTolerances& tol = {});

/// Solves the fixed-support problem. Returns status Infeasible when the LP
/// is; throws VerificationError if a solver answer fails verify_target.
TargetMatrix solve_target(const TargetProblem& tp, const SimplexOptions& options = {});

struct CoefficientBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Attainable range of r(a, b) over the fixed-support feasible set.
/// Throws UndefinedError for zero SDs and ConfigError for Free support.
CoefficientBounds assortativity_bounds(const WeightedDigraph& g, StrengthType a, StrengthType b,
                                       KappaBounds kappa, SupportMode support = SupportMode::Fixed,
                                       const SimplexOptions& options = {});

/// Variable / row name helpers shared with the MPS exporter.
std::string lambda_name(Label src, Label dst);
std::string indicator_name(Label src, Label dst);
std::string deviation_name(Label src, Label dst);

}  // namespace sspr
