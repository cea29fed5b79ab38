#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace sspr {

enum class RowSense { Equal, LessEqual, GreaterEqual };

/// Minimize c'x subject to row constraints and lower <= x <= upper.
/// Variables may be flagged integer so the same carrier can describe the
/// free-support MILP for export; solve_lp only accepts continuous problems.
struct LinearProgram {
  struct Row {
    std::string name;
    RowSense sense = RowSense::Equal;
    double rhs = 0.0;
    std::vector<std::pair<std::size_t, double>> coeffs;  // (variable, coefficient)

    friend bool operator==(const Row&, const Row&) = default;
  };

  std::string name = "LP";
  std::vector<std::string> var_names;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> integer;
  std::vector<Row> rows;

  std::size_t num_vars() const noexcept { return objective.size(); }
  std::size_t num_rows() const noexcept { return rows.size(); }

  std::size_t add_variable(std::string var_name, double lo, double up, double cost,
                           bool is_integer = false);
  std::size_t add_row(std::string row_name, RowSense sense, double rhs,
                      std::vector<std::pair<std::size_t, double>> coeffs);

  /// Throws ConfigError on inconsistent dimensions, non-finite bounds,
  /// lower > upper or out-of-range variable references.
  void validate() const;

  double evaluate_objective(const std::vector<double>& x) const;
  /// Largest violation of any row or bound at x.
  double max_violation(const std::vector<double>& x) const;

  friend bool operator==(const LinearProgram&, const LinearProgram&) = default;
};

enum class LpStatus { Optimal, Infeasible };

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t max_iterations = 1'000'000;
  /// Bland's rule on every pivot. Otherwise Dantzig pricing is used and the
  /// solver falls back to Bland after a run of degenerate pivots.
  bool pure_bland = false;
  std::size_t reinvert_every = 200;
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

/// Two-phase bounded-variable primal simplex on a dense tableau. Throws
/// StallError when the iteration cap is exceeded.
LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace sspr
