#include "sspr/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "sspr/errors.hpp"

namespace sspr {

std::size_t LinearProgram::add_variable(std::string var_name, double lo, double up, double cost,
                                        bool is_integer) {
  var_names.push_back(std::move(var_name));
  lower.push_back(lo);
  upper.push_back(up);
  objective.push_back(cost);
  integer.push_back(is_integer);
  return objective.size() - 1;
}

std::size_t LinearProgram::add_row(std::string row_name, RowSense sense, double rhs,
                                   std::vector<std::pair<std::size_t, double>> coeffs) {
  // Canonical form: ascending variable index, duplicates merged.
  std::sort(coeffs.begin(), coeffs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::size_t, double>> merged;
  for (const auto& [j, a] : coeffs) {
    if (!merged.empty() && merged.back().first == j) {
      merged.back().second += a;
    } else {
      merged.emplace_back(j, a);
    }
  }
  coeffs = std::move(merged);
  rows.push_back({std::move(row_name), sense, rhs, std::move(coeffs)});
  return rows.size() - 1;
}

void LinearProgram::validate() const {
  const std::size_t n = objective.size();
  if (lower.size() != n || upper.size() != n || var_names.size() != n || integer.size() != n) {
    throw ConfigError("linear program: inconsistent variable dimensions");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j])) {
      throw ConfigError("linear program: variable " + var_names[j] + " has a non-finite bound");
    }
    if (lower[j] > upper[j]) {
      throw ConfigError("linear program: variable " + var_names[j] + " has lower > upper");
    }
    if (!std::isfinite(objective[j])) {
      throw ConfigError("linear program: non-finite cost on " + var_names[j]);
    }
  }
  for (const auto& row : rows) {
    if (!std::isfinite(row.rhs)) throw ConfigError("linear program: non-finite rhs in " + row.name);
    for (auto [j, a] : row.coeffs) {
      if (j >= n) throw ConfigError("linear program: row " + row.name + " references a missing variable");
      if (!std::isfinite(a)) throw ConfigError("linear program: non-finite coefficient in " + row.name);
    }
  }
}

double LinearProgram::evaluate_objective(const std::vector<double>& x) const {
  double total = 0.0;
  for (std::size_t j = 0; j < objective.size(); ++j) total += objective[j] * x[j];
  return total;
}

double LinearProgram::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < num_vars(); ++j) {
    worst = std::max({worst, lower[j] - x[j], x[j] - upper[j]});
  }
  for (const auto& row : rows) {
    double lhs = 0.0;
    for (auto [j, a] : row.coeffs) lhs += a * x[j];
    const double gap = lhs - row.rhs;
    switch (row.sense) {
      case RowSense::Equal: worst = std::max(worst, std::abs(gap)); break;
      case RowSense::LessEqual: worst = std::max(worst, gap); break;
      case RowSense::GreaterEqual: worst = std::max(worst, -gap); break;
    }
  }
  return worst;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState : unsigned char { Basic, AtLower, AtUpper };

// Columns are laid out as [structural | slack | artificial]. Slacks turn
// inequality rows into equalities; one artificial per row seeds phase one.
class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const SimplexOptions& options)
      : options_(options), num_structural_(lp.num_vars()) {
    const auto m = static_cast<Eigen::Index>(lp.num_rows());
    std::size_t slacks = 0;
    for (const auto& row : lp.rows) slacks += row.sense != RowSense::Equal;
    num_slack_ = slacks;
    num_cols_ = num_structural_ + num_slack_ + lp.num_rows();
    const auto N = static_cast<Eigen::Index>(num_cols_);

    A_ = Eigen::MatrixXd::Zero(m, N);
    b_ = Eigen::VectorXd(m);
    lo_.assign(num_cols_, 0.0);
    up_.assign(num_cols_, kInf);
    cost_.assign(num_cols_, 0.0);
    state_.assign(num_cols_, VarState::AtLower);
    for (std::size_t j = 0; j < num_structural_; ++j) {
      lo_[j] = lp.lower[j];
      up_[j] = lp.upper[j];
      cost_[j] = lp.objective[j];
    }

    std::size_t slack = num_structural_;
    basis_.assign(lp.num_rows(), 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& row = lp.rows[static_cast<std::size_t>(i)];
      for (auto [j, a] : row.coeffs) A_(i, static_cast<Eigen::Index>(j)) += a;
      b_(i) = row.rhs;
      double residual = row.rhs;
      for (std::size_t j = 0; j < num_structural_; ++j) residual -= A_(i, static_cast<Eigen::Index>(j)) * lo_[j];

      const std::size_t art = num_structural_ + num_slack_ + static_cast<std::size_t>(i);
      bool slack_basic = false;
      if (row.sense != RowSense::Equal) {
        const double coef = row.sense == RowSense::LessEqual ? 1.0 : -1.0;
        A_(i, static_cast<Eigen::Index>(slack)) = coef;
        if (residual / coef >= 0.0) {
          basis_[static_cast<std::size_t>(i)] = slack;
          state_[slack] = VarState::Basic;
          slack_basic = true;
        }
        ++slack;
      }
      A_(i, static_cast<Eigen::Index>(art)) = residual >= 0.0 ? 1.0 : -1.0;
      if (slack_basic) {
        up_[art] = 0.0;  // never needed
      } else {
        basis_[static_cast<std::size_t>(i)] = art;
        state_[art] = VarState::Basic;
      }
    }
  }

  LpResult solve() {
    LpResult result;
    reinvert();
    // Phase one: minimize the sum of artificials.
    std::vector<double> phase1(num_cols_, 0.0);
    for (std::size_t j = first_artificial(); j < num_cols_; ++j) phase1[j] = 1.0;
    run(phase1);
    double infeasibility = 0.0;
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      if (is_artificial(basis_[r])) infeasibility = std::max(infeasibility, x_basic_(static_cast<Eigen::Index>(r)));
    }
    result.iterations = iterations_;
    if (infeasibility > options_.feasibility_tol) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    drive_out_artificials();
    for (std::size_t j = first_artificial(); j < num_cols_; ++j) {
      up_[j] = 0.0;
      if (state_[j] != VarState::Basic) state_[j] = VarState::AtLower;
    }
    run(cost_);
    reinvert();

    result.status = LpStatus::Optimal;
    result.iterations = iterations_;
    result.x.assign(num_structural_, 0.0);
    for (std::size_t j = 0; j < num_structural_; ++j) {
      if (state_[j] != VarState::Basic) result.x[j] = nonbasic_value(j);
    }
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      if (basis_[r] < num_structural_) result.x[basis_[r]] = x_basic_(static_cast<Eigen::Index>(r));
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < num_structural_; ++j) obj += cost_[j] * result.x[j];
    result.objective = obj;
    return result;
  }

 private:
  std::size_t first_artificial() const { return num_structural_ + num_slack_; }
  bool is_artificial(std::size_t j) const { return j >= first_artificial(); }
  double nonbasic_value(std::size_t j) const {
    return state_[j] == VarState::AtUpper ? up_[j] : lo_[j];
  }

  // Rebuild the tableau, basic values and reduced costs from the original
  // matrix to shed accumulated round-off.
  void reinvert() {
    const auto m = static_cast<Eigen::Index>(basis_.size());
    Eigen::MatrixXd B(m, m);
    for (Eigen::Index r = 0; r < m; ++r) B.col(r) = A_.col(static_cast<Eigen::Index>(basis_[static_cast<std::size_t>(r)]));
    Eigen::VectorXd rhs = b_;
    for (std::size_t j = 0; j < num_cols_; ++j) {
      if (state_[j] == VarState::Basic) continue;
      const double v = nonbasic_value(j);
      if (v != 0.0) rhs -= v * A_.col(static_cast<Eigen::Index>(j));
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    T_ = lu.solve(A_);
    x_basic_ = lu.solve(rhs);
    since_reinvert_ = 0;
  }

  void compute_reduced_costs(const std::vector<double>& cost) {
    Eigen::VectorXd cb(static_cast<Eigen::Index>(basis_.size()));
    for (std::size_t r = 0; r < basis_.size(); ++r) cb(static_cast<Eigen::Index>(r)) = cost[basis_[r]];
    Eigen::Map<const Eigen::VectorXd> c(cost.data(), static_cast<Eigen::Index>(cost.size()));
    d_ = c - T_.transpose() * cb;
  }

  void pivot(Eigen::Index r, Eigen::Index q) {
    T_.row(r) /= T_(r, q);
    Eigen::RowVectorXd pivot_row = T_.row(r);
    Eigen::VectorXd column = T_.col(q);
    column(r) = 0.0;
    T_.noalias() -= column * pivot_row;
    d_ -= d_(q) * pivot_row.transpose();
  }

  void run(const std::vector<double>& cost) {
    compute_reduced_costs(cost);
    std::size_t degenerate_run = 0;
    for (;;) {
      if (iterations_ >= options_.max_iterations) {
        throw StallError("simplex exceeded " + std::to_string(options_.max_iterations) + " iterations");
      }
      if (since_reinvert_ >= options_.reinvert_every) {
        reinvert();
        compute_reduced_costs(cost);
      }
      const bool bland = options_.pure_bland || degenerate_run > 50;

      // Pricing.
      Eigen::Index q = -1;
      double best = 0.0;
      for (std::size_t j = 0; j < num_cols_; ++j) {
        if (state_[j] == VarState::Basic || lo_[j] == up_[j]) continue;
        const double dj = d_(static_cast<Eigen::Index>(j));
        const bool improving = (state_[j] == VarState::AtLower && dj < -options_.optimality_tol) ||
                               (state_[j] == VarState::AtUpper && dj > options_.optimality_tol);
        if (!improving) continue;
        if (bland) {
          q = static_cast<Eigen::Index>(j);
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          q = static_cast<Eigen::Index>(j);
        }
      }
      if (q < 0) return;
      const auto qj = static_cast<std::size_t>(q);
      const double dir = state_[qj] == VarState::AtLower ? 1.0 : -1.0;

      // Ratio test. theta is the step of the entering variable.
      double theta = up_[qj] - lo_[qj];
      Eigen::Index leave = -1;
      bool leave_to_upper = false;
      double leave_pivot = 0.0;
      constexpr double kTie = 1e-12;
      for (Eigen::Index i = 0; i < T_.rows(); ++i) {
        const double a = T_(i, q);
        if (std::abs(a) <= options_.pivot_tol) continue;
        const double rate = -dir * a;
        const std::size_t bj = basis_[static_cast<std::size_t>(i)];
        double limit = 0.0;
        bool to_upper = false;
        if (rate < 0.0) {
          limit = (x_basic_(i) - lo_[bj]) / -rate;
        } else {
          if (!std::isfinite(up_[bj])) continue;
          limit = (up_[bj] - x_basic_(i)) / rate;
          to_upper = true;
        }
        limit = std::max(limit, 0.0);
        bool take = limit < theta - kTie;
        if (!take && leave >= 0 && std::abs(limit - theta) <= kTie) {
          take = bland ? bj < basis_[static_cast<std::size_t>(leave)]
                       : std::abs(a) > std::abs(leave_pivot);
        }
        if (take) {
          theta = limit;
          leave = i;
          leave_to_upper = to_upper;
          leave_pivot = a;
        }
      }
      if (!std::isfinite(theta)) throw Error("linear program is unbounded");

      degenerate_run = theta <= kTie ? degenerate_run + 1 : 0;
      ++iterations_;
      ++since_reinvert_;
      if (theta > 0.0) x_basic_ -= (dir * theta) * T_.col(q);
      if (leave < 0) {
        state_[qj] = state_[qj] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
        continue;
      }
      const double entering_value = nonbasic_value(qj) + dir * theta;
      const std::size_t leaving = basis_[static_cast<std::size_t>(leave)];
      state_[leaving] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
      pivot(leave, q);
      x_basic_(leave) = entering_value;
      basis_[static_cast<std::size_t>(leave)] = qj;
      state_[qj] = VarState::Basic;
    }
  }

  // After phase one, swap zero-valued basic artificials for structural or
  // slack columns; rows where no such column exists are redundant and go.
  void drive_out_artificials() {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index r = 0; r < T_.rows(); ++r) {
      const std::size_t bj = basis_[static_cast<std::size_t>(r)];
      if (!is_artificial(bj)) {
        keep.push_back(r);
        continue;
      }
      Eigen::Index best = -1;
      double best_abs = 1e-7;
      for (std::size_t j = 0; j < first_artificial(); ++j) {
        if (state_[j] == VarState::Basic) continue;
        const double a = std::abs(T_(r, static_cast<Eigen::Index>(j)));
        if (a > best_abs) {
          best_abs = a;
          best = static_cast<Eigen::Index>(j);
        }
      }
      if (best < 0) continue;  // redundant row
      const auto bq = static_cast<std::size_t>(best);
      const double value = nonbasic_value(bq);
      state_[bj] = VarState::AtLower;
      pivot(r, best);
      x_basic_(r) = value;
      basis_[static_cast<std::size_t>(r)] = bq;
      state_[bq] = VarState::Basic;
      keep.push_back(r);
    }
    if (static_cast<Eigen::Index>(keep.size()) == T_.rows()) return;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(keep.size()), A_.cols());
    Eigen::VectorXd b(static_cast<Eigen::Index>(keep.size()));
    std::vector<std::size_t> basis;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      const auto r = keep[k];
      A.row(static_cast<Eigen::Index>(k)) = A_.row(r);
      b(static_cast<Eigen::Index>(k)) = b_(r);
      basis.push_back(basis_[static_cast<std::size_t>(r)]);
    }
    for (Eigen::Index r = 0; r < T_.rows(); ++r) {
      if (std::find(keep.begin(), keep.end(), r) == keep.end()) {
        state_[basis_[static_cast<std::size_t>(r)]] = VarState::AtLower;
      }
    }
    A_ = std::move(A);
    b_ = std::move(b);
    basis_ = std::move(basis);
    reinvert();
  }

  SimplexOptions options_;
  std::size_t num_structural_ = 0;
  std::size_t num_slack_ = 0;
  std::size_t num_cols_ = 0;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd T_;
  Eigen::VectorXd x_basic_;
  Eigen::VectorXd d_;
  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<double> cost_;
  std::vector<VarState> state_;
  std::vector<std::size_t> basis_;
  std::size_t iterations_ = 0;
  std::size_t since_reinvert_ = 0;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  lp.validate();
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.integer[j]) {
      throw ConfigError("solve_lp handles continuous problems only; " + lp.var_names[j] +
                        " is integer (export the problem to a MIP solver instead)");
    }
  }
  if (lp.num_rows() == 0) {
    LpResult result;
    result.status = LpStatus::Optimal;
    result.x.resize(lp.num_vars());
    for (std::size_t j = 0; j < lp.num_vars(); ++j) {
      result.x[j] = lp.objective[j] < 0.0 ? lp.upper[j] : lp.lower[j];
    }
    result.objective = lp.evaluate_objective(result.x);
    return result;
  }
  BoundedSimplex simplex(lp, options);
  return simplex.solve();
}

}  // namespace sspr
