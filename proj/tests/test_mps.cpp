#include <algorithm>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "sspr/errors.hpp"
#include "sspr/mps.hpp"
#include "sspr/target.hpp"
#include "support.hpp"

using namespace sspr;

namespace {

WeightedDigraph toy() {
  const std::vector<EdgeRow> rows{{0, 0, 1.0}, {0, 1, 2.0}, {1, 2, 1.5}, {1, 3, 1.0},
                                  {2, 0, 2.0}, {2, 3, 0.5}, {3, 1, 1.0}, {3, 2, 2.5}};
  return from_edge_list(rows);
}

TargetProblem toy_problem(Objective objective) {
  TargetProblem tp;
  tp.graph = toy();
  tp.kappa = {0.25, 4.0};
  tp.objective = objective;
  tp.support = SupportMode::Free;
  const double r = assortativity(tp.graph, StrengthType::Out, StrengthType::Out);
  tp.targets(StrengthType::Out, StrengthType::Out) = r + 0.2;
  return tp;
}

// Minimum L1 change over every support of size nnz(W), one LP per support
// built directly from the margins and the linearized coefficient row.
struct EnumerationOptimum {
  double objective = std::numeric_limits<double>::infinity();
  Matrix lambda;
};

EnumerationOptimum enumerate_supports(const TargetProblem& tp) {
  const WeightedDigraph& g = tp.graph;
  const auto n = static_cast<Eigen::Index>(g.size());
  const std::size_t cells = static_cast<std::size_t>(n * n);
  const StrengthProfile p = strength_profile(g);
  const auto c = linearized_assortativity_constraint(p, StrengthType::Out, StrengthType::Out,
                                                     *tp.targets(StrengthType::Out, StrengthType::Out));
  EnumerationOptimum best;
  std::vector<int> pick(cells, 0);
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(g.nnz()), pick.end(), 1);
  do {
    LinearProgram lp;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> at;
    double fixed_cost = 0.0;
    for (std::size_t x = 0; x < cells; ++x) {
      const Eigen::Index i = static_cast<Eigen::Index>(x) / n, j = static_cast<Eigen::Index>(x) % n;
      if (!pick[x]) {
        fixed_cost += g.weights()(i, j);
        continue;
      }
      lp.add_variable("l", tp.kappa.lower, tp.kappa.upper, 0.0);
      at.emplace_back(i, j);
    }
    const std::size_t m = at.size();
    for (std::size_t v = 0; v < m; ++v) {
      const double w = g.weights()(at[v].first, at[v].second);
      const std::size_t t = lp.add_variable("t", 0.0, 10.0, 1.0);
      lp.add_row("p", RowSense::GreaterEqual, -w, {{t, 1.0}, {v, -1.0}});
      lp.add_row("n", RowSense::GreaterEqual, w, {{t, 1.0}, {v, 1.0}});
    }
    for (Eigen::Index v = 0; v < n; ++v) {
      std::vector<std::pair<std::size_t, double>> out, in;
      for (std::size_t x = 0; x < m; ++x) {
        if (at[x].first == v) out.emplace_back(x, 1.0);
        if (at[x].second == v) in.emplace_back(x, 1.0);
      }
      lp.add_row("o", RowSense::Equal, p.out(v), out);
      lp.add_row("i", RowSense::Equal, p.in(v), in);
    }
    std::vector<std::pair<std::size_t, double>> r;
    for (std::size_t x = 0; x < m; ++x) r.emplace_back(x, c.coefficients(at[x].first, at[x].second));
    lp.add_row("r", RowSense::Equal, c.rhs, r);
    // Skip supports that leave a node's strength without a cell.
    bool coverable = true;
    for (const auto& row : lp.rows)
      if (row.coeffs.empty() && row.rhs != 0.0) coverable = false;
    if (!coverable) continue;
    const LpResult res = solve_lp(lp);
    if (res.status != LpStatus::Optimal || res.objective + fixed_cost >= best.objective) continue;
    best.objective = res.objective + fixed_cost;
    best.lambda = Matrix::Zero(n, n);
    for (std::size_t x = 0; x < m; ++x) best.lambda(at[x].first, at[x].second) = res.x[x];
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace

TEST_SUITE("mps") {

TEST_CASE("round trip of the free-support program") {
  for (Objective o : {Objective::Zero, Objective::L1ToW}) {
    const LinearProgram mip = build_mip(toy_problem(o));
    std::stringstream ss;
    write_mps(ss, mip);
    const LinearProgram back = read_mps(ss);
    CHECK(back == mip);
  }
}

TEST_CASE("round trip of the fixed-support program") {
  TargetProblem tp = toy_problem(Objective::L1ToW);
  tp.support = SupportMode::Fixed;
  tp.targets = assortativity_all(tp.graph);
  const LinearProgram lp = build_problem(tp).lp;
  std::stringstream ss;
  write_mps(ss, lp);
  CHECK(read_mps(ss) == lp);
}

TEST_CASE("layout keeps section keywords and integer markers") {
  std::stringstream ss;
  write_mps(ss, build_mip(toy_problem(Objective::Zero)));
  const std::string text = ss.str();
  for (const char* key : {"NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA", "'INTORG'", "'INTEND'", " BV "}) {
    CHECK(text.find(key) != std::string::npos);
  }
  CHECK(text.find("CARD") != std::string::npos);
  CHECK(text.find("Z_0_1") != std::string::npos);
}

TEST_CASE("the program has the documented variables and rows") {
  const LinearProgram mip = build_mip(toy_problem(Objective::L1ToW));
  const std::size_t cells = 16;
  CHECK(mip.num_vars() == 3 * cells);  // L, Z and T per cell
  CHECK(std::count(mip.integer.begin(), mip.integer.end(), true) == static_cast<long>(cells));
  const auto card = std::find_if(mip.rows.begin(), mip.rows.end(), [](const auto& r) { return r.name == "CARD"; });
  REQUIRE(card != mip.rows.end());
  CHECK(card->rhs == 8.0);
}

TEST_CASE("malformed MPS is rejected") {
  std::istringstream bad("NAME x\nROWS\n N OBJ\nCOLUMNS\n X1 NOPE 1\nENDATA\n");
  CHECK_THROWS_AS(read_mps(bad), InputError);
}

TEST_CASE("solution files") {
  std::istringstream in("# solver output\nL_0_1 1.5\n\nZ_0_1 1\n");
  const auto sol = read_solution(in);
  CHECK(sol.size() == 2);
  CHECK(sol.at("L_0_1") == 1.5);
  std::istringstream bad("L_0_1 abc\n");
  CHECK_THROWS_AS(read_solution(bad), ParseError);
}

TEST_CASE("imported solutions are re-verified") {
  Matrix w(3, 3);
  w << 1, 1, 0, 1, 0, 1, 0, 1, 1;
  TargetProblem tp;
  tp.graph = WeightedDigraph(w, {0, 1, 2});
  tp.kappa = {0.1, 4.0};
  tp.support = SupportMode::Free;

  std::stringstream same;
  for (const auto& e : to_edge_list(tp.graph)) same << lambda_name(e.src, e.dst) << ' ' << e.weight << '\n';
  CHECK(import_solution(tp, same).status == TargetStatus::Feasible);

  // Uniform 2/3 keeps every margin but fills all nine cells.
  std::stringstream dense;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) dense << lambda_name(i, j) << ' ' << format_double(2.0 / 3.0) << '\n';
  try {
    import_solution(tp, dense);
    FAIL("expected rejection");
  } catch (const VerificationError& e) {
    CHECK(std::string(e.what()).find("sparsity") != std::string::npos);
  }

  std::stringstream unknown("L_0_0 1\nL_7_7 1\n");
  CHECK_THROWS_AS(import_solution(tp, unknown), Error);
}

TEST_CASE("four-node program: enumeration optimum is feasible for the exported MILP") {
  const TargetProblem tp = toy_problem(Objective::L1ToW);
  const EnumerationOptimum best = enumerate_supports(tp);
  REQUIRE(best.objective < std::numeric_limits<double>::infinity());
  // Same enumeration run through HiGHS.
  CHECK(best.objective == doctest::Approx(3.0518387639440374).epsilon(1e-9));

  // Solve the exported file itself the same way: fix each Z pattern, relax.
  std::stringstream ss;
  write_mps(ss, build_mip(tp));
  const LinearProgram mip = read_mps(ss);
  std::vector<std::size_t> z;
  for (std::size_t v = 0; v < mip.num_vars(); ++v)
    if (mip.integer[v]) z.push_back(v);
  REQUIRE(z.size() == 16);
  double file_best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(16, 0);
  std::fill(pick.end() - 8, pick.end(), 1);
  do {
    LinearProgram fixed = mip;
    for (std::size_t x = 0; x < z.size(); ++x) {
      fixed.lower[z[x]] = fixed.upper[z[x]] = pick[x];
      fixed.integer[z[x]] = false;
    }
    const LpResult r = solve_lp(fixed);
    if (r.status == LpStatus::Optimal) file_best = std::min(file_best, r.objective);
  } while (std::next_permutation(pick.begin(), pick.end()));
  CHECK(file_best == doctest::Approx(best.objective).epsilon(1e-7));

  // Import the enumeration optimum as if an external solver produced it.
  std::stringstream sol;
  sol << "# objective " << format_double(best.objective) << '\n';
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      if (best.lambda(i, j) > 0.0) sol << lambda_name(i, j) << ' ' << format_double(best.lambda(i, j)) << '\n';
  const TargetMatrix t = import_solution(tp, sol);
  CHECK(t.status == TargetStatus::Feasible);
  CHECK(t.objective == doctest::Approx(best.objective).epsilon(1e-9));
  CHECK(std::abs(*t.achieved(StrengthType::Out, StrengthType::Out) -
                 *tp.targets(StrengthType::Out, StrengthType::Out)) <= 1e-6);
}

}
