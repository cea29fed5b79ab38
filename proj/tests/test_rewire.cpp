#include <sstream>

#include "doctest.h"
#include "sspr/errors.hpp"
#include "sspr/rewire.hpp"
#include "support.hpp"

using namespace sspr;

namespace {

Matrix worked_psi() {
  Matrix psi(4, 4);
  psi << 0, 0, 0, 0,
         0, 3, -2, -1,
         1, -1, 2, -2,
         -1, -2, 0, 3;
  return psi;
}

// Random margin-matched pair; half the time Lambda gets a fresh support.
std::pair<WeightedDigraph, WeightedDigraph> random_pair(Rng& rng) {
  const std::size_t n = 4 + testing::below(rng, 17);
  const bool integer = rng.uniform() < 0.5;
  const WeightedDigraph w = testing::random_graph(rng, n, 0.2 + 0.6 * rng.uniform(), integer);
  Matrix lambda = rng.uniform() < 0.5
                      ? testing::shuffle_weights(rng, w.weights(), 20 * n, integer)
                      : testing::transport_with_margins(rng, w.out_strength(), w.in_strength());
  return {w, WeightedDigraph(lambda, w.labels())};
}

}  // namespace

TEST_SUITE("rewire") {

TEST_CASE("transfer rule") {
  CHECK(delta_w(3, 2, 0, 0) == 2);
  CHECK(delta_w(1, 3, 0, 0) == 1);
  CHECK(delta_w(-2, 0, 3, 1) == -1);
  CHECK(delta_w(0, 5, -1, -1) == 0);
  CHECK(delta_w(2, -4, 0, 0) == 0);
  CHECK(delta_w(-2, 0, -1, 0) == 0);
}

TEST_CASE("worked example at cell (2,2)") {
  DifferenceMatrix psi(worked_psi());
  std::vector<IndexStep> record;
  rewire_cell(psi, record, 1, 1);
  REQUIRE(record.size() == 2);
  CHECK(record[0] == IndexStep{1, 1, 2, 2, 2.0});
  CHECK(record[1] == IndexStep{1, 1, 3, 3, 1.0});
  Matrix last(4, 4);
  last << 0, 0, 0, 0,
          0, 0, 0, 0,
          1, 1, 0, -2,
          -1, -1, 0, 2;
  CHECK(psi.matrix() == last);

  // Stop after the first partner to see the intermediate matrix.
  Matrix psi1 = worked_psi();
  const double dw = delta_w(psi1(1, 1), psi1(2, 2), psi1(1, 2), psi1(2, 1));
  psi1(1, 1) -= dw, psi1(2, 2) -= dw, psi1(1, 2) += dw, psi1(2, 1) += dw;
  Matrix middle(4, 4);
  middle << 0, 0, 0, 0,
            0, 1, 0, -1,
            1, 1, 0, -2,
            -1, -2, 0, 3;
  CHECK(psi1 == middle);
}

TEST_CASE("a zero cell is a no-op") {
  DifferenceMatrix psi(worked_psi());
  std::vector<IndexStep> record;
  rewire_cell(psi, record, 0, 0);
  CHECK(record.empty());
  CHECK(psi.matrix() == worked_psi());
}

TEST_CASE("negative cells record the mirrored step") {
  Matrix m(2, 2);
  m << -1, 1, 1, -1;
  DifferenceMatrix psi(m);
  std::vector<IndexStep> record;
  rewire_cell(psi, record, 0, 0);
  REQUIRE(record.size() == 1);
  CHECK(record[0] == IndexStep{0, 1, 1, 0, 1.0});
  CHECK(psi.matrix().isZero());
}

TEST_CASE("a cell that cannot be cleared stalls") {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 1.0;  // margins are not zero
  DifferenceMatrix psi(m);
  std::vector<IndexStep> record;
  CHECK_THROWS_AS(rewire_cell(psi, record, 0, 0), StallError);
}

TEST_CASE("random integer difference matrices clear cell by cell") {
  Rng rng(40);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix w = testing::random_weights(rng, 6, 0.7, true);
    const Matrix lambda = testing::shuffle_weights(rng, w, 60, true);
    DifferenceMatrix psi(w - lambda);
    std::vector<IndexStep> record;
    for (std::size_t p = 0; p + 1 < 6; ++p)
      for (std::size_t q = 0; q + 1 < 6; ++q) rewire_cell(psi, record, p, q);
    CHECK(psi.matrix().isZero());  // exact in integer arithmetic
  }
}

TEST_CASE("embedded example starts with the two worked steps") {
  const Matrix lambda = Matrix::Constant(4, 4, 3.0);
  const WeightedDigraph w(lambda + worked_psi(), {1, 2, 3, 4});
  const RewiringRecordList r = sweep(w, WeightedDigraph(lambda, {1, 2, 3, 4}));
  REQUIRE(r.steps.size() >= 2);
  CHECK(r.steps[0] == RewiringStep{2, 2, 3, 3, 2.0});
  CHECK(r.steps[1] == RewiringStep{2, 2, 4, 4, 1.0});
  CHECK(replay(w, r).final_graph.weights() == lambda);
}

TEST_CASE("identical graphs need no steps") {
  Rng rng(41);
  const WeightedDigraph g = testing::random_graph(rng, 8, 0.5);
  CHECK(sweep(g, g).steps.empty());
  CHECK(sweep(g, g, {true}).steps.empty());
}

TEST_CASE("mismatched inputs are rejected") {
  Rng rng(42);
  const WeightedDigraph g = testing::random_graph(rng, 5, 0.6);
  Matrix off = g.weights();
  off(0, 0) += 1.0;
  CHECK_THROWS_AS(sweep(g, WeightedDigraph(off, g.labels())), InputError);
  CHECK_THROWS_AS(sweep(g, WeightedDigraph(g.weights(), {10, 11, 12, 13, 14})), InputError);
  CHECK_THROWS_AS(sweep(g, testing::random_graph(rng, 4, 0.6)), InputError);
}

TEST_CASE("reorder on ties keeps the identity") {
  Matrix m(3, 3);
  m << 1, -1, 0, -1, 1, 0, 0, 0, 0;
  DifferenceMatrix psi(m);
  reorder(psi, 0);
  CHECK(psi.row_perm() == std::vector<std::size_t>{0, 1, 2});
  CHECK(psi.col_perm() == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("reorder brings a dominant entry to the front") {
  Matrix m = Matrix::Zero(4, 4);
  m(2, 3) = 5, m(2, 1) = -5, m(0, 3) = -5, m(0, 1) = 5;
  m(1, 0) = 0.5, m(1, 2) = -0.5, m(3, 0) = -0.5, m(3, 2) = 0.5;
  m(2, 3) += 1, m(2, 2) -= 1, m(3, 3) -= 1, m(3, 2) += 1;
  DifferenceMatrix psi(m);
  reorder(psi, 0);
  CHECK(psi.row_perm()[0] == 2);
  CHECK(psi.col_perm()[0] == 3);
  CHECK(psi.at(0, 0) == 6.0);
}

TEST_CASE("property: sweeps terminate without overdrawing") {
  Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const auto [w, lambda] = random_pair(rng);
    const bool use_reorder = trial % 2 == 1;
    const RewiringRecordList r = sweep(w, lambda, {use_reorder});
    WeightedDigraph g = w;
    const Vector out0 = w.out_strength(), in0 = w.in_strength();
    bool ok = true;
    for (const auto& s : r.steps) {
      const std::size_t i = g.index_of(s.i), j = g.index_of(s.j), k = g.index_of(s.k), l = g.index_of(s.l);
      ok = ok && s.dw > 0.0 && g.weight(i, j) - s.dw >= -1e-9 && g.weight(k, l) - s.dw >= -1e-9;
      g.apply(s);
      ok = ok && (g.out_strength() - out0).cwiseAbs().maxCoeff() <= 1e-9 &&
           (g.in_strength() - in0).cwiseAbs().maxCoeff() <= 1e-9;
    }
    CHECK(ok);
    CHECK((g.weights() - lambda.weights()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("reordering never changes the destination") {
  Rng rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const auto [w, lambda] = random_pair(rng);
    const Matrix a = replay(w, sweep(w, lambda, {false})).final_graph.weights();
    const Matrix b = replay(w, sweep(w, lambda, {true})).final_graph.weights();
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(replay(w, sweep(w, lambda, {true})).final_graph.nnz() == lambda.nnz());
  }
}

TEST_CASE("replay trace and stride") {
  Rng rng(45);
  const auto [w, lambda] = random_pair(rng);
  const RewiringRecordList r = sweep(w, lambda);
  REQUIRE(r.steps.size() > 10);
  const ReplayResult every = replay(w, r, 1);
  const ReplayResult sparse = replay(w, r, 10);
  CHECK(every.trace.size() == r.steps.size() + 1);
  CHECK(sparse.trace.size() == r.steps.size() / 10 + 1 + (r.steps.size() % 10 != 0));
  CHECK(every.final_graph.weights() == sparse.final_graph.weights());
  CHECK(every.trace.back().step == r.steps.size());
  CHECK(sparse.trace.back().step == r.steps.size());
  CHECK_FALSE(every.trace.front().applied.has_value());
  CHECK(replay(w, RewiringRecordList{}).trace.size() == 1);
}

TEST_CASE("corrupt records name the failing step") {
  Matrix m(2, 2);
  m << 1, 1, 1, 1;
  const WeightedDigraph g(m, {0, 1});
  RewiringRecordList r;
  r.steps = {{0, 0, 1, 1, 0.5}, {0, 0, 1, 1, 0.75}};
  try {
    replay(g, r);
    FAIL("expected corrupt record");
  } catch (const CorruptRecordError& e) {
    CHECK(std::string(e.what()).find("step 2") != std::string::npos);
  }
  r.steps = {{0, 0, 7, 1, 0.5}};
  CHECK_THROWS_AS(replay(g, r), CorruptRecordError);
}

TEST_CASE("record and trace CSV") {
  Rng rng(46);
  const auto [w, lambda] = random_pair(rng);
  const RewiringRecordList r = sweep(w, lambda);
  std::stringstream ss;
  write_record_csv(ss, r);
  CHECK(read_record_csv(ss).steps == r.steps);

  std::stringstream trace;
  write_trace_csv(trace, replay(w, r).trace);
  std::string header, first;
  std::getline(trace, header);
  std::getline(trace, first);
  CHECK(header == "step,i,j,k,l,dw,r11,r12,r21,r22");
  CHECK(first.rfind("0,,,,,,", 0) == 0);

  std::istringstream bad("step,i,j,k,l,dw\n1,0,0,1,1,-2\n");
  CHECK_THROWS_AS(read_record_csv(bad), ParseError);
}

TEST_CASE("incremental trace matches recomputation") {
  Rng rng(47);
  const WeightedDigraph w = testing::random_connected_graph(rng, 30, 0.3);
  const WeightedDigraph lambda(testing::transport_with_margins(rng, w.out_strength(), w.in_strength()),
                               w.labels());
  const RewiringRecordList r = sweep(w, lambda);
  const ReplayResult res = replay(w, r);
  WeightedDigraph g = w;
  double worst = 0.0;
  for (std::size_t s = 0; s < r.steps.size(); ++s) {
    g.apply(r.steps[s]);
    if (s % 25 != 0 && s + 1 != r.steps.size()) continue;
    const auto batch = assortativity_all(g);
    for (std::size_t x = 0; x < 4; ++x) worst = std::max(worst, std::abs(*res.trace[s + 1].quad[x] - *batch[x]));
  }
  CHECK(worst <= 1e-9);
}

}
