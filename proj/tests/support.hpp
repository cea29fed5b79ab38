#pragma once

// Hand-rolled generators and reference evaluators shared by the tests.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sspr/assortativity.hpp"
#include "sspr/graph.hpp"
#include "sspr/random.hpp"

namespace testing {

using sspr::Matrix;
using sspr::Rng;
using sspr::WeightedDigraph;

inline std::size_t below(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
}

inline std::vector<sspr::Label> iota_labels(std::size_t n) {
  std::vector<sspr::Label> labels(n);
  std::iota(labels.begin(), labels.end(), 0);
  return labels;
}

// Random nonnegative matrix; integer entries in 1..9 or reals in (0.1, 5).
inline Matrix random_weights(Rng& rng, std::size_t n, double density, bool integer) {
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (rng.uniform() >= density) continue;
      w(i, j) = integer ? static_cast<double>(1 + below(rng, 9)) : 0.1 + 4.9 * rng.uniform();
    }
  }
  if (w.sum() == 0.0) w(0, static_cast<Eigen::Index>(n - 1)) = 1.0;
  return w;
}

inline WeightedDigraph random_graph(Rng& rng, std::size_t n, double density, bool integer = false) {
  return WeightedDigraph(random_weights(rng, n, density, integer), iota_labels(n));
}

// Every row and column has weight, so all strengths are positive.
inline WeightedDigraph random_connected_graph(Rng& rng, std::size_t n, double density) {
  Matrix w = random_weights(rng, n, density, false);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const Eigen::Index j = (i + 1) % w.rows();
    if (w(i, j) == 0.0) w(i, j) = 0.5 + rng.uniform();
  }
  return WeightedDigraph(w, iota_labels(n));
}

// Margin-preserving perturbation: repeated transfers (i,j),(k,l) -> (i,l),(k,j)
// never draining a cell below zero.
inline Matrix shuffle_weights(Rng& rng, Matrix w, std::size_t moves, bool integer) {
  const std::size_t n = static_cast<std::size_t>(w.rows());
  for (std::size_t m = 0; m < moves; ++m) {
    const auto i = static_cast<Eigen::Index>(below(rng, n));
    const auto j = static_cast<Eigen::Index>(below(rng, n));
    const auto k = static_cast<Eigen::Index>(below(rng, n));
    const auto l = static_cast<Eigen::Index>(below(rng, n));
    if (i == k || j == l) continue;
    double room = std::min(w(i, j), w(k, l));
    if (room <= 0.0) continue;
    double dw = integer ? std::floor(room * rng.uniform() + 1.0) : room * rng.uniform();
    dw = std::min(dw, room);
    w(i, j) -= dw;
    w(k, l) -= dw;
    w(i, l) += dw;
    w(k, j) += dw;
  }
  return w;
}

// Northwest-corner transport over shuffled row and column orders: a matrix
// with the given margins and typically a different support.
inline Matrix transport_with_margins(Rng& rng, const sspr::Vector& rows, const sspr::Vector& cols) {
  const std::size_t n = static_cast<std::size_t>(rows.size());
  std::vector<std::size_t> rp(n), cp(n);
  std::iota(rp.begin(), rp.end(), 0);
  std::iota(cp.begin(), cp.end(), 0);
  for (std::size_t x = n; x > 1; --x) {
    std::swap(rp[x - 1], rp[below(rng, x)]);
    std::swap(cp[x - 1], cp[below(rng, x)]);
  }
  std::vector<double> r(rows.data(), rows.data() + n), c(cols.data(), cols.data() + n);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::size_t a = 0, b = 0;
  while (a < n && b < n) {
    const double t = std::min(r[rp[a]], c[cp[b]]);
    out(static_cast<Eigen::Index>(rp[a]), static_cast<Eigen::Index>(cp[b])) += t;
    r[rp[a]] -= t;
    c[cp[b]] -= t;
    if (r[rp[a]] <= 1e-12) ++a;
    else ++b;
  }
  return out;
}

// Straight double sum over all node pairs, no shared helpers.
inline double brute_assortativity(const Matrix& w, int a, int b) {
  const Eigen::Index n = w.rows();
  std::vector<double> so(static_cast<std::size_t>(n), 0.0), si(static_cast<std::size_t>(n), 0.0);
  double tau = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      so[static_cast<std::size_t>(i)] += w(i, j);
      si[static_cast<std::size_t>(j)] += w(i, j);
      tau += w(i, j);
    }
  }
  const auto& x = a == 1 ? so : si;
  const auto& y = b == 1 ? so : si;
  double mx = 0.0, my = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      mx += w(i, j) * x[static_cast<std::size_t>(i)];
      my += w(i, j) * y[static_cast<std::size_t>(j)];
    }
  }
  mx /= tau;
  my /= tau;
  double vx = 0.0, vy = 0.0, cov = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dx = x[static_cast<std::size_t>(i)] - mx;
      const double dy = y[static_cast<std::size_t>(j)] - my;
      vx += w(i, j) * dx * dx;
      vy += w(i, j) * dy * dy;
      cov += w(i, j) * dx * dy;
    }
  }
  return cov / tau / std::sqrt(vx / tau) / std::sqrt(vy / tau);
}

}  // namespace testing
