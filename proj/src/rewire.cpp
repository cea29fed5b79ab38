#include "sspr/rewire.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "sspr/errors.hpp"

namespace sspr {

double delta_w(double psi_ij, double psi_kl, double psi_il, double psi_kj) {
  if (psi_ij > 0.0) return std::min(psi_ij, std::max(psi_kl, 0.0));
  if (psi_ij < 0.0) return std::max({psi_ij, std::min(0.0, -psi_il), std::min(0.0, -psi_kj)});
  return 0.0;
}

DifferenceMatrix::DifferenceMatrix(Matrix psi) : psi_(std::move(psi)) {
  if (psi_.rows() != psi_.cols()) throw InputError("difference matrix must be square");
  row_perm_.resize(static_cast<std::size_t>(psi_.rows()));
  std::iota(row_perm_.begin(), row_perm_.end(), std::size_t{0});
  col_perm_ = row_perm_;
}

namespace {

// Transfers smaller than this are round-off, not rewiring.
constexpr double kNegligibleTransfer = 1e-12;

}  // namespace

void rewire_cell(DifferenceMatrix& psi, std::vector<IndexStep>& record, std::size_t p,
                 std::size_t q) {
  const std::size_t n = psi.size();
  if (std::abs(psi.at(p, q)) <= kSweepZero) return;
  const auto& rows = psi.row_perm();
  const auto& cols = psi.col_perm();
  for (std::size_t k = p + 1; k < n; ++k) {
    for (std::size_t l = q + 1; l < n; ++l) {
      double& ij = psi.at(p, q);
      if (std::abs(ij) <= kSweepZero) return;
      double& kl = psi.at(k, l);
      double& il = psi.at(p, l);
      double& kj = psi.at(k, q);
      const double dw = delta_w(ij, kl, il, kj);
      if (std::abs(dw) <= kNegligibleTransfer) continue;
      ij -= dw;
      kl -= dw;
      il += dw;
      kj += dw;
      if (dw > 0.0) {
        record.push_back({rows[p], cols[q], rows[k], cols[l], dw});
      } else {
        record.push_back({rows[p], cols[l], rows[k], cols[q], -dw});
      }
    }
  }
  if (std::abs(psi.at(p, q)) > kSweepZero) {
    throw StallError("rewiring stalled at node pair (" + std::to_string(rows[p]) + ", " +
                     std::to_string(cols[q]) + ") with residual " +
                     format_double(psi.at(p, q)) + "; difference margins are not zero");
  }
}

void reorder(DifferenceMatrix& psi, std::size_t p) {
  const std::size_t n = psi.size();
  if (p >= n) return;
  auto row_mass = [&](std::size_t r) {
    double total = 0.0;
    for (std::size_t q = 0; q < n; ++q) total += std::abs(psi.at(r, q));
    return total;
  };
  std::size_t best = p;
  double best_mass = row_mass(p);
  for (std::size_t r = p + 1; r < n; ++r) {
    const double mass = row_mass(r);
    if (mass > best_mass) {
      best_mass = mass;
      best = r;
    }
  }
  std::swap(psi.row_perm()[p], psi.row_perm()[best]);

  auto& cols = psi.col_perm();
  const Matrix& m = psi.matrix();
  const auto row = static_cast<Eigen::Index>(psi.row_perm()[p]);
  std::stable_sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(m(row, static_cast<Eigen::Index>(a))) > std::abs(m(row, static_cast<Eigen::Index>(b)));
  });
}

namespace {

void check_pair(const WeightedDigraph& initial, const WeightedDigraph& target) {
  if (initial.size() != target.size()) throw InputError("initial and target graphs differ in size");
  if (initial.labels() != target.labels()) throw InputError("initial and target graphs have different node labels");
  const double row_gap = initial.size() ? (initial.out_strength() - target.out_strength()).cwiseAbs().maxCoeff() : 0.0;
  const double col_gap = initial.size() ? (initial.in_strength() - target.in_strength()).cwiseAbs().maxCoeff() : 0.0;
  if (row_gap > kSweepZero || col_gap > kSweepZero) {
    throw InputError("initial and target strengths differ (max out gap " + format_double(row_gap) +
                     ", max in gap " + format_double(col_gap) + ")");
  }
}

}  // namespace

std::vector<IndexStep> sweep_positions(const WeightedDigraph& initial, const WeightedDigraph& target,
                                       const SweepOptions& options) {
  check_pair(initial, target);
  DifferenceMatrix psi(initial.weights() - target.weights());
  std::vector<IndexStep> record;
  const std::size_t n = psi.size();
  // The last row and column are forced to zero by the zero margins.
  for (std::size_t p = 0; p + 1 < n; ++p) {
    if (options.reorder) reorder(psi, p);
    for (std::size_t q = 0; q + 1 < n; ++q) rewire_cell(psi, record, p, q);
  }
  return record;
}

RewiringRecordList sweep(const WeightedDigraph& initial, const WeightedDigraph& target,
                         const SweepOptions& options) {
  const auto positions = sweep_positions(initial, target, options);
  const auto& labels = initial.labels();
  RewiringRecordList out;
  out.steps.reserve(positions.size());
  for (const auto& s : positions) out.steps.push_back({labels[s.i], labels[s.j], labels[s.k], labels[s.l], s.dw});
  return out;
}

ReplayResult replay(const WeightedDigraph& initial, const RewiringRecordList& record,
                    std::size_t stride) {
  if (stride == 0) throw ConfigError("trace stride must be at least 1");
  ReplayResult result;
  result.final_graph = initial;
  std::optional<AssortativityTracker> tracker;
  if (initial.total_weight() > 0.0) tracker.emplace(initial, strength_profile(initial));
  result.trace.push_back({0, std::nullopt, tracker ? tracker->current() : AssortativityQuad{}});
  const std::size_t total = record.steps.size();
  for (std::size_t s = 0; s < total; ++s) {
    const RewiringStep& step = record.steps[s];
    if (!(step.dw > 0.0)) {
      throw CorruptRecordError("step " + std::to_string(s + 1) + " has nonpositive transfer");
    }
    std::size_t i = 0, j = 0, k = 0, l = 0;
    try {
      i = result.final_graph.index_of(step.i);
      j = result.final_graph.index_of(step.j);
      k = result.final_graph.index_of(step.k);
      l = result.final_graph.index_of(step.l);
      result.final_graph.apply(step);
    } catch (const Error& e) {
      throw CorruptRecordError("step " + std::to_string(s + 1) + ": " + e.what());
    }
    if (tracker) tracker->update(i, j, k, l, step.dw);
    if ((s + 1) % stride == 0 || s + 1 == total) {
      result.trace.push_back({s + 1, step, tracker ? tracker->current() : AssortativityQuad{}});
    }
  }
  return result;
}

namespace {

void write_quad(std::ostream& out, const AssortativityQuad& q) {
  for (std::size_t x = 0; x < 4; ++x) {
    out << ',';
    if (q[x]) out << format_double(*q[x]);
    else out << "undefined";
  }
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "step,i,j,k,l,dw,r11,r12,r21,r22\n";
  for (const auto& row : trace) {
    out << row.step;
    if (row.applied) {
      const auto& s = *row.applied;
      out << ',' << s.i << ',' << s.j << ',' << s.k << ',' << s.l << ',' << format_double(s.dw);
    } else {
      out << ",,,,,";
    }
    write_quad(out, row.quad);
    out << '\n';
  }
}

void write_record_csv(std::ostream& out, const RewiringRecordList& record) {
  out << "step,i,j,k,l,dw\n";
  for (std::size_t s = 0; s < record.steps.size(); ++s) {
    const auto& st = record.steps[s];
    out << s + 1 << ',' << st.i << ',' << st.j << ',' << st.k << ',' << st.l << ','
        << format_double(st.dw) << '\n';
  }
}

RewiringRecordList read_record_csv(std::istream& in) {
  RewiringRecordList record;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "step,i,j,k,l,dw") throw ParseError("expected header 'step,i,j,k,l,dw'", line_no);
      header = true;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::size_t step = 0;
    RewiringStep s;
    std::string extra;
    if (!(ss >> step >> s.i >> s.j >> s.k >> s.l >> s.dw) || (ss >> extra)) {
      throw ParseError("malformed record row", line_no);
    }
    if (step != record.steps.size() + 1) throw ParseError("steps must be numbered 1, 2, ...", line_no);
    if (!(s.dw > 0.0)) throw ParseError("transfer must be positive", line_no);
    record.steps.push_back(s);
  }
  return record;
}

}  // namespace sspr
