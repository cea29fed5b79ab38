#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sspr/assortativity.hpp"
#include "sspr/graph.hpp"

namespace sspr {

/// Magnitudes at or below this are treated as zero by the sweep.
inline constexpr double kSweepZero = 1e-9;

/// Weight transfer for cell (i, j) against partner (k, l).
///
/// Positive psi_ij drains the positive surplus of psi_kl:
///   min(psi_ij, max(psi_kl, 0)).
/// Negative psi_ij borrows from the positive surpluses of psi_il and psi_kj:
///   max(psi_ij, min(0, -psi_il), min(0, -psi_kj)).
/// Zero psi_ij yields zero.
double delta_w(double psi_ij, double psi_kl, double psi_il, double psi_kj);

/// Psi = W - Lambda viewed through row/column permutations: position (p, q)
/// addresses node pair (row_perm[p], col_perm[q]).
class DifferenceMatrix {
 public:
  DifferenceMatrix() = default;
  explicit DifferenceMatrix(Matrix psi);

  std::size_t size() const noexcept { return row_perm_.size(); }
  double& at(std::size_t p, std::size_t q) {
    return psi_(static_cast<Eigen::Index>(row_perm_[p]), static_cast<Eigen::Index>(col_perm_[q]));
  }
  double at(std::size_t p, std::size_t q) const {
    return psi_(static_cast<Eigen::Index>(row_perm_[p]), static_cast<Eigen::Index>(col_perm_[q]));
  }
  /// Unpermuted matrix, indexed by node position.
  const Matrix& matrix() const noexcept { return psi_; }
  const std::vector<std::size_t>& row_perm() const noexcept { return row_perm_; }
  const std::vector<std::size_t>& col_perm() const noexcept { return col_perm_; }
  std::vector<std::size_t>& row_perm() noexcept { return row_perm_; }
  std::vector<std::size_t>& col_perm() noexcept { return col_perm_; }

 private:
  Matrix psi_;
  std::vector<std::size_t> row_perm_;
  std::vector<std::size_t> col_perm_;
};

/// A recorded transfer in node positions (not labels).
struct IndexStep {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  std::size_t l = 0;
  double dw = 0.0;

  friend bool operator==(const IndexStep&, const IndexStep&) = default;
};

/// Zeroes the cell at position (p, q) by transfers with every partner
/// position (k, l), k > p, l > q. Assumes rows above p and the cells left of
/// q in row p are already zero. Steps are appended in node positions.
/// Throws StallError if the cell is still nonzero afterwards.
void rewire_cell(DifferenceMatrix& psi, std::vector<IndexStep>& record, std::size_t p,
                 std::size_t q);

/// Reordering before sweeping row position p: the unswept row with the
/// largest absolute sum moves to position p, then all columns are stably
/// sorted by descending |psi| in that row.
void reorder(DifferenceMatrix& psi, std::size_t p);

struct RewiringRecordList {
  std::vector<RewiringStep> steps;  // node labels
};

struct SweepOptions {
  bool reorder = false;
};

/// Transfers turning W into Lambda. Throws InputError when the shapes,
/// labels or margins (tolerance 1e-9) of the two graphs differ.
RewiringRecordList sweep(const WeightedDigraph& initial, const WeightedDigraph& target,
                         const SweepOptions& options = {});
/// Same as sweep() but returns steps in node positions.
std::vector<IndexStep> sweep_positions(const WeightedDigraph& initial, const WeightedDigraph& target,
                                       const SweepOptions& options = {});

struct TraceRow {
  std::size_t step = 0;
  std::optional<RewiringStep> applied;  // empty for the initial row
  AssortativityQuad quad;
};

struct ReplayResult {
  WeightedDigraph final_graph;
  std::vector<TraceRow> trace;
};

/// Applies the record in order. The trace holds the initial quad and then
/// the incrementally updated quad after every `stride`-th step and after the
/// last step. Throws CorruptRecordError naming the first step that cannot
/// be applied.
ReplayResult replay(const WeightedDigraph& initial, const RewiringRecordList& record,
                    std::size_t stride = 1);

/// Trace CSV `step,i,j,k,l,dw,r11,r12,r21,r22`; the initial row is step 0
/// with empty i..dw columns, and undefined coefficients print as `undefined`.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);
/// Record CSV `step,i,j,k,l,dw`.
void write_record_csv(std::ostream& out, const RewiringRecordList& record);
RewiringRecordList read_record_csv(std::istream& in);

}  // namespace sspr
