#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sspr {

using Label = std::int64_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Entries at or below this magnitude count as "no edge" after arithmetic.
inline constexpr double kZeroWeight = 1e-9;

/// Move `dw` from edges (i->j), (k->l) onto (i->l), (k->j). Nodes are labels.
struct RewiringStep {
  Label i = 0;
  Label j = 0;
  Label k = 0;
  Label l = 0;
  double dw = 0.0;

  friend bool operator==(const RewiringStep&, const RewiringStep&) = default;
};

struct EdgeRow {
  Label src = 0;
  Label dst = 0;
  double weight = 0.0;

  friend bool operator==(const EdgeRow&, const EdgeRow&) = default;
};

/// Weighted, directed network on n nodes with a dense adjacency matrix.
/// Self-loops live on the diagonal. Labels map matrix positions back to the
/// node identifiers the graph was built from.
class WeightedDigraph {
 public:
  WeightedDigraph() = default;

  /// Throws InputError on shape mismatch, negative/non-finite weights or
  /// duplicate labels.
  WeightedDigraph(Matrix weights, std::vector<Label> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  const Matrix& weights() const noexcept { return weights_; }
  double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }
  const std::vector<Label>& labels() const noexcept { return labels_; }

  /// Position of `label`; throws InputError when absent.
  std::size_t index_of(Label label) const;

  /// Number of entries strictly above kZeroWeight.
  std::size_t nnz() const;
  double total_weight() const { return weights_.sum(); }
  Vector out_strength() const { return weights_.rowwise().sum(); }
  Vector in_strength() const { return weights_.colwise().sum().transpose(); }

  /// In-place form of apply_step for owned copies.
  void apply(const RewiringStep& step);

 private:
  Matrix weights_;
  std::vector<Label> labels_;
  bool labels_sorted_ = true;
};

/// Build a graph from (src, dst, weight) rows. Duplicate pairs accumulate;
/// labels are the sorted distinct node ids.
WeightedDigraph from_edge_list(std::span<const EdgeRow> rows);

/// Positive entries as rows sorted by (src, dst).
std::vector<EdgeRow> to_edge_list(const WeightedDigraph& g);

/// Returns a copy with the step applied; row and column sums are unchanged.
/// Throws NegativeWeightError when w_ij or w_kl is smaller than dw.
WeightedDigraph apply_step(WeightedDigraph g, const RewiringStep& step);

inline std::size_t nnz(const WeightedDigraph& g) { return g.nnz(); }

/// Drops nodes whose out- and in-strength are both zero.
WeightedDigraph remove_isolated_nodes(const WeightedDigraph& g);

/// Edge-list CSV with header `src,dst,weight`.
std::vector<EdgeRow> read_edge_list_csv(std::istream& in);
std::vector<EdgeRow> read_edge_list_csv(const std::string& path);
void write_edge_list_csv(std::ostream& out, const WeightedDigraph& g);
void write_edge_list_csv(const std::string& path, const WeightedDigraph& g);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace sspr
