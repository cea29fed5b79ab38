#include "sspr/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "sspr/errors.hpp"

namespace sspr {

WeightedDigraph::WeightedDigraph(Matrix weights, std::vector<Label> labels)
    : weights_(std::move(weights)), labels_(std::move(labels)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (weights_.rows() != n || weights_.cols() != n) {
    throw InputError("adjacency matrix is " + std::to_string(weights_.rows()) + "x" +
                     std::to_string(weights_.cols()) + " but " + std::to_string(n) +
                     " labels were given");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw InputError("invalid weight " + format_double(w) + " at (" +
                         std::to_string(labels_[i]) + ", " + std::to_string(labels_[j]) + ")");
      }
    }
  }
  labels_sorted_ = std::is_sorted(labels_.begin(), labels_.end());
  std::vector<Label> sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InputError("node labels are not unique");
  }
}

std::size_t WeightedDigraph::index_of(Label label) const {
  if (labels_sorted_) {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it != labels_.end() && *it == label) {
      return static_cast<std::size_t>(it - labels_.begin());
    }
  } else {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it != labels_.end()) return static_cast<std::size_t>(it - labels_.begin());
  }
  throw InputError("unknown node label " + std::to_string(label));
}

std::size_t WeightedDigraph::nnz() const {
  return static_cast<std::size_t>((weights_.array() > kZeroWeight).count());
}

void WeightedDigraph::apply(const RewiringStep& step) {
  const std::size_t i = index_of(step.i);
  const std::size_t j = index_of(step.j);
  const std::size_t k = index_of(step.k);
  const std::size_t l = index_of(step.l);
  auto check = [&](std::size_t r, std::size_t c) {
    if (weights_(r, c) < step.dw - kZeroWeight) {
      throw NegativeWeightError("transfer of " + format_double(step.dw) + " overdraws edge (" +
                                std::to_string(labels_[r]) + ", " + std::to_string(labels_[c]) +
                                ") of weight " + format_double(weights_(r, c)));
    }
  };
  check(i, j);
  check(k, l);
  if (step.dw == 0.0) return;
  weights_(i, j) -= step.dw;
  weights_(k, l) -= step.dw;
  weights_(i, l) += step.dw;
  weights_(k, j) += step.dw;
  // Round-off may leave a tiny negative residue on a drained edge.
  if (weights_(i, j) < 0.0) weights_(i, j) = 0.0;
  if (weights_(k, l) < 0.0) weights_(k, l) = 0.0;
}

WeightedDigraph from_edge_list(std::span<const EdgeRow> rows) {
  std::map<Label, std::size_t> ids;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (!(row.weight > 0.0) || !std::isfinite(row.weight)) {
      throw InputError("edge row " + std::to_string(r + 1) + " has nonpositive weight " +
                       format_double(row.weight));
    }
    ids.emplace(row.src, 0);
    ids.emplace(row.dst, 0);
  }
  std::vector<Label> labels;
  labels.reserve(ids.size());
  for (auto& [label, idx] : ids) {
    idx = labels.size();
    labels.push_back(label);
  }
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(labels.size()),
                          static_cast<Eigen::Index>(labels.size()));
  for (const auto& row : rows) {
    w(static_cast<Eigen::Index>(ids[row.src]), static_cast<Eigen::Index>(ids[row.dst])) += row.weight;
  }
  return WeightedDigraph(std::move(w), std::move(labels));
}

std::vector<EdgeRow> to_edge_list(const WeightedDigraph& g) {
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g.weight(i, j) > kZeroWeight) cells.emplace_back(i, j);
    }
  }
  std::vector<EdgeRow> rows;
  rows.reserve(cells.size());
  for (auto [i, j] : cells) rows.push_back({g.labels()[i], g.labels()[j], g.weight(i, j)});
  std::sort(rows.begin(), rows.end(), [](const EdgeRow& a, const EdgeRow& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });
  return rows;
}

WeightedDigraph apply_step(WeightedDigraph g, const RewiringStep& step) {
  g.apply(step);
  return g;
}

WeightedDigraph remove_isolated_nodes(const WeightedDigraph& g) {
  const Vector out = g.out_strength();
  const Vector in = g.in_strength();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out(i) > 0.0 || in(i) > 0.0) keep.push_back(i);
  }
  if (keep.size() == g.size()) return g;
  const auto m = static_cast<Eigen::Index>(keep.size());
  Matrix w(m, m);
  std::vector<Label> labels(keep.size());
  for (Eigen::Index a = 0; a < m; ++a) {
    labels[a] = g.labels()[keep[a]];
    for (Eigen::Index b = 0; b < m; ++b) w(a, b) = g.weights()(keep[a], keep[b]);
  }
  return WeightedDigraph(std::move(w), std::move(labels));
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& field, const char* what, std::size_t line) {
  T value{};
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(std::string("invalid ") + what + " '" + field + "'", line);
  }
  return value;
}

}  // namespace

std::vector<EdgeRow> read_edge_list_csv(std::istream& in) {
  std::vector<EdgeRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      std::string compact;
      for (char c : text) {
        if (c != ' ' && c != '\t') compact.push_back(c);
      }
      if (compact != "src,dst,weight") {
        throw ParseError("expected header 'src,dst,weight'", line_no);
      }
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 3) {
      throw ParseError("expected 3 fields, found " + std::to_string(fields.size()), line_no);
    }
    EdgeRow row;
    row.src = parse_number<Label>(fields[0], "source id", line_no);
    row.dst = parse_number<Label>(fields[1], "target id", line_no);
    row.weight = parse_number<double>(fields[2], "weight", line_no);
    if (row.src < 0 || row.dst < 0) throw ParseError("node ids must be nonnegative", line_no);
    if (!(row.weight > 0.0) || !std::isfinite(row.weight)) {
      throw ParseError("weight must be positive", line_no);
    }
    rows.push_back(row);
  }
  if (!header_seen) throw ParseError("missing header 'src,dst,weight'", 1);
  return rows;
}

std::vector<EdgeRow> read_edge_list_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_edge_list_csv(in);
}

void write_edge_list_csv(std::ostream& out, const WeightedDigraph& g) {
  out << "src,dst,weight\n";
  for (const auto& row : to_edge_list(g)) {
    out << row.src << ',' << row.dst << ',' << format_double(row.weight) << '\n';
  }
}

void write_edge_list_csv(const std::string& path, const WeightedDigraph& g) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_edge_list_csv(out, g);
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace sspr
