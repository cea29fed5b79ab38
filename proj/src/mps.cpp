#include "sspr/mps.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "sspr/errors.hpp"

namespace sspr {

namespace {

// Fixed MPS fields start at columns 2, 5, 15, 25, 40 and 50.
std::string fields(const std::string& f1, const std::string& f2, const std::string& f3 = {},
                   const std::string& f4 = {}, const std::string& f5 = {},
                   const std::string& f6 = {}) {
  std::string line = " ";
  auto pad_to = [&line](std::size_t column) {
    if (line.size() < column - 1) line.resize(column - 1, ' ');
    else line.push_back(' ');
  };
  line += f1;
  pad_to(5);
  line += f2;
  if (!f3.empty()) {
    pad_to(15);
    line += f3;
  }
  if (!f4.empty()) {
    pad_to(25);
    line += f4;
  }
  if (!f5.empty()) {
    pad_to(40);
    line += f5;
    pad_to(50);
    line += f6;
  }
  return line;
}

char sense_code(RowSense s) {
  switch (s) {
    case RowSense::Equal: return 'E';
    case RowSense::LessEqual: return 'L';
    case RowSense::GreaterEqual: return 'G';
  }
  return 'E';
}

double parse_value(const std::string& text, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("invalid number '" + text + "'", line);
  }
  return v;
}

constexpr const char* kObjectiveRow = "OBJ";

}  // namespace

void write_mps(std::ostream& out, const LinearProgram& lp) {
  lp.validate();
  out << "NAME          " << lp.name << '\n';
  out << "ROWS\n";
  out << fields("N", kObjectiveRow) << '\n';
  for (const auto& row : lp.rows) out << fields(std::string(1, sense_code(row.sense)), row.name) << '\n';

  std::vector<std::vector<std::pair<std::size_t, double>>> by_column(lp.num_vars());
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    for (auto [j, a] : lp.rows[r].coeffs) by_column[j].emplace_back(r, a);
  }
  out << "COLUMNS\n";
  bool in_integer_block = false;
  std::size_t marker = 0;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.integer[j] != in_integer_block) {
      out << fields("", "MARKER" + std::to_string(marker++), "'MARKER'", "",
                    in_integer_block ? "'INTEND'" : "'INTORG'")
          << '\n';
      in_integer_block = lp.integer[j];
    }
    const std::string& name = lp.var_names[j];
    out << fields("", name, kObjectiveRow, format_double(lp.objective[j])) << '\n';
    for (auto [r, a] : by_column[j]) out << fields("", name, lp.rows[r].name, format_double(a)) << '\n';
  }
  if (in_integer_block) out << fields("", "MARKER" + std::to_string(marker++), "'MARKER'", "", "'INTEND'") << '\n';

  out << "RHS\n";
  for (const auto& row : lp.rows) {
    if (row.rhs != 0.0) out << fields("", "RHS", row.name, format_double(row.rhs)) << '\n';
  }
  out << "BOUNDS\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const std::string& name = lp.var_names[j];
    if (lp.integer[j] && lp.lower[j] == 0.0 && lp.upper[j] == 1.0) {
      out << fields("BV", "BND", name) << '\n';
    } else if (lp.lower[j] == lp.upper[j]) {
      out << fields("FX", "BND", name, format_double(lp.lower[j])) << '\n';
    } else {
      if (lp.lower[j] != 0.0) out << fields("LO", "BND", name, format_double(lp.lower[j])) << '\n';
      out << fields("UP", "BND", name, format_double(lp.upper[j])) << '\n';
    }
  }
  out << "ENDATA\n";
}

LinearProgram read_mps(std::istream& in) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  LinearProgram lp;
  std::unordered_map<std::string, std::ptrdiff_t> row_index;  // -1 = objective
  std::unordered_map<std::string, std::size_t> col_index;
  std::string objective_row;
  enum class Section { None, Rows, Columns, Rhs, Bounds, End } section = Section::None;
  bool integer_block = false;
  std::vector<bool> bound_seen;

  auto column = [&](const std::string& name) {
    auto it = col_index.find(name);
    if (it != col_index.end()) return it->second;
    const std::size_t j = lp.add_variable(name, 0.0, kInf, 0.0, integer_block);
    col_index.emplace(name, j);
    return j;
  };

  std::string line;
  std::size_t line_no = 0;
  // Coefficients are gathered per row and canonicalized at the end.
  std::vector<std::vector<std::pair<std::size_t, double>>> row_coeffs;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (line[0] != ' ' && line[0] != '\t') {
      const std::string& key = tok[0];
      if (key == "NAME") lp.name = tok.size() > 1 ? tok[1] : "";
      else if (key == "ROWS") section = Section::Rows;
      else if (key == "COLUMNS") section = Section::Columns;
      else if (key == "RHS") section = Section::Rhs;
      else if (key == "BOUNDS") section = Section::Bounds;
      else if (key == "ENDATA") { section = Section::End; break; }
      else throw ParseError("unsupported MPS section '" + key + "'", line_no);
      continue;
    }
    switch (section) {
      case Section::Rows: {
        if (tok.size() != 2) throw ParseError("ROWS entry needs type and name", line_no);
        const std::string& type = tok[0];
        if (type == "N") {
          if (objective_row.empty()) objective_row = tok[1];
          row_index[tok[1]] = -1;
          break;
        }
        RowSense sense = RowSense::Equal;
        if (type == "L") sense = RowSense::LessEqual;
        else if (type == "G") sense = RowSense::GreaterEqual;
        else if (type != "E") throw ParseError("unknown row type '" + type + "'", line_no);
        row_index[tok[1]] = static_cast<std::ptrdiff_t>(lp.rows.size());
        lp.rows.push_back({tok[1], sense, 0.0, {}});
        row_coeffs.emplace_back();
        break;
      }
      case Section::Columns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          const std::string& kind = tok.back();
          if (kind == "'INTORG'") integer_block = true;
          else if (kind == "'INTEND'") integer_block = false;
          else throw ParseError("unknown marker " + kind, line_no);
          break;
        }
        if (tok.size() != 3 && tok.size() != 5) throw ParseError("COLUMNS entry has wrong arity", line_no);
        const std::size_t j = column(tok[0]);
        for (std::size_t f = 1; f + 1 < tok.size(); f += 2) {
          auto it = row_index.find(tok[f]);
          if (it == row_index.end()) throw ParseError("unknown row '" + tok[f] + "'", line_no);
          const double v = parse_value(tok[f + 1], line_no);
          if (it->second < 0) {
            if (tok[f] == objective_row) lp.objective[j] += v;
          } else {
            row_coeffs[static_cast<std::size_t>(it->second)].emplace_back(j, v);
          }
        }
        break;
      }
      case Section::Rhs: {
        if (tok.size() != 3 && tok.size() != 5) throw ParseError("RHS entry has wrong arity", line_no);
        for (std::size_t f = 1; f + 1 < tok.size(); f += 2) {
          auto it = row_index.find(tok[f]);
          if (it == row_index.end()) throw ParseError("unknown row '" + tok[f] + "'", line_no);
          if (it->second >= 0) lp.rows[static_cast<std::size_t>(it->second)].rhs = parse_value(tok[f + 1], line_no);
        }
        break;
      }
      case Section::Bounds: {
        if (tok.size() < 3) throw ParseError("BOUNDS entry too short", line_no);
        auto it = col_index.find(tok[2]);
        if (it == col_index.end()) throw ParseError("bound on unknown column '" + tok[2] + "'", line_no);
        const std::size_t j = it->second;
        const std::string& type = tok[0];
        auto value = [&] {
          if (tok.size() < 4) throw ParseError("bound " + type + " needs a value", line_no);
          return parse_value(tok[3], line_no);
        };
        if (type == "UP") lp.upper[j] = value();
        else if (type == "LO") lp.lower[j] = value();
        else if (type == "FX") lp.lower[j] = lp.upper[j] = value();
        else if (type == "BV") { lp.lower[j] = 0.0; lp.upper[j] = 1.0; lp.integer[j] = true; }
        else if (type == "MI") lp.lower[j] = -kInf;
        else if (type == "PL") lp.upper[j] = kInf;
        else throw ParseError("unsupported bound type '" + type + "'", line_no);
        break;
      }
      default:
        throw ParseError("data line outside of a section", line_no);
    }
  }
  if (section != Section::End) throw ParseError("missing ENDATA", line_no);
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    auto& row = lp.rows[r];
    LinearProgram tmp;
    tmp.add_row(row.name, row.sense, row.rhs, std::move(row_coeffs[r]));
    row.coeffs = std::move(tmp.rows.front().coeffs);
  }
  return lp;
}

void export_mip(const TargetProblem& tp, const std::string& path) {
  const LinearProgram lp = tp.support == SupportMode::Free ? build_mip(tp) : build_problem(tp).lp;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_mps(out, lp);
}

std::map<std::string, double> read_solution(std::istream& in) {
  std::map<std::string, double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::string name;
    std::string value;
    std::string extra;
    ss >> name >> value;
    if (value.empty() || (ss >> extra)) throw ParseError("expected '<varname> <value>'", line_no);
    values[name] = parse_value(value, line_no);
  }
  return values;
}

TargetMatrix import_solution(const TargetProblem& tp, std::istream& in) {
  const auto values = read_solution(in);
  const WeightedDigraph& g = tp.graph;
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) cells.emplace(lambda_name(g.labels()[i], g.labels()[j]), std::pair(i, j));
  }
  TargetMatrix out;
  const auto n = static_cast<Eigen::Index>(g.size());
  out.lambda = Matrix::Zero(n, n);
  for (const auto& [name, value] : values) {
    if (name.rfind("L_", 0) != 0) continue;
    auto it = cells.find(name);
    if (it == cells.end()) throw VerificationError("solution names unknown cell " + name);
    out.lambda(static_cast<Eigen::Index>(it->second.first), static_cast<Eigen::Index>(it->second.second)) = value;
  }
  if (auto violation = verify_target(g, out.lambda, tp.targets, tp.kappa)) {
    throw VerificationError("imported solution rejected: " + *violation);
  }
  out.status = TargetStatus::Feasible;
  const WeightedDigraph h = out.as_graph(g);
  out.achieved = assortativity_all(h);
  double objective = 0.0;
  if (tp.objective == Objective::L1ToW) objective = (h.weights() - g.weights()).cwiseAbs().sum();
  out.objective = objective;
  return out;
}

TargetMatrix import_solution(const TargetProblem& tp, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return import_solution(tp, in);
}

}  // namespace sspr
