#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "sspr/lp.hpp"
#include "sspr/target.hpp"

namespace sspr {

/// Writes the program in MPS layout: section keywords in column 1, fields
/// padded to the fixed-format column positions, integer columns wrapped in
/// MARKER INTORG/INTEND, every column listed with an explicit objective entry
/// and explicit bounds. Names longer than 8 characters overflow their field,
/// so large instances need a reader that accepts free MPS.
void write_mps(std::ostream& out, const LinearProgram& lp);

/// Reads free or fixed MPS (whitespace-separated tokens). Supports the
/// N/E/L/G row types, integer markers and LO/UP/FX/BV/MI/PL bounds.
LinearProgram read_mps(std::istream& in);

/// Builds the problem for the target's support mode (MILP for Free, LP for
/// Fixed) and writes it to `path`.
void export_mip(const TargetProblem& tp, const std::string& path);

/// Parses `<varname> <value>` lines; blank lines and `#` comments are skipped.
std::map<std::string, double> read_solution(std::istream& in);

/// Assembles Lambda from the `L_<src>_<dst>` entries of a solver solution
/// file and re-verifies every target condition. Throws VerificationError
/// naming the violated condition.
TargetMatrix import_solution(const TargetProblem& tp, const std::string& path);
TargetMatrix import_solution(const TargetProblem& tp, std::istream& in);

}  // namespace sspr
