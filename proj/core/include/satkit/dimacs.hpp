#pragma once

#include <iosfwd>
#include <string>

#include "satkit/sat.hpp"

namespace satkit {

/// Writes `p cnf V C` followed by one zero-terminated clause per line.
void write_dimacs(std::ostream& out, const CnfFormula& formula);

/// Parses DIMACS CNF. Comment lines (`c ...`) are skipped; clauses may span
/// lines. Throws InputError with the line number on malformed input.
CnfFormula read_dimacs(std::istream& in, const std::string& source = "<dimacs>");

}  // namespace satkit
