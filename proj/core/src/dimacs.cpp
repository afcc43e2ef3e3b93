#include "satkit/dimacs.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "satkit/error.hpp"

namespace satkit {

void write_dimacs(std::ostream& out, const CnfFormula& formula) {
  out << "p cnf " << formula.num_vars() << ' ' << formula.num_clauses() << '\n';
  for (const auto& c : formula.clauses()) {
    for (Lit l : c) out << l.to_dimacs() << ' ';
    out << "0\n";
  }
}

CnfFormula read_dimacs(std::istream& in, const std::string& source) {
  CnfFormula f;
  bool header = false;
  long declared_clauses = 0;
  Clause pending;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c" || first[0] == 'c' || first[0] == '%') continue;
    if (first == "p") {
      std::string fmt;
      long vars = -1;
      if (header || !(ls >> fmt >> vars >> declared_clauses) || fmt != "cnf" ||
          vars < 0 || declared_clauses < 0)
        throw InputError(source, lineno, "malformed problem line");
      f.reserve_vars(static_cast<int>(vars));
      header = true;
      continue;
    }
    if (!header) throw InputError(source, lineno, "clause before 'p cnf' header");
    ls.clear();
    ls.str(line);
    long value;
    while (ls >> value) {
      if (value == 0) {
        f.add_clause(pending);
        pending.clear();
        continue;
      }
      if (std::labs(value) > f.num_vars())
        throw InputError(source, lineno,
                         "literal " + std::to_string(value) + " exceeds declared variables");
      pending.push_back(Lit::from_dimacs(static_cast<int>(value)));
    }
    if (!ls.eof()) throw InputError(source, lineno, "non-integer token");
  }
  if (!pending.empty()) f.add_clause(pending);
  if (!header) throw InputError(source, 0, "missing 'p cnf' header");
  return f;
}

}  // namespace satkit
