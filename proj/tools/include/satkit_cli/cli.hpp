// Command-line front end: subcommand dispatch, run reports and the
// shortest-path encoding benchmark.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace satkit::cli {

/// One processed instance.
struct Record {
  std::string kind;
  std::string id;
  std::string verdict;
  std::optional<long> objective;
  int vars = 0;
  std::size_t clauses = 0;
  double encode_ms = 0;
  double solve_ms = 0;
  /// Human-readable solution parts: path edges, arcs, colorings, transitions.
  std::vector<std::string> witness;

  bool operator==(const Record&) const = default;
};

struct RunReport {
  std::string command;
  std::vector<Record> records;
  std::string summary;

  bool operator==(const RunReport&) const = default;
};

std::string report_to_json(const RunReport& report);
/// Throws InputError on malformed report text.
RunReport report_from_json(const std::string& text, const std::string& source = "<report>");

struct BenchRow {
  int size = 0;
  int variant = 0;
  int vars = 0;
  std::size_t clauses = 0;
  /// -1 when `to` is unreachable.
  int length = -1;
  double encode_ms = 0;
  double solve_ms = 0;
};

/// For every size, one seeded random digraph solved by all four variants.
/// Graph i uses seed + i. With `timing` false all times are zero.
std::vector<BenchRow> bench_shortest_path(const std::vector<int>& sizes, double density,
                                          std::uint64_t seed, bool timing = true);

/// Header `size,variant,vars,clauses,length,encode_ms,solve_ms`.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
/// Clause count against graph size, one polyline per variant.
void write_bench_svg(std::ostream& out, const std::vector<BenchRow>& rows);

/// Exit codes returned by run().
enum ExitCode : int { kOk = 0, kNoSolution = 1, kInputError = 2 };

/// Parses argv (argv[0] is the program name) and runs one subcommand.
/// SATKIT_SEED sets the default of every --seed option.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace satkit::cli
