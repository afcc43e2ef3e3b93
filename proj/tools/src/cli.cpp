#include "satkit_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "satkit/dfa.hpp"
#include "satkit/error.hpp"
#include "satkit/shortest_path.hpp"
#include "satkit/stemma.hpp"
#include "satkit/supergraph.hpp"

namespace satkit::cli {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, 0, "cannot open file");
  return in;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw InputError(path, 0, "cannot write file");
  body(out);
  if (!out) throw InputError(path, 0, "write failed");
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::uint64_t default_seed() {
  const char* text = std::getenv("SATKIT_SEED");
  if (text == nullptr || *text == '\0') return 0;
  std::uint64_t value = 0;
  std::istringstream in(text);
  if (!(in >> value) || !in.eof() || std::string(text).find('-') != std::string::npos)
    throw InputError("SATKIT_SEED", 0, "not an unsigned integer: '" + std::string(text) + "'");
  return value;
}

void emit_report(const std::string& path, const RunReport& report) {
  if (path.empty()) return;
  write_file(path, [&](std::ostream& out) { out << report_to_json(report) << '\n'; });
}

std::string fixed(double value, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << value;
  return s.str();
}

Record make_record(std::string kind, std::string id, std::string verdict = "") {
  Record r;
  r.kind = std::move(kind);
  r.id = std::move(id);
  r.verdict = std::move(verdict);
  return r;
}

RunReport make_report(std::string command) {
  RunReport r;
  r.command = std::move(command);
  return r;
}

StemmaOptions stemma_options(std::uint64_t seed) {
  StemmaOptions o;
  o.seed = seed;
  return o;
}

struct Common {
  std::uint64_t seed = 0;
  std::string json;
  bool no_timing = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Solver seed (default from SATKIT_SEED, else 0)");
  app->add_option("--json", c.json, "Write a JSON run report to this path");
  app->add_flag("--no-timing", c.no_timing, "Report all times as zero");
}

// shortest-path

struct PathArgs {
  Common common;
  std::string graph;
  int variant = 3;
};

int run_shortest_path(const PathArgs& a, std::ostream& out) {
  std::ifstream in = open_input(a.graph);
  DiGraph g = read_graph(in, a.graph);
  ShortestPathOptions options;
  options.seed = a.common.seed;
  auto result = solve_shortest_path(g, a.variant, options);
  Record rec = make_record("shortest-path", stem_of(a.graph));
  RunReport report = make_report("shortest-path");
  int code = kOk;
  if (!result) {
    rec.verdict = "unreachable";
    report.summary = "No path from " + g.nodes[g.from] + " to " + g.nodes[g.to] + ".";
    out << report.summary << '\n';
    code = kNoSolution;
  } else {
    const EncodingStats& st = result->stats;
    rec.verdict = to_string(result->status);
    rec.objective = result->length;
    rec.vars = st.vars;
    rec.clauses = st.clauses;
    if (!a.common.no_timing) {
      rec.encode_ms = st.encode_ms;
      rec.solve_ms = st.solve_ms;
    }
    std::string path = g.nodes[g.from];
    for (auto [u, v] : result->edges) {
      rec.witness.push_back(g.nodes[u] + "->" + g.nodes[v]);
      path += " -> " + g.nodes[v];
    }
    report.summary = "Shortest path has length " + std::to_string(result->length) + ".";
    out << report.summary << '\n'
        << "Path: " << path << '\n'
        << "Variant " << a.variant << ": " << rec.vars << " vars, " << rec.clauses << " clauses, encode "
        << fixed(rec.encode_ms, 1) << " ms, solve " << fixed(rec.solve_ms, 1) << " ms.\n";
  }
  report.records.push_back(std::move(rec));
  emit_report(a.common.json, report);
  return code;
}

// stemma

struct StemmaArgs {
  Common common;
  std::string dot;
  std::string features;
  int jobs = 1;
  bool verbose = false;
};

int run_stemma(const StemmaArgs& a, StemmaTask task, std::ostream& out) {
  std::ifstream dot_in = open_input(a.dot);
  Stemma s = read_stemma_dot(dot_in, a.dot);
  std::ifstream feat_in = open_input(a.features);
  std::vector<Feature> features = read_features_json(feat_in, s, a.features);

  out << "Processing " << stem_of(a.dot) << ".\n";
  out << "Stemma has " << s.size() << " nodes and " << s.copied_by.size() << " edges.\n";
  const auto start = Clock::now();
  std::vector<FeatureReport> reports = run_stemma_batch(s, features, task, a.jobs, stemma_options(a.common.seed));
  const double elapsed = a.common.no_timing ? 0.0 : ms_since(start);

  RunReport report = make_report(task == StemmaTask::Check ? "stemma check" : "stemma min-sources");
  int positive = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const FeatureReport& r = reports[i];
    positive += r.consistent;
    Record rec = make_record("stemma", std::to_string(i + 1), r.consistent ? "consistent" : "inconsistent");
    if (r.k_min) rec.objective = *r.k_min;
    for (std::size_t x = 0; x < r.coloring.size(); ++x) {
      const auto& names = features[i].variants;
      const int v = r.coloring[x];
      rec.witness.push_back(s.manuscripts[x] + "=" +
                            (v < static_cast<int>(names.size()) ? names[v] : "#" + std::to_string(v)));
    }
    if (a.verbose) {
      out << "Feature " << rec.id << ": " << rec.verdict;
      if (rec.objective) out << ", " << *rec.objective << " sources";
      out << ".\n";
    }
    report.records.push_back(std::move(rec));
  }
  for (auto& rec : report.records) rec.solve_ms = elapsed / static_cast<double>(report.records.size());
  report.summary = "Found " + std::to_string(positive) + " positive out of " + std::to_string(reports.size()) +
                   " groupings in " + std::to_string(std::llround(elapsed / 1000.0)) + " sec.";
  out << report.summary << '\n';
  emit_report(a.common.json, report);
  return kOk;
}

// mcs

struct McsArgs {
  Common common;
  std::string file;
  std::optional<double> budget;
};

int run_mcs(const McsArgs& a, bool exact, std::ostream& out) {
  std::ifstream in = open_input(a.file);
  McsInstance inst = read_mcs_json(in, a.file);
  McsOptions options;
  options.seed = a.common.seed;
  const auto start = Clock::now();
  if (a.budget) options.deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*a.budget));
  RunReport report = make_report(exact ? "mcs exact" : "mcs greedy");
  Record rec = make_record("mcs", stem_of(a.file));
  McsResult r;
  try {
    r = exact ? exact_mcs(inst, options) : greedy_mcs(inst, options);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const InputError*>(&e)) throw;
    rec.verdict = "unknown";
    report.summary = "No supergraph found within the time budget.";
    out << report.summary << '\n';
    report.records.push_back(std::move(rec));
    emit_report(a.common.json, report);
    return kNoSolution;
  }
  rec.verdict = to_string(r.status);
  rec.objective = r.supergraph.size();
  rec.vars = r.vars;
  rec.clauses = r.clauses;
  if (!a.common.no_timing) rec.solve_ms = ms_since(start);
  for (auto [x, y] : r.supergraph.arcs) rec.witness.push_back(inst.names[x] + "--" + inst.names[y]);
  report.summary = "Supergraph has " + std::to_string(r.supergraph.size()) + " arcs (" + rec.verdict + ").";
  out << report.summary << '\n';
  for (const auto& arc : rec.witness) out << "  " << arc << '\n';
  out << "Encoding: " << rec.vars << " vars, " << rec.clauses << " clauses, " << fixed(rec.solve_ms, 1) << " ms.\n";
  report.records.push_back(std::move(rec));
  emit_report(a.common.json, report);
  return kOk;
}

// dfa

struct DfaArgs {
  Common common;
  std::string sample;
  bool redundant = false;
  DfaObjective objective = DfaObjective::States;
  std::string dot;
};

int run_dfa_learn(const DfaArgs& a, std::ostream& out) {
  std::ifstream in = open_input(a.sample);
  Sample s = read_abbadingo(in, a.sample);
  const auto start = Clock::now();
  DfaResult r = find_min_dfa(s, {.redundant = a.redundant, .objective = a.objective, .seed = a.common.seed});
  Record rec = make_record("dfa", stem_of(a.sample), "consistent");
  rec.objective = a.objective == DfaObjective::States ? r.dfa.size() : r.dfa.transition_count();
  rec.vars = r.vars;
  rec.clauses = r.clauses;
  if (!a.common.no_timing) rec.solve_ms = ms_since(start);
  for (int q = 0; q < r.dfa.size(); ++q) {
    if (r.dfa.accepting[q]) rec.witness.push_back("accept q" + std::to_string(q));
    for (int sym = 0; sym < r.dfa.alphabet_size; ++sym)
      if (int t = r.dfa.trans[q][sym]; t >= 0)
        rec.witness.push_back("q" + std::to_string(q) + " -" + std::to_string(sym) + "-> q" + std::to_string(t));
  }
  RunReport report = make_report("dfa learn");
  report.summary = "Learned DFA with " + std::to_string(r.dfa.size()) + " states and " +
                   std::to_string(r.dfa.transition_count()) + " transitions.";
  out << report.summary << '\n';
  out << "Clique of " << r.clique.size() << " states, " << r.solver_calls << " solver calls, " << rec.vars
      << " vars, " << rec.clauses << " clauses, " << fixed(rec.solve_ms, 1) << " ms.\n";
  for (const auto& line : rec.witness) out << "  " << line << '\n';
  if (!a.dot.empty()) write_file(a.dot, [&](std::ostream& o) { write_dfa_dot(o, r.dfa); });
  report.records.push_back(std::move(rec));
  emit_report(a.common.json, report);
  return kOk;
}

// bench

struct BenchArgs {
  std::uint64_t seed = 0;
  std::vector<int> sizes{12, 16, 20};
  double density = 0.2;
  std::string csv;
  std::string plot;
  bool no_timing = false;
};

int run_bench(const BenchArgs& a, std::ostream& out) {
  if (a.sizes.empty()) throw InputError("--sizes must not be empty");
  for (std::size_t i = 0; i < a.sizes.size(); ++i) {
    if (a.sizes[i] < 2) throw InputError("--sizes entries must be at least 2");
    if (i > 0 && a.sizes[i] <= a.sizes[i - 1]) throw InputError("--sizes must be strictly ascending");
  }
  std::vector<BenchRow> rows = bench_shortest_path(a.sizes, a.density, a.seed, !a.no_timing);
  if (a.csv.empty())
    write_bench_csv(out, rows);
  else
    write_file(a.csv, [&](std::ostream& o) { write_bench_csv(o, rows); });
  if (!a.plot.empty()) write_file(a.plot, [&](std::ostream& o) { write_bench_svg(o, rows); });
  return kOk;
}

}  // namespace

std::string report_to_json(const RunReport& report) {
  Json records = Json::array();
  for (const Record& r : report.records) {
    Json j;
    j["kind"] = r.kind;
    j["id"] = r.id;
    j["verdict"] = r.verdict;
    j["objective"] = r.objective ? Json(*r.objective) : Json(nullptr);
    j["vars"] = r.vars;
    j["clauses"] = r.clauses;
    j["encode_ms"] = r.encode_ms;
    j["solve_ms"] = r.solve_ms;
    j["witness"] = r.witness;
    records.push_back(std::move(j));
  }
  Json doc;
  doc["command"] = report.command;
  doc["records"] = std::move(records);
  doc["summary"] = report.summary;
  return doc.dump(2);
}

RunReport report_from_json(const std::string& text, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto upto = text.substr(0, std::min<std::size_t>(e.byte, text.size()));
    throw InputError(source, 1 + static_cast<int>(std::count(upto.begin(), upto.end(), '\n')), "invalid JSON");
  }
  try {
    RunReport report;
    report.command = doc.at("command").get<std::string>();
    report.summary = doc.at("summary").get<std::string>();
    for (const Json& j : doc.at("records")) {
      Record r;
      r.kind = j.at("kind").get<std::string>();
      r.id = j.at("id").get<std::string>();
      r.verdict = j.at("verdict").get<std::string>();
      if (!j.at("objective").is_null()) r.objective = j.at("objective").get<long>();
      r.vars = j.at("vars").get<int>();
      r.clauses = j.at("clauses").get<std::size_t>();
      r.encode_ms = j.at("encode_ms").get<double>();
      r.solve_ms = j.at("solve_ms").get<double>();
      r.witness = j.at("witness").get<std::vector<std::string>>();
      report.records.push_back(std::move(r));
    }
    return report;
  } catch (const Json::exception& e) {
    throw InputError(source, 0, std::string("malformed report: ") + e.what());
  }
}

std::vector<BenchRow> bench_shortest_path(const std::vector<int>& sizes, double density, std::uint64_t seed,
                                          bool timing) {
  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    DiGraph g = random_digraph(sizes[i], density, seed + i);
    for (int variant = 1; variant <= 4; ++variant) {
      BenchRow row{.size = sizes[i], .variant = variant};
      ShortestPathOptions options;
      options.seed = seed;
      auto result = solve_shortest_path(g, variant, options);
      EncodingStats st = result ? result->stats : encode_variant(g, variant).stats;
      row.vars = st.vars;
      row.clauses = st.clauses;
      if (result) row.length = result->length;
      if (timing) {
        row.encode_ms = st.encode_ms;
        row.solve_ms = st.solve_ms;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "size,variant,vars,clauses,length,encode_ms,solve_ms\n";
  for (const BenchRow& r : rows)
    out << r.size << ',' << r.variant << ',' << r.vars << ',' << r.clauses << ',' << r.length << ','
        << fixed(r.encode_ms, 3) << ',' << fixed(r.solve_ms, 3) << '\n';
}

void write_bench_svg(std::ostream& out, const std::vector<BenchRow>& rows) {
  const double width = 640, height = 400, left = 70, right = 120, top = 30, bottom = 50;
  int min_n = 0, max_n = 1;
  std::size_t max_c = 1;
  if (!rows.empty()) {
    min_n = max_n = rows.front().size;
    for (const BenchRow& r : rows) {
      min_n = std::min(min_n, r.size);
      max_n = std::max(max_n, r.size);
      max_c = std::max(max_c, r.clauses);
    }
  }
  const double span_n = std::max(1, max_n - min_n);
  auto px = [&](int n) { return left + (width - left - right) * (n - min_n) / span_n; };
  auto py = [&](std::size_t c) { return height - bottom - (height - top - bottom) * static_cast<double>(c) / static_cast<double>(max_c); };
  const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << "Clauses by graph size</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
      << "font-size=\"11\">" << max_c << "</text>\n";
  std::vector<int> sizes;
  for (const BenchRow& r : rows)
    if (std::find(sizes.begin(), sizes.end(), r.size) == sizes.end()) sizes.push_back(r.size);
  for (int n : sizes)
    out << "<text x=\"" << px(n) << "\" y=\"" << height - bottom + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << n << "</text>\n";
  out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">nodes</text>\n";
  for (int v = 1; v <= 4; ++v) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[v - 1] << "\" stroke-width=\"2\" points=\"";
    for (const BenchRow& r : rows)
      if (r.variant == v) out << fixed(px(r.size), 1) << ',' << fixed(py(r.clauses), 1) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << width - right + 10 << "\" y=\"" << top + 18 * v << "\" fill=\"" << colors[v - 1]
        << "\" font-family=\"sans-serif\" font-size=\"12\">variant " << v << "</text>\n";
  }
  out << "</svg>\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::uint64_t seed;
  try {
    seed = default_seed();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  CLI::App app{"SAT-backed solvers for shortest paths, stemma consistency, common supergraphs and DFA learning",
               "satkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  PathArgs path_args;
  path_args.common.seed = seed;
  auto* sp = app.add_subcommand("shortest-path", "Shortest path by cardinality-minimal model search");
  sp->add_option("graph", path_args.graph, "Edge-list graph file")->required();
  sp->add_option("--variant", path_args.variant, "Encoding variant 1-4")->check(CLI::Range(1, 4));
  add_common(sp, path_args.common);
  sp->callback([&] { action = [&] { return run_shortest_path(path_args, out); }; });

  StemmaArgs stemma_args;
  stemma_args.common.seed = seed;
  auto* st = app.add_subcommand("stemma", "Color-connectedness of features on a stemma");
  st->require_subcommand(1);
  for (auto [name, task, help] : {std::tuple{"check", StemmaTask::Check, "Check every feature for consistency"},
                                  std::tuple{"min-sources", StemmaTask::MinSources,
                                             "Minimum number of sources per feature"}}) {
    auto* sub = st->add_subcommand(name, help);
    sub->add_option("stemma", stemma_args.dot, "Stemma in dot syntax")->required();
    sub->add_option("features", stemma_args.features, "Features as a JSON array")->required();
    sub->add_option("--jobs", stemma_args.jobs, "Worker threads")->check(CLI::Range(1, 1024));
    sub->add_flag("--verbose", stemma_args.verbose, "Print one line per feature");
    add_common(sub, stemma_args.common);
    sub->callback([&, task = task] { action = [&, task] { return run_stemma(stemma_args, task, out); }; });
  }

  McsArgs mcs_args;
  mcs_args.common.seed = seed;
  auto* mcs = app.add_subcommand("mcs", "Minimum common supergraph of partially labeled graphs");
  mcs->require_subcommand(1);
  for (auto [name, exact, help] : {std::tuple{"exact", true, "Exact SAT-based minimum"},
                                   std::tuple{"greedy", false, "Pairwise greedy merging"}}) {
    auto* sub = mcs->add_subcommand(name, help);
    sub->add_option("instance", mcs_args.file, "Instance JSON file")->required();
    sub->add_option("--time-budget", mcs_args.budget, "Solver time budget in seconds")
        ->check(CLI::PositiveNumber);
    add_common(sub, mcs_args.common);
    sub->callback([&, exact = exact] { action = [&, exact] { return run_mcs(mcs_args, exact, out); }; });
  }

  DfaArgs dfa_args;
  dfa_args.common.seed = seed;
  auto* dfa = app.add_subcommand("dfa", "Minimal DFA identification");
  dfa->require_subcommand(1);
  auto* learn = dfa->add_subcommand("learn", "Learn a minimal DFA consistent with a sample");
  learn->add_option("sample", dfa_args.sample, "Abbadingo sample file")->required();
  learn->add_flag("--redundant", dfa_args.redundant, "Add the redundant transition constraint");
  learn->add_option("--objective", dfa_args.objective, "states or transitions")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, DfaObjective>{{"states", DfaObjective::States},
                                              {"transitions", DfaObjective::Transitions}},
          CLI::ignore_case));
  learn->add_option("--emit-dot", dfa_args.dot, "Write the learned automaton in dot syntax");
  add_common(learn, dfa_args.common);
  learn->callback([&] { action = [&] { return run_dfa_learn(dfa_args, out); }; });

  BenchArgs bench_args;
  bench_args.seed = seed;
  auto* bench = app.add_subcommand("bench", "Encoding size and timing benchmarks");
  bench->require_subcommand(1);
  auto* bsp = bench->add_subcommand("shortest-path", "All four variants on random graphs of growing size");
  bsp->add_option("--sizes", bench_args.sizes, "Ascending node counts")->delimiter(',');
  bsp->add_option("--density", bench_args.density, "Edge density")->check(CLI::Range(0.0, 1.0));
  bsp->add_option("--seed", bench_args.seed, "Graph and solver seed (default from SATKIT_SEED, else 0)");
  bsp->add_option("--csv", bench_args.csv, "Write CSV here instead of stdout");
  bsp->add_option("--plot", bench_args.plot, "Write an SVG plot of clause counts");
  bsp->add_flag("--no-timing", bench_args.no_timing, "Report all times as zero");
  bsp->callback([&] { action = [&] { return run_bench(bench_args, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  try {
    return action ? action() : kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNoSolution;
  }
}

}  // namespace satkit::cli
