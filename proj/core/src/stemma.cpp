#include "satkit/stemma.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "satkit/encode.hpp"
#include "satkit/error.hpp"
#include "json_input.hpp"

namespace satkit {

std::optional<int> Stemma::index_of(const std::string& name) const {
  auto it = std::find(manuscripts.begin(), manuscripts.end(), name);
  if (it == manuscripts.end()) return std::nullopt;
  return static_cast<int>(it - manuscripts.begin());
}

std::vector<std::vector<int>> Stemma::parents() const {
  std::vector<std::vector<int>> p(manuscripts.size());
  for (const auto& [u, v] : copied_by) p[static_cast<std::size_t>(v)].push_back(u);
  return p;
}

std::vector<std::vector<int>> Stemma::children() const {
  std::vector<std::vector<int>> c(manuscripts.size());
  for (const auto& [u, v] : copied_by) c[static_cast<std::size_t>(u)].push_back(v);
  return c;
}

int Stemma::root() const {
  const auto p = parents();
  for (int x = 0; x < size(); ++x)
    if (p[static_cast<std::size_t>(x)].empty()) return x;
  throw InputError("stemma has no root");
}

void Stemma::validate() const {
  const int n = size();
  if (n == 0) throw InputError("stemma has no manuscripts");
  for (const auto& [u, v] : copied_by)
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw InputError("copiedBy pair outside the manuscript range");

  // Cycle detection by iterative DFS, reporting one cycle.
  const auto ch = children();
  std::vector<int> state(static_cast<std::size_t>(n), 0), via(static_cast<std::size_t>(n), -1);
  for (int start = 0; start < n; ++start) {
    if (state[start] != 0) continue;
    std::vector<std::pair<int, std::size_t>> stack{{start, 0}};
    state[start] = 1;
    while (!stack.empty()) {
      auto& [x, i] = stack.back();
      if (i < ch[x].size()) {
        int y = ch[x][i++];
        if (state[y] == 1) {
          std::vector<std::string> cycle{manuscripts[y]};
          for (int z = x; z != y; z = via[z]) cycle.push_back(manuscripts[z]);
          cycle.push_back(manuscripts[y]);
          std::reverse(cycle.begin(), cycle.end());
          std::string msg = "stemma has a cycle: ";
          for (std::size_t k = 0; k < cycle.size(); ++k) msg += (k ? " -> " : "") + cycle[k];
          throw InputError(msg);
        }
        if (state[y] == 0) {
          state[y] = 1;
          via[y] = x;
          stack.emplace_back(y, 0);
        }
      } else {
        state[x] = 2;
        stack.pop_back();
      }
    }
  }

  const auto par = parents();
  std::vector<std::string> roots;
  for (int x = 0; x < n; ++x)
    if (par[x].empty()) roots.push_back(manuscripts[x]);
  if (roots.size() > 1) {
    std::string msg = "stemma has several roots:";
    for (const auto& r : roots) msg += " " + r;
    throw InputError(msg);
  }

  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> todo{0};
  seen[0] = 1;
  while (!todo.empty()) {
    int x = todo.back();
    todo.pop_back();
    for (const auto* adj : {&ch[x], &par[x]})
      for (int y : *adj)
        if (!seen[y]) {
          seen[y] = 1;
          todo.push_back(y);
        }
  }
  for (int x = 0; x < n; ++x)
    if (!seen[x]) throw InputError("stemma is disconnected: " + manuscripts[x] + " is unreachable");
}

int Feature::used_variants() const {
  std::set<int> used;
  for (const auto& r : readings)
    if (r) used.insert(*r);
  return static_cast<int>(used.size());
}

namespace {

void check_feature(const Stemma& s, const Feature& f) {
  if (f.readings.size() != s.manuscripts.size())
    throw std::invalid_argument("feature does not cover the stemma's manuscripts");
  for (const auto& r : f.readings)
    if (r && (*r < 0 || *r >= static_cast<int>(f.variants.size())))
      throw std::invalid_argument("feature reading outside its variant set");
}

int variant_count(const Feature& f) { return std::max(1, static_cast<int>(f.variants.size())); }

/// One-hot reading atoms read[x][v], with known readings fixed.
std::vector<std::vector<Lit>> encode_readings(Encoder& enc, const Stemma& s, const Feature& f) {
  const int k = variant_count(f);
  std::vector<std::vector<Lit>> read(s.manuscripts.size());
  for (int x = 0; x < s.size(); ++x) {
    for (int v = 0; v < k; ++v)
      read[x].push_back(enc.atom("read", {s.manuscripts[x], std::to_string(v)}));
    enc.exactly(read[x], 1);
    if (f.readings[x]) enc.clause({read[x][*f.readings[x]]});
  }
  return read;
}

Coloring decode_coloring(const Assignment& m, const std::vector<std::vector<Lit>>& read) {
  Coloring c;
  for (const auto& row : read) {
    auto it = std::find_if(row.begin(), row.end(), [&](Lit l) { return m.value(l); });
    c.push_back(static_cast<int>(it - row.begin()));
  }
  return c;
}

}  // namespace

std::optional<SourceAssignment> check_consistency(const Stemma& s, const Feature& f,
                                                  const StemmaOptions& options) {
  s.validate();
  check_feature(s, f);
  Solver solver(SolverOptions{.seed = options.seed});
  Encoder enc(solver);
  const int k = variant_count(f);
  const auto read = encode_readings(enc, s, f);
  const auto par = s.parents();

  // src[v][x]: x = SourceOf(v). At most one per variant; a source reads v.
  std::vector<std::vector<Lit>> src(static_cast<std::size_t>(k));
  for (int v = 0; v < k; ++v) {
    for (int x = 0; x < s.size(); ++x) {
      Lit l = enc.atom("sourceOf", {std::to_string(v), s.manuscripts[x]});
      src[v].push_back(l);
      enc.clause({~l, read[x][v]});
    }
    enc.at_most(src[v], 1);
  }
  // x != SourceOf(reading(x)) => some parent shares the reading.
  for (int x = 0; x < s.size(); ++x)
    for (int v = 0; v < k; ++v) {
      std::vector<Lit> c{~read[x][v], src[v][x]};
      for (int p : par[x]) c.push_back(read[p][v]);
      enc.clause(c);
    }

  if (solver.solve() != Status::Sat) return std::nullopt;
  const Assignment& m = solver.model();
  SourceAssignment out;
  out.coloring = decode_coloring(m, read);
  out.source_of.assign(static_cast<std::size_t>(k), std::nullopt);
  for (int v = 0; v < k; ++v)
    for (int x = 0; x < s.size(); ++x)
      if (m.value(src[v][x])) out.source_of[v] = x;
  return out;
}

bool check_coloring(const Stemma& s, const Coloring& c) {
  const int n = s.size();
  if (static_cast<int>(c.size()) != n) throw std::invalid_argument("coloring is not total");
  const auto ch = s.children();
  // below[z][x]: a monochrome path leads from z to x.
  std::vector<std::vector<char>> below(static_cast<std::size_t>(n),
                                       std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int z = 0; z < n; ++z) {
    std::vector<int> todo{z};
    below[z][z] = 1;
    while (!todo.empty()) {
      int x = todo.back();
      todo.pop_back();
      for (int y : ch[x])
        if (c[y] == c[z] && !below[z][y]) {
          below[z][y] = 1;
          todo.push_back(y);
        }
    }
  }
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      if (c[x] != c[y]) continue;
      bool joined = false;
      for (int z = 0; z < n && !joined; ++z) joined = below[z][x] && below[z][y];
      if (!joined) return false;
    }
  return true;
}

SourcesResult minimize_sources(const Stemma& s, const Feature& f, const StemmaOptions& options) {
  s.validate();
  check_feature(s, f);
  Solver solver(SolverOptions{.seed = options.seed});
  Encoder enc(solver);
  const int k = variant_count(f);
  const auto read = encode_readings(enc, s, f);
  const auto par = s.parents();

  // IsSource(x) <-> no parent y has the reading of x (completion).
  std::vector<Lit> is_source;
  for (int x = 0; x < s.size(); ++x) {
    Lit is = enc.atom("isSource", {s.manuscripts[x]});
    std::vector<Lit> same;
    for (int p : par[x]) {
      std::vector<Lit> per_variant;
      for (int v = 0; v < k; ++v) per_variant.push_back(enc.tseitin_and({read[x][v], read[p][v]}));
      same.push_back(enc.tseitin_or(per_variant));
    }
    if (same.empty()) {
      enc.clause({is});
    } else {
      Lit any = enc.tseitin_or(same);
      enc.clause({~is, ~any});
      enc.clause({is, any});
    }
    is_source.push_back(is);
  }

  MinimizeResult r = minimize_cardinality(solver, is_source);
  if (r.status != MinimizeStatus::Optimal)
    throw std::logic_error("source minimization did not reach an optimum");
  SourcesResult out;
  out.k_min = r.k;
  out.coloring = decode_coloring(r.model, read);
  for (int x = 0; x < s.size(); ++x)
    if (r.model.value(is_source[x])) out.sources.push_back(x);
  return out;
}

std::vector<std::pair<int, int>> indirect_ancestors(const Stemma& s) {
  const auto ch = s.children();
  std::vector<std::pair<int, int>> out;
  for (int x = 0; x < s.size(); ++x) {
    // Everything reachable from a child of x through at least one more edge.
    std::vector<char> seen(s.manuscripts.size(), 0);
    std::vector<int> todo;
    for (int c : ch[x])
      for (int y : ch[c])
        if (!seen[y]) {
          seen[y] = 1;
          todo.push_back(y);
        }
    while (!todo.empty()) {
      int y = todo.back();
      todo.pop_back();
      for (int z : ch[y])
        if (!seen[z]) {
          seen[z] = 1;
          todo.push_back(z);
        }
    }
    for (int y = 0; y < s.size(); ++y)
      if (seen[y]) out.emplace_back(x, y);
  }
  return out;
}

ReducedInstance reduce_sat_to_color_connected(const CnfFormula& cnf) {
  constexpr int kBlack = 0, kWhite = 1;
  ReducedInstance out;
  Stemma& g = out.stemma;
  std::vector<std::optional<int>> color;
  auto add_node = [&](std::string name, std::optional<int> c) {
    g.manuscripts.push_back(std::move(name));
    color.push_back(c);
    return g.size() - 1;
  };
  const int r = add_node("r", kBlack);
  const int a = add_node("a", kBlack);
  const int b = add_node("b", kWhite);
  const int nv = cnf.num_vars();
  out.positive_node.assign(static_cast<std::size_t>(nv) + 1, -1);
  out.negative_node.assign(static_cast<std::size_t>(nv) + 1, -1);
  for (Var v = 1; v <= nv; ++v) out.positive_node[v] = add_node("x" + std::to_string(v), std::nullopt);

  // Monotone form: every literal -x becomes the positive variable notx, with
  // (x | notx) and (-x | -notx) added for each such notx.
  std::vector<std::vector<int>> positive, negative;
  for (const Clause& c : cnf.clauses()) {
    std::vector<int> nodes;
    for (Lit l : c) {
      if (l.positive()) {
        nodes.push_back(out.positive_node[l.var()]);
        continue;
      }
      int& neg = out.negative_node[l.var()];
      if (neg < 0) neg = add_node("notx" + std::to_string(l.var()), std::nullopt);
      nodes.push_back(neg);
    }
    positive.push_back(std::move(nodes));
  }
  for (Var v = 1; v <= nv; ++v) {
    const int neg = out.negative_node[v];
    if (neg < 0) continue;
    positive.push_back({out.positive_node[v], neg});
    negative.push_back({out.positive_node[v], neg});
  }

  std::vector<int> variable_nodes;
  for (int x = 3; x < g.size(); ++x) variable_nodes.push_back(x);
  g.copied_by.emplace_back(r, a);
  g.copied_by.emplace_back(r, b);
  for (int v : variable_nodes) {
    g.copied_by.emplace_back(a, v);
    g.copied_by.emplace_back(b, v);
  }
  for (std::size_t i = 0; i < positive.size(); ++i) {
    const int ai = add_node("a" + std::to_string(i + 1), kBlack);
    // An empty clause hangs below the white node only, so it cannot be black-connected.
    if (positive[i].empty()) g.copied_by.emplace_back(b, ai);
    for (int v : positive[i]) g.copied_by.emplace_back(v, ai);
  }
  for (std::size_t i = 0; i < negative.size(); ++i) {
    const int bi = add_node("b" + std::to_string(i + 1), kWhite);
    for (int v : negative[i]) g.copied_by.emplace_back(v, bi);
  }
  std::sort(g.copied_by.begin(), g.copied_by.end());
  g.copied_by.erase(std::unique(g.copied_by.begin(), g.copied_by.end()), g.copied_by.end());

  out.feature.variants = {"black", "white"};
  out.feature.readings = std::move(color);
  return out;
}

namespace {

struct DotToken {
  enum Kind { Id, Arrow, LBrace, RBrace, Semi, LBracket, Other, End } kind;
  std::string text;
  int line;
};

std::vector<DotToken> tokenize_dot(std::istream& in, const std::string& source) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<DotToken> out;
  int line = 1;
  std::size_t i = 0;
  auto is_id = [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
  };
  while (i < text.size()) {
    char ch = text[i];
    if (ch == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (ch == '#' || (ch == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (ch == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      auto end = text.find("*/", i + 2);
      if (end == std::string::npos) throw InputError(source, line, "unterminated comment");
      line += static_cast<int>(std::count(text.begin() + static_cast<long>(i),
                                          text.begin() + static_cast<long>(end), '\n'));
      i = end + 2;
    } else if (ch == '"') {
      std::string id;
      const int start = line;
      ++i;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        if (text[i] == '\n') ++line;
        id += text[i++];
      }
      if (i == text.size()) throw InputError(source, start, "unterminated string");
      ++i;
      out.push_back({DotToken::Id, id, start});
    } else if (ch == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      out.push_back({DotToken::Arrow, "->", line});
      i += 2;
    } else if (is_id(ch)) {
      std::size_t j = i;
      while (j < text.size() && is_id(text[j])) ++j;
      out.push_back({DotToken::Id, text.substr(i, j - i), line});
      i = j;
    } else {
      DotToken::Kind k = ch == '{'   ? DotToken::LBrace
                         : ch == '}' ? DotToken::RBrace
                         : ch == ';' ? DotToken::Semi
                         : ch == '[' ? DotToken::LBracket
                                     : DotToken::Other;
      out.push_back({k, std::string(1, ch), line});
      ++i;
    }
  }
  out.push_back({DotToken::End, "end of input", line});
  return out;
}

}  // namespace

Stemma read_stemma_dot(std::istream& in, const std::string& source) {
  const auto tokens = tokenize_dot(in, source);
  std::size_t pos = 0;
  auto peek = [&]() -> const DotToken& { return tokens[pos]; };
  auto fail = [&](const std::string& what) -> InputError {
    return InputError(source, peek().line, what + ", found '" + peek().text + "'");
  };

  if (peek().kind == DotToken::Id && peek().text == "strict") ++pos;
  if (peek().kind != DotToken::Id || peek().text != "digraph") throw fail("expected 'digraph'");
  ++pos;
  if (peek().kind == DotToken::Id) ++pos;
  if (peek().kind != DotToken::LBrace) throw fail("expected '{'");
  ++pos;

  Stemma s;
  std::map<std::string, int> index;
  auto node = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, s.size());
    if (inserted) s.manuscripts.push_back(name);
    return it->second;
  };
  auto skip_attributes = [&] {
    if (peek().kind != DotToken::LBracket) return;
    const int start = peek().line;
    while (peek().kind != DotToken::End && !(peek().kind == DotToken::Other && peek().text == "]"))
      ++pos;
    if (peek().kind == DotToken::End) throw InputError(source, start, "unterminated attribute list");
    ++pos;
  };

  while (peek().kind != DotToken::RBrace) {
    if (peek().kind == DotToken::Semi) {
      ++pos;
      continue;
    }
    if (peek().kind != DotToken::Id) throw fail("expected a manuscript name");
    const DotToken& first = peek();
    ++pos;
    if ((first.text == "node" || first.text == "edge" || first.text == "graph") &&
        peek().kind == DotToken::LBracket) {
      skip_attributes();
      continue;
    }
    if (peek().kind == DotToken::Other && peek().text == "=") {
      ++pos;
      if (peek().kind != DotToken::Id) throw fail("expected an attribute value");
      ++pos;
      continue;
    }
    int prev = node(first.text);
    while (peek().kind == DotToken::Arrow) {
      ++pos;
      if (peek().kind != DotToken::Id) throw fail("expected a manuscript name after '->'");
      int next = node(peek().text);
      ++pos;
      s.copied_by.emplace_back(prev, next);
      prev = next;
    }
    skip_attributes();
    if (peek().kind == DotToken::Other && peek().text == "-")
      throw fail("undirected edges are not supported");
    if (peek().kind != DotToken::Semi && peek().kind != DotToken::RBrace &&
        peek().kind != DotToken::Id)
      throw fail("expected ';'");
  }
  ++pos;
  if (peek().kind != DotToken::End) throw fail("trailing input after '}'");

  std::sort(s.copied_by.begin(), s.copied_by.end());
  s.copied_by.erase(std::unique(s.copied_by.begin(), s.copied_by.end()), s.copied_by.end());
  try {
    s.validate();
  } catch (const InputError& e) {
    throw InputError(source, 0, e.what());
  }
  return s;
}

void write_stemma_dot(std::ostream& out, const Stemma& s, const std::string& name) {
  auto quote = [](const std::string& id) {
    const bool plain = !id.empty() && std::all_of(id.begin(), id.end(), [](char ch) {
      return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
    });
    if (plain) return id;
    std::string q = "\"";
    for (char ch : id) {
      if (ch == '"' || ch == '\\') q += '\\';
      q += ch;
    }
    return q + "\"";
  };
  out << "digraph " << quote(name) << " {\n";
  const auto par = s.parents();
  const auto ch = s.children();
  for (int x = 0; x < s.size(); ++x)
    if (par[x].empty() && ch[x].empty()) out << "  " << quote(s.manuscripts[x]) << ";\n";
  for (const auto& [u, v] : s.copied_by)
    out << "  " << quote(s.manuscripts[u]) << " -> " << quote(s.manuscripts[v]) << ";\n";
  out << "}\n";
}

std::vector<Feature> read_features_json(std::istream& in, const Stemma& s,
                                        const std::string& source) {
  const nlohmann::json doc = detail::parse_json(in, source);
  if (!doc.is_array()) throw InputError(source, 0, "expected an array of feature objects");
  std::vector<Feature> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    const std::string where = "feature " + std::to_string(i);
    if (!obj.is_object()) throw InputError(source, 0, where + " is not an object");
    Feature f;
    f.readings.assign(s.manuscripts.size(), std::nullopt);
    for (const auto& [name, value] : obj.items()) {
      auto x = s.index_of(name);
      if (!x) throw InputError(source, 0, where + ": unknown manuscript '" + name + "'");
      if (value.is_null()) continue;
      if (!value.is_string())
        throw InputError(source, 0, where + ": reading of '" + name + "' is not a string");
      const auto& v = value.get_ref<const std::string&>();
      auto it = std::find(f.variants.begin(), f.variants.end(), v);
      if (it == f.variants.end()) it = f.variants.insert(f.variants.end(), v);
      f.readings[*x] = static_cast<int>(it - f.variants.begin());
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<FeatureReport> run_stemma_batch(const Stemma& s, const std::vector<Feature>& features,
                                            StemmaTask task, int jobs,
                                            const StemmaOptions& options) {
  s.validate();
  std::vector<FeatureReport> reports(features.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(features.size());
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < features.size();) try {
      const Feature& f = features[i];
      FeatureReport& rep = reports[i];
      if (task == StemmaTask::Check) {
        auto w = check_consistency(s, f, options);
        rep.consistent = w.has_value();
        if (w) rep.coloring = std::move(w->coloring);
      } else {
        auto r = minimize_sources(s, f, options);
        rep.k_min = r.k_min;
        rep.consistent = r.k_min == std::max(1, f.used_variants());
        rep.coloring = std::move(r.coloring);
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, features.size())));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return reports;
}

}  // namespace satkit
