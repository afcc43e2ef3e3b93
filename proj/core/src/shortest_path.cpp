#include "satkit/shortest_path.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "satkit/error.hpp"
#include "satkit/random.hpp"

namespace satkit {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<Edge> unique_edges(const DiGraph& g) {
  std::vector<Edge> e = g.edges;
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

}  // namespace

bool DiGraph::has_edge(int u, int v) const {
  return std::find(edges.begin(), edges.end(), Edge{u, v}) != edges.end();
}

bool DiGraph::has_self_loop() const {
  return std::any_of(edges.begin(), edges.end(),
                     [](const Edge& e) { return e.first == e.second; });
}

DiGraph DiGraph::numbered(int n, std::vector<Edge> edges, int from, int to) {
  DiGraph g;
  for (int i = 0; i < n; ++i) g.nodes.push_back(std::to_string(i));
  g.edges = std::move(edges);
  g.from = from;
  g.to = to;
  return g;
}

void DiGraph::validate() const {
  const int n = size();
  if (n == 0) throw InputError("graph has no nodes");
  if (from < 0 || from >= n || to < 0 || to >= n)
    throw InputError("from/to outside the node range");
  for (const auto& [u, v] : edges)
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw InputError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                       ") outside the node range");
}

DiGraph read_graph(std::istream& in, const std::string& source) {
  std::vector<std::pair<int, std::vector<long>>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<long> values;
    long v;
    while (ls >> v) values.push_back(v);
    if (!ls.eof()) throw InputError(source, lineno, "expected integers");
    rows.emplace_back(lineno, std::move(values));
  }
  auto need = [&](std::size_t row, const char* what) -> const std::vector<long>& {
    if (row >= rows.size())
      throw InputError(source, lineno, std::string("unexpected end of input: missing ") + what);
    if (rows[row].second.size() != 2)
      throw InputError(source, rows[row].first, std::string("expected two integers (") + what + ")");
    return rows[row].second;
  };
  const auto& header = need(0, "header 'n m'");
  if (header[0] <= 0 || header[1] < 0)
    throw InputError(source, rows[0].first, "header needs n > 0 and m >= 0");
  const int n = static_cast<int>(header[0]);
  const auto m = static_cast<std::size_t>(header[1]);
  auto check_node = [&](long v, std::size_t row) {
    if (v < 0 || v >= n)
      throw InputError(source, rows[row].first,
                       "node " + std::to_string(v) + " outside 0.." + std::to_string(n - 1));
    return static_cast<int>(v);
  };
  std::vector<Edge> edges;
  for (std::size_t i = 1; i <= m; ++i) {
    const auto& e = need(i, "edge 'u v'");
    edges.emplace_back(check_node(e[0], i), check_node(e[1], i));
  }
  const auto& ft = need(m + 1, "'from to'");
  DiGraph g = DiGraph::numbered(n, std::move(edges), check_node(ft[0], m + 1),
                                check_node(ft[1], m + 1));
  if (rows.size() > m + 2) throw InputError(source, rows[m + 2].first, "trailing data");
  return g;
}

void write_graph(std::ostream& out, const DiGraph& g) {
  out << g.size() << ' ' << g.edges.size() << '\n';
  for (const auto& [u, v] : g.edges) out << u << ' ' << v << '\n';
  out << g.from << ' ' << g.to << '\n';
}

DiGraph random_digraph(int n, double density, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_digraph needs n >= 2");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && rng.chance(density)) edges.emplace_back(u, v);
  int from = rng.range(0, n - 1);
  int to = rng.range(0, n - 2);
  if (to >= from) ++to;
  return DiGraph::numbered(n, std::move(edges), from, to);
}

ShortestPathEncoding encode_variant(const DiGraph& g, int variant) {
  if (variant < 1 || variant > 4)
    throw std::invalid_argument("shortest-path variant must be 1..4");
  g.validate();
  const auto t0 = Clock::now();
  ShortestPathEncoding out;
  Encoder enc(out.cnf);
  const int n = g.size();
  const auto& name = g.nodes;
  auto idx = [n](int x, int y) { return static_cast<std::size_t>(x) * n + y; };

  std::vector<Lit> on_path(static_cast<std::size_t>(n) * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) on_path[idx(x, y)] = enc.atom("edgeOnPath", {name[x], name[y]});

  const std::vector<Edge> edges = unique_edges(g);
  std::vector<char> is_edge(static_cast<std::size_t>(n) * n, 0);
  for (const auto& [u, v] : edges) is_edge[idx(u, v)] = 1;

  // (1)
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (!is_edge[idx(x, y)]) enc.clause({~on_path[idx(x, y)]});

  for (const auto& [u, v] : edges) {
    out.objective.push_back(on_path[idx(u, v)]);
    out.objective_edges.emplace_back(u, v);
  }

  if (variant <= 3) {
    // (3)
    for (const auto& [u, v] : edges)
      if (v == g.from || u == g.to) enc.clause({~on_path[idx(u, v)]});
    // (4)
    for (int x = 0; x < n; ++x) {
      std::vector<Lit> in, outgoing;
      for (const auto& [u, v] : edges) {
        if (v == x) in.push_back(on_path[idx(u, v)]);
        if (u == x) outgoing.push_back(on_path[idx(u, v)]);
      }
      enc.at_most(in, 1);
      enc.at_most(outgoing, 1);
    }
  }

  if (variant <= 2) {
    std::vector<Lit> reaches(static_cast<std::size_t>(n) * n);
    std::vector<std::vector<Lit>> level(static_cast<std::size_t>(n) * n);
    const int width = level_width(n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        reaches[idx(x, y)] = enc.atom("reaches", {name[x], name[y]});
        level[idx(x, y)] = enc.new_number(width);
      }

    std::vector<std::vector<Lit>> support(static_cast<std::size_t>(n) * n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        const auto xy = idx(x, y);
        // reaches(x,y) <- edgeOnPath(x,y).
        enc.clause({~on_path[xy], reaches[xy]});
        support[xy].push_back(on_path[xy]);
      }

    if (variant == 1) {
      // reaches(x,y) <- reaches(x,z) & reaches(z,y).
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          for (int z = 0; z < n; ++z)
            if (z != x && z != y)
              enc.clause({~reaches[idx(x, z)], ~reaches[idx(z, y)], reaches[idx(x, y)]});
    }
    // Justification of a true reaches(x,y): its own edge, or a first edge (x,z)
    // followed by reaches(z,y) at a strictly smaller level. This has the same
    // least fixpoint as both definitions (the transitive closure of
    // edgeOnPath), and unlike a level check on the join it keeps refutations
    // polynomial for the solver.
    for (const auto& [x, z] : edges) {
      if (x == z) continue;
      for (int y = 0; y < n; ++y) {
        const auto xy = idx(x, y), xz = idx(x, z), zy = idx(z, y);
        if (variant == 2)  // reaches(x,y) <- edgeOnPath(x,z) & reaches(z,y).
          enc.clause({~on_path[xz], ~reaches[zy], reaches[xy]});
        Lit s = enc.fresh();
        enc.clause({~s, on_path[xz]});
        enc.clause({~s, reaches[zy]});
        enc.clause({~s, enc.implies_less_than(level[zy], level[xy])});
        support[xy].push_back(s);
      }
    }
    for (std::size_t p = 0; p < support.size(); ++p) {
      std::vector<Lit> c{~reaches[p]};
      c.insert(c.end(), support[p].begin(), support[p].end());
      enc.clause(c);
    }
    // (2)
    enc.clause({reaches[idx(g.from, g.to)]});
    // (5)
    for (const auto& [u, v] : edges)
      enc.clause({~on_path[idx(u, v)], reaches[idx(g.from, v)]});
  } else {
    std::vector<SelectableEdge> selectable;
    for (const auto& [u, v] : edges) selectable.push_back({u, v, on_path[idx(u, v)]});
    std::vector<Lit> reachable = encode_founded_reachability(enc, n, selectable, g.from);
    for (int v = 0; v < n; ++v)
      enc.symbols().bind(SymbolTable::atom_name("reachable", std::span(&name[v], 1)),
                         reachable[v].var());
    // (2)
    enc.clause({reachable[g.to]});
    if (variant == 3) {
      // (5)
      for (const auto& [u, v] : edges) enc.clause({~on_path[idx(u, v)], reachable[v]});
    }
  }

  out.symbols = std::move(enc.symbols());
  out.stats.variant = variant;
  out.stats.vars = out.cnf.num_vars();
  out.stats.clauses = out.cnf.num_clauses();
  out.stats.encode_ms = ms_since(t0);
  return out;
}

std::optional<PathResult> solve_shortest_path(const DiGraph& g, int variant,
                                              const ShortestPathOptions& options) {
  if (variant < 1 || variant > 4)
    throw std::invalid_argument("shortest-path variant must be 1..4");
  g.validate();
  if (g.from == g.to) {
    PathResult r;
    r.stats.variant = variant;
    return r;
  }
  ShortestPathEncoding enc = encode_variant(g, variant);
  const auto t0 = Clock::now();
  MinimizeResult m = minimize_cardinality(
      enc.cnf, enc.objective, MinimizeOptions{.seed = options.seed, .deadline = options.deadline});
  enc.stats.solve_ms = ms_since(t0);
  if (m.status == MinimizeStatus::NoModel) return std::nullopt;
  if (m.status == MinimizeStatus::Unknown)
    throw std::runtime_error("time budget exhausted before any path was found");

  std::vector<int> next(static_cast<std::size_t>(g.size()), -1);
  int selected = 0;
  for (std::size_t i = 0; i < enc.objective.size(); ++i) {
    if (!m.model.value(enc.objective[i])) continue;
    const auto [u, v] = enc.objective_edges[i];
    next[u] = v;
    ++selected;
  }
  PathResult r;
  r.status = m.status;
  r.stats = enc.stats;
  for (int cur = g.from; cur != g.to;) {
    int nx = next[cur];
    if (nx < 0 || static_cast<int>(r.edges.size()) >= selected)
      throw std::logic_error("decoded edge set is not a from-to path");
    r.edges.emplace_back(cur, nx);
    cur = nx;
  }
  if (static_cast<int>(r.edges.size()) != selected)
    throw std::logic_error("decoded edge set has edges off the path");
  r.length = selected;
  return r;
}

std::optional<int> bfs_oracle(const DiGraph& g) {
  const int n = g.size();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& [u, v] : g.edges) adj[u].push_back(v);
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::deque<int> queue{g.from};
  dist[g.from] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (u == g.to) return dist[u];
    for (int v : adj[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return std::nullopt;
}

bool satisfies_path_constraints(const DiGraph& g, const std::vector<Edge>& selected) {
  const int n = g.size();
  std::vector<int> indeg(static_cast<std::size_t>(n), 0), outdeg(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& [u, v] : selected) {
    if (!g.has_edge(u, v)) return false;                 // (1)
    if (v == g.from || u == g.to) return false;          // (3)
    if (++indeg[v] > 1 || ++outdeg[u] > 1) return false;  // (4)
    adj[u].push_back(v);
  }
  // reaches(from, .) over the selection, paths of length >= 1
  std::vector<char> reached(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{g.from};
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!reached[v]) {
        reached[v] = 1;
        stack.push_back(v);
      }
  }
  if (!reached[g.to]) return false;  // (2)
  for (const auto& e : selected)
    if (!reached[e.second]) return false;  // (5)
  return true;
}

}  // namespace satkit
