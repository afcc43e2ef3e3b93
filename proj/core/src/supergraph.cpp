#include "satkit/supergraph.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "json_input.hpp"
#include "satkit/error.hpp"
#include "satkit/random.hpp"

namespace satkit {

namespace {

std::pair<int, int> ordered(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

std::vector<std::pair<int, int>> unique_undirected(const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::pair<int, int>> e;
  for (const auto& [u, v] : edges) e.push_back(ordered(u, v));
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

}  // namespace

void McsInstance::validate() const {
  const int size = n();
  if (size == 0) throw InputError("instance has no names");
  for (std::size_t t = 0; t < graphs.size(); ++t) {
    const LabeledGraph& g = graphs[t];
    const std::string where = "graph " + std::to_string(t) + ": ";
    if (g.n != size) throw InputError(where + "vertex count differs from the number of names");
    if (static_cast<int>(g.labels.size()) != size) throw InputError(where + "label table size");
    for (const auto& [u, v] : g.edges) {
      if (u < 0 || u >= size || v < 0 || v >= size)
        throw InputError(where + "edge endpoint out of range");
      if (u == v) throw InputError(where + "self-loop on vertex " + std::to_string(u));
    }
    std::vector<char> used(static_cast<std::size_t>(size), 0);
    for (const auto& l : g.labels) {
      if (!l) continue;
      if (*l < 0 || *l >= size) throw InputError(where + "label out of range");
      if (used[*l]) throw InputError(where + "name '" + names[*l] + "' labels two vertices");
      used[*l] = 1;
    }
  }
}

Supergraph induced_supergraph(const McsInstance& inst, const LabelingFamily& family) {
  Supergraph sg;
  for (std::size_t t = 0; t < inst.graphs.size(); ++t)
    for (const auto& [u, v] : inst.graphs[t].edges)
      sg.arcs.push_back(ordered(family[t][u], family[t][v]));
  sg.arcs = unique_undirected(sg.arcs);
  return sg;
}

bool verify_supergraph(const McsInstance& inst, const LabelingFamily& family, const Supergraph& sg) {
  const int n = inst.n();
  if (family.size() != inst.graphs.size()) return false;
  for (std::size_t t = 0; t < family.size(); ++t) {
    const auto& lab = family[t];
    if (static_cast<int>(lab.size()) != n) return false;
    std::vector<char> hit(static_cast<std::size_t>(n), 0);
    for (int x = 0; x < n; ++x) {
      if (lab[x] < 0 || lab[x] >= n || hit[lab[x]]) return false;
      hit[lab[x]] = 1;
      const auto& given = inst.graphs[t].labels[x];
      if (given && *given != lab[x]) return false;
    }
  }
  return induced_supergraph(inst, family).arcs == sg.arcs;
}

McsEncoding encode_mcs(const McsInstance& inst) {
  inst.validate();
  McsEncoding out;
  Encoder enc(out.cnf);
  const int n = inst.n();
  const auto& names = inst.names;

  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      out.arcs.push_back(enc.atom("arc", {names[a], names[b]}));
      out.arc_names.emplace_back(a, b);
    }
  auto arc_index = [n](int a, int b) {
    return static_cast<std::size_t>(a * n - a * (a + 1) / 2 + (b - a - 1));
  };
  std::vector<std::vector<Lit>> support(out.arcs.size());

  for (std::size_t t = 0; t < inst.graphs.size(); ++t) {
    const LabeledGraph& g = inst.graphs[t];
    const std::string tn = std::to_string(t);
    // fixed_vertex[a]: the vertex labeled a in this graph, or -1.
    std::vector<int> fixed_vertex(static_cast<std::size_t>(n), -1);
    for (int x = 0; x < n; ++x)
      if (g.labels[x]) fixed_vertex[*g.labels[x]] = x;
    auto possible = [&](int x, int a) {
      if (g.labels[x]) return *g.labels[x] == a;
      return fixed_vertex[a] < 0;
    };

    auto& label = out.label.emplace_back();
    for (int x = 0; x < n; ++x) {
      auto& row = label.emplace_back();
      for (int a = 0; a < n; ++a) row.push_back(enc.atom("label", {tn, std::to_string(x), names[a]}));
    }
    for (int x = 0; x < n; ++x) {
      enc.exactly(label[x], 1);
      if (g.labels[x]) enc.clause({label[x][*g.labels[x]]});
    }
    for (int a = 0; a < n; ++a) {
      std::vector<Lit> col;
      for (int x = 0; x < n; ++x) col.push_back(label[x][a]);
      enc.exactly(col, 1);
    }

    // arc(lx,ly) <- lx = label(t,x) & ly = label(t,y) & edge(t,x,y) & lx < ly,
    // and the same with the edge reversed.
    for (const auto& [x, y] : unique_undirected(g.edges))
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (a == b || !possible(x, a) || !possible(y, b)) continue;
          Lit body = enc.tseitin_and({label[x][a], label[y][b]});
          const auto [lo, hi] = ordered(a, b);
          const auto k = arc_index(lo, hi);
          enc.clause({~body, out.arcs[k]});
          support[k].push_back(body);
        }
  }
  for (std::size_t k = 0; k < out.arcs.size(); ++k) {
    std::vector<Lit> c{~out.arcs[k]};
    c.insert(c.end(), support[k].begin(), support[k].end());
    enc.clause(c);
  }
  out.symbols = enc.symbols();
  return out;
}

McsResult exact_mcs(const McsInstance& inst, const McsOptions& options) {
  McsEncoding e = encode_mcs(inst);
  MinimizeResult r =
      minimize_cardinality(e.cnf, e.arcs, MinimizeOptions{options.seed, options.deadline});
  if (r.status == MinimizeStatus::Unknown)
    throw std::runtime_error("time budget exhausted before any supergraph was found");
  if (r.status == MinimizeStatus::NoModel)
    throw std::logic_error("supergraph encoding is unsatisfiable");
  McsResult out;
  out.status = r.status;
  out.clauses = e.cnf.num_clauses();
  out.vars = e.cnf.num_vars();
  const int n = inst.n();
  for (const auto& label : e.label) {
    auto& lab = out.labeling.emplace_back();
    for (int x = 0; x < n; ++x)
      for (int a = 0; a < n; ++a)
        if (r.model.value(label[x][a])) lab.push_back(a);
  }
  for (std::size_t k = 0; k < e.arcs.size(); ++k)
    if (r.model.value(e.arcs[k])) out.supergraph.arcs.push_back(e.arc_names[k]);
  return out;
}

McsResult greedy_mcs(const McsInstance& inst, const McsOptions& options) {
  inst.validate();
  const std::size_t t = inst.graphs.size();
  if (t < 2) throw std::invalid_argument("greedy supergraph needs at least two graphs");
  McsResult out;
  out.status = MinimizeStatus::Optimal;
  out.labeling.assign(t, {});
  auto solve = [&](std::vector<LabeledGraph> graphs) {
    McsResult r = exact_mcs(McsInstance{inst.names, std::move(graphs)}, options);
    if (r.status != MinimizeStatus::Optimal) out.status = MinimizeStatus::Suboptimal;
    out.clauses += r.clauses;
    out.vars = std::max(out.vars, r.vars);
    return r;
  };

  // Steps 1-2: the smallest pairwise supergraph.
  std::optional<McsResult> best;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = i + 1; j < t; ++j) {
      McsResult r = solve({inst.graphs[i], inst.graphs[j]});
      if (!best || r.supergraph.size() < best->supergraph.size()) {
        best = std::move(r);
        bi = i;
        bj = j;
      }
    }
  out.labeling[bi] = best->labeling[0];
  out.labeling[bj] = best->labeling[1];
  Supergraph g = best->supergraph;
  std::vector<char> done(t, 0);
  done[bi] = done[bj] = 1;

  // Steps 3-4: merge the accumulated supergraph, labeled by its own names,
  // with the remaining graph that gives the smallest result.
  const int n = inst.n();
  for (std::size_t remaining = t - 2; remaining > 0; --remaining) {
    LabeledGraph acc{n, g.arcs, {}};
    for (int a = 0; a < n; ++a) acc.labels.push_back(a);
    std::optional<McsResult> step;
    std::size_t pick = 0;
    for (std::size_t k = 0; k < t; ++k) {
      if (done[k]) continue;
      McsResult r = solve({acc, inst.graphs[k]});
      if (!step || r.supergraph.size() < step->supergraph.size()) {
        step = std::move(r);
        pick = k;
      }
    }
    out.labeling[pick] = step->labeling[1];
    g = step->supergraph;
    done[pick] = 1;
  }
  out.supergraph = induced_supergraph(inst, out.labeling);
  return out;
}

int brute_force_mcs(const McsInstance& inst, int max_free) {
  inst.validate();
  const int n = inst.n();
  struct Slots {
    std::vector<int> vertices, names;
  };
  std::vector<Slots> free(inst.graphs.size());
  for (std::size_t t = 0; t < inst.graphs.size(); ++t) {
    const auto& g = inst.graphs[t];
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    for (int x = 0; x < n; ++x) {
      if (g.labels[x])
        used[*g.labels[x]] = 1;
      else
        free[t].vertices.push_back(x);
    }
    for (int a = 0; a < n; ++a)
      if (!used[a]) free[t].names.push_back(a);
    if (static_cast<int>(free[t].vertices.size()) > max_free)
      throw std::invalid_argument("too many unlabeled vertices for exhaustive search");
  }

  std::vector<int> count(static_cast<std::size_t>(n) * n, 0);
  int current = 0, best = n * n;
  auto apply = [&](std::size_t t, const std::vector<int>& lab, int delta) {
    for (const auto& [u, v] : unique_undirected(inst.graphs[t].edges)) {
      auto [a, b] = ordered(lab[u], lab[v]);
      int& c = count[static_cast<std::size_t>(a) * n + b];
      if (delta > 0 && c++ == 0) ++current;
      if (delta < 0 && --c == 0) --current;
    }
  };
  auto search = [&](auto&& self, std::size_t t) -> void {
    if (current >= best) return;
    if (t == inst.graphs.size()) {
      best = current;
      return;
    }
    std::vector<int> lab(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x)
      if (inst.graphs[t].labels[x]) lab[x] = *inst.graphs[t].labels[x];
    std::vector<int> perm = free[t].names;
    do {
      for (std::size_t i = 0; i < perm.size(); ++i) lab[free[t].vertices[i]] = perm[i];
      apply(t, lab, +1);
      self(self, t + 1);
      apply(t, lab, -1);
    } while (std::next_permutation(perm.begin(), perm.end()));
  };
  search(search, 0);
  return best;
}

McsInstance random_mcs_instance(int trees, int n, int labeled, std::uint64_t seed) {
  if (n < 1 || labeled < 0 || labeled > n || trees < 1)
    throw std::invalid_argument("random_mcs_instance: bad parameters");
  Rng rng(seed);
  McsInstance inst;
  for (int a = 0; a < n; ++a) inst.names.push_back(std::to_string(a));
  auto shuffled = [&] {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    return p;
  };
  for (int t = 0; t < trees; ++t) {
    LabeledGraph g{n, {}, std::vector<std::optional<int>>(static_cast<std::size_t>(n))};
    const auto order = shuffled();
    for (int i = 1; i < n; ++i) g.edges.emplace_back(order[rng.below(static_cast<std::uint64_t>(i))], order[i]);
    const auto where = shuffled();
    for (int a = 0; a < labeled; ++a) g.labels[where[a]] = a;
    inst.graphs.push_back(std::move(g));
  }
  return inst;
}

McsInstance read_mcs_json(std::istream& in, const std::string& source) {
  const nlohmann::json doc = detail::parse_json(in, source);
  auto fail = [&](const std::string& what) { return InputError(source, 0, what); };
  if (!doc.is_object()) throw fail("expected an object with 'names' and 'graphs'");
  if (!doc.contains("names") || !doc["names"].is_array()) throw fail("missing array 'names'");
  if (!doc.contains("graphs") || !doc["graphs"].is_array()) throw fail("missing array 'graphs'");
  McsInstance inst;
  for (const auto& nm : doc["names"]) {
    if (!nm.is_string()) throw fail("names must be strings");
    inst.names.push_back(nm.get<std::string>());
  }
  const int n = inst.n();
  if (doc.contains("n") && (!doc["n"].is_number_integer() || doc["n"].get<int>() != n))
    throw fail("'n' does not match the number of names");
  auto name_index = [&](const std::string& nm) -> std::optional<int> {
    auto it = std::find(inst.names.begin(), inst.names.end(), nm);
    if (it == inst.names.end()) return std::nullopt;
    return static_cast<int>(it - inst.names.begin());
  };
  for (std::size_t t = 0; t < doc["graphs"].size(); ++t) {
    const auto& gj = doc["graphs"][t];
    const std::string where = "graph " + std::to_string(t) + ": ";
    if (!gj.is_object()) throw fail(where + "expected an object");
    LabeledGraph g{n, {}, std::vector<std::optional<int>>(static_cast<std::size_t>(n))};
    const nlohmann::json edges = gj.value("edges", nlohmann::json::array());
    const nlohmann::json labels = gj.value("labels", nlohmann::json::object());
    if (!edges.is_array() || !labels.is_object())
      throw fail(where + "'edges' must be an array and 'labels' an object");
    for (const auto& e : edges) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw fail(where + "edges must be pairs of vertex ids");
      g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    for (const auto& [key, value] : labels.items()) {
      int x = -1;
      try {
        std::size_t used = 0;
        x = std::stoi(key, &used);
        if (used != key.size()) x = -1;
      } catch (const std::exception&) {
      }
      if (x < 0 || x >= n) throw fail(where + "label key '" + key + "' is not a vertex id");
      if (!value.is_string()) throw fail(where + "label of vertex " + key + " is not a string");
      auto a = name_index(value.get<std::string>());
      if (!a) throw fail(where + "unknown name '" + value.get<std::string>() + "'");
      g.labels[x] = *a;
    }
    inst.graphs.push_back(std::move(g));
  }
  try {
    inst.validate();
  } catch (const InputError& e) {
    throw fail(e.what());
  }
  return inst;
}

void write_mcs_json(std::ostream& out, const McsInstance& inst) {
  nlohmann::json doc;
  doc["n"] = inst.n();
  doc["names"] = inst.names;
  doc["graphs"] = nlohmann::json::array();
  for (const auto& g : inst.graphs) {
    nlohmann::json gj;
    gj["edges"] = nlohmann::json::array();
    for (const auto& [u, v] : g.edges) gj["edges"].push_back({u, v});
    gj["labels"] = nlohmann::json::object();
    for (int x = 0; x < g.n; ++x)
      if (g.labels[x]) gj["labels"][std::to_string(x)] = inst.names[*g.labels[x]];
    doc["graphs"].push_back(std::move(gj));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace satkit
