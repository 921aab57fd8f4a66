#pragma once

// Latent projection and canonical DAGs; closures and the maximal arid projection.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "admg/fixing.hpp"
#include "admg/graph.hpp"

namespace admg {

/// Marginalizes `latent` out of a CADMG. Fixed vertices stay fixed.
inline Cadmg latent_project(const Cadmg& cg, const VertexSet& latent) {
  const Admg& g = cg.graph();
  g.require(latent);
  for (Vertex h : latent)
    if (cg.is_fixed(h)) throw Error("latent_project: fixed vertex '" + g.label(h) + "' cannot be latent");
  if (latent.empty()) return cg;

  const std::size_t n = g.size();
  const auto is_latent = latent.mask(n);
  const VertexSet kept = g.all() - latent;
  std::vector<Vertex> remap(n, 0);
  std::vector<std::string> labels;
  for (Vertex v : kept) {
    remap[v] = labels.size();
    labels.push_back(g.label(v));
  }

  std::vector<Edge> directed, bidirected;
  std::vector<char> seen(2 * n);
  for (Vertex a : kept) {
    // a -> b: directed path from a whose interior lies in the latent set.
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<Vertex> stack{a};
    while (!stack.empty()) {
      Vertex x = stack.back();
      stack.pop_back();
      for (Vertex y : g.children(x)) {
        if (seen[y]) continue;
        seen[y] = 1;
        if (is_latent[y])
          stack.push_back(y);
        else if (y != a)
          directed.push_back({remap[a], remap[y]});
      }
    }

    // a <-> b: collider-free path, arrowheads at both ends, interior latent.
    if (cg.is_fixed(a)) continue;
    std::fill(seen.begin(), seen.end(), 0);
    struct State {
      Vertex v;
      bool head;  // arrived with an arrowhead at v
    };
    std::vector<State> todo;
    auto arrive = [&](Vertex y, bool head_at_y) {
      if (is_latent[y]) {
        if (!seen[2 * y + head_at_y]) {
          seen[2 * y + head_at_y] = 1;
          todo.push_back({y, head_at_y});
        }
      } else if (head_at_y && y != a && !cg.is_fixed(y) && remap[a] < remap[y]) {
        bidirected.push_back({remap[a], remap[y]});
      }
    };
    for (Vertex p : g.parents(a)) arrive(p, false);
    for (Vertex s : g.siblings(a)) arrive(s, true);
    while (!todo.empty()) {
      State st = todo.back();
      todo.pop_back();
      // Leaving with a tail at st.v is always allowed; leaving with an arrowhead
      // would make st.v a collider unless it was entered by a tail.
      for (Vertex y : g.children(st.v)) arrive(y, true);
      if (!st.head) {
        for (Vertex y : g.parents(st.v)) arrive(y, false);
        for (Vertex y : g.siblings(st.v)) arrive(y, true);
      }
    }
  }
  std::sort(bidirected.begin(), bidirected.end());
  bidirected.erase(std::unique(bidirected.begin(), bidirected.end()), bidirected.end());
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  VertexSet fixed;
  for (Vertex v : cg.fixed()) fixed.insert(remap[v]);
  return Cadmg(Admg(std::move(labels), std::move(directed), std::move(bidirected)), fixed);
}

inline Admg latent_project(const Admg& g, const VertexSet& latent) {
  return latent_project(Cadmg(g), latent).graph();
}

struct CanonicalDag {
  Admg dag;
  /// Hidden vertices of `dag`, one per bidirected edge of the source graph.
  VertexSet hidden;
  /// (bidirected edge of the source graph, hidden vertex in `dag`).
  std::vector<std::pair<Edge, Vertex>> mapping;
};

inline bool is_reserved_hidden_label(std::string_view label) {
  if (label.size() < 3 || label.substr(0, 2) != "_h") return false;
  return std::all_of(label.begin() + 2, label.end(), [](char c) { return c >= '0' && c <= '9'; });
}

/// Replaces each bidirected edge by a fresh hidden parent `_h1, _h2, ...` numbered
/// in label order of the edges.
inline CanonicalDag canonical_dag(const Admg& g) {
  for (const auto& l : g.labels())
    if (is_reserved_hidden_label(l))
      throw Error("canonical_dag: label '" + l + "' collides with generated hidden names");
  std::vector<Edge> bi = g.bidirected_edges();
  auto name = [&](const Edge& e) {
    auto x = g.label(e.from), y = g.label(e.to);
    if (y < x) std::swap(x, y);
    return std::pair(x, y);
  };
  std::sort(bi.begin(), bi.end(), [&](const Edge& p, const Edge& q) { return name(p) < name(q); });

  std::vector<std::string> labels = g.labels();
  std::vector<Edge> directed = g.directed_edges();
  CanonicalDag out;
  std::vector<Vertex> hidden;
  for (std::size_t i = 0; i < bi.size(); ++i) {
    Vertex h = labels.size();
    labels.push_back("_h" + std::to_string(i + 1));
    directed.push_back({h, bi[i].from});
    directed.push_back({h, bi[i].to});
    hidden.push_back(h);
    out.mapping.emplace_back(bi[i], h);
  }
  out.dag = Admg(std::move(labels), std::move(directed), {});
  out.hidden = VertexSet(std::move(hidden));
  return out;
}

struct ClosureResult {
  VertexSet closure;
  bool intrinsic = false;
  /// B^(0) = V followed by every set that differs from its predecessor.
  std::vector<VertexSet> iterations;
};

/// Alternates district-of-B and ancestors-of-B restrictions starting from V.
inline ClosureResult closure(const Admg& g, const VertexSet& b) {
  if (b.empty()) throw Error("closure: empty vertex set");
  g.require(b);
  detail::Mask cur = detail::full_mask(g);
  ClosureResult out;
  out.iterations.push_back(g.all());
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto walk : {detail::Walk::bidirected, detail::Walk::up}) {
      detail::Mask next = detail::reach(g, cur, b, walk);
      if (next != cur) {
        cur = std::move(next);
        out.iterations.push_back(VertexSet::from_mask(cur));
        changed = true;
      }
    }
  }
  out.closure = VertexSet::from_mask(cur);
  out.intrinsic = bidirected_connected(g, out.closure);
  return out;
}

inline bool is_arid(const Admg& g) {
  for (Vertex v = 0; v < g.size(); ++v)
    if (closure(g, VertexSet{v}).closure != VertexSet{v}) return false;
  return true;
}

enum class DenseCase { directed_vw, directed_wv, bidirected, none };

inline const char* to_string(DenseCase c) {
  switch (c) {
    case DenseCase::directed_vw: return "directed_vw";
    case DenseCase::directed_wv: return "directed_wv";
    case DenseCase::bidirected: return "bidirected";
    case DenseCase::none: return "none";
  }
  return "none";
}

struct DenseVerdict {
  bool dense = false;
  /// Preferred case under directed-first ordering.
  DenseCase kind = DenseCase::none;
  VertexSet witness_closure;
  /// Every condition that holds, in the order directed_wv, directed_vw, bidirected.
  std::vector<DenseCase> cases;
};

/// directed_wv: w in pa(<v>); directed_vw: v in pa(<w>); bidirected: <{v,w}> is bidirected-connected.
inline DenseVerdict densely_connected(const Admg& g, Vertex v, Vertex w) {
  g.require(v);
  g.require(w);
  if (v == w) throw Error("densely_connected: a vertex is paired with itself");
  const VertexSet cv = closure(g, VertexSet{v}).closure;
  const VertexSet cw = closure(g, VertexSet{w}).closure;
  const ClosureResult cvw = closure(g, VertexSet{v, w});
  DenseVerdict out;
  if (parents(g, cv).contains(w)) out.cases.push_back(DenseCase::directed_wv);
  if (parents(g, cw).contains(v)) out.cases.push_back(DenseCase::directed_vw);
  if (cvw.intrinsic) out.cases.push_back(DenseCase::bidirected);
  out.dense = !out.cases.empty();
  if (out.dense) {
    out.kind = out.cases.front();
    out.witness_closure = out.kind == DenseCase::directed_wv   ? cv
                          : out.kind == DenseCase::directed_vw ? cw
                                                               : cvw.closure;
  }
  return out;
}

/// The maximal arid projection.
inline Admg marg_project(const Admg& g) {
  const std::size_t n = g.size();
  std::vector<Edge> directed;
  std::vector<VertexSet> parent_sets(n);
  for (Vertex b = 0; b < n; ++b) {
    parent_sets[b] = parents(g, closure(g, VertexSet{b}).closure);
    for (Vertex a : parent_sets[b]) directed.push_back({a, b});
  }
  std::vector<Edge> bidirected;
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b) {
      if (parent_sets[b].contains(a) || parent_sets[a].contains(b)) continue;
      if (closure(g, VertexSet{a, b}).intrinsic) bidirected.push_back({a, b});
    }
  return Admg(g.labels(), std::move(directed), std::move(bidirected));
}

inline bool is_maximal(const Admg& g) {
  for (Vertex a = 0; a < g.size(); ++a)
    for (Vertex b = a + 1; b < g.size(); ++b)
      if (!g.adjacent(a, b) && densely_connected(g, a, b).dense) return false;
  return true;
}

/// Raised when a pair is not densely connected, i.e. a nested constraint separates it.
class NestedConstraint : public Error {
 public:
  using Error::Error;
};

enum class Preference { directed_first, bidirected_first };

struct PairSubgraph {
  /// Induced subgraph; its vertex indices are local to this graph.
  Admg graph;
  DenseCase kind = DenseCase::none;
  /// Childless targets B: {sink} in the directed cases, {v, w} in the bidirected case.
  VertexSet targets;
  /// The parent feeding the closure in the directed cases.
  std::optional<Vertex> source;
  Vertex v = 0;
  Vertex w = 0;
};

/// Restricts G to <v> + {w}, <w> + {v} or <{v,w}>. A directed case is only taken when
/// the parent lies outside the closure; otherwise the pair is bidirected-connected and
/// that case is used.
inline PairSubgraph pair_subgraph(const Admg& g, Vertex v, Vertex w,
                                  Preference preference = Preference::directed_first) {
  g.require(v);
  g.require(w);
  if (v == w) throw Error("pair_subgraph: a vertex is paired with itself");
  const VertexSet cv = closure(g, VertexSet{v}).closure;
  const VertexSet cw = closure(g, VertexSet{w}).closure;
  const ClosureResult cvw = closure(g, VertexSet{v, w});

  std::vector<DenseCase> usable;
  const bool wv = parents(g, cv).contains(w) && !cv.contains(w);
  const bool vw = parents(g, cw).contains(v) && !cw.contains(v);
  if (preference == Preference::bidirected_first && cvw.intrinsic) usable.push_back(DenseCase::bidirected);
  if (wv) usable.push_back(DenseCase::directed_wv);
  if (vw) usable.push_back(DenseCase::directed_vw);
  if (preference == Preference::directed_first && cvw.intrinsic) usable.push_back(DenseCase::bidirected);
  if (usable.empty())
    throw NestedConstraint("'" + g.label(v) + "' and '" + g.label(w) +
                           "' are not densely connected: a nested constraint exists between them");

  PairSubgraph out;
  out.kind = usable.front();
  VertexSet keep;
  Vertex sink = v, src = w;
  switch (out.kind) {
    case DenseCase::directed_wv: keep = cv | VertexSet{w}; break;
    case DenseCase::directed_vw:
      keep = cw | VertexSet{v};
      sink = w;
      src = v;
      break;
    default: keep = cvw.closure; break;
  }
  out.graph = induced_subgraph(g, keep);
  auto local = [&](Vertex x) { return out.graph.at(g.label(x)); };
  out.v = local(v);
  out.w = local(w);
  if (out.kind == DenseCase::bidirected) {
    out.targets = VertexSet{out.v, out.w};
  } else {
    out.targets = VertexSet{local(sink)};
    out.source = local(src);
  }
  return out;
}

}  // namespace admg
