#pragma once

// Fixing on CADMGs, reachable/intrinsic set enumeration and reachable closures.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "admg/graph.hpp"

namespace admg {

/// Enumerations over subsets refuse graphs with more random vertices than this.
inline constexpr std::size_t kMaxEnumerationVertices = 16;

class SizeGuardError : public Error {
 public:
  using Error::Error;
};

/// r is fixable when nothing else is both its sibling-connected relative and its descendant.
inline bool is_fixable(const Cadmg& g, Vertex r) {
  g.graph().require(r);
  if (g.is_fixed(r)) throw Error("is_fixable: '" + g.graph().label(r) + "' is fixed");
  const VertexSet dis = relatives(g, VertexSet{r}, Relation::district);
  const VertexSet de = descendants(g.graph(), VertexSet{r});
  return (dis & de) == VertexSet{r};
}

/// Fixes one vertex: drops `-> r` and `<-> r`, moves r to the fixed set.
inline Cadmg fix_vertex(const Cadmg& g, Vertex r) {
  if (!is_fixable(g, r)) throw Error("'" + g.graph().label(r) + "' is not fixable");
  const Admg& old = g.graph();
  std::vector<Edge> d, b;
  for (const Edge& e : old.directed_edges())
    if (e.to != r) d.push_back(e);
  for (const Edge& e : old.bidirected_edges())
    if (e.from != r && e.to != r) b.push_back(e);
  VertexSet fixed = g.fixed();
  fixed.insert(r);
  return Cadmg(Admg(old.labels(), std::move(d), std::move(b)), fixed);
}

/// Fixes along an explicit sequence; every step must be fixable when it is reached.
inline Cadmg fix_graph(const Cadmg& g, const std::vector<Vertex>& sequence) {
  Cadmg cur = g;
  for (Vertex r : sequence) cur = fix_vertex(cur, r);
  return cur;
}

/// Fixes a set in the first valid order found greedily. Fixability is preserved by
/// fixing other vertices, so greedy search finds an order whenever one exists.
inline std::vector<Vertex> fixing_order(const Cadmg& g, const VertexSet& set) {
  g.graph().require(set);
  Cadmg cur = g;
  VertexSet todo = set;
  std::vector<Vertex> order;
  while (!todo.empty()) {
    bool progressed = false;
    for (Vertex r : todo) {
      if (cur.is_fixed(r)) throw Error("'" + g.graph().label(r) + "' is already fixed");
      if (is_fixable(cur, r)) {
        cur = fix_vertex(cur, r);
        order.push_back(r);
        todo.erase(r);
        progressed = true;
        break;
      }
    }
    if (!progressed)
      throw Error("no valid fixing sequence: none of {" + [&] {
        std::string s;
        for (Vertex r : todo) s += (s.empty() ? "" : ", ") + g.graph().label(r);
        return s;
      }() + "} is fixable");
  }
  return order;
}

inline Cadmg fix_graph(const Cadmg& g, const VertexSet& set) { return fix_graph(g, fixing_order(g, set)); }

namespace detail {

using Bits = std::uint64_t;

inline Bits bit(Vertex v) { return Bits{1} << v; }

/// Fixability of r in the graph reached by keeping only `alive` random.
inline bool fixable_in(const Admg& g, Bits alive, Vertex r) {
  Bits dis = bit(r), frontier = bit(r);
  while (frontier) {
    Vertex x = static_cast<Vertex>(__builtin_ctzll(frontier));
    frontier &= frontier - 1;
    for (Vertex y : g.siblings(x))
      if ((alive & bit(y)) && !(dis & bit(y))) {
        dis |= bit(y);
        frontier |= bit(y);
      }
  }
  Bits de = bit(r);
  frontier = bit(r);
  while (frontier) {
    Vertex x = static_cast<Vertex>(__builtin_ctzll(frontier));
    frontier &= frontier - 1;
    for (Vertex y : g.children(x))
      if ((alive & bit(y)) && !(de & bit(y))) {
        de |= bit(y);
        frontier |= bit(y);
      }
  }
  return (dis & de) == bit(r);
}

inline VertexSet from_bits(Bits b) {
  std::vector<Vertex> out;
  while (b) {
    out.push_back(static_cast<Vertex>(__builtin_ctzll(b)));
    b &= b - 1;
  }
  return VertexSet(std::move(out));
}

inline Bits to_bits(const VertexSet& s) {
  Bits b = 0;
  for (Vertex v : s) b |= bit(v);
  return b;
}

inline Bits bidirected_component(const Admg& g, Bits within, Vertex start) {
  Bits seen = bit(start), frontier = bit(start);
  while (frontier) {
    Vertex x = static_cast<Vertex>(__builtin_ctzll(frontier));
    frontier &= frontier - 1;
    for (Vertex y : g.siblings(x))
      if ((within & bit(y)) && !(seen & bit(y))) {
        seen |= bit(y);
        frontier |= bit(y);
      }
  }
  return seen;
}

inline void guard_size(const Cadmg& g) {
  if (g.random().size() > kMaxEnumerationVertices || g.size() > 63)
    throw SizeGuardError("enumeration over " + std::to_string(g.random().size()) +
                         " random vertices exceeds the limit of " + std::to_string(kMaxEnumerationVertices));
}

}  // namespace detail

/// All non-empty random sets reachable by some fixing sequence, ordered by size then vertices.
inline std::vector<VertexSet> reachable_sets(const Cadmg& g) {
  detail::guard_size(g);
  const Admg& graph = g.graph();
  const detail::Bits start = detail::to_bits(g.random());
  std::set<detail::Bits> seen{start};
  std::vector<detail::Bits> stack{start};
  while (!stack.empty()) {
    detail::Bits alive = stack.back();
    stack.pop_back();
    for (detail::Bits rest = alive; rest; rest &= rest - 1) {
      Vertex r = static_cast<Vertex>(__builtin_ctzll(rest));
      if (!detail::fixable_in(graph, alive, r)) continue;
      detail::Bits next = alive & ~detail::bit(r);
      if (next && seen.insert(next).second) stack.push_back(next);
    }
  }
  std::vector<VertexSet> out;
  for (detail::Bits s : seen) out.push_back(detail::from_bits(s));
  std::sort(out.begin(), out.end());
  return out;
}
inline std::vector<VertexSet> reachable_sets(const Admg& g) { return reachable_sets(Cadmg(g)); }

/// Reachable sets that form a single district once everything else is fixed.
inline std::vector<VertexSet> intrinsic_sets(const Cadmg& g) {
  std::vector<VertexSet> out;
  for (const VertexSet& s : reachable_sets(g)) {
    detail::Bits bits = detail::to_bits(s);
    if (detail::bidirected_component(g.graph(), bits, s.front()) == bits) out.push_back(s);
  }
  return out;
}
inline std::vector<VertexSet> intrinsic_sets(const Admg& g) { return intrinsic_sets(Cadmg(g)); }

/// Greedily fixes every fixable random vertex outside `s`; returns the surviving random set.
inline VertexSet reachable_closure(const Cadmg& g, const VertexSet& s) {
  if (s.empty()) throw Error("reachable_closure: empty vertex set");
  g.graph().require(s);
  for (Vertex v : s)
    if (g.is_fixed(v)) throw Error("reachable_closure: '" + g.graph().label(v) + "' is fixed");
  Cadmg cur = g;
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (Vertex r : cur.random() - s) {
      if (is_fixable(cur, r)) {
        cur = fix_vertex(cur, r);
        progressed = true;
      }
    }
  }
  return cur.random();
}
inline VertexSet reachable_closure(const Admg& g, const VertexSet& s) { return reachable_closure(Cadmg(g), s); }

}  // namespace admg
