#pragma once

// Reduction of a pair subgraph to a directed forest plus a bidirected spanning tree.
// The linear-time minimal set decides which almost encapsulated sets get pruned.

#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "admg/graph.hpp"
#include "admg/projection.hpp"

namespace admg {

struct MinimalReduction {
  /// Same vertices (and indices) as the input graph; only the retained edges.
  Admg reduced;
  /// Childless targets B.
  VertexSet targets;
  /// The parent outside C in the directed case.
  std::optional<Vertex> external;
  /// Vertex the bidirected tree is rooted at.
  Vertex root = 0;
  std::vector<Edge> directed_forest;
  std::vector<Edge> bidirected_tree;
  std::optional<Edge> retained_w_edge;

  /// C: every vertex except the external parent.
  VertexSet component() const {
    VertexSet c = reduced.all();
    if (external) c.erase(*external);
    return c;
  }
};

namespace detail {

/// Kahn order over `within` with every target placed after all other vertices.
inline std::vector<Vertex> order_targets_last(const Admg& g, const std::vector<char>& within,
                                              const std::vector<char>& target) {
  const std::size_t n = g.size();
  std::vector<std::size_t> indegree(n, 0);
  for (const Edge& e : g.directed_edges())
    if (within[e.from] && within[e.to]) ++indegree[e.to];
  using Key = std::pair<char, Vertex>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  for (Vertex v = 0; v < n; ++v)
    if (within[v] && indegree[v] == 0) ready.push({target[v], v});
  std::vector<Vertex> order;
  while (!ready.empty()) {
    Vertex v = ready.top().second;
    ready.pop();
    order.push_back(v);
    for (Vertex c : g.children(v))
      if (within[c] && --indegree[c] == 0) ready.push({target[c], c});
  }
  return order;
}

inline MinimalReduction rebuild(const Admg& reduced, const VertexSet& targets, std::optional<Vertex> external,
                                Vertex root) {
  MinimalReduction out;
  out.reduced = reduced;
  out.targets = targets;
  out.external = external;
  out.root = root;
  for (const Edge& e : reduced.directed_edges()) {
    if (external && e.from == *external)
      out.retained_w_edge = e;
    else
      out.directed_forest.push_back(e);
  }
  out.bidirected_tree = reduced.bidirected_edges();
  return out;
}

/// Breadth-first parents in the bidirected tree, rooted at `root`. Unreached vertices get npos.
struct RootedTree {
  static constexpr Vertex npos = static_cast<Vertex>(-1);
  std::vector<Vertex> parent;
  std::vector<std::size_t> depth;
  bool reached(Vertex v) const { return depth[v] != npos; }
};

inline RootedTree root_tree(const Admg& g, Vertex root) {
  RootedTree t;
  t.parent.assign(g.size(), RootedTree::npos);
  t.depth.assign(g.size(), RootedTree::npos);
  std::vector<Vertex> queue{root};
  t.depth[root] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex x = queue[head];
    for (Vertex y : g.siblings(x)) {
      if (t.depth[y] != RootedTree::npos) continue;
      t.depth[y] = t.depth[x] + 1;
      t.parent[y] = x;
      queue.push_back(y);
    }
  }
  return t;
}

}  // namespace detail

/// Keeps a directed forest converging on B (each vertex keeps the child closest to B,
/// ties to the child later in a targets-last topological order), one edge out of the
/// external parent, and a depth-first spanning tree of the bidirected edges rooted at `root`.
inline MinimalReduction tree_reduce(const Admg& h, const VertexSet& b, std::optional<Vertex> external,
                                    std::optional<Vertex> root = std::nullopt) {
  if (b.empty()) throw Error("tree_reduce: empty target set");
  h.require(b);
  if (external) {
    h.require(*external);
    if (b.contains(*external)) throw Error("tree_reduce: the external parent is a target");
  }
  const Vertex r = root.value_or(b.front());
  if (!b.contains(r)) throw Error("tree_reduce: the root must be a target");
  const std::size_t n = h.size();
  VertexSet c = h.all();
  if (external) c.erase(*external);
  const ClosureResult cl = closure(h, b);
  if (cl.closure != c || !cl.intrinsic)
    throw Error("tree_reduce: the targets' closure is not the whole graph minus the external parent");

  const auto in_c = c.mask(n);
  const auto in_b = b.mask(n);
  const std::vector<Vertex> order = detail::order_targets_last(h, in_c, in_b);
  std::vector<std::size_t> pos(n, 0);
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;

  // Length of the shortest directed path to B inside C.
  constexpr std::size_t unreached = static_cast<std::size_t>(-1);
  std::vector<std::size_t> dist(n, unreached);
  std::vector<Vertex> queue;
  for (Vertex x : b) {
    dist[x] = 0;
    queue.push_back(x);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex y = queue[head];
    for (Vertex p : h.parents(y)) {
      if (!in_c[p] || in_b[p] || dist[p] != unreached) continue;
      dist[p] = dist[y] + 1;
      queue.push_back(p);
    }
  }

  std::vector<Edge> directed;
  for (Vertex x : c) {
    if (in_b[x]) continue;
    std::optional<Vertex> best;
    for (Vertex ch : h.children(x)) {
      if (!in_c[ch] || dist[ch] == unreached) continue;
      if (!best || dist[ch] < dist[*best] || (dist[ch] == dist[*best] && pos[ch] > pos[*best])) best = ch;
    }
    if (!best) throw std::logic_error("tree_reduce: vertex without a path to the targets");
    directed.push_back({x, *best});
  }
  if (external) {
    std::optional<Vertex> first;
    for (Vertex ch : h.children(*external))
      if (in_c[ch] && (!first || pos[ch] < pos[*first])) first = ch;
    if (!first) throw Error("tree_reduce: the external parent has no child in the closure");
    directed.push_back({*external, *first});
  }

  // Depth-first spanning tree, neighbours taken in the order above.
  std::vector<std::vector<Vertex>> nbrs(n);
  for (Vertex x : c) {
    for (Vertex y : h.siblings(x))
      if (in_c[y]) nbrs[x].push_back(y);
    std::sort(nbrs[x].begin(), nbrs[x].end(), [&](Vertex p, Vertex q) { return pos[p] < pos[q]; });
  }
  std::vector<Edge> bidirected;
  std::vector<char> visited(n, 0);
  std::vector<std::pair<Vertex, std::size_t>> stack{{r, 0}};
  visited[r] = 1;
  while (!stack.empty()) {
    auto& [x, next] = stack.back();
    if (next == nbrs[x].size()) {
      stack.pop_back();
      continue;
    }
    Vertex y = nbrs[x][next++];
    if (visited[y]) continue;
    visited[y] = 1;
    bidirected.push_back({x, y});
    stack.push_back({y, 0});
  }
  if (bidirected.size() + 1 != c.size()) throw std::logic_error("tree_reduce: bidirected part is not spanning");

  return detail::rebuild(Admg(h.labels(), std::move(directed), std::move(bidirected)), b, external, r);
}

inline MinimalReduction tree_reduce(const PairSubgraph& ps) {
  const Vertex root = ps.kind == DenseCase::bidirected ? ps.v : ps.targets.front();
  return tree_reduce(ps.graph, ps.targets, ps.source, root);
}

/// Edges of the bidirected tree leaving each connected component of D, one count per component.
inline std::vector<std::size_t> leaving_edges(const MinimalReduction& h, const VertexSet& d) {
  if (d.empty()) throw Error("almost_encapsulated: empty set");
  h.reduced.require(d);
  if (d.intersects(h.targets)) throw Error("almost_encapsulated: set contains a target");
  if (h.external && d.contains(*h.external)) throw Error("almost_encapsulated: set contains the external parent");
  const Admg& g = h.reduced;
  const auto in_d = d.mask(g.size());
  std::vector<std::size_t> counts;
  std::vector<char> done(g.size(), 0);
  for (Vertex s : d) {
    if (done[s]) continue;
    auto comp = detail::reach(g, in_d, VertexSet{s}, detail::Walk::bidirected);
    std::size_t leaving = 0;
    for (Vertex x = 0; x < g.size(); ++x) {
      if (!comp[x]) continue;
      done[x] = 1;
      for (Vertex y : g.siblings(x))
        if (!in_d[y]) ++leaving;
    }
    counts.push_back(leaving);
  }
  return counts;
}

inline bool almost_encapsulated(const MinimalReduction& h, const VertexSet& d) {
  auto counts = leaving_edges(h, d);
  return std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 1; });
}

/// Removes an(A) from the reduction. The removed set must avoid B and the external
/// parent and be almost encapsulated.
inline MinimalReduction prune(const MinimalReduction& h, const VertexSet& a) {
  if (a.empty()) return h;
  h.reduced.require(a);
  const VertexSet c = h.component();
  if (!a.subset_of(c - h.targets)) throw Error("prune: set must lie in C minus the targets");
  const VertexSet d = ancestors(h.reduced, a);
  if (d.intersects(h.targets)) throw Error("prune: ancestors of the set include a target");
  if (h.external && d.contains(*h.external)) throw Error("prune: ancestors of the set include the external parent");
  const auto counts = leaving_edges(h, d);
  const auto bad = std::count_if(counts.begin(), counts.end(), [](std::size_t x) { return x != 1; });
  if (bad)
    throw Error("prune: ancestral set is not almost encapsulated (" + std::to_string(bad) + " of " +
                std::to_string(counts.size()) + " components do not leave by exactly one edge)");

  const VertexSet keep = h.reduced.all() - d;
  const Admg sub = induced_subgraph(h.reduced, keep);
  auto local = [&](Vertex x) { return sub.at(h.reduced.label(x)); };
  VertexSet targets;
  for (Vertex t : h.targets) targets.insert(local(t));
  std::optional<Vertex> external;
  if (h.external) external = local(*h.external);
  MinimalReduction out = detail::rebuild(sub, targets, external, local(h.root));
  if (closure(out.reduced, out.targets).closure != out.component())
    throw std::logic_error("prune: closure identity violated");
  return out;
}

/// Minimal retained set. `v` is the vertex the tree is rooted at and `w` its partner: the
/// external parent in the directed case, the second target in the bidirected case.
/// Returns W in the indices of `h.reduced`.
inline VertexSet minimal_set(const MinimalReduction& h, Vertex v, Vertex w) {
  const Admg& g = h.reduced;
  g.require(v);
  g.require(w);
  if (v != h.root) throw Error("minimal_set: the tree is not rooted at '" + g.label(v) + "'");
  if (h.external ? *h.external != w : !h.targets.contains(w))
    throw Error("minimal_set: '" + g.label(w) + "' is not the partner of '" + g.label(v) + "'");
  const std::size_t n = g.size();
  const detail::RootedTree tree = detail::root_tree(g, v);

  std::vector<char> in_w(n, 0);
  std::vector<Vertex> work;
  auto add = [&](Vertex x) {
    if (in_w[x]) return;
    in_w[x] = 1;
    work.push_back(x);
  };
  auto add_path_to_v = [&](Vertex x) {
    add(x);
    for (Vertex p = tree.parent[x]; p != detail::RootedTree::npos && !in_w[p]; p = tree.parent[p]) add(p);
  };

  if (tree.reached(w)) {
    // The crossing edge closest to both ends lies on the tree path between v and w,
    // so the seed is exactly that path.
    const auto an_v = detail::reach(g, detail::full_mask(g), VertexSet{v}, detail::Walk::up);
    const auto an_w = detail::reach(g, detail::full_mask(g), VertexSet{w}, detail::Walk::up);
    const detail::RootedTree from_w = detail::root_tree(g, w);
    std::optional<std::pair<Vertex, Vertex>> seed;
    std::size_t best = 0;
    for (const Edge& e : g.bidirected_edges()) {
      for (auto [x, y] : {std::pair{e.from, e.to}, std::pair{e.to, e.from}}) {
        if (!an_v[x] || !an_w[y]) continue;
        std::size_t cost = tree.depth[x] + from_w.depth[y];
        if (!seed || cost < best || (cost == best && std::pair{x, y} < *seed)) {
          seed = {x, y};
          best = cost;
        }
      }
    }
    if (!seed) throw Error("minimal_set: no bidirected edge joins an(v) and an(w)");
    add(v);
    add(w);
    add_path_to_v(seed->first);
    for (Vertex y = seed->second; y != detail::RootedTree::npos; y = from_w.parent[y]) add(y);
  } else {
    add(v);
    add(w);
  }

  for (std::size_t head = 0; head < work.size(); ++head) {
    Vertex x = work[head];
    for (Vertex c : g.children(x))
      if (!in_w[c]) add_path_to_v(c);
  }
  return VertexSet::from_mask(in_w);
}

/// The full reduction for a densely connected pair: pair subgraph, trees, minimal set, prune.
struct PairReduction {
  PairSubgraph pair;
  MinimalReduction trees;
  /// Retained set W in the indices of `trees.reduced`.
  VertexSet retained;
  MinimalReduction minimal;
};

inline PairReduction reduce_pair(const Admg& g, Vertex v, Vertex w, Preference preference = Preference::directed_first) {
  PairReduction out;
  out.pair = pair_subgraph(g, v, w, preference);
  out.trees = tree_reduce(out.pair);
  const Vertex partner = out.trees.external ? *out.trees.external
                         : out.trees.root == out.pair.v ? out.pair.w
                                                        : out.pair.v;
  out.retained = minimal_set(out.trees, out.trees.root, partner);
  out.minimal = prune(out.trees, out.trees.component() - out.retained);
  return out;
}

}  // namespace admg
