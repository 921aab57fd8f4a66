#pragma once

// Acyclic directed mixed graphs (ADMGs) and their conditional variant
// (CADMGs), plus the genealogical queries every other module builds on.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <initializer_list>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace admg {

/// Index of a vertex in its graph's declaration order.
using Vertex = std::size_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A graph value would violate one of the ADMG/CADMG invariants.
class GraphError : public Error {
 public:
  using Error::Error;
};

class UnknownVertex : public Error {
 public:
  using Error::Error;
};

/// Directed edges are (tail, head). Bidirected edges are stored with from < to.
struct Edge {
  Vertex from = 0;
  Vertex to = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Sorted, duplicate-free set of vertex indices. Iteration is in declaration order.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::initializer_list<Vertex> items) : items_(items) { normalize(); }
  explicit VertexSet(std::vector<Vertex> items) : items_(std::move(items)) { normalize(); }

  static VertexSet from_mask(const std::vector<char>& mask) {
    VertexSet out;
    for (Vertex v = 0; v < mask.size(); ++v)
      if (mask[v]) out.items_.push_back(v);
    return out;
  }

  std::vector<char> mask(std::size_t n) const {
    std::vector<char> m(n, 0);
    for (Vertex v : items_) m[v] = 1;
    return m;
  }

  bool contains(Vertex v) const { return std::binary_search(items_.begin(), items_.end(), v); }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  Vertex front() const { return items_.front(); }
  const std::vector<Vertex>& items() const { return items_; }

  void insert(Vertex v) {
    auto it = std::lower_bound(items_.begin(), items_.end(), v);
    if (it == items_.end() || *it != v) items_.insert(it, v);
  }
  void erase(Vertex v) {
    auto it = std::lower_bound(items_.begin(), items_.end(), v);
    if (it != items_.end() && *it == v) items_.erase(it);
  }

  bool subset_of(const VertexSet& other) const {
    return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
  }
  bool intersects(const VertexSet& other) const { return !(*this & other).empty(); }

  friend VertexSet operator|(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.items_));
    return out;
  }
  friend VertexSet operator&(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.items_));
    return out;
  }
  friend VertexSet operator-(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.items_));
    return out;
  }
  friend bool operator==(const VertexSet&, const VertexSet&) = default;
  friend auto operator<=>(const VertexSet& a, const VertexSet& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.items_ <=> b.items_;
  }

 private:
  void normalize() {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
  }
  std::vector<Vertex> items_;
};

inline bool is_valid_label(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

class Admg {
 public:
  Admg() = default;

  /// Validates every ADMG invariant; throws GraphError on the first violation.
  Admg(std::vector<std::string> labels, std::vector<Edge> directed, std::vector<Edge> bidirected)
      : labels_(std::move(labels)) {
    const std::size_t n = labels_.size();
    index_.reserve(n);
    for (Vertex v = 0; v < n; ++v) {
      if (!is_valid_label(labels_[v])) throw GraphError("invalid vertex label '" + labels_[v] + "'");
      if (!index_.emplace(labels_[v], v).second)
        throw GraphError("duplicate vertex '" + labels_[v] + "'");
    }
    parents_.resize(n);
    children_.resize(n);
    siblings_.resize(n);

    for (const Edge& e : directed) {
      check_endpoints(e);
      if (e.from == e.to) throw GraphError("self-loop " + labels_[e.from] + " -> " + labels_[e.to]);
    }
    for (Edge& e : bidirected) {
      check_endpoints(e);
      if (e.from == e.to) throw GraphError("self-loop " + labels_[e.from] + " <-> " + labels_[e.to]);
      if (e.from > e.to) std::swap(e.from, e.to);
    }
    std::sort(directed.begin(), directed.end());
    std::sort(bidirected.begin(), bidirected.end());
    if (auto it = std::adjacent_find(directed.begin(), directed.end()); it != directed.end())
      throw GraphError("duplicate edge " + labels_[it->from] + " -> " + labels_[it->to]);
    if (auto it = std::adjacent_find(bidirected.begin(), bidirected.end()); it != bidirected.end())
      throw GraphError("duplicate edge " + labels_[it->from] + " <-> " + labels_[it->to]);
    directed_ = std::move(directed);
    bidirected_ = std::move(bidirected);

    for (const Edge& e : directed_) {
      children_[e.from].push_back(e.to);
      parents_[e.to].push_back(e.from);
    }
    for (const Edge& e : bidirected_) {
      siblings_[e.from].push_back(e.to);
      siblings_[e.to].push_back(e.from);
    }
    for (Vertex v = 0; v < n; ++v) {
      std::sort(parents_[v].begin(), parents_[v].end());
      std::sort(siblings_[v].begin(), siblings_[v].end());
    }
    compute_topological_order();
  }

  /// Label-based construction, convenient for fixtures.
  static Admg from_labels(std::vector<std::string> labels,
                          const std::vector<std::pair<std::string, std::string>>& directed,
                          const std::vector<std::pair<std::string, std::string>>& bidirected = {}) {
    std::unordered_map<std::string, Vertex> idx;
    for (Vertex v = 0; v < labels.size(); ++v) idx.emplace(labels[v], v);
    auto lookup = [&](const std::string& s) {
      auto it = idx.find(s);
      if (it == idx.end()) throw UnknownVertex("unknown vertex '" + s + "'");
      return it->second;
    };
    std::vector<Edge> d, b;
    for (const auto& [x, y] : directed) d.push_back({lookup(x), lookup(y)});
    for (const auto& [x, y] : bidirected) b.push_back({lookup(x), lookup(y)});
    return Admg(std::move(labels), std::move(d), std::move(b));
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& label(Vertex v) const { return labels_.at(v); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<Vertex> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  Vertex at(std::string_view label) const {
    if (auto v = find(label)) return *v;
    throw UnknownVertex("unknown vertex '" + std::string(label) + "'");
  }
  VertexSet set_of(std::initializer_list<std::string_view> labels) const {
    std::vector<Vertex> out;
    for (auto l : labels) out.push_back(at(l));
    return VertexSet(std::move(out));
  }
  VertexSet set_of(const std::vector<std::string>& labels) const {
    std::vector<Vertex> out;
    for (const auto& l : labels) out.push_back(at(l));
    return VertexSet(std::move(out));
  }
  std::vector<std::string> labels_of(const VertexSet& s) const {
    std::vector<std::string> out;
    for (Vertex v : s) out.push_back(label(v));
    return out;
  }
  VertexSet all() const {
    std::vector<Vertex> v(size());
    for (Vertex i = 0; i < size(); ++i) v[i] = i;
    return VertexSet(std::move(v));
  }

  const std::vector<Vertex>& parents(Vertex v) const { return parents_.at(v); }
  const std::vector<Vertex>& children(Vertex v) const { return children_.at(v); }
  const std::vector<Vertex>& siblings(Vertex v) const { return siblings_.at(v); }
  const std::vector<Edge>& directed_edges() const { return directed_; }
  const std::vector<Edge>& bidirected_edges() const { return bidirected_; }

  bool has_directed(Vertex a, Vertex b) const {
    const auto& ch = children_.at(a);
    return std::binary_search(ch.begin(), ch.end(), b);
  }
  bool has_bidirected(Vertex a, Vertex b) const {
    const auto& sib = siblings_.at(a);
    return std::binary_search(sib.begin(), sib.end(), b);
  }
  bool adjacent(Vertex a, Vertex b) const {
    return has_directed(a, b) || has_directed(b, a) || has_bidirected(a, b);
  }
  bool is_dag() const { return bidirected_.empty(); }

  /// Kahn order with ties broken by declaration order.
  const std::vector<Vertex>& topological_order() const { return topo_; }
  std::size_t topological_position(Vertex v) const { return topo_pos_.at(v); }

  void require(Vertex v) const {
    if (v >= size()) throw UnknownVertex("vertex index " + std::to_string(v) + " out of range");
  }
  void require(const VertexSet& s) const {
    if (!s.empty() && s.items().back() >= size())
      throw UnknownVertex("vertex index " + std::to_string(s.items().back()) + " out of range");
  }

  /// Semantic equality: same vertex labels and same labelled edges, irrespective of order.
  friend bool operator==(const Admg& a, const Admg& b) {
    auto key = [](const Admg& g) {
      std::vector<std::string> vs = g.labels_;
      std::sort(vs.begin(), vs.end());
      std::vector<std::pair<std::string, std::string>> d, bi;
      for (const Edge& e : g.directed_) d.emplace_back(g.label(e.from), g.label(e.to));
      for (const Edge& e : g.bidirected_) {
        auto x = g.label(e.from), y = g.label(e.to);
        if (y < x) std::swap(x, y);
        bi.emplace_back(x, y);
      }
      std::sort(d.begin(), d.end());
      std::sort(bi.begin(), bi.end());
      return std::tuple(vs, d, bi);
    };
    return key(a) == key(b);
  }

 private:
  void check_endpoints(const Edge& e) const {
    if (e.from >= labels_.size() || e.to >= labels_.size())
      throw UnknownVertex("edge endpoint out of range");
  }

  void compute_topological_order() {
    const std::size_t n = size();
    std::vector<std::size_t> indegree(n);
    for (Vertex v = 0; v < n; ++v) indegree[v] = parents_[v].size();
    std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> ready;
    for (Vertex v = 0; v < n; ++v)
      if (indegree[v] == 0) ready.push(v);
    topo_.clear();
    topo_.reserve(n);
    while (!ready.empty()) {
      Vertex v = ready.top();
      ready.pop();
      topo_.push_back(v);
      for (Vertex c : children_[v])
        if (--indegree[c] == 0) ready.push(c);
    }
    if (topo_.size() != n) {
      for (Vertex v = 0; v < n; ++v)
        if (indegree[v] > 0) throw GraphError("directed cycle through '" + labels_[v] + "'");
    }
    topo_pos_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) topo_pos_[topo_[i]] = i;
  }

  std::vector<std::string> labels_;
  std::unordered_map<std::string, Vertex> index_;
  std::vector<std::vector<Vertex>> parents_, children_, siblings_;
  std::vector<Edge> directed_, bidirected_;
  std::vector<Vertex> topo_;
  std::vector<std::size_t> topo_pos_;
};

/// An ADMG whose vertices are split into random and fixed (context) vertices.
/// Fixed vertices never have parents or siblings.
class Cadmg {
 public:
  Cadmg() = default;
  explicit Cadmg(Admg graph) : graph_(std::move(graph)), fixed_(graph_.size(), 0) {}
  Cadmg(Admg graph, const VertexSet& fixed) : graph_(std::move(graph)) {
    graph_.require(fixed);
    fixed_ = fixed.mask(graph_.size());
    for (Vertex w : fixed) {
      if (!graph_.parents(w).empty())
        throw GraphError("fixed vertex '" + graph_.label(w) + "' has an incoming directed edge");
      if (!graph_.siblings(w).empty())
        throw GraphError("fixed vertex '" + graph_.label(w) + "' has a bidirected edge");
    }
  }

  const Admg& graph() const { return graph_; }
  std::size_t size() const { return graph_.size(); }
  bool is_fixed(Vertex v) const { return fixed_.at(v) != 0; }
  bool is_random(Vertex v) const { return !is_fixed(v); }
  VertexSet fixed() const { return VertexSet::from_mask(fixed_); }
  VertexSet random() const { return graph_.all() - fixed(); }
  const std::vector<char>& fixed_mask() const { return fixed_; }

  friend bool operator==(const Cadmg& a, const Cadmg& b) {
    return a.graph_ == b.graph_ && a.graph_.labels_of(a.fixed()) == b.graph_.labels_of(b.fixed());
  }

 private:
  Admg graph_;
  std::vector<char> fixed_;
};

enum class Relation { parents, children, ancestors, descendants, siblings, district };

namespace detail {

using Mask = std::vector<char>;

enum class Walk { up, down, bidirected };

/// Reflexive closure of `seeds` along one edge kind, staying inside `within`.
inline Mask reach(const Admg& g, const Mask& within, const VertexSet& seeds, Walk walk) {
  Mask seen(g.size(), 0);
  std::vector<Vertex> stack;
  for (Vertex s : seeds) {
    if (within[s] && !seen[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    Vertex x = stack.back();
    stack.pop_back();
    const auto& next = walk == Walk::up     ? g.parents(x)
                       : walk == Walk::down ? g.children(x)
                                            : g.siblings(x);
    for (Vertex y : next) {
      if (within[y] && !seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
    }
  }
  return seen;
}

inline Mask full_mask(const Admg& g) { return Mask(g.size(), 1); }

}  // namespace detail

inline VertexSet relatives(const Admg& g, const VertexSet& s, Relation kind) {
  g.require(s);
  const auto all = detail::full_mask(g);
  switch (kind) {
    case Relation::parents:
    case Relation::children:
    case Relation::siblings: {
      std::vector<Vertex> out;
      for (Vertex v : s) {
        const auto& next = kind == Relation::parents    ? g.parents(v)
                           : kind == Relation::children ? g.children(v)
                                                        : g.siblings(v);
        out.insert(out.end(), next.begin(), next.end());
      }
      return VertexSet(std::move(out));
    }
    case Relation::ancestors:
      return VertexSet::from_mask(detail::reach(g, all, s, detail::Walk::up));
    case Relation::descendants:
      return VertexSet::from_mask(detail::reach(g, all, s, detail::Walk::down));
    case Relation::district:
      return VertexSet::from_mask(detail::reach(g, all, s, detail::Walk::bidirected));
  }
  return {};
}

/// CADMG districts partition only the random vertices.
inline VertexSet relatives(const Cadmg& g, const VertexSet& s, Relation kind) {
  VertexSet out = relatives(g.graph(), s, kind);
  if (kind == Relation::district) out = out & g.random();
  return out;
}

inline VertexSet parents(const Admg& g, const VertexSet& s) { return relatives(g, s, Relation::parents); }
inline VertexSet ancestors(const Admg& g, const VertexSet& s) { return relatives(g, s, Relation::ancestors); }
inline VertexSet descendants(const Admg& g, const VertexSet& s) {
  return relatives(g, s, Relation::descendants);
}
inline VertexSet district(const Admg& g, Vertex v) { return relatives(g, VertexSet{v}, Relation::district); }

/// Districts in order of their first vertex.
inline std::vector<VertexSet> districts(const Admg& g, const VertexSet& within) {
  g.require(within);
  const auto mask = within.mask(g.size());
  std::vector<char> done(g.size(), 0);
  std::vector<VertexSet> out;
  for (Vertex v : within) {
    if (done[v]) continue;
    auto d = detail::reach(g, mask, VertexSet{v}, detail::Walk::bidirected);
    for (Vertex u = 0; u < g.size(); ++u) done[u] |= d[u];
    out.push_back(VertexSet::from_mask(d));
  }
  return out;
}
inline std::vector<VertexSet> districts(const Admg& g) { return districts(g, g.all()); }
inline std::vector<VertexSet> districts(const Cadmg& g) { return districts(g.graph(), g.random()); }

inline Admg induced_subgraph(const Admg& g, const VertexSet& s) {
  g.require(s);
  std::vector<Vertex> remap(g.size(), static_cast<Vertex>(-1));
  std::vector<std::string> labels;
  labels.reserve(s.size());
  for (Vertex v : s) {
    remap[v] = labels.size();
    labels.push_back(g.label(v));
  }
  std::vector<Edge> d, b;
  for (const Edge& e : g.directed_edges())
    if (s.contains(e.from) && s.contains(e.to)) d.push_back({remap[e.from], remap[e.to]});
  for (const Edge& e : g.bidirected_edges())
    if (s.contains(e.from) && s.contains(e.to)) b.push_back({remap[e.from], remap[e.to]});
  return Admg(std::move(labels), std::move(d), std::move(b));
}

inline bool bidirected_connected(const Admg& g, const VertexSet& s) {
  if (s.empty()) throw Error("bidirected_connected: empty vertex set");
  g.require(s);
  auto seen = detail::reach(g, s.mask(g.size()), VertexSet{s.front()}, detail::Walk::bidirected);
  return std::all_of(s.begin(), s.end(), [&](Vertex v) { return seen[v] != 0; });
}

/// Markov blanket of a random vertex that is childless within its own district.
inline VertexSet markov_blanket(const Cadmg& g, Vertex v) {
  g.graph().require(v);
  if (g.is_fixed(v)) throw Error("markov_blanket: '" + g.graph().label(v) + "' is fixed");
  const VertexSet dis = relatives(g, VertexSet{v}, Relation::district);
  for (Vertex c : g.graph().children(v))
    if (dis.contains(c))
      throw Error("markov_blanket: '" + g.graph().label(v) + "' has a child in its own district");
  VertexSet out = dis | parents(g.graph(), dis);
  out.erase(v);
  return out;
}

/// m-separation by reachability over (vertex, arrowhead-at-vertex) states.
inline bool m_separated(const Admg& g, const VertexSet& a, const VertexSet& b, const VertexSet& c) {
  g.require(a);
  g.require(b);
  g.require(c);
  if (a.intersects(b) || a.intersects(c) || b.intersects(c))
    throw Error("m_separated: vertex sets must be disjoint");
  const std::size_t n = g.size();
  const auto in_c = c.mask(n);
  const auto in_b = b.mask(n);
  const auto an_c = detail::reach(g, detail::full_mask(g), c, detail::Walk::up);

  // state = 2*v + (arrived with arrowhead at v)
  std::vector<char> seen(2 * n, 0);
  struct State {
    Vertex v;
    bool head;
    bool start;
  };
  std::vector<State> stack;
  for (Vertex s : a) stack.push_back({s, false, true});
  std::vector<char> started(n, 0);
  while (!stack.empty()) {
    State st = stack.back();
    stack.pop_back();
    if (st.start) {
      if (started[st.v]) continue;
      started[st.v] = 1;
    } else {
      if (seen[2 * st.v + st.head]) continue;
      seen[2 * st.v + st.head] = 1;
      if (in_b[st.v]) return false;
    }
    auto pass = [&](bool leaves_with_head) {
      if (st.start) return true;
      const bool collider = st.head && leaves_with_head;
      return collider ? an_c[st.v] != 0 : in_c[st.v] == 0;
    };
    if (pass(false))
      for (Vertex y : g.children(st.v)) stack.push_back({y, true, false});
    if (pass(true)) {
      for (Vertex y : g.parents(st.v)) stack.push_back({y, false, false});
      for (Vertex y : g.siblings(st.v)) stack.push_back({y, true, false});
    }
  }
  return true;
}

inline bool m_separated(const Cadmg& g, const VertexSet& a, const VertexSet& b, const VertexSet& c) {
  return m_separated(g.graph(), a, b, c);
}

}  // namespace admg
