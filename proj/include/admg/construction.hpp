#pragma once

// Structural-equation couplings that make a densely connected pair equal:
// mod-k sums over a canonical DAG, and a bitwise continuous variant.

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "admg/graph.hpp"
#include "admg/minimality.hpp"
#include "admg/projection.hpp"

namespace admg {

/// A uniform source: a hidden variable (two children) or private noise (one child).
struct CouplingSource {
  std::string name;
  bool hidden = true;
  /// (observed vertex, sign) pairs.
  std::vector<std::pair<Vertex, int>> children;
};

struct CouplingEquation {
  /// Observed parents, all with sign +1.
  std::vector<Vertex> parents;
  /// (index into CouplingSem::sources, sign).
  std::vector<std::pair<std::size_t, int>> sources;
  bool input = false;
};

/// Vertex indices refer to `graph`, the observed ADMG the coupling was built for.
struct CouplingSem {
  Admg graph;
  /// Canonical DAG of the pruned reduction; observed labels plus `_h*` hiddens.
  Admg canonical;
  std::size_t modulus = 2;
  std::vector<CouplingSource> sources;
  std::vector<CouplingEquation> equations;
  std::optional<Vertex> input_vertex;
  Vertex v = 0;
  Vertex w = 0;
  /// The vertex that receives the copy, and the vertex it copies.
  Vertex sink = 0;
  Vertex partner = 0;
  DenseCase kind = DenseCase::none;
  /// Vertices kept by the minimal reduction.
  VertexSet retained;

  std::size_t hidden_count() const {
    return static_cast<std::size_t>(
        std::count_if(sources.begin(), sources.end(), [](const CouplingSource& s) { return s.hidden; }));
  }
};

/// Structural equations on the canonical DAG of a tree reduction `m` whose labels are a
/// subset of g's. Signs: a hidden whose children drain into the same target subtracts at
/// its topologically later child (k > 2 only); every other term adds. Vertices of g
/// outside the reduction get private noise.
inline CouplingSem coupling_from_reduction(const Admg& g, Vertex v, Vertex w, const MinimalReduction& m,
                                           DenseCase kind, std::size_t k) {
  if (k < 2) throw Error("build_coupling: modulus must be at least 2");
  const Admg& h = m.reduced;
  auto global = [&](Vertex x) { return g.at(h.label(x)); };

  CouplingSem sem;
  sem.graph = g;
  sem.modulus = k;
  sem.v = v;
  sem.w = w;
  sem.kind = kind;
  sem.equations.resize(g.size());
  const CanonicalDag cd = canonical_dag(h);
  sem.canonical = cd.dag;
  for (Vertex x = 0; x < h.size(); ++x) sem.retained.insert(global(x));

  // The target each vertex of C drains into along the forest.
  std::vector<Vertex> forest_child(h.size(), detail::RootedTree::npos);
  for (const Edge& e : m.directed_forest) forest_child[e.from] = e.to;
  std::vector<Vertex> side(h.size(), detail::RootedTree::npos);
  const auto& order = h.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Vertex x = *it;
    if (m.external && x == *m.external) continue;
    side[x] = m.targets.contains(x) ? x : side.at(forest_child[x]);
  }

  for (const auto& [edge, hv] : cd.mapping) {
    Vertex a = global(edge.from), b = global(edge.to);
    int sa = 1, sb = 1;
    if (k > 2 && side[edge.from] == side[edge.to]) {
      (g.topological_position(a) > g.topological_position(b) ? sa : sb) = -1;
    }
    const std::size_t idx = sem.sources.size();
    sem.sources.push_back({cd.dag.label(hv), true, {{a, sa}, {b, sb}}});
    sem.equations[a].sources.emplace_back(idx, sa);
    sem.equations[b].sources.emplace_back(idx, sb);
  }
  for (Vertex x = 0; x < h.size(); ++x) {
    Vertex gx = global(x);
    if (m.external && x == *m.external) {
      sem.equations[gx].input = true;
      sem.input_vertex = gx;
      continue;
    }
    for (Vertex p : h.parents(x)) sem.equations[gx].parents.push_back(global(p));
  }
  std::size_t noise = 0;
  for (Vertex x = 0; x < g.size(); ++x) {
    if (sem.retained.contains(x)) continue;
    const std::size_t idx = sem.sources.size();
    sem.sources.push_back({"_e" + std::to_string(++noise), false, {{x, 1}}});
    sem.equations[x].sources.emplace_back(idx, 1);
  }

  if (kind == DenseCase::bidirected) {
    sem.sink = v;
    sem.partner = w;
  } else {
    if (!m.external) throw Error("build_coupling: directed case without an external parent");
    sem.sink = global(m.targets.front());
    sem.partner = global(*m.external);
  }
  return sem;
}

/// Pair subgraph, tree reduction, minimal set, pruning, then the equations above.
inline CouplingSem build_coupling(const Admg& g, Vertex v, Vertex w, std::size_t k,
                                  Preference preference = Preference::directed_first) {
  if (k < 2) throw Error("build_coupling: modulus must be at least 2");
  const PairReduction red = reduce_pair(g, v, w, preference);
  return coupling_from_reduction(g, v, w, red.minimal, red.pair.kind, k);
}

/// Evaluates every observed vertex in topological order. `values` holds one entry per
/// source; `input` is required exactly when the coupling has an input vertex.
inline std::vector<std::uint64_t> evaluate(const CouplingSem& sem, const std::vector<std::uint64_t>& values,
                                           std::optional<std::uint64_t> input = std::nullopt) {
  if (values.size() != sem.sources.size())
    throw Error("evaluate: expected " + std::to_string(sem.sources.size()) + " source values, got " +
                std::to_string(values.size()));
  const auto k = static_cast<std::int64_t>(sem.modulus);
  for (std::uint64_t x : values)
    if (x >= sem.modulus) throw Error("evaluate: source value out of range");
  if (sem.input_vertex.has_value() != input.has_value())
    throw Error(sem.input_vertex ? "evaluate: an input value is required" : "evaluate: this coupling takes no input");
  if (input && *input >= sem.modulus) throw Error("evaluate: input value out of range");

  std::vector<std::uint64_t> out(sem.graph.size(), 0);
  for (Vertex x : sem.graph.topological_order()) {
    const CouplingEquation& eq = sem.equations[x];
    if (eq.input) {
      out[x] = *input;
      continue;
    }
    std::int64_t sum = 0;
    for (Vertex p : eq.parents) sum += static_cast<std::int64_t>(out[p]);
    for (auto [s, sign] : eq.sources) sum += sign * static_cast<std::int64_t>(values[s]);
    out[x] = static_cast<std::uint64_t>(((sum % k) + k) % k);
  }
  return out;
}

/// Bitwise evaluation on machine words: every sum becomes xor.
inline std::vector<std::uint64_t> evaluate_words(const CouplingSem& sem, const std::vector<std::uint64_t>& words,
                                                 std::uint64_t input) {
  std::vector<std::uint64_t> out(sem.graph.size(), 0);
  for (Vertex x : sem.graph.topological_order()) {
    const CouplingEquation& eq = sem.equations[x];
    if (eq.input) {
      out[x] = input;
      continue;
    }
    std::uint64_t acc = 0;
    for (Vertex p : eq.parents) acc ^= out[p];
    for (auto [s, sign] : eq.sources) acc ^= words[s];
    out[x] = acc;
  }
  return out;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based random word: a function of (seed, row, variable) only.
inline std::uint64_t random_word(std::uint64_t seed, std::uint64_t row, std::uint64_t var) {
  return detail::splitmix64(detail::splitmix64(detail::splitmix64(seed) ^ row) ^ (var * 0xd1342543de82ef95ULL));
}

inline std::uint64_t uniform_below(std::uint64_t word, std::uint64_t k) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(word) * k) >> 64);
}

template <typename T>
struct Dataset {
  std::vector<std::string> columns;
  std::vector<std::vector<T>> rows;
};

/// Sources are uniform on {0..k-1}; the input is uniform too unless `set_w` is given.
/// Row i depends only on (seed, i).
inline Dataset<std::uint64_t> sample(const CouplingSem& sem, std::size_t n, std::uint64_t seed,
                                     std::optional<std::uint64_t> set_w = std::nullopt) {
  if (set_w && !sem.input_vertex) throw Error("sample: this coupling has no input vertex to set");
  if (set_w && *set_w >= sem.modulus) throw Error("sample: input value out of range");
  Dataset<std::uint64_t> out{sem.graph.labels(), {}};
  out.rows.reserve(n);
  const std::size_t s = sem.sources.size();
  std::vector<std::uint64_t> values(s);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < s; ++j) values[j] = uniform_below(random_word(seed, i, j), sem.modulus);
    std::optional<std::uint64_t> input;
    if (sem.input_vertex) input = set_w ? *set_w : uniform_below(random_word(seed, i, s), sem.modulus);
    out.rows.push_back(evaluate(sem, values, input));
  }
  return out;
}

enum class Marginal { normal, uniform };

struct ContinuousOptions {
  Marginal marginal = Marginal::normal;
  /// Gaussian-copula correlation between the copy and its partner.
  double rho = 0.9;
  /// Width of the transmitted uniform words.
  unsigned bits = 64;
};

/// Midpoint of the word's cell in [0, 1]; words wider than a double's mantissa are truncated.
inline double word_to_unit(std::uint64_t word, unsigned bits) {
  if (bits > 53) return (static_cast<double>(word >> (bits - 53)) + 0.5) * 0x1p-53;
  return (static_cast<double>(word) + 0.5) / std::ldexp(1.0, static_cast<int>(bits));
}

/// Transmits W-bit words through the xor coupling. Every vertex but the sink emits the
/// marginal quantile of its word; the sink emits the conditional quantile of a Gaussian
/// copula given its partner, driven by an extra independent uniform.
inline Dataset<double> continuous_sample(const Admg& g, Vertex v, Vertex w, const ContinuousOptions& opts,
                                         std::size_t n, std::uint64_t seed,
                                         Preference preference = Preference::directed_first) {
  if (!(opts.rho > -1.0 && opts.rho < 1.0)) throw Error("continuous_sample: rho must lie strictly inside (-1, 1)");
  if (opts.bits == 0 || opts.bits > 64) throw Error("continuous_sample: word width must be between 1 and 64");
  const CouplingSem sem = build_coupling(g, v, w, 2, preference);
  const boost::math::normal normal;
  const std::uint64_t mask = opts.bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << opts.bits) - 1;
  const double slack = std::sqrt(1.0 - opts.rho * opts.rho);
  auto emit = [&](double u) { return opts.marginal == Marginal::normal ? boost::math::quantile(normal, u) : u; };

  Dataset<double> out{g.labels(), {}};
  out.rows.reserve(n);
  const std::size_t s = sem.sources.size();
  std::vector<std::uint64_t> words(s);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < s; ++j) words[j] = random_word(seed, i, j) & mask;
    const std::uint64_t input = random_word(seed, i, s) & mask;
    const double u_extra = word_to_unit(random_word(seed, i, s + 1), 64);
    const auto x = evaluate_words(sem, words, input);
    std::vector<double> row(g.size());
    for (Vertex y = 0; y < g.size(); ++y) row[y] = emit(word_to_unit(x[y], opts.bits));
    const double z_partner = boost::math::quantile(normal, word_to_unit(x[sem.partner], opts.bits));
    const double z = opts.rho * z_partner + slack * boost::math::quantile(normal, u_extra);
    row[sem.sink] = opts.marginal == Marginal::normal ? z : boost::math::cdf(normal, z);
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline void write_csv(std::ostream& out, const Dataset<std::uint64_t>& d) {
  for (std::size_t i = 0; i < d.columns.size(); ++i) out << (i ? "," : "") << d.columns[i];
  out << '\n';
  for (const auto& row : d.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

inline void write_csv(std::ostream& out, const Dataset<double>& d) {
  for (std::size_t i = 0; i < d.columns.size(); ++i) out << (i ? "," : "") << d.columns[i];
  out << '\n';
  char buf[40];
  for (const auto& row : d.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace admg
