#pragma once

// Test-only helpers: sample graphs, random and exhaustive ADMG generators, an
// independent hidden-variable joint builder and brute-force oracles.

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "admg/admg.hpp"

namespace testing_support {

using namespace admg;

inline std::string data_path(const std::string& name) { return std::string(ADMG_DATA_DIR) + "/" + name; }

inline ParsedGraph load_parsed(const std::string& name) {
  std::ifstream in(data_path(name));
  if (!in) throw std::runtime_error("missing data file " + name);
  return parse_graph(in);
}

inline Admg load(const std::string& name) { return load_parsed(name).graph.graph(); }

inline std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(n <= 26 ? std::string(1, static_cast<char>('a' + i)) : "x" + std::to_string(i));
  return out;
}

/// Directed edges follow a random permutation, so any DAG shape can appear.
inline Admg random_admg(std::mt19937_64& rng, std::size_t n, double p_dir, double p_bi) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution dir(p_dir), bi(p_bi);
  std::vector<Edge> d, b;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dir(rng)) d.push_back({order[i], order[j]});
      if (bi(rng)) b.push_back({order[i], order[j]});
    }
  return Admg(default_labels(n), std::move(d), std::move(b));
}

inline Admg random_admg(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  std::uniform_int_distribution<std::size_t> size(lo, hi);
  std::uniform_real_distribution<double> density(0.1, 0.6);
  return random_admg(rng, size(rng), density(rng), density(rng));
}

/// Every ADMG on n labelled vertices: each pair is none / a->b / b->a, with or without a<->b.
inline void for_each_admg(std::size_t n, const std::function<void(const Admg&)>& visit) {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<int> code(pairs.size(), 0);
  const auto labels = default_labels(n);
  while (true) {
    std::vector<Edge> d, b;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      auto [x, y] = pairs[p];
      if (code[p] % 3 == 1) d.push_back({x, y});
      if (code[p] % 3 == 2) d.push_back({y, x});
      if (code[p] / 3) b.push_back({x, y});
    }
    bool acyclic = true;
    Admg g;
    try {
      g = Admg(labels, std::move(d), std::move(b));
    } catch (const GraphError&) {
      acyclic = false;
    }
    if (acyclic) visit(g);
    std::size_t p = 0;
    while (p < code.size() && ++code[p] == 6) code[p++] = 0;
    if (p == code.size()) break;
  }
}

/// Law of the observed variables of a hidden-variable DAG: one hidden parent per
/// bidirected edge, random positive rational conditional tables, everything summed out
/// by brute force. Written without the library's projection or kernel code.
inline DiscreteKernel hidden_dag_joint(const Admg& g, std::mt19937_64& rng, std::size_t card = 2) {
  const std::size_t n = g.size();
  const auto bi = g.bidirected_edges();
  const std::size_t m = bi.size();
  std::uniform_int_distribution<int> weight(1, 5);

  auto random_row = [&](std::size_t states) {
    std::vector<int> w(states);
    int total = 0;
    for (auto& x : w) total += (x = weight(rng));
    std::vector<Rational> row;
    for (int x : w) row.emplace_back(x, total);
    return row;
  };

  std::vector<std::vector<Rational>> hidden_prior;
  for (std::size_t i = 0; i < m; ++i) hidden_prior.push_back(random_row(2));

  // Per observed vertex: observed parents, hidden parents, table indexed by parent configuration.
  std::vector<std::vector<Vertex>> obs_pa(n);
  std::vector<std::vector<std::size_t>> hid_pa(n);
  for (const Edge& e : g.directed_edges()) obs_pa[e.to].push_back(e.from);
  for (std::size_t i = 0; i < m; ++i) {
    hid_pa[bi[i].from].push_back(i);
    hid_pa[bi[i].to].push_back(i);
  }
  std::vector<std::vector<std::vector<Rational>>> cpt(n);
  for (Vertex x = 0; x < n; ++x) {
    std::size_t configs = 1;
    for (std::size_t j = 0; j < obs_pa[x].size(); ++j) configs *= card;
    configs <<= hid_pa[x].size();
    for (std::size_t c = 0; c < configs; ++c) cpt[x].push_back(random_row(card));
  }

  std::size_t atoms = 1;
  for (std::size_t i = 0; i < n; ++i) atoms *= card;
  std::vector<Rational> table(atoms);
  std::vector<std::size_t> x(n);
  for (std::size_t h = 0; h < (std::size_t{1} << m); ++h) {
    Rational ph = 1;
    for (std::size_t i = 0; i < m; ++i) ph *= hidden_prior[i][h >> i & 1];
    for (std::size_t a = 0; a < atoms; ++a) {
      std::size_t rest = a;
      for (std::size_t i = n; i-- > 0;) {
        x[i] = rest % card;
        rest /= card;
      }
      Rational p = ph;
      for (Vertex v = 0; v < n; ++v) {
        std::size_t c = 0;
        for (Vertex pa : obs_pa[v]) c = c * card + x[pa];
        for (std::size_t hp : hid_pa[v]) c = c * 2 + (h >> hp & 1);
        p *= cpt[v][c][x[v]];
      }
      table[a] += p;
    }
  }
  return DiscreteKernel::joint(g.labels(), std::vector<std::size_t>(n, card), std::move(table));
}

/// Uniform law with X_v = X_w and every other variable independent.
inline DiscreteKernel equality_law(const Admg& g, Vertex v, Vertex w, std::size_t card = 2) {
  const std::size_t n = g.size();
  std::size_t atoms = 1;
  for (std::size_t i = 0; i < n; ++i) atoms *= card;
  std::vector<Rational> table(atoms);
  const Rational mass(1, static_cast<long long>(atoms / card));
  for (std::size_t a = 0; a < atoms; ++a) {
    std::size_t xv = a, xw = a;
    for (std::size_t i = n - 1; i > v; --i) xv /= card;
    for (std::size_t i = n - 1; i > w; --i) xw /= card;
    if (xv % card == xw % card) table[a] = mass;
  }
  return DiscreteKernel::joint(g.labels(), std::vector<std::size_t>(n, card), std::move(table));
}

/// Smallest retained set over every removable set. A removal is ancestral, keeps the
/// targets and the external parent, and each of its bidirected components leaves by
/// exactly one edge. Exponential in |C| - |B|.
inline VertexSet brute_force_minimal(const MinimalReduction& h) {
  const Admg& g = h.reduced;
  const std::size_t n = g.size();
  std::vector<Vertex> free;
  for (Vertex x : h.component())
    if (!h.targets.contains(x)) free.push_back(x);
  if (free.size() > 20) throw std::runtime_error("brute_force_minimal: too many candidates");

  // Ancestor sets by naive fixpoint.
  std::vector<std::vector<char>> anc(n, std::vector<char>(n, 0));
  for (Vertex x = 0; x < n; ++x) anc[x][x] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Edge& e : g.directed_edges())
      for (Vertex y = 0; y < n; ++y)
        if (anc[e.to][y] && !anc[e.from][y]) {
          anc[e.from][y] = 1;
          changed = true;
        }
  }

  VertexSet best = g.all();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << free.size()); ++mask) {
    std::vector<char> in(n, 0);
    for (std::size_t i = 0; i < free.size(); ++i)
      if (mask >> i & 1) in[free[i]] = 1;
    bool ok = true;
    for (Vertex y = 0; y < n && ok; ++y)
      if (in[y])
        for (Vertex x = 0; x < n; ++x)
          if (anc[x][y] && !in[x]) ok = false;
    if (!ok) continue;
    // Components of the removed set under bidirected edges, and their leaving edges.
    std::vector<int> comp(n, -1);
    int comps = 0;
    for (Vertex s = 0; s < n; ++s) {
      if (!in[s] || comp[s] >= 0) continue;
      std::vector<Vertex> stack{s};
      comp[s] = comps;
      while (!stack.empty()) {
        Vertex x = stack.back();
        stack.pop_back();
        for (Vertex y : g.siblings(x))
          if (in[y] && comp[y] < 0) {
            comp[y] = comps;
            stack.push_back(y);
          }
      }
      ++comps;
    }
    std::vector<int> leaving(comps, 0);
    for (const Edge& e : g.bidirected_edges()) {
      if (in[e.from] && !in[e.to]) ++leaving[comp[e.from]];
      if (in[e.to] && !in[e.from]) ++leaving[comp[e.to]];
    }
    if (!std::all_of(leaving.begin(), leaving.end(), [](int c) { return c == 1; })) continue;
    VertexSet kept;
    for (Vertex x = 0; x < n; ++x)
      if (!in[x]) kept.insert(x);
    if (kept.size() < best.size()) best = kept;
  }
  return best;
}

}  // namespace testing_support
