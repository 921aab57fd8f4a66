#pragma once

// Structural invariants checked on one graph at a time. Shared by the gtest suite and
// the acceptance runner.

#include <optional>
#include <random>
#include <string>

#include "support.hpp"

namespace testing_support {

struct PropertyTally {
  std::size_t graphs = 0;
  std::size_t kernel_graphs = 0;
  std::size_t fix_orders = 0;
};

/// Returns a description of the first violated invariant, or nothing.
inline std::optional<std::string> property_failure(const Admg& g, std::mt19937_64& rng, PropertyTally& tally) {
  ++tally.graphs;
  auto fail = [&](const std::string& what) { return what + " on\n" + serialize_graph(g); };

  // Districts are bidirected-connected and partition V; no bidirected edge joins two.
  {
    std::vector<int> owner(g.size(), -1);
    const auto ds = districts(g);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (!bidirected_connected(g, ds[i])) return fail("district not connected");
      for (Vertex x : ds[i]) {
        if (owner[x] >= 0) return fail("districts overlap");
        owner[x] = static_cast<int>(i);
      }
    }
    for (int o : owner)
      if (o < 0) return fail("districts do not cover V");
    for (const Edge& e : g.bidirected_edges())
      if (owner[e.from] != owner[e.to]) return fail("bidirected edge crosses districts");
  }

  {
    const CanonicalDag cd = canonical_dag(g);
    if (!cd.dag.is_dag() || latent_project(cd.dag, cd.hidden) != g) return fail("projection round trip");
  }

  {
    const Admg m = marg_project(g);
    if (marg_project(m) != m) return fail("marg_project not idempotent");
  }

  for (Vertex v = 0; v < g.size(); ++v) {
    const VertexSet b{v};
    if (!reachable_closure(g, b).subset_of(closure(g, b).closure)) return fail("reachable closure escapes closure");
  }

  const auto reachable = reachable_sets(g);
  std::vector<VertexSet> picks;
  std::sample(reachable.begin(), reachable.end(), std::back_inserter(picks), 4, rng);

  // Fixing order invariance: random valid orders of the same set agree.
  for (const VertexSet& s : picks) {
    const VertexSet r = g.all() - s;
    const Cadmg expect = fix_graph(Cadmg(g), r);
    if (expect.random() != s) return fail("fix_graph lands on the wrong random set");
    std::vector<Vertex> perm(r.begin(), r.end());
    for (int t = 0; t < 6; ++t) {
      std::shuffle(perm.begin(), perm.end(), rng);
      Cadmg cur(g);
      bool valid = true;
      for (Vertex x : perm) {
        if (!is_fixable(cur, x)) {
          valid = false;
          break;
        }
        cur = fix_vertex(cur, x);
      }
      if (!valid) continue;
      ++tally.fix_orders;
      if (cur != expect) return fail("fixing order changes the result");
    }
  }

  // Kernel normalization for a law that is nested Markov to g: hidden-variable law on g
  // with at most four of its bidirected edges. Brute force, so small graphs only.
  if (g.size() <= 7) {
    auto bi = g.bidirected_edges();
    std::shuffle(bi.begin(), bi.end(), rng);
    if (bi.size() > 4) bi.resize(4);
    const DiscreteKernel p = hidden_dag_joint(Admg(g.labels(), g.directed_edges(), bi), rng);
    ++tally.kernel_graphs;
    for (const VertexSet& s : picks) {
      const auto order = fixing_order(Cadmg(g), g.all() - s);
      auto [cg, k] = kernel_fix(p, Cadmg(g), order);
      if (!k.normalized()) return fail("fixed kernel not normalized");
      if (cg.random() != s) return fail("kernel_fix lands on the wrong random set");
    }
  }
  return std::nullopt;
}

}  // namespace testing_support
