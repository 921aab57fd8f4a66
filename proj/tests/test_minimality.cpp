#include <gtest/gtest.h>

#include "support.hpp"

using namespace admg;
using testing_support::load;

namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

Pairs labelled(const Admg& g, const std::vector<Edge>& edges) {
  Pairs out;
  for (const Edge& e : edges) out.emplace_back(g.label(e.from), g.label(e.to));
  std::sort(out.begin(), out.end());
  return out;
}

Pairs sorted(Pairs p) {
  std::sort(p.begin(), p.end());
  return p;
}

Pairs sorted_undirected(Pairs p) {
  for (auto& [a, b] : p)
    if (b < a) std::swap(a, b);
  return sorted(std::move(p));
}

Pairs undirected(const Admg& g, const std::vector<Edge>& edges) { return sorted_undirected(labelled(g, edges)); }

MinimalReduction trees_for(const Admg& g, const char* v, const char* w) {
  return tree_reduce(pair_subgraph(g, g.at(v), g.at(w)));
}

}  // namespace

TEST(TreeReduce, Iv) {
  Admg iv = load("iv.admg");
  MinimalReduction m = trees_for(iv, "c", "a");
  const Admg& h = m.reduced;
  EXPECT_EQ(labelled(h, m.directed_forest), (Pairs{{"b", "c"}}));
  EXPECT_EQ(undirected(h, m.bidirected_tree), (Pairs{{"b", "c"}}));
  ASSERT_TRUE(m.retained_w_edge);
  EXPECT_EQ(labelled(h, {*m.retained_w_edge}), (Pairs{{"a", "b"}}));
}

TEST(TreeReduce, Gadget) {
  Admg g = load("gadget.admg");
  MinimalReduction m = trees_for(g, "c", "d");
  EXPECT_EQ(labelled(m.reduced, m.directed_forest), sorted({{"a", "d"}, {"b", "c"}}));
  EXPECT_EQ(undirected(m.reduced, m.bidirected_tree), sorted_undirected({{"a", "b"}, {"a", "c"}, {"b", "d"}}));
  EXPECT_FALSE(m.retained_w_edge);
}

TEST(TreeReduce, DirectedCase) {
  Admg g = load("directed_case.admg");
  MinimalReduction m = trees_for(g, "v", "w");
  const Admg& h = m.reduced;
  Pairs directed = labelled(h, h.directed_edges());
  EXPECT_EQ(directed, sorted({{"a", "v"}, {"c", "v"}, {"d", "v"}, {"b", "c"}, {"w", "c"}}));
  EXPECT_EQ(undirected(h, h.bidirected_edges()), sorted_undirected({{"b", "c"}, {"c", "d"}, {"a", "b"}, {"a", "v"}}));
  EXPECT_EQ(labelled(h, {*m.retained_w_edge}), (Pairs{{"w", "c"}}));
}

TEST(TreeReduce, BidirectedCase) {
  Admg g = load("bidirected_case.admg");
  MinimalReduction m = trees_for(g, "v", "w");
  const Admg& h = m.reduced;
  EXPECT_EQ(labelled(h, h.directed_edges()), sorted({{"a", "v"}, {"c", "v"}, {"b", "w"}}));
  EXPECT_EQ(undirected(h, h.bidirected_edges()),
            sorted_undirected({{"c", "w"}, {"a", "b"}, {"v", "b"}, {"a", "w"}}));
}

TEST(TreeReduce, RejectsBadInput) {
  Admg iv = load("iv.admg");
  EXPECT_THROW(tree_reduce(iv, VertexSet{}, std::nullopt), Error);
  // The closure of {c} is {b, c}, not everything.
  EXPECT_THROW(tree_reduce(iv, iv.set_of({"c"}), std::nullopt), Error);
}

TEST(AlmostEncapsulated, Examples) {
  Admg g = load("encapsulation.admg");
  MinimalReduction m = trees_for(g, "v", "w");
  const Admg& h = m.reduced;
  EXPECT_TRUE(almost_encapsulated(m, h.set_of({"c", "e"})));
  EXPECT_FALSE(almost_encapsulated(m, h.set_of({"a"})));
  EXPECT_THROW(almost_encapsulated(m, h.set_of({"v"})), Error);
  // Every leaf of the bidirected tree other than a target is almost encapsulated by itself.
  for (Vertex x : m.component()) {
    if (m.targets.contains(x)) continue;
    std::size_t degree = 0;
    for (const Edge& e : m.bidirected_tree) degree += (e.from == x) + (e.to == x);
    if (degree == 1) {
      EXPECT_TRUE(almost_encapsulated(m, VertexSet{x}));
    }
  }
}

TEST(Prune, DirectedCaseDropsD) {
  Admg g = load("directed_case.admg");
  MinimalReduction m = trees_for(g, "v", "w");
  MinimalReduction p = prune(m, m.reduced.set_of({"d"}));
  const Admg& h = p.reduced;
  EXPECT_EQ(h.labels(), (std::vector<std::string>{"a", "b", "w", "c", "v"}));
  EXPECT_EQ(labelled(h, h.directed_edges()), sorted({{"a", "v"}, {"c", "v"}, {"b", "c"}, {"w", "c"}}));
  EXPECT_EQ(undirected(h, h.bidirected_edges()), sorted_undirected({{"b", "c"}, {"a", "b"}, {"a", "v"}}));
}

TEST(Prune, BidirectedCaseDropsC) {
  Admg g = load("bidirected_case.admg");
  MinimalReduction m = trees_for(g, "v", "w");
  MinimalReduction p = prune(m, m.reduced.set_of({"c"}));
  const Admg& h = p.reduced;
  EXPECT_EQ(h.size(), 4u);
  EXPECT_EQ(labelled(h, h.directed_edges()), sorted({{"a", "v"}, {"b", "w"}}));
  EXPECT_EQ(undirected(h, h.bidirected_edges()), sorted_undirected({{"a", "b"}, {"v", "b"}, {"a", "w"}}));
}

TEST(Prune, EmptyIsIdentityAndBadSetsAreRejected) {
  Admg g = load("directed_case.admg");
  MinimalReduction m = trees_for(g, "v", "w");
  EXPECT_EQ(prune(m, {}).reduced, m.reduced);
  EXPECT_THROW(prune(m, m.reduced.set_of({"v"})), Error);
  EXPECT_THROW(prune(m, m.reduced.set_of({"a"})), Error);
}

TEST(MinimalSet, Examples) {
  Admg enc = load("encapsulation.admg");
  PairReduction r_enc = reduce_pair(enc, enc.at("v"), enc.at("w"));
  EXPECT_EQ(r_enc.minimal.reduced.labels(), (std::vector<std::string>{"v", "w"}));
  EXPECT_EQ(labelled(r_enc.minimal.reduced, r_enc.minimal.reduced.directed_edges()), (Pairs{{"w", "v"}}));

  Admg g = load("gadget.admg");
  PairReduction rg = reduce_pair(g, g.at("c"), g.at("d"));
  EXPECT_EQ(rg.retained, rg.trees.reduced.all());

  Admg dir = load("directed_case.admg");
  PairReduction r_dir = reduce_pair(dir, dir.at("v"), dir.at("w"));
  EXPECT_EQ(r_dir.retained, r_dir.trees.reduced.set_of({"a", "b", "c", "v", "w"}));

  Admg bid = load("bidirected_case.admg");
  PairReduction r_bid = reduce_pair(bid, bid.at("v"), bid.at("w"));
  EXPECT_EQ(r_bid.retained, r_bid.trees.reduced.set_of({"a", "b", "v", "w"}));

  for (std::size_t k : {1, 2, 5, 40}) {
    Admg c = comp_graph(k);
    PairReduction rc = reduce_pair(c, c.at("v"), c.at("w"));
    EXPECT_EQ(rc.retained, rc.trees.reduced.set_of({"v", "w"})) << k;
  }
}

TEST(MinimalSet, RejectsWrongRoot) {
  Admg g = load("gadget.admg");
  MinimalReduction m = trees_for(g, "c", "d");
  EXPECT_THROW(minimal_set(m, m.reduced.at("d"), m.reduced.at("c")), Error);
  EXPECT_THROW(minimal_set(m, m.reduced.at("c"), m.reduced.at("a")), Error);
}

TEST(CompGraph, Shape) {
  Admg c = comp_graph(3);
  EXPECT_EQ(c.labels(), (std::vector<std::string>{"y1", "y2", "y3", "z1", "z2", "z3", "v", "w"}));
  EXPECT_TRUE(c.has_directed(c.at("w"), c.at("v")));
  EXPECT_TRUE(c.has_directed(c.at("y2"), c.at("z2")));
  EXPECT_TRUE(c.has_directed(c.at("z3"), c.at("v")));
  EXPECT_TRUE(c.has_bidirected(c.at("y1"), c.at("y2")));
  EXPECT_TRUE(c.has_bidirected(c.at("z2"), c.at("z3")));
  EXPECT_TRUE(c.has_bidirected(c.at("y3"), c.at("z3")));
  EXPECT_TRUE(c.has_bidirected(c.at("y1"), c.at("v")));
  EXPECT_THROW(comp_graph(0), Error);
}

TEST(Properties, ReductionInvariantsAndOracle) {
  std::mt19937_64 rng(131);
  std::size_t checked = 0;
  for (int trial = 0; trial < 600; ++trial) {
    Admg g = testing_support::random_admg(rng, 2, 8);
    for (Vertex v = 0; v < g.size(); ++v)
      for (Vertex w = 0; w < g.size(); ++w) {
        if (v == w || !densely_connected(g, v, w).dense) continue;
        for (Preference pref : {Preference::directed_first, Preference::bidirected_first}) {
          PairReduction r = reduce_pair(g, v, w, pref);
          const MinimalReduction& t = r.trees;
          const VertexSet c = t.component();
          ASSERT_EQ(t.bidirected_tree.size() + 1, c.size());
          ASSERT_EQ(t.directed_forest.size() + t.targets.size(), c.size());
          ASSERT_EQ(closure(t.reduced, t.targets).closure, c);

          // W is closed under descendants and under tree paths toward the root.
          const VertexSet& wset = r.retained;
          EXPECT_TRUE(descendants(t.reduced, wset).subset_of(wset));
          EXPECT_EQ(testing_support::brute_force_minimal(t), wset) << serialize_graph(g) << g.label(v) << ' '
                                                                   << g.label(w);
          EXPECT_TRUE(r.minimal.targets.size() == t.targets.size());
          EXPECT_EQ(closure(r.minimal.reduced, r.minimal.targets).closure, r.minimal.component());
          ++checked;
        }
      }
  }
  EXPECT_GT(checked, 1000u);
}
