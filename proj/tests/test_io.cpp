#include <gtest/gtest.h>

#include "support.hpp"

using namespace admg;

TEST(Parse, IvText) {
  ParsedGraph pg = parse_graph("vertices: a b c\na -> b\nb -> c\nb <-> c\n");
  const Admg& g = pg.graph.graph();
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(g.directed_edges().size(), 2u);
  EXPECT_EQ(g.bidirected_edges().size(), 1u);
  EXPECT_TRUE(pg.latent.empty());
  EXPECT_TRUE(pg.graph.fixed().empty());
}

TEST(Parse, Singleton) {
  ParsedGraph pg = parse_graph("vertices: a\n");
  EXPECT_EQ(pg.graph.size(), 1u);
  EXPECT_TRUE(pg.graph.graph().directed_edges().empty());
}

TEST(Parse, CommentsBlankLinesCrlfAndTightArrows) {
  ParsedGraph pg = parse_graph("# header\r\n\r\nvertices: a b c   # trailing\r\na->b\r\n  b<->c\r\n");
  EXPECT_EQ(pg.graph.graph().directed_edges(), (std::vector<Edge>{{0, 1}}));
  EXPECT_EQ(pg.graph.graph().bidirected_edges(), (std::vector<Edge>{{1, 2}}));
}

TEST(Parse, LatentAndFixedHeaders) {
  ParsedGraph pg = parse_graph("vertices: a b h\nlatent: h\nfixed: a\na -> b\nh -> b\n");
  EXPECT_EQ(pg.latent, pg.graph.graph().set_of({"h"}));
  EXPECT_EQ(pg.graph.fixed(), pg.graph.graph().set_of({"a"}));
}

TEST(Parse, Errors) {
  auto fails = [](const char* text) {
    try {
      parse_graph(text);
    } catch (const ParseError& e) {
      return std::string(e.what());
    } catch (const Error& e) {
      return std::string("graph: ") + e.what();
    }
    return std::string();
  };
  EXPECT_NE(fails("vertices: a\na -> a\n"), "");
  EXPECT_NE(fails("vertices: a b\na -> c\n"), "");
  EXPECT_NE(fails("vertices: a b\na -> b\na -> b\n"), "");
  EXPECT_NE(fails("vertices: a b\na -> b\nb -> a\n"), "");
  EXPECT_NE(fails("vertices: a b\nfixed: b\na -> b\n"), "");
  EXPECT_NE(fails("a -> b\n"), "");
  EXPECT_NE(fails("vertices: a b\na => b\n"), "");
  EXPECT_NE(fails("vertices: a b-c\n"), "");
  EXPECT_NE(fails(""), "");

  try {
    parse_graph("vertices: a b\na => b\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 0u);
  }
}

TEST(Serialize, SortedAndReparses) {
  ParsedGraph pg = parse_graph("vertices: c a b\nlatent: b\nb <-> a\nb -> c\na -> c\nc <-> a\n");
  const std::string text = serialize_graph(pg.graph, pg.latent);
  // Edges sorted by label, bidirected endpoints in label order.
  EXPECT_EQ(text, "vertices: c a b\nlatent: b\na -> c\nb -> c\na <-> b\na <-> c\n");
  ParsedGraph again = parse_graph(text);
  EXPECT_EQ(again.graph, pg.graph);
  EXPECT_EQ(again.latent, pg.latent);
}

TEST(Serialize, RoundTripRandom) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    Admg g = testing_support::random_admg(rng, 1, 10);
    ParsedGraph back = parse_graph(serialize_graph(g));
    EXPECT_EQ(back.graph.graph(), g);
  }
}

TEST(Serialize, SampleFilesReparse) {
  for (const char* name : {"iv.admg", "iv_dag.admg", "gadget.admg", "encapsulation.admg", "directed_case.admg", "bidirected_case.admg",
                           "hidden_dag.admg", "non_arid.admg", "verma.admg"}) {
    ParsedGraph pg = testing_support::load_parsed(name);
    ParsedGraph back = parse_graph(serialize_graph(pg.graph, pg.latent));
    EXPECT_EQ(back.graph, pg.graph) << name;
    EXPECT_EQ(back.latent, pg.latent) << name;
  }
}
