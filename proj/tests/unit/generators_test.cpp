#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "evonet/generators.hpp"
#include "evonet/prisoners_dilemma.hpp"
#include "oracle/pd_oracle.hpp"

namespace {

using evonet::Error;
using evonet::GridSpec;
using evonet::Neighborhood;
using evonet::NodeId;

const std::string kData = EVONET_TEST_DATA;

evonet::AttrSchema pd_schema() { return evonet::pd::metadata().node_attrs; }

TEST(SquareGrid, PeriodicThreeByThree) {
  const auto g = evonet::square_grid({3, 3, true, Neighborhood::VonNeumann});
  EXPECT_EQ(g.node_count(), 9u);
  EXPECT_EQ(g.edge_count(), 18u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(g.degree(NodeId(i)), 4u);
}

TEST(SquareGrid, OpenThreeByThree) {
  const auto g = evonet::square_grid({3, 3, false, Neighborhood::VonNeumann});
  EXPECT_EQ(g.edge_count(), 12u);
  EXPECT_EQ(g.degree(NodeId(0)), 2u);
  EXPECT_EQ(g.degree(NodeId(1)), 3u);
  EXPECT_EQ(g.degree(NodeId(4)), 4u);
}

TEST(SquareGrid, NinetyNineSquarePeriodic) {
  const auto g = evonet::square_grid({99, 99, true, Neighborhood::VonNeumann});
  EXPECT_EQ(g.node_count(), 9801u);
  EXPECT_EQ(g.edge_count(), 19602u);
  for (std::size_t i = 0; i < g.node_count(); ++i) ASSERT_EQ(g.degree(NodeId(i)), 4u);
}

TEST(SquareGrid, MooreDegrees) {
  const auto open = evonet::square_grid({3, 3, false, Neighborhood::Moore});
  EXPECT_EQ(open.degree(NodeId(0)), 3u);
  EXPECT_EQ(open.degree(NodeId(4)), 8u);
  EXPECT_EQ(open.edge_count(), 20u);
  const auto torus = evonet::square_grid({4, 5, true, Neighborhood::Moore});
  for (std::size_t i = 0; i < torus.node_count(); ++i) EXPECT_EQ(torus.degree(NodeId(i)), 8u);
}

TEST(SquareGrid, RowMajorIdsAndPositions) {
  const auto g = evonet::square_grid({4, 2, false, Neighborhood::VonNeumann});
  EXPECT_EQ(*g.position(NodeId(5)), (evonet::Point{1, 1}));
  EXPECT_EQ(*g.position(NodeId(3)), (evonet::Point{3, 0}));
}

TEST(SquareGrid, RejectsDegenerateSizes) {
  EXPECT_THROW(evonet::square_grid({0, 3, false, Neighborhood::VonNeumann}), Error);
  EXPECT_THROW(evonet::square_grid({2, 5, true, Neighborhood::VonNeumann}), Error);
  EXPECT_NO_THROW(evonet::square_grid({1, 1, false, Neighborhood::VonNeumann}));
}

// Property: neighbor lists equal the pairwise lattice predicate.
TEST(SquareGrid, MatchesPairwiseOracle) {
  for (int w = 1; w <= 6; ++w) {
    for (int h = 1; h <= 6; ++h) {
      for (bool periodic : {false, true}) {
        if (periodic && (w < 3 || h < 3)) continue;
        for (bool moore : {false, true}) {
          const auto g = evonet::square_grid(
              {static_cast<std::size_t>(w), static_cast<std::size_t>(h), periodic,
               moore ? Neighborhood::Moore : Neighborhood::VonNeumann});
          const auto expected = oracle::neighbor_lists({w, h, periodic, moore});
          for (int i = 0; i < w * h; ++i) {
            std::vector<int> got;
            for (auto n : g.neighbors(NodeId(i))) got.push_back(static_cast<int>(n.index()));
            ASSERT_EQ(got, expected[i]) << w << "x" << h << " periodic=" << periodic << " moore=" << moore;
          }
        }
      }
    }
  }
}

TEST(EdgeFile, UndirectedRingWithCircularLayout) {
  const auto g = evonet::graph_from_edge_file(kData + "/ring4.csv", 4);
  EXPECT_FALSE(g.directed());
  EXPECT_EQ(g.edge_count(), 4u);
  EXPECT_EQ(g.degree(NodeId(0)), 2u);
  const auto p = *g.position(NodeId(1));
  EXPECT_NEAR(p.x, std::cos(std::numbers::pi / 2), 1e-12);
  EXPECT_NEAR(p.y, std::sin(std::numbers::pi / 2), 1e-12);
}

TEST(EdgeFile, DirectedFlag) {
  const auto g = evonet::graph_from_edge_file(kData + "/directed3.csv", 3);
  EXPECT_TRUE(g.directed());
  EXPECT_EQ(g.degree(NodeId(2)), 0u);
}

TEST(EdgeFile, Errors) {
  EXPECT_THROW(evonet::graph_from_edge_file(kData + "/mixed.csv", 3), Error);
  EXPECT_THROW(evonet::graph_from_edge_file(kData + "/ring4.csv", 3), Error);  // dangling 3
  EXPECT_THROW(evonet::graph_from_edge_file(kData + "/missing.csv", 3), Error);
  EXPECT_THROW(evonet::graph_from_edge_csv("from,to\n0,1\n", 2), Error);
  EXPECT_THROW(evonet::graph_from_edge_csv("origin,target\n0,x\n", 2), Error);
  EXPECT_THROW(evonet::graph_from_edge_csv("origin,target\n0,1\n1,0\n", 2), Error);
  EXPECT_THROW(evonet::graph_from_edge_csv("", 2), Error);
}

TEST(NodesSpec, ParsesAndRendersCanonically) {
  const auto s = evonet::parse_nodes_spec("same(9801; strategy=0) | set(4900: strategy=1)");
  EXPECT_EQ(s.kind, evonet::NodesSpec::Kind::Same);
  EXPECT_EQ(s.count, 9801u);
  ASSERT_EQ(s.patches.size(), 1u);
  EXPECT_EQ(s.patches[0].id, 4900u);
  EXPECT_EQ(s.to_string(), "same(9801; strategy=0) | set(4900: strategy=1)");

  const auto r = evonet::parse_nodes_spec(" random( 100 ;7 ) ");
  EXPECT_EQ(r.kind, evonet::NodesSpec::Kind::Random);
  EXPECT_EQ(r.seed, 7u);
  EXPECT_EQ(r.to_string(), "random(100; 7)");

  const auto f = evonet::parse_nodes_spec("file(nodes.csv)|set(0: strategy=1)|set(1: strategy=1)");
  EXPECT_EQ(f.kind, evonet::NodesSpec::Kind::File);
  EXPECT_EQ(f.path, "nodes.csv");
  EXPECT_EQ(f.patches.size(), 2u);
}

TEST(NodesSpec, RoundTrip) {
  const char* specs[] = {"same(1)", "same(4; a=1, b=x)", "random(16)", "random(16; 3)", "random(16; 3; a=2)",
                         "random(9; a=2)", "file(dir/n.csv)", "same(9) | set(0: a=1) | set(8: a=2, b=3)"};
  for (const char* text : specs) {
    const auto s = evonet::parse_nodes_spec(text);
    EXPECT_EQ(evonet::parse_nodes_spec(s.to_string()), s) << text;
  }
}

TEST(NodesSpec, Errors) {
  const char* bad[] = {"same()",     "same(-1)", "same(x)",       "grid(4)",         "random(4; 1; a)",
                       "same(4",     "file()",   "same(4) | foo(1)", "same(4) | set(x: a=1)", "same(4) | set(1)",
                       "",           "same(4; =1)"};
  for (const char* text : bad) EXPECT_THROW(evonet::parse_nodes_spec(text), Error) << text;
}

TEST(GenerateNodes, SameWithPatch) {
  evonet::Pcg32 rng(0);
  const auto table = evonet::generate_nodes(
      evonet::parse_nodes_spec("same(9801; strategy=0) | set(4900: strategy=1)"), pd_schema(), rng);
  ASSERT_EQ(table.size(), 9801u);
  std::size_t defectors = 0;
  for (std::size_t i = 0; i < table.size(); ++i) defectors += table.rows[i][0] == evonet::AttrValue(1);
  EXPECT_EQ(defectors, 1u);
  EXPECT_EQ(table.rows[4900][0], evonet::AttrValue(1));
  EXPECT_EQ(rng, evonet::Pcg32(0));  // same() never draws
}

TEST(GenerateNodes, SeededRandomIsReproducibleAndIgnoresTrialRng) {
  evonet::Pcg32 a(1);
  evonet::Pcg32 b(2);
  const auto spec = evonet::parse_nodes_spec("random(200; 42)");
  const auto x = evonet::generate_nodes(spec, pd_schema(), a);
  const auto y = evonet::generate_nodes(spec, pd_schema(), b);
  EXPECT_EQ(x.rows, y.rows);
  EXPECT_EQ(a, evonet::Pcg32(1));
  std::set<std::int64_t> seen;
  for (const auto& row : x.rows) seen.insert(row[0].as_int());
  EXPECT_EQ(seen.size(), 4u);
}

TEST(GenerateNodes, UnseededRandomUsesTrialRng) {
  const auto spec = evonet::parse_nodes_spec("random(50)");
  evonet::Pcg32 a(9);
  evonet::Pcg32 b(9);
  evonet::Pcg32 c(10);
  const auto x = evonet::generate_nodes(spec, pd_schema(), a);
  EXPECT_EQ(x.rows, evonet::generate_nodes(spec, pd_schema(), b).rows);
  EXPECT_NE(x.rows, evonet::generate_nodes(spec, pd_schema(), c).rows);
  // Each node draws one value, two PCG32 outputs.
  evonet::Pcg32 d(9);
  for (int i = 0; i < 100; ++i) d();
  EXPECT_EQ(a, d);
}

TEST(GenerateNodes, DrawOrderIsNodeMajor) {
  evonet::AttrSchema schema;
  schema.add("a", evonet::parse_attr_range("int[0,1000000]"));
  schema.add("b", evonet::parse_attr_range("int[0,1000000]"));
  evonet::Pcg32 rng(5);
  const auto table = evonet::generate_nodes(evonet::parse_nodes_spec("random(3)"), schema, rng);
  evonet::Pcg32 ref(5);
  const auto range = schema[0].range;
  for (std::size_t n = 0; n < 3; ++n) {
    EXPECT_EQ(table.rows[n][0], evonet::random_value(range, ref));
    EXPECT_EQ(table.rows[n][1], evonet::random_value(range, ref));
  }
}

TEST(GenerateNodes, OverridesAreNotDrawn) {
  evonet::AttrSchema schema;
  schema.add("a", evonet::parse_attr_range("int[0,9]"));
  schema.add("b", evonet::parse_attr_range("int[0,9]"));
  evonet::Pcg32 rng(5);
  const auto table = evonet::generate_nodes(evonet::parse_nodes_spec("random(4; b=7)"), schema, rng);
  evonet::Pcg32 ref(5);
  for (const auto& row : table.rows) {
    EXPECT_EQ(row[0], evonet::random_value(schema[0].range, ref));
    EXPECT_EQ(row[1], evonet::AttrValue(7));
  }
  EXPECT_EQ(rng, ref);
}

TEST(GenerateNodes, FileWithPositions) {
  evonet::Pcg32 rng(0);
  const auto table = evonet::generate_nodes(evonet::parse_nodes_spec("file(nodes4.csv) | set(0: strategy=3)"),
                                            pd_schema(), rng, kData);
  ASSERT_EQ(table.size(), 4u);
  EXPECT_EQ(table.rows[0][0], evonet::AttrValue(3));
  EXPECT_EQ(table.rows[1][0], evonet::AttrValue(1));
  ASSERT_EQ(table.positions.size(), 4u);
  EXPECT_EQ(*table.positions[2], (evonet::Point{1, 1}));
}

TEST(GenerateNodes, Errors) {
  evonet::Pcg32 rng(0);
  const auto schema = pd_schema();
  EXPECT_THROW(evonet::generate_nodes(evonet::parse_nodes_spec("same(4; strategy=9)"), schema, rng), Error);
  EXPECT_THROW(evonet::generate_nodes(evonet::parse_nodes_spec("same(4; colour=1)"), schema, rng), Error);
  EXPECT_THROW(evonet::generate_nodes(evonet::parse_nodes_spec("same(4) | set(4: strategy=1)"), schema, rng), Error);
  EXPECT_THROW(evonet::generate_nodes(evonet::parse_nodes_spec("file(nodes_bad_column.csv)"), schema, rng, kData),
               Error);
  EXPECT_THROW(evonet::generate_nodes(evonet::parse_nodes_spec("file(absent.csv)"), schema, rng, kData), Error);
}

TEST(Populate, CountMismatchIsAnError) {
  auto g = evonet::square_grid({3, 3, false, Neighborhood::VonNeumann}, pd_schema());
  evonet::Pcg32 rng(0);
  EXPECT_THROW(evonet::populate(g, evonet::generate_nodes(evonet::parse_nodes_spec("same(8)"), pd_schema(), rng)),
               Error);
  evonet::populate(g, evonet::generate_nodes(evonet::parse_nodes_spec("same(9) | set(2: strategy=1)"), pd_schema(), rng));
  EXPECT_EQ(g.get_attr(NodeId(2), "strategy"), evonet::AttrValue(1));
  EXPECT_EQ(*g.position(NodeId(2)), (evonet::Point{2, 0}));  // grid layout survives
}

}  // namespace
