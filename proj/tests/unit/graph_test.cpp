#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "evonet/graph.hpp"

namespace {

using evonet::AttrSchema;
using evonet::AttrValue;
using evonet::Directedness;
using evonet::EdgePair;
using evonet::Error;
using evonet::Graph;
using evonet::NodeId;

AttrSchema strategy_schema() {
  AttrSchema s;
  s.add("strategy", evonet::parse_attr_range("int{0,1,2,3}"));
  return s;
}

std::vector<std::size_t> ids(std::span<const NodeId> nbrs) {
  std::vector<std::size_t> out;
  for (auto n : nbrs) out.push_back(n.index());
  return out;
}

TEST(Graph, UndirectedAdjacencyIsSymmetricAndSorted) {
  const std::vector<EdgePair> edges{{2, 0}, {0, 1}, {3, 1}};
  Graph g(Directedness::Undirected, 4, edges);
  EXPECT_EQ(ids(g.neighbors(NodeId(0))), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(ids(g.neighbors(NodeId(1))), (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(ids(g.neighbors(NodeId(2))), (std::vector<std::size_t>{0}));
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_TRUE(g.adjacency_consistent());
}

TEST(Graph, DirectedUsesOutNeighbors) {
  const std::vector<EdgePair> edges{{0, 1}, {1, 2}, {2, 0}, {0, 2}};
  Graph g(Directedness::Directed, 3, edges);
  EXPECT_EQ(ids(g.neighbors(NodeId(0))), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(ids(g.neighbors(NodeId(1))), (std::vector<std::size_t>{2}));
  EXPECT_EQ(g.degree(NodeId(2)), 1u);
}

TEST(Graph, RejectsDanglingSelfLoopAndDuplicate) {
  const std::vector<EdgePair> dangling{{0, 5}};
  EXPECT_THROW(Graph(Directedness::Undirected, 3, dangling), Error);
  const std::vector<EdgePair> loop{{1, 1}};
  EXPECT_THROW(Graph(Directedness::Undirected, 3, loop), Error);
  EXPECT_NO_THROW(Graph(Directedness::Undirected, 3, loop, {}, {}, true));
  const std::vector<EdgePair> dup{{0, 1}, {1, 0}};
  EXPECT_THROW(Graph(Directedness::Undirected, 3, dup), Error);
  EXPECT_NO_THROW(Graph(Directedness::Directed, 3, dup));
  const std::vector<EdgePair> dup_directed{{0, 1}, {0, 1}};
  EXPECT_THROW(Graph(Directedness::Directed, 3, dup_directed), Error);
}

TEST(Graph, AttributesDefaultAndValidate) {
  const std::vector<EdgePair> edges{{0, 1}};
  Graph g(Directedness::Undirected, 2, edges, strategy_schema());
  EXPECT_EQ(g.get_attr(NodeId(1), "strategy"), AttrValue(0));
  g.set_attr(NodeId(1), "strategy", AttrValue(3));
  EXPECT_EQ(g.attr(NodeId(1), 0), AttrValue(3));
  EXPECT_EQ(g.attr(NodeId(0), 0), AttrValue(0));
  EXPECT_THROW(g.set_attr(NodeId(1), "strategy", AttrValue(4)), Error);
  EXPECT_THROW(g.set_attr(NodeId(1), "strategy", AttrValue(1.0)), Error);
  EXPECT_THROW(g.set_attr(NodeId(1), "nope", AttrValue(1)), Error);
  EXPECT_THROW(g.set_attr(NodeId(2), "strategy", AttrValue(1)), Error);
  EXPECT_EQ(g.attr(NodeId(1), 0), AttrValue(3));  // failed writes leave state alone
}

TEST(Graph, PositionsAreOptional) {
  Graph g(Directedness::Undirected, 2, {});
  EXPECT_FALSE(g.position(NodeId(0)));
  g.set_position(NodeId(0), evonet::Point{1.5, -2});
  EXPECT_EQ(*g.position(NodeId(0)), (evonet::Point{1.5, -2}));
}

// Property: random simple graphs keep CSR adjacency equal to the edge list.
TEST(Graph, RandomGraphsStayConsistent) {
  evonet::Pcg32 rng(123);
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 1 + rng() % 30;
    const bool directed = rng() % 2;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<EdgePair> edges;
    for (int k = 0; k < 60; ++k) {
      std::size_t u = rng() % n;
      std::size_t v = rng() % n;
      if (u == v) continue;
      auto key = directed ? std::pair{u, v} : std::pair{std::min(u, v), std::max(u, v)};
      if (!seen.insert(key).second) continue;
      edges.emplace_back(u, v);
    }
    Graph g(directed ? Directedness::Directed : Directedness::Undirected, n, edges);
    ASSERT_TRUE(g.adjacency_consistent());
    std::size_t degree_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto nb = g.neighbors(NodeId(i));
      ASSERT_TRUE(std::is_sorted(nb.begin(), nb.end()));
      degree_sum += nb.size();
      for (auto j : nb) {
        if (!directed) {
          auto back = g.neighbors(j);
          ASSERT_TRUE(std::binary_search(back.begin(), back.end(), NodeId(i)));
        }
      }
    }
    EXPECT_EQ(degree_sum, directed ? edges.size() : 2 * edges.size());
  }
}

}  // namespace
