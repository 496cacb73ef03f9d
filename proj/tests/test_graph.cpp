#include <gtest/gtest.h>

#include "support.hpp"

using namespace sjstream;
using sjstream::testing::World;

TEST(Schema, RegistrationIsIdempotentAndTyped) {
  Schema s;
  auto a = s.add_vertex_type("article");
  auto k = s.add_vertex_type("keyword");
  EXPECT_EQ(s.add_vertex_type("article"), a);
  auto t = s.add_edge_type("has_kw", a, k);
  EXPECT_EQ(s.add_edge_type("has_kw", k, a), t);
  EXPECT_TRUE(s.connects(t, k, a));
  EXPECT_THROW(s.add_edge_type("self", a, a), SchemaViolation);
  auto l = s.add_vertex_type("location");
  EXPECT_THROW(s.add_edge_type("has_kw", a, l), SchemaViolation);
  EXPECT_THROW(s.vertex_type("nope"), SchemaViolation);
  s.freeze();
  EXPECT_THROW(s.add_vertex_type("user"), SchemaViolation);
}

TEST(DynamicGraph, InsertCreatesVerticesOnce) {
  World w;
  DynamicGraph g(w.schema);
  auto e0 = g.update_graph(w.kw("a1", "k7", 5, "fire"));
  auto e1 = g.update_graph(w.kw("a2", "k7", 6, "fire"));
  EXPECT_EQ(e0, 0u);
  EXPECT_EQ(e1, 1u);
  EXPECT_EQ(g.vertex_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  auto k = *g.find_vertex("k7");
  EXPECT_EQ(g.vertex(k).label, "fire");
  EXPECT_EQ(g.neighbors(k, w.has_kw, 0).size(), 2u);
  EXPECT_EQ(g.current_time(), 6);
}

TEST(DynamicGraph, RejectsSchemaViolations) {
  World w;
  DynamicGraph g(w.schema);
  EdgeInsert bad{{"a1", w.article, ""}, {"l1", w.location, ""}, w.has_kw, 1};
  EXPECT_THROW(g.update_graph(bad), SchemaViolation);
  EdgeInsert same{{"a1", w.article, ""}, {"a2", w.article, ""}, w.has_kw, 1};
  EXPECT_THROW(g.update_graph(same), SchemaViolation);
  g.update_graph(w.kw("a1", "k1", 1));
  // a1 reused as a keyword.
  EdgeInsert retyped{{"a9", w.article, ""}, {"a1", w.keyword, ""}, w.has_kw, 2};
  EXPECT_THROW(g.update_graph(retyped), SchemaViolation);
  EXPECT_THROW(g.update_graph(w.kw("a2", "k1", 3, "other")), SchemaViolation);
  // Nothing was half-inserted.
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_FALSE(g.find_vertex("a2"));
}

TEST(DynamicGraph, TimestampRegressionBeyondSlack) {
  World w;
  DynamicGraph strict(w.schema);
  strict.update_graph(w.kw("a1", "k1", 10));
  EXPECT_THROW(strict.update_graph(w.kw("a2", "k1", 9)), TimestampRegression);

  DynamicGraph loose(w.schema, 3);
  loose.update_graph(w.kw("a1", "k1", 10));
  EXPECT_NO_THROW(loose.update_graph(w.kw("a2", "k1", 7)));
  EXPECT_THROW(loose.update_graph(w.kw("a3", "k1", 6)), TimestampRegression);
  // Late edge lands in timestamp order.
  auto k = *loose.find_vertex("k1");
  auto n = loose.neighbors(k, w.has_kw, 0);
  ASSERT_EQ(n.size(), 2u);
  EXPECT_EQ(n[0].timestamp, 7);
  EXPECT_EQ(n[1].timestamp, 10);
}

TEST(DynamicGraph, WindowedNeighbors) {
  World w;
  DynamicGraph g(w.schema);
  for (int t = 1; t <= 10; ++t) g.update_graph(w.kw("a" + std::to_string(t), "k", t));
  auto k = *g.find_vertex("k");
  EXPECT_EQ(g.neighbors(k, w.has_kw, 6).size(), 5u);
  EXPECT_EQ(g.neighbors(k, w.at_loc, 0).size(), 0u);
  EXPECT_EQ(g.all_neighbors(k, 9).at(0).size(), 2u);
}

TEST(DynamicGraph, MultigraphParallelEdges) {
  World w;
  DynamicGraph g(w.schema);
  auto e0 = g.update_graph(w.kw("a1", "k1", 1));
  auto e1 = g.update_graph(w.kw("a1", "k1", 2));
  EXPECT_NE(e0, e1);
  EXPECT_EQ(g.neighbors(*g.find_vertex("a1"), w.has_kw, 0).size(), 2u);
}

TEST(DynamicGraph, ExpireEdges) {
  World w;
  DynamicGraph g(w.schema);
  for (int t = 1; t <= 6; ++t) g.update_graph(w.kw("a" + std::to_string(t), "k", t));
  EXPECT_EQ(g.expire_edges(4), 3u);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_FALSE(g.has_edge(0));
  EXPECT_THROW(g.edge(0), UnknownEdge);
  EXPECT_EQ(g.neighbors(*g.find_vertex("k"), w.has_kw, 0).size(), 3u);
  EXPECT_EQ(g.edges().front().timestamp, 4);
  EXPECT_EQ(g.vertex_count(), 7u);
}

TEST(DynamicGraph, UnknownVertex) {
  World w;
  DynamicGraph g(w.schema);
  EXPECT_THROW(g.vertex(0), UnknownVertex);
  EXPECT_FALSE(g.find_vertex("x"));
}
