#include <gtest/gtest.h>

#include "support.hpp"

using namespace sjstream;
using sjstream::testing::World;

namespace {

// e1 - f - e2 with both edges has_kw.
std::shared_ptr<QueryGraph> two_event(const World& w) {
  auto q = std::make_shared<QueryGraph>();
  auto e1 = q->add_vertex({"e1", w.article, std::nullopt, true});
  auto e2 = q->add_vertex({"e2", w.article, std::nullopt, true});
  auto f = q->add_vertex({"f", w.keyword, "fire"});
  q->add_edge("q1", e1, f, w.has_kw);
  q->add_edge("q2", e2, f, w.has_kw);
  return q;
}

}  // namespace

TEST(QueryGraph, RejectsBadShapes) {
  World w;
  QueryGraph q;
  auto a = q.add_vertex({"a", w.article});
  auto b = q.add_vertex({"b", w.article});
  auto k = q.add_vertex({"k", w.keyword});
  EXPECT_THROW(q.add_vertex({"a", w.keyword}), SpecError);
  EXPECT_THROW(q.add_vertex({"x", w.keyword, std::string()}), SpecError);
  EXPECT_THROW(q.add_edge("ab", a, b, w.has_kw), SpecError);
  q.add_edge("ak", a, k, w.has_kw);
  EXPECT_THROW(q.add_edge("ak2", k, a, w.has_kw), SpecError);
  EXPECT_THROW(q.add_edge("ak", b, k, w.has_kw), SpecError);
  EXPECT_FALSE(q.connected());
  q.add_edge("bk", b, k, w.has_kw);
  EXPECT_TRUE(q.connected());
  EXPECT_EQ(q.diameter(), 2u);
}

TEST(SJTree, TwoLeafTreeDerivesCut) {
  World w;
  auto q = two_event(w);
  SJTree t(q, 10);
  auto l1 = t.add_leaf("L1", {0});
  auto l2 = t.add_leaf("L2", {1});
  auto r = t.add_join("R", l1, l2);
  t.finalize();
  EXPECT_EQ(t.root(), r);
  EXPECT_TRUE(t.node(r).ordered_join);
  EXPECT_EQ(t.node(r).cut_subgraph.vertices, std::vector<QVertexId>{2});
  EXPECT_TRUE(t.node(r).cut_subgraph.edges.empty());
  EXPECT_EQ(t.node(l1).sibling, l2);
  EXPECT_EQ(t.leaves(), (std::vector<NodeId>{l1, l2}));
  EXPECT_EQ(t.height(), 1u);
  EXPECT_TRUE(validate_sjtree(t).ok());
  auto oc = ordering_constraints(t);
  ASSERT_EQ(oc.size(), 1u);
  EXPECT_EQ(oc[0].before, std::vector<QEdgeId>{0});
  EXPECT_EQ(oc[0].after, std::vector<QEdgeId>{1});
}

TEST(SJTree, SingleLeafTree) {
  World w;
  auto q = two_event(w);
  SJTree t(q, 10);
  t.add_leaf("L", {0, 1});
  t.finalize();
  EXPECT_TRUE(validate_sjtree(t).ok());
  EXPECT_EQ(t.height(), 0u);
  EXPECT_TRUE(ordering_constraints(t).empty());
}

TEST(SJTree, ValidationCatchesCorruption) {
  World w;
  auto q = two_event(w);
  auto build = [&] {
    SJTree t(q, 10);
    auto l1 = t.add_leaf("L1", {0});
    auto l2 = t.add_leaf("L2", {1});
    t.add_join("R", l1, l2);
    t.finalize();
    return t;
  };
  {
    auto t = build();
    t.mutable_node(t.root()).query_subgraph.vertices.pop_back();
    auto rep = validate_sjtree(t);
    EXPECT_TRUE(rep.has("P2"));
    EXPECT_TRUE(rep.has("P1"));
  }
  {
    auto t = build();
    t.mutable_node(t.root()).cut_subgraph.vertices.clear();
    EXPECT_TRUE(validate_sjtree(t).has("P4"));
  }
  {
    auto t = build();
    t.mutable_node(1).query_subgraph = QuerySubgraph::from_edges(*q, {0});
    auto rep = validate_sjtree(t);
    EXPECT_TRUE(rep.has("partition"));
  }
  {
    auto t = build();
    t.set_window(0);
    EXPECT_TRUE(validate_sjtree(t).has("window"));
  }
}

TEST(SJTree, OverlappingLeavesFailPartition) {
  World w;
  auto q = two_event(w);
  SJTree t(q, 10);
  auto l1 = t.add_leaf("L1", {0, 1});
  auto l2 = t.add_leaf("L2", {1});
  t.add_join("R", l1, l2);
  t.finalize();
  EXPECT_TRUE(validate_sjtree(t).has("partition"));
}

TEST(Embedding, ProjectRestrictsAndChecksDomain) {
  World w;
  auto q = two_event(w);
  Embedding m = Embedding::empty_for(*q);
  m.vertices = {10, 11, 12};
  m.edges = {100, kNoEdge};
  auto sub = QuerySubgraph::from_edges(*q, {0});
  auto p = project(m, sub);
  EXPECT_EQ(p.vertices, (std::vector<VertexId>{10, kNoVertex, 12}));
  EXPECT_EQ(p.edges[0], 100u);
  EXPECT_THROW(project(m, QuerySubgraph::from_edges(*q, {1})), DomainMismatch);
}

TEST(SJTree, RebindKeepsShape) {
  Schema s;
  auto spec = sjstream::testing::load_spec("template_4event.q", s);
  auto filled = instantiate(spec, "keyword_3");
  EXPECT_EQ(filled.tree->nodes().size(), spec.tree->nodes().size());
  EXPECT_EQ(&filled.tree->query(), filled.query.get());
  EXPECT_FALSE(filled.query->label_slot());
  EXPECT_TRUE(spec.query->label_slot());
  EXPECT_EQ(filled.tree->height(), 3u);
}
