#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace sjstream;
using namespace sjstream::testing;

namespace {

struct TwoEvent {
  World w;
  QuerySpec spec = load_spec("template_2event.q", w.schema);
  DynamicGraph g{w.schema};

  EngineConfig config(Timestamp window = 10, std::size_t prune = 0) {
    EngineConfig c;
    c.window = window;
    c.prune_interval_edges = prune;
    return c;
  }
};

}  // namespace

TEST(Engine, EmitsOrderedPairs) {
  TwoEvent t;
  ContinuousQueryEngine eng(t.g, *t.spec.tree, t.config());
  std::vector<EdgeInsert> edges{t.w.kw("a1", "k", 1, "fire"), t.w.kw("a2", "k", 3, "fire"),
                                t.w.kw("a3", "k", 5, "fire")};
  auto out = eng.process_cont_query(edges);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].signature, "0,1");
  EXPECT_EQ(out[0].trigger, 1u);
  EXPECT_EQ(out[2].signature, "1,2");
  EXPECT_EQ(eng.stats().emitted, 3u);
}

TEST(Engine, WindowIsStrict) {
  TwoEvent t;
  ContinuousQueryEngine eng(t.g, *t.spec.tree, t.config(2));
  std::vector<EdgeInsert> edges{t.w.kw("a1", "k", 1, "fire"), t.w.kw("a2", "k", 3, "fire"),
                                t.w.kw("a3", "k", 5, "fire")};
  EXPECT_TRUE(eng.process_cont_query(edges).empty());
}

TEST(Engine, SameTimestampNeverJoinsOrdered) {
  TwoEvent t;
  ContinuousQueryEngine eng(t.g, *t.spec.tree, t.config());
  EXPECT_TRUE(eng.process_edge(t.w.kw("a1", "k", 4, "fire")).empty());
  EXPECT_TRUE(eng.process_edge(t.w.kw("a2", "k", 4, "fire")).empty());
  EXPECT_EQ(eng.process_edge(t.w.kw("a3", "k", 5, "fire")).size(), 2u);
}

TEST(Engine, OtherLabelsIgnored) {
  TwoEvent t;
  ContinuousQueryEngine eng(t.g, *t.spec.tree, t.config());
  eng.process_edge(t.w.kw("a1", "k", 1, "ice"));
  EXPECT_TRUE(eng.process_edge(t.w.kw("a2", "k", 2, "ice")).empty());
  EXPECT_EQ(eng.stats().leaf_matches, 0u);
}

TEST(Engine, PruneKeepsResultsAndBoundsStore) {
  TwoEvent t;
  ContinuousQueryEngine eng(t.g, *t.spec.tree, t.config(10, 5));
  std::size_t emitted = 0;
  for (int i = 0; i < 200; ++i) {
    emitted += eng.process_edge(t.w.kw("a" + std::to_string(i), "k", i, "fire")).size();
  }
  // Each article pairs with the 9 before it.
  EXPECT_EQ(emitted, 9u * 191u + 36u);
  EXPECT_LT(eng.store().total(), 40u);
  EXPECT_GT(eng.stats().pruned_matches, 0u);
}

TEST(Engine, RejectsBadConfig) {
  TwoEvent t;
  EXPECT_THROW(ContinuousQueryEngine(t.g, *t.spec.tree, t.config(0)), ConfigError);
  World w;
  auto tmpl = load_spec("template_4event.q", w.schema);
  DynamicGraph g(w.schema);
  EngineConfig c;
  c.window = 10;
  EXPECT_THROW(ContinuousQueryEngine(g, *tmpl.tree, c), SpecError);
}

TEST(Engine, JoinOutcomes) {
  TwoEvent t;
  const auto& tree = *t.spec.tree;
  auto root = tree.root();
  auto left = tree.node(root).left, right = tree.node(root).right;
  PartialMatch l{left, {{1, kNoVertex, 9}, {0, kNoEdge}}, 1, 1};
  PartialMatch r{right, {{kNoVertex, 2, 9}, {kNoEdge, 1}}, 3, 3};
  JoinOutcome why{};
  auto ok = join_matches(tree, root, l, r, 10, &why);
  ASSERT_TRUE(ok);
  EXPECT_EQ(why, JoinOutcome::kAccepted);
  EXPECT_EQ(ok->t_low, 1);
  EXPECT_EQ(ok->t_high, 3);

  auto same_time = r;
  same_time.t_low = same_time.t_high = 1;
  EXPECT_FALSE(join_matches(tree, root, l, same_time, 10, &why));
  EXPECT_EQ(why, JoinOutcome::kOrder);

  auto late = r;
  late.t_low = late.t_high = 11;
  EXPECT_FALSE(join_matches(tree, root, l, late, 10, &why));
  EXPECT_EQ(why, JoinOutcome::kWindow);

  auto clash = r;
  clash.map.vertices[1] = 1;
  EXPECT_FALSE(join_matches(tree, root, l, clash, 10, &why));
  EXPECT_EQ(why, JoinOutcome::kInjectivity);
}

TEST(Engine, SingleLeafTreeEmitsDirectly) {
  World w;
  std::istringstream in(R"(#sjstream-query v1
window 5
vertex e article event
vertex f keyword label=fire
vertex l location
edge k e f has_kw
edge p e l at_loc
leaf L k p
)");
  auto spec = parse_query_spec(in, w.schema);
  DynamicGraph g(w.schema);
  EngineConfig c;
  c.window = 5;
  ContinuousQueryEngine eng(g, *spec.tree, c);
  eng.process_edge(w.kw("a1", "k", 1, "fire"));
  EXPECT_EQ(eng.process_edge(w.loc("a1", "paris", 2)).size(), 1u);
  EXPECT_TRUE(eng.process_edge(w.loc("a1", "rome", 6)).empty());
}

// Join work per emitted match rises with tree height.
TEST(Engine, CostGrowsWithHeight) {
  auto attempts_per_match = [](const char* spec_text) {
    World w;
    std::istringstream in(spec_text);
    auto spec = parse_query_spec(in, w.schema);
    DynamicGraph g(w.schema);
    EngineConfig c;
    c.window = spec.window;
    ContinuousQueryEngine eng(g, *spec.tree, c);
    for (int i = 0; i < 60; ++i) {
      eng.process_edge(w.kw("a" + std::to_string(i), "k", i, "fire"));
    }
    return static_cast<double>(eng.stats().join_attempts) /
           static_cast<double>(std::max<std::size_t>(1, eng.stats().emitted));
  };
  const char* two = R"(window 6
vertex e1 article event
vertex e2 article event
vertex f keyword label=fire
edge a e1 f has_kw
edge b e2 f has_kw
leaf L1 a
leaf L2 b
join R L1 L2
)";
  const char* three = R"(window 6
vertex e1 article event
vertex e2 article event
vertex e3 article event
vertex f keyword label=fire
edge a e1 f has_kw
edge b e2 f has_kw
edge c e3 f has_kw
leaf L1 a
leaf L2 b
leaf L3 c
join N L1 L2
join R N L3
)";
  EXPECT_GT(attempts_per_match(three), attempts_per_match(two));
}
