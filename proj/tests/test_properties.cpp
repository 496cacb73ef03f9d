// Randomized invariants. Each suite runs at least 1000 generated cases.
#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "support.hpp"

using namespace sjstream;
using namespace sjstream::testing;

namespace {

constexpr int kCases = 1000;

struct RandomCase {
  std::unique_ptr<World> w = std::make_unique<World>();
  std::shared_ptr<QueryGraph> q = std::make_shared<QueryGraph>();
  std::shared_ptr<SJTree> tree;
  std::vector<EdgeInsert> edges;
  Timestamp window = 0;
};

// Events e0..e(n-1) all tag keyword f1; some also carry location f2. Leaves
// are random connected edge groups, joined in random order.
RandomCase make_case(std::mt19937_64& rng, std::size_t stream_edges) {
  RandomCase c;
  auto& w = *c.w;
  const int events = 1 + static_cast<int>(rng() % 4);
  std::vector<QVertexId> ev;
  for (int i = 0; i < events; ++i) {
    ev.push_back(c.q->add_vertex({"e" + std::to_string(i), w.article, std::nullopt, true}));
  }
  std::optional<std::string> label;
  if (rng() % 4 != 0) label = "keyword_" + std::to_string(rng() % 2);
  auto f1 = c.q->add_vertex({"f1", w.keyword, label});
  std::optional<QVertexId> f2;
  for (int i = 0; i < events; ++i) {
    c.q->add_edge("k" + std::to_string(i), ev[i], f1, w.has_kw);
    if (rng() % 2) {
      if (!f2) f2 = c.q->add_vertex({"f2", w.location});
      c.q->add_edge("l" + std::to_string(i), ev[i], *f2, w.at_loc);
    }
  }

  c.window = 3 + static_cast<Timestamp>(rng() % 12);
  c.tree = std::make_shared<SJTree>(c.q, c.window);
  std::vector<bool> used(c.q->edge_count(), false);
  std::vector<NodeId> pool;
  for (std::size_t start = 0; start < used.size(); ++start) {
    if (used[start]) continue;
    std::vector<QEdgeId> group{static_cast<QEdgeId>(start)};
    used[start] = true;
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t e = 0; e < used.size(); ++e) {
        if (used[e] || rng() % 2) continue;
        auto sub = QuerySubgraph::from_edges(*c.q, group);
        const auto& qe = c.q->edge(static_cast<QEdgeId>(e));
        if (sub.contains(qe.a) || sub.contains(qe.b)) {
          group.push_back(static_cast<QEdgeId>(e));
          used[e] = true;
          grew = true;
        }
      }
    }
    pool.push_back(c.tree->add_leaf("L" + std::to_string(pool.size()), group));
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  int joins = 0;
  while (pool.size() > 1) {
    auto i = rng() % pool.size();
    auto l = pool[i];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    auto j = rng() % pool.size();
    auto r = pool[j];
    std::optional<bool> ordered;
    if (rng() % 3 == 0) ordered = false;
    pool[j] = c.tree->add_join("N" + std::to_string(joins++), l, r, ordered);
  }
  c.tree->finalize();

  GeneratorConfig g;
  g.seed = rng();
  g.total_edges = stream_edges;
  g.vertex_types = {{"keyword", 2 + rng() % 3}, {"location", 2 + rng() % 2}};
  g.relations = {{"has_kw", "keyword"}, {"at_loc", "location"}};
  g.events_per_tick = 1 + rng() % 3;
  for (const auto& e : generate_stream(g)) c.edges.push_back(resolve(w.schema, e));
  return c;
}

struct Observed {
  std::vector<MatchRecord> emitted;
  bool stored_ok = true;
  std::string failure;
  std::set<std::string> oracle;
};

Observed run_case(RandomCase& c, std::size_t prune_interval, bool with_oracle) {
  Observed o;
  DynamicGraph g(c.w->schema);
  EngineConfig cfg;
  cfg.window = c.window;
  cfg.prune_interval_edges = prune_interval;
  ContinuousQueryEngine eng(g, *c.tree, cfg);
  for (const auto& e : c.edges) {
    for (auto& r : eng.process_edge(e)) o.emitted.push_back(std::move(r));
    for (const auto& node : c.tree->nodes()) {
      for (const auto& m : eng.store().all_matches(node.id)) {
        if (m.span() >= c.window) {
          o.stored_ok = false;
          o.failure = "stored span " + std::to_string(m.span());
        }
      }
    }
  }
  if (with_oracle) {
    o.oracle = signature_set(enumerate_all(GraphSnapshot::of(g), *c.q, c.window,
                                           ordering_constraints(*c.tree)));
  }
  return o;
}

Timestamp edge_time(const RandomCase& c, EdgeId id) {
  return c.edges[id].timestamp;  // edge ids follow arrival order
}

}  // namespace

TEST(Properties, TreeValidationHoldsAndCatchesCorruption) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < kCases; ++i) {
    auto c = make_case(rng, 2);
    auto report = validate_sjtree(*c.tree);
    ASSERT_TRUE(report.ok()) << report.to_string();
    const auto& root = c.tree->node(c.tree->root());
    ASSERT_EQ(root.query_subgraph, QuerySubgraph::whole(*c.q));
    if (c.tree->nodes().size() < 3) continue;

    SJTree bad = *c.tree;
    auto victim = static_cast<NodeId>(rng() % bad.nodes().size());
    auto& n = bad.mutable_node(victim);
    if (n.is_leaf() || rng() % 2) {
      if (n.query_subgraph.edges.empty()) continue;
      n.query_subgraph.edges.pop_back();
    } else {
      n.cut_subgraph.vertices.push_back(static_cast<QVertexId>(c.q->vertex_count() + 1));
    }
    auto rep = validate_sjtree(bad);
    ASSERT_FALSE(rep.ok()) << "node " << victim;
  }
}

TEST(Properties, JoinKeySoundAndComplete) {
  std::mt19937_64 rng(202);
  for (int i = 0; i < kCases; ++i) {
    const std::size_t nq = 2 + rng() % 5;
    QuerySubgraph cut;
    for (QVertexId v = 0; v < nq; ++v) {
      if (rng() % 2) cut.vertices.push_back(v);
    }
    auto random_map = [&] {
      PartialMatch m;
      m.map.vertices.resize(nq);
      for (auto& v : m.map.vertices) v = static_cast<VertexId>(rng() % 3);
      return m;
    };
    auto a = random_map(), b = random_map();
    bool same = std::all_of(cut.vertices.begin(), cut.vertices.end(),
                            [&](QVertexId v) { return a.map.vertices[v] == b.map.vertices[v]; });
    ASSERT_EQ(make_join_key(cut, a) == make_join_key(cut, b), same);
  }
}

TEST(Properties, StoreMatchesFlatReference) {
  std::mt19937_64 rng(303);
  for (int i = 0; i < kCases; ++i) {
    MatchStore store(2);
    std::vector<std::tuple<NodeId, JoinKey, PartialMatch>> flat;
    Timestamp horizon = std::numeric_limits<Timestamp>::min();
    for (int step = 0; step < 40; ++step) {
      auto op = rng() % 10;
      if (op < 6) {
        PartialMatch m;
        m.node = static_cast<NodeId>(rng() % 2);
        m.map.vertices = {static_cast<VertexId>(rng() % 4)};
        m.map.edges = {static_cast<EdgeId>(rng() % 30)};
        m.t_low = static_cast<Timestamp>(rng() % 20);
        m.t_high = m.t_low + static_cast<Timestamp>(rng() % 3);
        JoinKey key(1, static_cast<char>('a' + rng() % 3));
        auto sig = match_signature(m.node, m.map);
        bool dup = std::any_of(flat.begin(), flat.end(), [&](const auto& t) {
          return match_signature(std::get<0>(t), std::get<2>(t).map) == sig;
        });
        if (dup) {
          ASSERT_THROW(store.insert_match(m.node, key, m), DuplicateMatch);
        } else {
          store.insert_match(m.node, key, m);
          flat.emplace_back(m.node, key, m);
        }
      } else if (op < 8) {
        auto cutoff = static_cast<Timestamp>(rng() % 20);
        auto before = flat.size();
        std::erase_if(flat, [&](const auto& t) { return std::get<2>(t).t_low < cutoff; });
        ASSERT_EQ(store.prune(cutoff), before - flat.size());
      } else {
        horizon = static_cast<Timestamp>(rng() % 20);
        store.set_horizon(horizon);
      }
      for (NodeId n = 0; n < 2; ++n) {
        for (char k = 'a'; k <= 'c'; ++k) {
          JoinKey key(1, k);
          std::size_t expect = 0;
          for (const auto& [node, fk, m] : flat) {
            if (node == n && fk == key && m.t_low >= horizon) ++expect;
          }
          ASSERT_EQ(store.lookup_matches(n, key).size(), expect);
        }
      }
      ASSERT_EQ(store.total(), flat.size());
    }
  }
}

TEST(Properties, WindowDiscipline) {
  std::mt19937_64 rng(404);
  for (int i = 0; i < kCases; ++i) {
    auto c = make_case(rng, 40 + rng() % 40);
    auto o = run_case(c, rng() % 2 ? 0 : 1 + rng() % 10, false);
    ASSERT_TRUE(o.stored_ok) << o.failure;
    for (const auto& r : o.emitted) {
      ASSERT_LT(r.t_high - r.t_low, c.window);
      Timestamp lo = r.t_high, hi = r.t_low;
      for (auto e : r.map.edges) {
        lo = std::min(lo, edge_time(c, e));
        hi = std::max(hi, edge_time(c, e));
      }
      ASSERT_EQ(lo, r.t_low);
      ASSERT_EQ(hi, r.t_high);
    }
  }
}

TEST(Properties, EmitOnce) {
  std::mt19937_64 rng(505);
  for (int i = 0; i < kCases; ++i) {
    auto c = make_case(rng, 40 + rng() % 40);
    auto o = run_case(c, rng() % 5, false);
    std::set<std::string> seen;
    for (const auto& r : o.emitted) ASSERT_TRUE(seen.insert(r.signature).second) << r.signature;
  }
}

TEST(Properties, InjectiveEmbeddings) {
  std::mt19937_64 rng(606);
  for (int i = 0; i < kCases; ++i) {
    auto c = make_case(rng, 40 + rng() % 40);
    auto o = run_case(c, 0, false);
    for (const auto& r : o.emitted) {
      auto vs = r.map.vertices;
      std::sort(vs.begin(), vs.end());
      ASSERT_TRUE(std::adjacent_find(vs.begin(), vs.end()) == vs.end());
      auto es = r.map.edges;
      std::sort(es.begin(), es.end());
      ASSERT_TRUE(std::adjacent_find(es.begin(), es.end()) == es.end());
      ASSERT_TRUE(std::find(vs.begin(), vs.end(), kNoVertex) == vs.end());
    }
  }
}

TEST(Properties, StrictTemporalOrder) {
  std::mt19937_64 rng(707);
  std::size_t checked = 0;
  for (int i = 0; i < kCases; ++i) {
    auto c = make_case(rng, 40 + rng() % 40);
    auto constraints = ordering_constraints(*c.tree);
    auto o = run_case(c, 0, false);
    for (const auto& r : o.emitted) {
      for (const auto& oc : constraints) {
        Timestamp before = std::numeric_limits<Timestamp>::min();
        Timestamp after = std::numeric_limits<Timestamp>::max();
        for (auto e : oc.before) before = std::max(before, edge_time(c, r.map.edges[e]));
        for (auto e : oc.after) after = std::min(after, edge_time(c, r.map.edges[e]));
        ASSERT_LT(before, after);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 0u);
}

TEST(Properties, EngineEqualsOracle) {
  std::mt19937_64 rng(808);
  for (int i = 0; i < kCases; ++i) {
    auto c = make_case(rng, 30 + rng() % 50);
    auto o = run_case(c, rng() % 2 ? 0 : 1 + rng() % 7, true);
    std::set<std::string> got;
    for (const auto& r : o.emitted) got.insert(r.signature);
    ASSERT_EQ(got, o.oracle) << "case " << i;
  }
}

TEST(Properties, LocalSearchEqualsOracleOnLeaves) {
  std::mt19937_64 rng(909);
  for (int i = 0; i < kCases; ++i) {
    auto c = make_case(rng, 30 + rng() % 30);
    DynamicGraph g(c.w->schema);
    for (const auto& e : c.edges) g.update_graph(e);
    const auto& leaf = c.tree->node(c.tree->leaves()[rng() % c.tree->leaves().size()]);
    // Leaf subgraph as a standalone query.
    QueryGraph sub;
    std::map<QVertexId, QVertexId> remap;
    for (auto v : leaf.query_subgraph.vertices) remap[v] = sub.add_vertex(c.q->vertex(v));
    for (auto e : leaf.query_subgraph.edges) {
      const auto& qe = c.q->edge(e);
      sub.add_edge(qe.name, remap[qe.a], remap[qe.b], qe.type);
    }
    auto truth = enumerate_all(GraphSnapshot::of(g), sub, c.window, {});
    std::set<std::string> expect;
    for (const auto& r : truth) expect.insert(r.signature);

    std::set<std::string> got;
    for (const auto& anchor : g.edges()) {
      for (const auto& m : local_search(g, *c.q, leaf.query_subgraph, anchor,
                                        anchor.timestamp - c.window)) {
        if (m.span() >= c.window) continue;
        // Keep only matches whose newest edge is the anchor, so each is seen once.
        bool newest = true;
        for (auto e : leaf.query_subgraph.edges) {
          if (m.map.edges[e] > anchor.id) newest = false;
        }
        if (!newest) continue;
        Embedding compact{{}, {}};
        for (auto e : leaf.query_subgraph.edges) compact.edges.push_back(m.map.edges[e]);
        got.insert(record_signature(compact));
      }
    }
    ASSERT_EQ(got, expect) << "case " << i;
  }
}
