#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "sjstream/baseline.hpp"
#include "sjstream/bench.hpp"
#include "sjstream/engine.hpp"
#include "sjstream/local_search.hpp"
#include "sjstream/oracle.hpp"
#include "sjstream/streamio.hpp"

namespace sjstream::testing {

inline std::string data_path(const std::string& name) {
  return std::string(SJSTREAM_DATA_DIR) + "/" + name;
}

/// article/keyword/location schema used throughout the tests.
struct World {
  Schema schema;
  VertexType article, keyword, location;
  EdgeType has_kw, at_loc;

  World() {
    article = schema.add_vertex_type("article");
    keyword = schema.add_vertex_type("keyword");
    location = schema.add_vertex_type("location");
    has_kw = schema.add_edge_type("has_kw", article, keyword);
    at_loc = schema.add_edge_type("at_loc", article, location);
  }

  EdgeInsert kw(const std::string& a, const std::string& k, Timestamp t,
                const std::string& label = "") const {
    return {{a, article, ""}, {k, keyword, label.empty() ? k : label}, has_kw, t};
  }
  EdgeInsert loc(const std::string& a, const std::string& l, Timestamp t) const {
    return {{a, article, ""}, {l, location, l}, at_loc, t};
  }
};

inline QuerySpec load_spec(const std::string& name, Schema& schema) {
  return read_query_spec_file(data_path(name), schema);
}

/// Small dense stream: few features so matches are plentiful.
inline GeneratorConfig small_config(std::uint64_t seed, std::size_t edges,
                                    std::size_t keywords = 6,
                                    std::size_t locations = 3) {
  GeneratorConfig c;
  c.seed = seed;
  c.total_edges = edges;
  c.vertex_types = {{"keyword", keywords}, {"location", locations}};
  c.relations = {{"has_kw", "keyword"}, {"at_loc", "location"}};
  c.zipf_exponent = 1.0;
  return c;
}

inline std::set<std::string> engine_signatures(const QuerySpec& spec,
                                               const Schema& schema,
                                               std::span<const EdgeInsert> edges,
                                               std::size_t prune_interval = 0) {
  RunOptions o;
  o.prune_interval = prune_interval;
  auto r = run_query(spec, schema, edges, o);
  std::set<std::string> out;
  for (const auto& m : r.matches) out.insert(m.signature);
  return out;
}

inline std::set<std::string> baseline_signatures(const QuerySpec& spec,
                                                 const Schema& schema,
                                                 std::span<const EdgeInsert> edges) {
  RunOptions o;
  o.engine = EngineKind::kBaseline;
  auto r = run_query(spec, schema, edges, o);
  std::set<std::string> out;
  for (const auto& m : r.matches) out.insert(m.signature);
  return out;
}

inline std::set<std::string> oracle_signatures(const QuerySpec& spec,
                                               const Schema& schema,
                                               std::span<const EdgeInsert> edges) {
  DynamicGraph g(schema, spec.disorder_slack);
  for (const auto& e : edges) g.update_graph(e);
  auto ordering = ordering_constraints(*spec.tree);
  auto records = enumerate_all(GraphSnapshot::of(g), *spec.query, spec.tree->window(),
                               ordering);
  return signature_set(records);
}

}  // namespace sjstream::testing
