#pragma once

#include <span>
#include <vector>

#include "sjstream/engine.hpp"
#include "sjstream/graph.hpp"
#include "sjstream/query.hpp"

namespace sjstream {

/// Vertices and edges of an induced subgraph of a DynamicGraph.
struct SubgraphView {
  std::vector<VertexId> vertices;  // sorted
  std::vector<EdgeId> edges;       // sorted
};

/// Subgraph induced by the vertices within `k` hops of either endpoint of
/// edge `e`, walking and keeping only edges with timestamp >= min_ts.
/// Throws UnknownEdge.
SubgraphView khop_subgraph(const DynamicGraph& g, EdgeId e, std::size_t k,
                           Timestamp min_ts);

/// IncIsoMatch step for a freshly inserted edge: full subgraph isomorphism
/// search over the k-hop neighborhood (k = query diameter), keeping matches
/// that use `e`, span less than `window` and honor `ordering`.
std::vector<MatchRecord> inc_iso_match(const DynamicGraph& g,
                                       const QueryGraph& q, EdgeId e,
                                       Timestamp window,
                                       std::span<const OrderingConstraint> ordering);

struct BaselineStats {
  std::size_t edges_processed = 0;
  std::size_t fast_rejects = 0;
  std::size_t emitted = 0;
};

/// Stream driver with the same shape as ContinuousQueryEngine.
class IncIsoMatchBaseline {
 public:
  IncIsoMatchBaseline(DynamicGraph& graph, const SJTree& tree, Timestamp window,
                      MatchSink sink = {});

  std::vector<MatchRecord> process_edge(const EdgeInsert& e);
  std::vector<MatchRecord> on_edge_inserted(EdgeId id);

  const BaselineStats& stats() const { return stats_; }

 private:
  DynamicGraph& graph_;
  const SJTree& tree_;
  Timestamp window_;
  MatchSink sink_;
  std::vector<OrderingConstraint> ordering_;
  BaselineStats stats_;
};

}  // namespace sjstream
