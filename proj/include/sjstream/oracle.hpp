#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "sjstream/engine.hpp"
#include "sjstream/graph.hpp"
#include "sjstream/query.hpp"

namespace sjstream {

/// Plain copy of a graph's vertices and live edges.
struct GraphSnapshot {
  std::vector<VertexRecord> vertices;  // indexed by VertexId
  std::vector<TemporalEdge> edges;     // arrival order

  static GraphSnapshot of(const DynamicGraph& g);
};

struct OracleOptions {
  std::size_t max_edges = 10'000;
};

/// Ground truth: every injective, type/label and adjacency preserving
/// embedding of `q` in `snap` whose edge timestamps span less than `window`
/// and satisfy every ordering constraint. Works off its own adjacency built
/// from the raw edge list; does not touch DynamicGraph or the engine.
/// Throws SizeGuardExceeded above options.max_edges.
std::vector<MatchRecord> enumerate_all(const GraphSnapshot& snap,
                                       const QueryGraph& q, Timestamp window,
                                       std::span<const OrderingConstraint> ordering,
                                       const OracleOptions& options = {});

std::set<std::string> signature_set(std::span<const MatchRecord> records);

}  // namespace sjstream
