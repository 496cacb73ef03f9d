#pragma once

#include <optional>
#include <vector>

#include "sjstream/graph.hpp"
#include "sjstream/match.hpp"
#include "sjstream/query.hpp"

namespace sjstream {

/// Vertex of `primitive` incident to all of its edges, preferring an event
/// vertex when several qualify. nullopt when the primitive is not a star.
std::optional<QVertexId> star_center(const QueryGraph& q,
                                     const QuerySubgraph& primitive);

/// True when data vertex `v` satisfies the type and label of query vertex `qv`.
bool vertex_compatible(const DynamicGraph& g, const QueryVertex& qv, VertexId v);

/// All embeddings of the star `primitive` that map some query edge onto
/// `anchor` and use only edges with timestamp >= min_ts. Throws NotAStar.
std::vector<PartialMatch> star_search(const DynamicGraph& g,
                                      const QueryGraph& q,
                                      const QuerySubgraph& primitive,
                                      const TemporalEdge& anchor,
                                      Timestamp min_ts);

/// Anchored subgraph isomorphism for a leaf primitive. Stars go through
/// star_search; anything else through an anchored backtracking matcher.
/// Results are deduplicated and carry node == kNoNode.
std::vector<PartialMatch> local_search(const DynamicGraph& g,
                                       const QueryGraph& q,
                                       const QuerySubgraph& primitive,
                                       const TemporalEdge& anchor,
                                       Timestamp min_ts);

/// The general anchored matcher, usable on any connected primitive
/// including stars.
std::vector<PartialMatch> anchored_search(const DynamicGraph& g,
                                          const QueryGraph& q,
                                          const QuerySubgraph& primitive,
                                          const TemporalEdge& anchor,
                                          Timestamp min_ts);

}  // namespace sjstream
