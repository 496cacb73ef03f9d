#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "sjstream/graph.hpp"
#include "sjstream/match.hpp"
#include "sjstream/query.hpp"

namespace sjstream {

/// A complete match of the query graph.
struct MatchRecord {
  Embedding map;
  Timestamp t_low = 0;
  Timestamp t_high = 0;
  Timestamp emitted_at = 0;  // graph time when the match completed
  EdgeId trigger = kNoEdge;  // edge whose arrival completed it
  std::string signature;
};

/// Text signature of a complete match: data edge ids in query-edge order.
std::string record_signature(const Embedding& m);

/// One tab-separated line: signature, qvertex=key pairs, t_low, t_high.
std::string format_match_line(const MatchRecord& r, const QueryGraph& q,
                              const DynamicGraph& g);

using MatchSink = std::function<void(const MatchRecord&)>;

struct EngineConfig {
  Timestamp window = 0;
  // Bulk prune cadence in edges; 0 disables periodic pruning (lookups still
  // skip expired matches).
  std::size_t prune_interval_edges = 0;
  Timestamp disorder_slack = 0;
  // Also drop expired edges from the graph at prune time. Only valid when
  // the engine is the graph's sole user.
  bool expire_graph = false;
  MatchSink sink;
};

struct EngineStats {
  std::size_t edges_processed = 0;
  std::size_t leaf_matches = 0;
  std::size_t leaf_rejected_window = 0;
  std::size_t duplicate_matches = 0;
  std::size_t join_attempts = 0;
  std::size_t joins_accepted = 0;
  std::size_t rejected_injective = 0;
  std::size_t rejected_order = 0;
  std::size_t rejected_window = 0;
  std::size_t emitted = 0;
  std::size_t duplicate_emissions = 0;
  std::size_t prunes = 0;
  std::size_t pruned_matches = 0;
};

enum class JoinOutcome { kAccepted, kInjectivity, kOrder, kWindow, kConflict };

/// Merges a match of parent's left child with one of its right child.
/// Rejects non-injective merges, ordered-join violations (left.t_high must be
/// strictly below right.t_low) and merged spans of window or more.
std::optional<PartialMatch> join_matches(const SJTree& tree, NodeId parent,
                                         const PartialMatch& left,
                                         const PartialMatch& right,
                                         Timestamp window,
                                         JoinOutcome* outcome = nullptr);

/// Continuous query over one SJ-Tree.
///
/// For each arriving edge: update the graph, search every leaf primitive
/// around the edge, and push each leaf match up the tree, joining against
/// the sibling's stored matches under the parent's cut key. Complete matches
/// reach the sink exactly once.
class ContinuousQueryEngine {
 public:
  ContinuousQueryEngine(DynamicGraph& graph, const SJTree& tree,
                        EngineConfig config);

  /// Processes a batch and returns the matches it completed.
  std::vector<MatchRecord> process_cont_query(std::span<const EdgeInsert> edges);
  std::vector<MatchRecord> process_edge(const EdgeInsert& e);

  /// Search/join step for an edge already inserted into the graph. Used when
  /// several engines share one graph.
  std::vector<MatchRecord> on_edge_inserted(EdgeId id);

  /// Feeds `m` to `node` and propagates joins upward.
  std::vector<MatchRecord> update_sjtree(NodeId node, PartialMatch m);

  std::size_t prune_window(Timestamp current_time);

  const MatchStore& store() const { return store_; }
  const EngineStats& stats() const { return stats_; }
  const SJTree& tree() const { return tree_; }
  const DynamicGraph& graph() const { return graph_; }
  const EngineConfig& config() const { return config_; }

 private:
  void update(NodeId node, PartialMatch m, std::vector<MatchRecord>& out);
  void emit(PartialMatch m, std::vector<MatchRecord>& out);
  Timestamp expiry_cutoff(Timestamp current_time) const;

  DynamicGraph& graph_;
  const SJTree& tree_;
  EngineConfig config_;
  MatchStore store_;
  EngineStats stats_;
  std::unordered_set<std::string> emitted_;
  std::vector<std::pair<Timestamp, std::string>> emitted_log_;
  EdgeId current_trigger_ = kNoEdge;
};

}  // namespace sjstream
