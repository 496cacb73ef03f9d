#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sjstream/query.hpp"
#include "sjstream/types.hpp"

namespace sjstream {

/// A match of one SJ-Tree node's query subgraph, with the timestamp range
/// of the data edges it uses.
struct PartialMatch {
  NodeId node = kNoNode;
  Embedding map;
  Timestamp t_low = 0;
  Timestamp t_high = 0;

  Timestamp span() const { return t_high - t_low; }
};

/// Opaque byte string; equal keys iff equal projected vertex assignments.
using JoinKey = std::string;

/// Serializes the (qid, data vertex) pairs of `cut`'s vertices in qid order.
/// An empty cut yields the universal key shared by every match.
JoinKey make_join_key(const QuerySubgraph& cut, const PartialMatch& m);
JoinKey make_join_key(const QuerySubgraph& cut, const Embedding& m);
inline JoinKey universal_join_key() { return {}; }

/// Collision-free identity of a match at a node: the node id followed by the
/// mapped data edge ids in query-edge order. Automorphic assignments over
/// the same edges therefore stay distinct.
std::string match_signature(NodeId node, const Embedding& m);

/// Per-node multi-valued hash tables of partial matches.
///
/// Matches whose t_low falls below the horizon are invisible to lookups even
/// before prune() physically removes them.
class MatchStore {
 public:
  explicit MatchStore(std::size_t node_count);

  /// Throws DuplicateMatch if a match with the same signature is stored.
  void insert_match(NodeId node, const JoinKey& key, PartialMatch m);
  bool contains(NodeId node, const std::string& signature) const;

  std::vector<PartialMatch> lookup_matches(NodeId node, const JoinKey& key) const;

  template <typename Fn>
  void for_each_match(NodeId node, const JoinKey& key, Fn&& fn) const {
    const auto& table = nodes_[node].table;
    auto it = table.find(key);
    if (it == table.end()) return;
    for (const auto& m : it->second) {
      if (m.t_low < horizon_) continue;
      fn(m);
    }
  }

  void set_horizon(Timestamp min_t_low) { horizon_ = min_t_low; }
  Timestamp horizon() const { return horizon_; }

  /// Removes matches with t_low < cutoff. Returns the number removed.
  std::size_t prune(Timestamp cutoff);
  /// Window form: drops matches older than current_time - window.
  std::size_t prune_store(Timestamp current_time, Timestamp window) {
    return prune(current_time - window);
  }

  std::size_t count(NodeId node) const { return nodes_[node].count; }
  std::size_t total() const { return total_; }
  std::size_t peak_total() const { return peak_total_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::vector<PartialMatch> all_matches(NodeId node) const;

 private:
  struct NodeTable {
    std::unordered_map<JoinKey, std::vector<PartialMatch>> table;
    std::unordered_set<std::string> signatures;
    std::size_t count = 0;
  };

  std::vector<NodeTable> nodes_;
  Timestamp horizon_ = std::numeric_limits<Timestamp>::min();
  std::size_t total_ = 0;
  std::size_t peak_total_ = 0;
};

}  // namespace sjstream
