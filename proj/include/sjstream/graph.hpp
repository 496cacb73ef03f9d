#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sjstream/types.hpp"

namespace sjstream {

/// Registry of vertex types and the typed relations allowed between them.
///
/// An edge type is bound to one unordered pair of distinct vertex types (a
/// relation between two partitions of a k-partite graph). Ids are dense and
/// assigned in registration order. Once frozen, registration throws.
class Schema {
 public:
  VertexType add_vertex_type(std::string_view name);
  EdgeType add_edge_type(std::string_view name, VertexType a, VertexType b);

  std::optional<VertexType> find_vertex_type(std::string_view name) const;
  std::optional<EdgeType> find_edge_type(std::string_view name) const;
  VertexType vertex_type(std::string_view name) const;
  EdgeType edge_type(std::string_view name) const;

  const std::string& name(VertexType t) const;
  const std::string& name(EdgeType t) const;

  /// True when `t` relates vertex types `a` and `b` (either orientation).
  bool connects(EdgeType t, VertexType a, VertexType b) const;
  std::pair<VertexType, VertexType> endpoints(EdgeType t) const;

  std::size_t vertex_type_count() const { return vertex_names_.size(); }
  std::size_t edge_type_count() const { return edge_types_.size(); }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

 private:
  struct EdgeTypeInfo {
    std::string name;
    VertexType a;
    VertexType b;
  };

  void check_mutable() const;

  std::vector<std::string> vertex_names_;
  std::unordered_map<std::string, VertexType> vertex_index_;
  std::vector<EdgeTypeInfo> edge_types_;
  std::unordered_map<std::string, EdgeType> edge_index_;
  bool frozen_ = false;
};

struct VertexRecord {
  std::string key;  // external identifier from the stream
  VertexType type;
  std::string label;  // empty = unlabeled
};

struct TemporalEdge {
  EdgeId id = kNoEdge;
  VertexId src = kNoVertex;
  VertexId dst = kNoVertex;
  EdgeType type{};
  Timestamp timestamp = 0;

  VertexId other(VertexId v) const { return v == src ? dst : src; }
};

/// One entry of a vertex's incidence list.
struct Incidence {
  VertexId neighbor;
  EdgeId edge;
  Timestamp timestamp;
};

struct EndpointSpec {
  std::string key;
  VertexType type{};
  std::string label;
};

/// An edge as it arrives on the stream, before ids are assigned.
struct EdgeInsert {
  EndpointSpec src;
  EndpointSpec dst;
  EdgeType type{};
  Timestamp timestamp = 0;
};

/// In-memory dynamic multi-relational graph.
///
/// Edges are stored once and referenced from the incidence lists of both
/// endpoints. Each incidence list is partitioned by edge type and kept sorted
/// by timestamp, so window-restricted neighborhoods are a binary search away.
/// Single writer; concurrent readers are only safe between mutations.
class DynamicGraph {
 public:
  explicit DynamicGraph(const Schema& schema, Timestamp disorder_slack = 0);

  /// Inserts `e`, creating endpoints on first sight. Returns the new edge id.
  EdgeId update_graph(const EdgeInsert& e);

  /// Finds or creates a vertex. An existing vertex must agree on type, and
  /// on label when both labels are non-empty.
  VertexId upsert_vertex(const EndpointSpec& spec);

  /// Incident edges of type `t` with timestamp >= min_ts, in timestamp order.
  std::span<const Incidence> neighbors(VertexId v, EdgeType t,
                                       Timestamp min_ts) const;

  /// Window-restricted incidence of `v` for every edge type it has.
  std::vector<std::span<const Incidence>> all_neighbors(VertexId v,
                                                        Timestamp min_ts) const;

  /// Removes every edge with timestamp < cutoff. Vertices are retained.
  std::size_t expire_edges(Timestamp cutoff);

  const VertexRecord& vertex(VertexId v) const;
  std::optional<VertexId> find_vertex(std::string_view key) const;
  bool has_vertex(VertexId v) const { return v < vertices_.size(); }

  const TemporalEdge& edge(EdgeId id) const;
  bool has_edge(EdgeId id) const;

  /// Live edges in arrival order.
  std::vector<TemporalEdge> edges() const;

  const Schema& schema() const { return *schema_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return live_edges_; }
  EdgeId next_edge_id() const { return edges_.size(); }
  Timestamp current_time() const { return current_time_; }
  bool has_time() const { return has_time_; }
  Timestamp disorder_slack() const { return disorder_slack_; }

 private:
  struct TypedIncidence {
    EdgeType type;
    std::vector<Incidence> items;
  };

  std::vector<Incidence>& incidence_list(VertexId v, EdgeType t);
  const std::vector<Incidence>* find_incidence_list(VertexId v,
                                                    EdgeType t) const;
  static void insert_sorted(std::vector<Incidence>& list, Incidence inc);

  const Schema* schema_;
  Timestamp disorder_slack_;
  std::vector<VertexRecord> vertices_;
  std::unordered_map<std::string, VertexId> vertex_index_;
  std::vector<std::vector<TypedIncidence>> adjacency_;
  std::vector<TemporalEdge> edges_;
  std::vector<bool> alive_;
  std::size_t live_edges_ = 0;
  EdgeId first_alive_ = 0;
  Timestamp current_time_ = 0;
  bool has_time_ = false;
};

}  // namespace sjstream
