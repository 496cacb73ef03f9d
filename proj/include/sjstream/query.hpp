#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sjstream/types.hpp"

namespace sjstream {

using QVertexId = std::uint16_t;
using QEdgeId = std::uint16_t;
using NodeId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct QueryVertex {
  std::string name;
  VertexType type{};
  std::optional<std::string> label;
  // Temporal event vertex (article, user, ...) as opposed to a feature.
  bool is_event = false;
  // Label to be filled in per run (degree sweeps instantiate it).
  bool label_slot = false;
};

struct QueryEdge {
  std::string name;
  QVertexId a;
  QVertexId b;
  EdgeType type{};

  bool touches(QVertexId v) const { return a == v || b == v; }
  QVertexId other(QVertexId v) const { return v == a ? b : a; }
};

/// Connected k-partite pattern graph. Edges are matched without regard to
/// orientation.
class QueryGraph {
 public:
  QVertexId add_vertex(QueryVertex v);
  QEdgeId add_edge(std::string name, QVertexId a, QVertexId b, EdgeType type);

  const std::vector<QueryVertex>& vertices() const { return vertices_; }
  const std::vector<QueryEdge>& edges() const { return edges_; }
  const QueryVertex& vertex(QVertexId v) const { return vertices_.at(v); }
  const QueryEdge& edge(QEdgeId e) const { return edges_.at(e); }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::optional<QVertexId> find_vertex(std::string_view name) const;
  std::optional<QEdgeId> find_edge(std::string_view name) const;

  /// Fills a label slot (or overrides a label).
  void set_label(QVertexId v, std::string label);
  std::optional<QVertexId> label_slot() const;

  bool connected() const;
  /// Longest shortest path, in hops, over the undirected query graph.
  std::size_t diameter() const;
  std::vector<QEdgeId> incident_edges(QVertexId v) const;

 private:
  std::vector<QueryVertex> vertices_;
  std::vector<QueryEdge> edges_;
};

/// A subgraph of a QueryGraph given as sorted id sets.
struct QuerySubgraph {
  std::vector<QVertexId> vertices;
  std::vector<QEdgeId> edges;

  /// Subgraph spanned by `edges`: vertex set is their endpoints.
  static QuerySubgraph from_edges(const QueryGraph& q, std::vector<QEdgeId> edges);
  static QuerySubgraph whole(const QueryGraph& q);

  bool empty() const { return vertices.empty() && edges.empty(); }
  bool contains(QVertexId v) const;
  bool contains_edge(QEdgeId e) const;
  bool is_subset_of(const QuerySubgraph& other) const;

  friend QuerySubgraph operator|(const QuerySubgraph& x, const QuerySubgraph& y);
  friend QuerySubgraph operator&(const QuerySubgraph& x, const QuerySubgraph& y);
  friend bool operator==(const QuerySubgraph&, const QuerySubgraph&) = default;
};

/// Assignment of query vertices and edges to data vertices and edges, stored
/// densely over the whole query; kNoVertex / kNoEdge mark unmapped slots.
struct Embedding {
  std::vector<VertexId> vertices;
  std::vector<EdgeId> edges;

  static Embedding empty_for(const QueryGraph& q);

  bool maps(QVertexId v) const { return vertices[v] != kNoVertex; }
  bool maps_edge(QEdgeId e) const { return edges[e] != kNoEdge; }

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Restriction of `m` to the vertices and edges of `sub`. Throws
/// DomainMismatch when `sub` reaches outside what `m` maps.
Embedding project(const Embedding& m, const QuerySubgraph& sub);

struct SJTreeNode {
  NodeId id = kNoNode;
  std::string name;
  NodeId parent = kNoNode;
  NodeId sibling = kNoNode;
  NodeId left = kNoNode;
  NodeId right = kNoNode;
  QuerySubgraph query_subgraph;
  QuerySubgraph cut_subgraph;  // internal nodes only
  bool ordered_join = false;

  bool is_leaf() const { return left == kNoNode && right == kNoNode; }
};

/// A temporal ordering requirement: every edge in `before` must carry a
/// strictly smaller timestamp than every edge in `after`.
struct OrderingConstraint {
  std::vector<QEdgeId> before;
  std::vector<QEdgeId> after;
};

struct LeafPrimitive {
  NodeId node;
  const QuerySubgraph* subgraph;
};

/// Binary decomposition of a query graph. Leaves are search primitives and
/// each internal node joins its two children.
///
/// Built bottom-up with add_leaf / add_join and closed with finalize(), which
/// wires parent/sibling links, finds the root and fixes the leaf order. The
/// builders derive query and cut subgraphs; mutable_node() exists so tests
/// can corrupt a tree and watch validate_sjtree catch it.
class SJTree {
 public:
  SJTree(std::shared_ptr<const QueryGraph> query, Timestamp window);

  NodeId add_leaf(std::string name, std::vector<QEdgeId> edges);
  /// `ordered` defaults to true when both children contain an event vertex.
  NodeId add_join(std::string name, NodeId left, NodeId right,
                  std::optional<bool> ordered = std::nullopt);
  void finalize();

  /// Same decomposition over another query graph with identical vertex and
  /// edge numbering (e.g. the query with a label slot filled in).
  SJTree rebind(std::shared_ptr<const QueryGraph> query) const;

  const QueryGraph& query() const { return *query_; }
  std::shared_ptr<const QueryGraph> query_ptr() const { return query_; }
  Timestamp window() const { return window_; }
  void set_window(Timestamp w) { window_ = w; }

  const std::vector<SJTreeNode>& nodes() const { return nodes_; }
  const SJTreeNode& node(NodeId id) const { return nodes_.at(id); }
  SJTreeNode& mutable_node(NodeId id) { return nodes_.at(id); }
  std::optional<NodeId> find_node(std::string_view name) const;
  NodeId root() const { return root_; }
  const std::vector<NodeId>& leaves() const { return leaves_; }
  std::size_t height() const;

 private:
  std::shared_ptr<const QueryGraph> query_;
  Timestamp window_;
  std::vector<SJTreeNode> nodes_;
  NodeId root_ = kNoNode;
  std::vector<NodeId> leaves_;
};

struct ValidationReport {
  struct Violation {
    NodeId node;
    std::string check;
    std::string detail;
  };
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view check) const;
  std::string to_string() const;
};

/// Checks the structural properties of a decomposition: the root covers the
/// whole query, every internal node is the union of its children, every cut
/// is the intersection of the children, and the leaves partition the query
/// edges into connected, non-empty primitives.
ValidationReport validate_sjtree(const SJTree& tree);

std::vector<LeafPrimitive> leaf_primitives(const SJTree& tree);

/// Ordering constraints imposed by the ordered internal nodes of `tree`.
std::vector<OrderingConstraint> ordering_constraints(const SJTree& tree);

}  // namespace sjstream
