#include "sjstream/query.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <iterator>

#include <fmt/format.h>

namespace sjstream {

namespace {

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

template <typename T>
std::vector<T> set_union(const std::vector<T>& x, const std::vector<T>& y) {
  std::vector<T> out;
  std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  return out;
}

template <typename T>
std::vector<T> set_intersection(const std::vector<T>& x,
                                const std::vector<T>& y) {
  std::vector<T> out;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(),
                        std::back_inserter(out));
  return out;
}

std::vector<std::size_t> bfs_distances(const QueryGraph& q, QVertexId from) {
  constexpr auto kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(q.vertex_count(), kInf);
  std::deque<QVertexId> frontier{from};
  dist[from] = 0;
  while (!frontier.empty()) {
    QVertexId v = frontier.front();
    frontier.pop_front();
    for (const auto& e : q.edges()) {
      if (!e.touches(v)) continue;
      QVertexId w = e.other(v);
      if (dist[w] == kInf) {
        dist[w] = dist[v] + 1;
        frontier.push_back(w);
      }
    }
  }
  return dist;
}

bool subgraph_connected(const QueryGraph& q, const QuerySubgraph& sub) {
  if (sub.vertices.size() <= 1) return true;
  std::vector<QVertexId> seen{sub.vertices.front()};
  std::vector<QVertexId> stack{sub.vertices.front()};
  while (!stack.empty()) {
    QVertexId v = stack.back();
    stack.pop_back();
    for (QEdgeId e : sub.edges) {
      const auto& qe = q.edge(e);
      if (!qe.touches(v)) continue;
      QVertexId w = qe.other(v);
      if (std::find(seen.begin(), seen.end(), w) == seen.end()) {
        seen.push_back(w);
        stack.push_back(w);
      }
    }
  }
  return seen.size() == sub.vertices.size();
}

// Sorted, duplicate-free and inside the query graph.
bool well_formed(const QueryGraph& q, const QuerySubgraph& sub) {
  auto ok = [](const auto& ids, std::size_t limit) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] >= limit || (i > 0 && ids[i - 1] >= ids[i])) return false;
    }
    return true;
  };
  return ok(sub.vertices, q.vertex_count()) && ok(sub.edges, q.edge_count());
}

std::string describe(const QueryGraph& q, const QuerySubgraph& sub) {
  std::vector<std::string> vs;
  for (auto v : sub.vertices) vs.push_back(q.vertex(v).name);
  std::vector<std::string> es;
  for (auto e : sub.edges) es.push_back(q.edge(e).name);
  return fmt::format("V={{{}}} E={{{}}}", fmt::join(vs, ","), fmt::join(es, ","));
}

}  // namespace

QVertexId QueryGraph::add_vertex(QueryVertex v) {
  if (find_vertex(v.name)) {
    throw SpecError(fmt::format("duplicate query vertex '{}'", v.name));
  }
  if (v.label && v.label->empty()) {
    throw SpecError(fmt::format("query vertex '{}' has an empty label", v.name));
  }
  if (vertices_.size() >= std::numeric_limits<QVertexId>::max()) {
    throw SpecError("too many query vertices");
  }
  vertices_.push_back(std::move(v));
  return static_cast<QVertexId>(vertices_.size() - 1);
}

QEdgeId QueryGraph::add_edge(std::string name, QVertexId a, QVertexId b,
                             EdgeType type) {
  if (a >= vertices_.size() || b >= vertices_.size()) {
    throw SpecError(fmt::format("query edge '{}' references an unknown vertex", name));
  }
  if (vertices_[a].type == vertices_[b].type) {
    throw SpecError(fmt::format(
        "query edge '{}' joins '{}' and '{}' which share a vertex type", name,
        vertices_[a].name, vertices_[b].name));
  }
  if (find_edge(name)) {
    throw SpecError(fmt::format("duplicate query edge name '{}'", name));
  }
  for (const auto& e : edges_) {
    if (e.type == type && ((e.a == a && e.b == b) || (e.a == b && e.b == a))) {
      throw SpecError(fmt::format("query edge '{}' duplicates '{}'", name, e.name));
    }
  }
  edges_.push_back({std::move(name), a, b, type});
  return static_cast<QEdgeId>(edges_.size() - 1);
}

std::optional<QVertexId> QueryGraph::find_vertex(std::string_view name) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].name == name) return static_cast<QVertexId>(i);
  }
  return std::nullopt;
}

std::optional<QEdgeId> QueryGraph::find_edge(std::string_view name) const {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].name == name) return static_cast<QEdgeId>(i);
  }
  return std::nullopt;
}

void QueryGraph::set_label(QVertexId v, std::string label) {
  if (label.empty()) {
    throw SpecError("label must not be empty");
  }
  auto& qv = vertices_.at(v);
  qv.label = std::move(label);
  qv.label_slot = false;
}

std::optional<QVertexId> QueryGraph::label_slot() const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].label_slot) return static_cast<QVertexId>(i);
  }
  return std::nullopt;
}

bool QueryGraph::connected() const {
  if (vertices_.empty()) return true;
  auto dist = bfs_distances(*this, 0);
  return std::none_of(dist.begin(), dist.end(), [](std::size_t d) {
    return d == std::numeric_limits<std::size_t>::max();
  });
}

std::size_t QueryGraph::diameter() const {
  std::size_t best = 0;
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    for (auto d : bfs_distances(*this, static_cast<QVertexId>(v))) {
      if (d != std::numeric_limits<std::size_t>::max()) best = std::max(best, d);
    }
  }
  return best;
}

std::vector<QEdgeId> QueryGraph::incident_edges(QVertexId v) const {
  std::vector<QEdgeId> out;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].touches(v)) out.push_back(static_cast<QEdgeId>(i));
  }
  return out;
}

QuerySubgraph QuerySubgraph::from_edges(const QueryGraph& q,
                                        std::vector<QEdgeId> edges) {
  QuerySubgraph sub;
  sort_unique(edges);
  for (auto e : edges) {
    const auto& qe = q.edge(e);
    sub.vertices.push_back(qe.a);
    sub.vertices.push_back(qe.b);
  }
  sort_unique(sub.vertices);
  sub.edges = std::move(edges);
  return sub;
}

QuerySubgraph QuerySubgraph::whole(const QueryGraph& q) {
  QuerySubgraph sub;
  for (std::size_t i = 0; i < q.vertex_count(); ++i) {
    sub.vertices.push_back(static_cast<QVertexId>(i));
  }
  for (std::size_t i = 0; i < q.edge_count(); ++i) {
    sub.edges.push_back(static_cast<QEdgeId>(i));
  }
  return sub;
}

bool QuerySubgraph::contains(QVertexId v) const {
  return std::binary_search(vertices.begin(), vertices.end(), v);
}

bool QuerySubgraph::contains_edge(QEdgeId e) const {
  return std::binary_search(edges.begin(), edges.end(), e);
}

bool QuerySubgraph::is_subset_of(const QuerySubgraph& other) const {
  return std::includes(other.vertices.begin(), other.vertices.end(),
                       vertices.begin(), vertices.end()) &&
         std::includes(other.edges.begin(), other.edges.end(), edges.begin(),
                       edges.end());
}

QuerySubgraph operator|(const QuerySubgraph& x, const QuerySubgraph& y) {
  return {set_union(x.vertices, y.vertices), set_union(x.edges, y.edges)};
}

QuerySubgraph operator&(const QuerySubgraph& x, const QuerySubgraph& y) {
  return {set_intersection(x.vertices, y.vertices),
          set_intersection(x.edges, y.edges)};
}

Embedding Embedding::empty_for(const QueryGraph& q) {
  return {std::vector<VertexId>(q.vertex_count(), kNoVertex),
          std::vector<EdgeId>(q.edge_count(), kNoEdge)};
}

Embedding project(const Embedding& m, const QuerySubgraph& sub) {
  Embedding out{std::vector<VertexId>(m.vertices.size(), kNoVertex),
                std::vector<EdgeId>(m.edges.size(), kNoEdge)};
  for (auto v : sub.vertices) {
    if (v >= m.vertices.size() || !m.maps(v)) {
      throw DomainMismatch(fmt::format("query vertex #{} is not mapped", v));
    }
    out.vertices[v] = m.vertices[v];
  }
  for (auto e : sub.edges) {
    if (e >= m.edges.size() || !m.maps_edge(e)) {
      throw DomainMismatch(fmt::format("query edge #{} is not mapped", e));
    }
    out.edges[e] = m.edges[e];
  }
  return out;
}

SJTree::SJTree(std::shared_ptr<const QueryGraph> query, Timestamp window)
    : query_(std::move(query)), window_(window) {
  if (!query_) throw SpecError("SJ-Tree needs a query graph");
}

NodeId SJTree::add_leaf(std::string name, std::vector<QEdgeId> edges) {
  for (auto e : edges) {
    if (e >= query_->edge_count()) {
      throw SpecError(fmt::format("leaf '{}' references unknown edge #{}", name, e));
    }
  }
  SJTreeNode n;
  n.id = static_cast<NodeId>(nodes_.size());
  n.name = std::move(name);
  n.query_subgraph = QuerySubgraph::from_edges(*query_, std::move(edges));
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

NodeId SJTree::add_join(std::string name, NodeId left, NodeId right,
                        std::optional<bool> ordered) {
  if (left >= nodes_.size() || right >= nodes_.size() || left == right) {
    throw SpecError(fmt::format("join '{}' needs two distinct existing children", name));
  }
  for (NodeId c : {left, right}) {
    if (nodes_[c].parent != kNoNode) {
      throw SpecError(fmt::format("node '{}' already has a parent", nodes_[c].name));
    }
  }
  SJTreeNode n;
  n.id = static_cast<NodeId>(nodes_.size());
  n.name = std::move(name);
  n.left = left;
  n.right = right;
  const auto& l = nodes_[left].query_subgraph;
  const auto& r = nodes_[right].query_subgraph;
  n.query_subgraph = l | r;
  n.cut_subgraph = l & r;
  auto has_event = [this](const QuerySubgraph& s) {
    return std::any_of(s.vertices.begin(), s.vertices.end(),
                       [this](QVertexId v) { return query_->vertex(v).is_event; });
  };
  n.ordered_join = ordered.value_or(has_event(l) && has_event(r));
  nodes_[left].parent = n.id;
  nodes_[right].parent = n.id;
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

void SJTree::finalize() {
  root_ = kNoNode;
  leaves_.clear();
  for (const auto& n : nodes_) {
    if (n.parent == kNoNode) {
      if (root_ != kNoNode) {
        throw SpecError(fmt::format("SJ-Tree has more than one root ('{}' and '{}')",
                                    nodes_[root_].name, n.name));
      }
      root_ = n.id;
    }
  }
  if (root_ == kNoNode) throw SpecError("SJ-Tree has no root");
  for (auto& n : nodes_) {
    n.sibling = kNoNode;
    if (n.parent == kNoNode) continue;
    const auto& p = nodes_[n.parent];
    n.sibling = p.left == n.id ? p.right : p.left;
  }
  std::function<void(NodeId)> walk = [&](NodeId id) {
    const auto& n = nodes_[id];
    if (n.is_leaf()) {
      leaves_.push_back(id);
      return;
    }
    if (n.left != kNoNode) walk(n.left);
    if (n.right != kNoNode) walk(n.right);
  };
  walk(root_);
}

SJTree SJTree::rebind(std::shared_ptr<const QueryGraph> query) const {
  if (!query || query->vertex_count() != query_->vertex_count() ||
      query->edge_count() != query_->edge_count()) {
    throw SpecError("rebind needs a query graph of the same shape");
  }
  SJTree out(*this);
  out.query_ = std::move(query);
  return out;
}

std::optional<NodeId> SJTree::find_node(std::string_view name) const {
  for (const auto& n : nodes_) {
    if (n.name == name) return n.id;
  }
  return std::nullopt;
}

std::size_t SJTree::height() const {
  std::function<std::size_t(NodeId)> h = [&](NodeId id) -> std::size_t {
    const auto& n = nodes_[id];
    if (n.is_leaf()) return 0;
    return 1 + std::max(h(n.left), h(n.right));
  };
  return root_ == kNoNode ? 0 : h(root_);
}

bool ValidationReport::has(std::string_view check) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.check == check; });
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    out += fmt::format("[{}] node #{}: {}\n", v.check, v.node, v.detail);
  }
  return out;
}

ValidationReport validate_sjtree(const SJTree& tree) {
  ValidationReport report;
  const auto& q = tree.query();
  const auto& nodes = tree.nodes();
  auto fail = [&](NodeId n, std::string check, std::string detail) {
    report.violations.push_back({n, std::move(check), std::move(detail)});
  };

  if (tree.window() <= 0) {
    fail(tree.root(), "window", "time window must be positive");
  }
  if (tree.root() == kNoNode || tree.root() >= nodes.size()) {
    fail(kNoNode, "structure", "tree has no root");
    return report;
  }

  std::size_t reachable = 0;
  std::vector<bool> sane(nodes.size(), true);
  for (const auto& n : nodes) {
    if (!well_formed(q, n.query_subgraph) || !well_formed(q, n.cut_subgraph)) {
      fail(n.id, "structure", "subgraph ids unsorted or outside the query");
      sane[n.id] = false;
    }
  }
  for (const auto& n : nodes) {
    if (!sane[n.id]) continue;
    bool has_left = n.left != kNoNode;
    bool has_right = n.right != kNoNode;
    if (has_left != has_right) {
      fail(n.id, "structure", "internal node must have exactly two children");
      continue;
    }
    if (n.is_leaf()) {
      if (!n.cut_subgraph.empty()) {
        fail(n.id, "structure", "leaf carries a cut subgraph");
      }
      if (n.query_subgraph.edges.empty()) {
        fail(n.id, "leaf", "leaf primitive has no edges");
      } else if (!subgraph_connected(q, n.query_subgraph)) {
        fail(n.id, "leaf", "leaf primitive is not connected");
      }
      if (n.query_subgraph !=
          QuerySubgraph::from_edges(q, n.query_subgraph.edges)) {
        fail(n.id, "leaf", "leaf vertex set differs from its edge endpoints");
      }
      continue;
    }
    if (n.left >= nodes.size() || n.right >= nodes.size()) {
      fail(n.id, "structure", "child id out of range");
      continue;
    }
    if (!sane[n.left] || !sane[n.right]) continue;
    const auto& l = nodes[n.left].query_subgraph;
    const auto& r = nodes[n.right].query_subgraph;
    if (n.query_subgraph != (l | r)) {
      fail(n.id, "P2", fmt::format("query subgraph {} is not the union {}",
                                   describe(q, n.query_subgraph),
                                   describe(q, l | r)));
    }
    if (n.cut_subgraph != (l & r)) {
      fail(n.id, "P4", fmt::format("cut subgraph {} is not the intersection {}",
                                   describe(q, n.cut_subgraph),
                                   describe(q, l & r)));
    }
  }

  // Walk from the root to catch cycles and detached nodes.
  std::vector<bool> seen(nodes.size(), false);
  std::vector<NodeId> stack{tree.root()};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    if (id >= nodes.size() || seen[id]) {
      fail(id, "structure", "node reached twice or out of range");
      continue;
    }
    seen[id] = true;
    ++reachable;
    const auto& n = nodes[id];
    if (n.left != kNoNode) stack.push_back(n.left);
    if (n.right != kNoNode) stack.push_back(n.right);
  }
  if (reachable != nodes.size()) {
    fail(tree.root(), "structure",
         fmt::format("{} node(s) unreachable from the root", nodes.size() - reachable));
  }

  const auto whole = QuerySubgraph::whole(q);
  if (!sane[tree.root()]) {
    fail(tree.root(), "P1", "root subgraph is malformed");
  } else if (nodes[tree.root()].query_subgraph != whole) {
    fail(tree.root(), "P1",
         fmt::format("root subgraph {} differs from the query graph",
                     describe(q, nodes[tree.root()].query_subgraph)));
  }

  std::vector<int> cover(q.edge_count(), 0);
  std::vector<NodeId> owner(q.edge_count(), kNoNode);
  for (const auto& n : nodes) {
    if (!n.is_leaf()) continue;
    for (auto e : n.query_subgraph.edges) {
      if (e >= cover.size()) continue;
      if (++cover[e] > 1) {
        fail(n.id, "partition",
             fmt::format("edge '{}' already covered by leaf #{}", q.edge(e).name,
                         owner[e]));
      }
      owner[e] = n.id;
    }
  }
  for (std::size_t e = 0; e < cover.size(); ++e) {
    if (cover[e] == 0) {
      fail(tree.root(), "partition",
           fmt::format("edge '{}' is not covered by any leaf", q.edge(e).name));
    }
  }
  if (!q.connected()) {
    fail(tree.root(), "query", "query graph is not connected");
  }
  return report;
}

std::vector<LeafPrimitive> leaf_primitives(const SJTree& tree) {
  std::vector<LeafPrimitive> out;
  out.reserve(tree.leaves().size());
  for (NodeId id : tree.leaves()) {
    out.push_back({id, &tree.node(id).query_subgraph});
  }
  return out;
}

std::vector<OrderingConstraint> ordering_constraints(const SJTree& tree) {
  std::vector<OrderingConstraint> out;
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf() || !n.ordered_join) continue;
    out.push_back({tree.node(n.left).query_subgraph.edges,
                   tree.node(n.right).query_subgraph.edges});
  }
  return out;
}

}  // namespace sjstream
