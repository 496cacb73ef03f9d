#include "sjstream/graph.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace sjstream {

void Schema::check_mutable() const {
  if (frozen_) {
    throw SchemaViolation("schema is frozen; no new types may be registered");
  }
}

VertexType Schema::add_vertex_type(std::string_view name) {
  if (auto found = find_vertex_type(name)) {
    return *found;
  }
  check_mutable();
  if (name.empty()) {
    throw SchemaViolation("vertex type name must not be empty");
  }
  auto id = static_cast<VertexType>(vertex_names_.size());
  vertex_names_.emplace_back(name);
  vertex_index_.emplace(std::string(name), id);
  return id;
}

EdgeType Schema::add_edge_type(std::string_view name, VertexType a,
                               VertexType b) {
  if (a == b) {
    throw SchemaViolation(fmt::format(
        "edge type '{}' relates vertex type '{}' to itself", name, this->name(a)));
  }
  if (auto found = find_edge_type(name)) {
    if (!connects(*found, a, b)) {
      const auto& info = edge_types_[to_index(*found)];
      throw SchemaViolation(fmt::format(
          "edge type '{}' already relates '{}' and '{}', not '{}' and '{}'",
          name, this->name(info.a), this->name(info.b), this->name(a),
          this->name(b)));
    }
    return *found;
  }
  check_mutable();
  if (name.empty()) {
    throw SchemaViolation("edge type name must not be empty");
  }
  auto id = static_cast<EdgeType>(edge_types_.size());
  edge_types_.push_back({std::string(name), a, b});
  edge_index_.emplace(std::string(name), id);
  return id;
}

std::optional<VertexType> Schema::find_vertex_type(std::string_view name) const {
  auto it = vertex_index_.find(std::string(name));
  if (it == vertex_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeType> Schema::find_edge_type(std::string_view name) const {
  auto it = edge_index_.find(std::string(name));
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

VertexType Schema::vertex_type(std::string_view name) const {
  if (auto t = find_vertex_type(name)) return *t;
  throw SchemaViolation(fmt::format("unknown vertex type '{}'", name));
}

EdgeType Schema::edge_type(std::string_view name) const {
  if (auto t = find_edge_type(name)) return *t;
  throw SchemaViolation(fmt::format("unknown edge type '{}'", name));
}

const std::string& Schema::name(VertexType t) const {
  return vertex_names_.at(to_index(t));
}

const std::string& Schema::name(EdgeType t) const {
  return edge_types_.at(to_index(t)).name;
}

bool Schema::connects(EdgeType t, VertexType a, VertexType b) const {
  if (to_index(t) >= edge_types_.size()) return false;
  const auto& info = edge_types_[to_index(t)];
  return (info.a == a && info.b == b) || (info.a == b && info.b == a);
}

std::pair<VertexType, VertexType> Schema::endpoints(EdgeType t) const {
  const auto& info = edge_types_.at(to_index(t));
  return {info.a, info.b};
}

DynamicGraph::DynamicGraph(const Schema& schema, Timestamp disorder_slack)
    : schema_(&schema), disorder_slack_(disorder_slack) {
  if (disorder_slack < 0) {
    throw ConfigError("disorder slack must be non-negative");
  }
}

VertexId DynamicGraph::upsert_vertex(const EndpointSpec& spec) {
  auto it = vertex_index_.find(spec.key);
  if (it != vertex_index_.end()) {
    auto& rec = vertices_[it->second];
    if (rec.type != spec.type) {
      throw SchemaViolation(fmt::format(
          "vertex '{}' has type '{}' but was referenced as '{}'", spec.key,
          schema_->name(rec.type), schema_->name(spec.type)));
    }
    if (!spec.label.empty()) {
      if (rec.label.empty()) {
        rec.label = spec.label;
      } else if (rec.label != spec.label) {
        throw SchemaViolation(fmt::format(
            "vertex '{}' is labeled '{}' but was referenced with label '{}'",
            spec.key, rec.label, spec.label));
      }
    }
    return it->second;
  }
  if (to_index(spec.type) >= schema_->vertex_type_count()) {
    throw SchemaViolation(fmt::format("vertex '{}' has an unregistered type",
                                      spec.key));
  }
  auto id = static_cast<VertexId>(vertices_.size());
  vertices_.push_back({spec.key, spec.type, spec.label});
  vertex_index_.emplace(spec.key, id);
  adjacency_.emplace_back();
  return id;
}

EdgeId DynamicGraph::update_graph(const EdgeInsert& e) {
  // Validate everything before touching state so a rejected edge leaves the
  // graph unchanged.
  if (e.src.type == e.dst.type) {
    throw SchemaViolation(fmt::format(
        "edge '{}'-'{}' joins two vertices of type '{}'", e.src.key, e.dst.key,
        schema_->name(e.src.type)));
  }
  if (e.src.key == e.dst.key) {
    throw SchemaViolation(fmt::format("self loop on vertex '{}'", e.src.key));
  }
  if (!schema_->connects(e.type, e.src.type, e.dst.type)) {
    throw SchemaViolation(fmt::format(
        "edge type #{} is not registered between '{}' and '{}'",
        to_index(e.type), schema_->name(e.src.type),
        schema_->name(e.dst.type)));
  }
  if (e.timestamp < 0) {
    throw TimestampRegression(
        fmt::format("negative timestamp {}", e.timestamp));
  }
  if (has_time_ && e.timestamp < current_time_ - disorder_slack_) {
    throw TimestampRegression(fmt::format(
        "timestamp {} is older than current time {} minus slack {}",
        e.timestamp, current_time_, disorder_slack_));
  }
  for (const EndpointSpec* ep : {&e.src, &e.dst}) {
    auto it = vertex_index_.find(ep->key);
    if (it == vertex_index_.end()) continue;
    const auto& rec = vertices_[it->second];
    if (rec.type != ep->type ||
        (!ep->label.empty() && !rec.label.empty() && rec.label != ep->label)) {
      // upsert_vertex produces the detailed message.
      upsert_vertex(*ep);
    }
  }

  VertexId src = upsert_vertex(e.src);
  VertexId dst = upsert_vertex(e.dst);
  EdgeId id = edges_.size();
  edges_.push_back({id, src, dst, e.type, e.timestamp});
  alive_.push_back(true);
  ++live_edges_;
  insert_sorted(incidence_list(src, e.type), {dst, id, e.timestamp});
  insert_sorted(incidence_list(dst, e.type), {src, id, e.timestamp});
  if (!has_time_ || e.timestamp > current_time_) {
    current_time_ = e.timestamp;
  }
  has_time_ = true;
  return id;
}

void DynamicGraph::insert_sorted(std::vector<Incidence>& list, Incidence inc) {
  if (list.empty() || list.back().timestamp <= inc.timestamp) {
    list.push_back(inc);
    return;
  }
  auto pos = std::upper_bound(
      list.begin(), list.end(), inc.timestamp,
      [](Timestamp t, const Incidence& x) { return t < x.timestamp; });
  list.insert(pos, inc);
}

std::vector<Incidence>& DynamicGraph::incidence_list(VertexId v, EdgeType t) {
  auto& lists = adjacency_[v];
  for (auto& l : lists) {
    if (l.type == t) return l.items;
  }
  lists.push_back({t, {}});
  return lists.back().items;
}

const std::vector<Incidence>* DynamicGraph::find_incidence_list(
    VertexId v, EdgeType t) const {
  for (const auto& l : adjacency_[v]) {
    if (l.type == t) return &l.items;
  }
  return nullptr;
}

std::span<const Incidence> DynamicGraph::neighbors(VertexId v, EdgeType t,
                                                   Timestamp min_ts) const {
  if (!has_vertex(v)) {
    throw UnknownVertex(fmt::format("unknown vertex id {}", v));
  }
  const auto* list = find_incidence_list(v, t);
  if (list == nullptr) return {};
  auto first = std::lower_bound(
      list->begin(), list->end(), min_ts,
      [](const Incidence& x, Timestamp ts) { return x.timestamp < ts; });
  return {first, list->end()};
}

std::vector<std::span<const Incidence>> DynamicGraph::all_neighbors(
    VertexId v, Timestamp min_ts) const {
  if (!has_vertex(v)) {
    throw UnknownVertex(fmt::format("unknown vertex id {}", v));
  }
  std::vector<std::span<const Incidence>> out;
  for (const auto& l : adjacency_[v]) {
    auto first = std::lower_bound(
        l.items.begin(), l.items.end(), min_ts,
        [](const Incidence& x, Timestamp ts) { return x.timestamp < ts; });
    if (first != l.items.end()) out.emplace_back(first, l.items.end());
  }
  return out;
}

std::size_t DynamicGraph::expire_edges(Timestamp cutoff) {
  std::size_t removed = 0;
  for (EdgeId id = first_alive_; id < edges_.size(); ++id) {
    if (alive_[id] && edges_[id].timestamp < cutoff) {
      alive_[id] = false;
      ++removed;
    }
  }
  while (first_alive_ < edges_.size() && !alive_[first_alive_]) {
    ++first_alive_;
  }
  if (removed == 0) return 0;
  live_edges_ -= removed;
  for (auto& lists : adjacency_) {
    for (auto& l : lists) {
      auto keep = std::lower_bound(
          l.items.begin(), l.items.end(), cutoff,
          [](const Incidence& x, Timestamp ts) { return x.timestamp < ts; });
      l.items.erase(l.items.begin(), keep);
    }
  }
  return removed;
}

const VertexRecord& DynamicGraph::vertex(VertexId v) const {
  if (!has_vertex(v)) {
    throw UnknownVertex(fmt::format("unknown vertex id {}", v));
  }
  return vertices_[v];
}

std::optional<VertexId> DynamicGraph::find_vertex(std::string_view key) const {
  auto it = vertex_index_.find(std::string(key));
  if (it == vertex_index_.end()) return std::nullopt;
  return it->second;
}

bool DynamicGraph::has_edge(EdgeId id) const {
  return id < edges_.size() && alive_[id];
}

const TemporalEdge& DynamicGraph::edge(EdgeId id) const {
  if (!has_edge(id)) {
    throw UnknownEdge(fmt::format("unknown or expired edge id {}", id));
  }
  return edges_[id];
}

std::vector<TemporalEdge> DynamicGraph::edges() const {
  std::vector<TemporalEdge> out;
  out.reserve(live_edges_);
  for (EdgeId id = first_alive_; id < edges_.size(); ++id) {
    if (alive_[id]) out.push_back(edges_[id]);
  }
  return out;
}

}  // namespace sjstream
