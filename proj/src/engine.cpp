#include "sjstream/engine.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "sjstream/local_search.hpp"

namespace sjstream {

namespace {

template <typename T, typename Missing>
bool all_distinct(const std::vector<T>& values, Missing missing) {
  std::vector<T> present;
  present.reserve(values.size());
  for (const auto& v : values) {
    if (v != missing) present.push_back(v);
  }
  std::sort(present.begin(), present.end());
  return std::adjacent_find(present.begin(), present.end()) == present.end();
}

}  // namespace

std::string record_signature(const Embedding& m) {
  return fmt::format("{}", fmt::join(m.edges, ","));
}

std::string format_match_line(const MatchRecord& r, const QueryGraph& q,
                              const DynamicGraph& g) {
  std::string pairs;
  for (std::size_t i = 0; i < q.vertex_count(); ++i) {
    if (!pairs.empty()) pairs += ',';
    pairs += q.vertex(static_cast<QVertexId>(i)).name;
    pairs += '=';
    pairs += g.vertex(r.map.vertices[i]).key;
  }
  return fmt::format("{}\t{}\t{}\t{}", r.signature, pairs, r.t_low, r.t_high);
}

std::optional<PartialMatch> join_matches(const SJTree& tree, NodeId parent,
                                         const PartialMatch& left,
                                         const PartialMatch& right,
                                         Timestamp window,
                                         JoinOutcome* outcome) {
  auto reject = [&](JoinOutcome why) -> std::optional<PartialMatch> {
    if (outcome) *outcome = why;
    return std::nullopt;
  };
  const auto& node = tree.node(parent);
  if (node.ordered_join && !(left.t_high < right.t_low)) {
    return reject(JoinOutcome::kOrder);
  }
  Timestamp lo = std::min(left.t_low, right.t_low);
  Timestamp hi = std::max(left.t_high, right.t_high);
  if (hi - lo >= window) return reject(JoinOutcome::kWindow);

  PartialMatch out;
  out.node = parent;
  out.map = left.map;
  out.t_low = lo;
  out.t_high = hi;
  for (std::size_t v = 0; v < out.map.vertices.size(); ++v) {
    VertexId r = right.map.vertices[v];
    if (r == kNoVertex) continue;
    VertexId& l = out.map.vertices[v];
    if (l != kNoVertex && l != r) return reject(JoinOutcome::kConflict);
    l = r;
  }
  for (std::size_t e = 0; e < out.map.edges.size(); ++e) {
    EdgeId r = right.map.edges[e];
    if (r == kNoEdge) continue;
    EdgeId& l = out.map.edges[e];
    if (l != kNoEdge && l != r) return reject(JoinOutcome::kConflict);
    l = r;
  }
  if (!all_distinct(out.map.vertices, kNoVertex) ||
      !all_distinct(out.map.edges, kNoEdge)) {
    return reject(JoinOutcome::kInjectivity);
  }
  if (outcome) *outcome = JoinOutcome::kAccepted;
  return out;
}

ContinuousQueryEngine::ContinuousQueryEngine(DynamicGraph& graph,
                                             const SJTree& tree,
                                             EngineConfig config)
    : graph_(graph),
      tree_(tree),
      config_(std::move(config)),
      store_(tree.nodes().size()) {
  if (config_.window <= 0) {
    throw ConfigError("time window must be positive");
  }
  if (config_.disorder_slack < 0) {
    throw ConfigError("disorder slack must be non-negative");
  }
  auto report = validate_sjtree(tree_);
  if (!report.ok()) {
    throw SpecError("invalid SJ-Tree:\n" + report.to_string());
  }
  if (auto slot = tree_.query().label_slot()) {
    throw SpecError(fmt::format("query vertex '{}' has an unfilled label slot",
                                tree_.query().vertex(*slot).name));
  }
}

Timestamp ContinuousQueryEngine::expiry_cutoff(Timestamp current_time) const {
  return current_time - config_.disorder_slack - config_.window;
}

std::vector<MatchRecord> ContinuousQueryEngine::process_cont_query(
    std::span<const EdgeInsert> edges) {
  std::vector<MatchRecord> out;
  for (const auto& e : edges) {
    auto found = process_edge(e);
    out.insert(out.end(), std::make_move_iterator(found.begin()),
               std::make_move_iterator(found.end()));
  }
  return out;
}

std::vector<MatchRecord> ContinuousQueryEngine::process_edge(const EdgeInsert& e) {
  EdgeId id = graph_.update_graph(e);
  auto out = on_edge_inserted(id);
  if (config_.expire_graph && config_.prune_interval_edges > 0 &&
      stats_.edges_processed % config_.prune_interval_edges == 0) {
    graph_.expire_edges(expiry_cutoff(graph_.current_time()));
  }
  return out;
}

std::vector<MatchRecord> ContinuousQueryEngine::on_edge_inserted(EdgeId id) {
  std::vector<MatchRecord> out;
  const TemporalEdge anchor = graph_.edge(id);
  current_trigger_ = id;
  store_.set_horizon(expiry_cutoff(graph_.current_time()));
  const Timestamp min_ts = anchor.timestamp - config_.window;
  const auto& q = tree_.query();
  for (NodeId leaf : tree_.leaves()) {
    const auto& primitive = tree_.node(leaf).query_subgraph;
    for (auto& m : local_search(graph_, q, primitive, anchor, min_ts)) {
      if (m.span() >= config_.window) {
        ++stats_.leaf_rejected_window;
        continue;
      }
      ++stats_.leaf_matches;
      m.node = leaf;
      update(leaf, std::move(m), out);
    }
  }
  ++stats_.edges_processed;
  if (config_.prune_interval_edges > 0 &&
      stats_.edges_processed % config_.prune_interval_edges == 0) {
    prune_window(graph_.current_time());
  }
  return out;
}

std::vector<MatchRecord> ContinuousQueryEngine::update_sjtree(NodeId node,
                                                              PartialMatch m) {
  std::vector<MatchRecord> out;
  m.node = node;
  update(node, std::move(m), out);
  return out;
}

void ContinuousQueryEngine::update(NodeId node, PartialMatch m,
                                   std::vector<MatchRecord>& out) {
  if (node == tree_.root()) {
    emit(std::move(m), out);
    return;
  }
  if (store_.contains(node, match_signature(node, m.map))) {
    ++stats_.duplicate_matches;
    return;
  }
  const auto& n = tree_.node(node);
  const NodeId parent = n.parent;
  const bool from_left = tree_.node(parent).left == node;
  JoinKey key = make_join_key(tree_.node(parent).cut_subgraph, m);

  store_.for_each_match(n.sibling, key, [&](const PartialMatch& other) {
    ++stats_.join_attempts;
    JoinOutcome why{};
    auto joined = from_left
                      ? join_matches(tree_, parent, m, other, config_.window, &why)
                      : join_matches(tree_, parent, other, m, config_.window, &why);
    switch (why) {
      case JoinOutcome::kAccepted:
        ++stats_.joins_accepted;
        break;
      case JoinOutcome::kOrder:
        ++stats_.rejected_order;
        break;
      case JoinOutcome::kWindow:
        ++stats_.rejected_window;
        break;
      case JoinOutcome::kInjectivity:
      case JoinOutcome::kConflict:
        ++stats_.rejected_injective;
        break;
    }
    if (joined) update(parent, std::move(*joined), out);
  });

  // Stored only after the join attempts so a match never meets itself.
  store_.insert_match(node, key, std::move(m));
}

void ContinuousQueryEngine::emit(PartialMatch m, std::vector<MatchRecord>& out) {
  MatchRecord rec;
  rec.signature = record_signature(m.map);
  if (!emitted_.insert(rec.signature).second) {
    ++stats_.duplicate_emissions;
    return;
  }
  emitted_log_.emplace_back(m.t_low, rec.signature);
  rec.map = std::move(m.map);
  rec.t_low = m.t_low;
  rec.t_high = m.t_high;
  rec.emitted_at = graph_.current_time();
  rec.trigger = current_trigger_;
  ++stats_.emitted;
  if (config_.sink) config_.sink(rec);
  out.push_back(std::move(rec));
}

std::size_t ContinuousQueryEngine::prune_window(Timestamp current_time) {
  const Timestamp cutoff = expiry_cutoff(current_time);
  std::size_t removed = store_.prune(cutoff);
  ++stats_.prunes;
  stats_.pruned_matches += removed;
  // Emitted signatures older than the window can never be produced again.
  std::erase_if(emitted_log_, [&](const auto& entry) {
    if (entry.first >= cutoff) return false;
    emitted_.erase(entry.second);
    return true;
  });
  return removed;
}

}  // namespace sjstream
