#include "sjstream/baseline.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "sjstream/local_search.hpp"

namespace sjstream {

SubgraphView khop_subgraph(const DynamicGraph& g, EdgeId e, std::size_t k,
                           Timestamp min_ts) {
  const auto& seed = g.edge(e);
  std::unordered_map<VertexId, std::size_t> depth;
  std::deque<VertexId> frontier;
  for (VertexId v : {seed.src, seed.dst}) {
    depth.emplace(v, 0);
    frontier.push_back(v);
  }
  while (!frontier.empty()) {
    VertexId v = frontier.front();
    frontier.pop_front();
    std::size_t d = depth[v];
    if (d == k) continue;
    for (auto span : g.all_neighbors(v, min_ts)) {
      for (const auto& inc : span) {
        if (depth.emplace(inc.neighbor, d + 1).second) {
          frontier.push_back(inc.neighbor);
        }
      }
    }
  }
  SubgraphView view;
  view.vertices.reserve(depth.size());
  for (const auto& [v, d] : depth) view.vertices.push_back(v);
  std::sort(view.vertices.begin(), view.vertices.end());
  for (VertexId v : view.vertices) {
    for (auto span : g.all_neighbors(v, min_ts)) {
      for (const auto& inc : span) {
        // Each edge is seen from both ends; keep it once.
        if (inc.neighbor > v && depth.count(inc.neighbor)) {
          view.edges.push_back(inc.edge);
        }
      }
    }
  }
  std::sort(view.edges.begin(), view.edges.end());
  return view;
}

namespace {

// VF2-flavoured matcher over a materialized subgraph: state grows one query
// vertex at a time along a connected order, candidates come from the data
// neighborhood of already mapped vertices, and a look-ahead on unmapped
// neighbor counts prunes states that cannot be completed.
class SubgraphMatcher {
 public:
  SubgraphMatcher(const DynamicGraph& g, const QueryGraph& q,
                  const SubgraphView& view)
      : g_(g), q_(q) {
    for (std::size_t i = 0; i < view.vertices.size(); ++i) {
      local_.emplace(view.vertices[i], i);
    }
    adj_.resize(view.vertices.size());
    for (EdgeId id : view.edges) {
      const auto& e = g.edge(id);
      adj_[local_.at(e.src)].push_back(e);
      adj_[local_.at(e.dst)].push_back(e);
    }
    vertices_ = view.vertices;
    plan();
  }

  template <typename Fn>
  void enumerate(Fn&& fn) {
    if (q_.vertex_count() == 0) return;
    m_ = Embedding::empty_for(q_);
    QVertexId first = order_.front();
    for (VertexId v : vertices_) {
      if (!feasible(first, v)) continue;
      m_.vertices[first] = v;
      extend(1, fn);
      m_.vertices[first] = kNoVertex;
    }
  }

 private:
  void plan() {
    QVertexId start = 0;
    std::size_t best = 0;
    for (std::size_t v = 0; v < q_.vertex_count(); ++v) {
      const auto& qv = q_.vertex(static_cast<QVertexId>(v));
      std::size_t score = (qv.label ? 1000 : 0) +
                          q_.incident_edges(static_cast<QVertexId>(v)).size();
      if (score > best) {
        best = score;
        start = static_cast<QVertexId>(v);
      }
    }
    std::vector<bool> seen(q_.vertex_count(), false);
    std::deque<QVertexId> frontier{start};
    seen[start] = true;
    while (!frontier.empty()) {
      QVertexId v = frontier.front();
      frontier.pop_front();
      order_.push_back(v);
      for (const auto& e : q_.edges()) {
        if (e.touches(v) && !seen[e.other(v)]) {
          seen[e.other(v)] = true;
          frontier.push_back(e.other(v));
        }
      }
    }
  }

  const std::vector<TemporalEdge>& incident(VertexId v) const {
    return adj_[local_.at(v)];
  }

  bool feasible(QVertexId u, VertexId v) const {
    if (!vertex_compatible(g_, q_.vertex(u), v)) return false;
    if (std::find(m_.vertices.begin(), m_.vertices.end(), v) != m_.vertices.end()) {
      return false;
    }
    std::size_t open_query = 0;
    for (const auto& qe : q_.edges()) {
      if (!qe.touches(u)) continue;
      QVertexId w = qe.other(u);
      if (!m_.maps(w)) {
        ++open_query;
        continue;
      }
      bool found = false;
      for (const auto& d : incident(v)) {
        if (d.type == qe.type && d.other(v) == m_.vertices[w]) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    std::vector<VertexId> open_data;
    for (const auto& d : incident(v)) {
      VertexId n = d.other(v);
      if (std::find(m_.vertices.begin(), m_.vertices.end(), n) == m_.vertices.end()) {
        open_data.push_back(n);
      }
    }
    std::sort(open_data.begin(), open_data.end());
    open_data.erase(std::unique(open_data.begin(), open_data.end()), open_data.end());
    return open_query <= open_data.size();
  }

  template <typename Fn>
  void extend(std::size_t depth, Fn& fn) {
    if (depth == order_.size()) {
      bind(0, fn);
      return;
    }
    QVertexId u = order_[depth];
    VertexId pivot = kNoVertex;
    for (const auto& qe : q_.edges()) {
      if (qe.touches(u) && m_.maps(qe.other(u))) {
        pivot = m_.vertices[qe.other(u)];
        break;
      }
    }
    std::vector<VertexId> candidates;
    for (const auto& d : incident(pivot)) candidates.push_back(d.other(pivot));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
    for (VertexId c : candidates) {
      if (!feasible(u, c)) continue;
      m_.vertices[u] = c;
      extend(depth + 1, fn);
      m_.vertices[u] = kNoVertex;
    }
  }

  template <typename Fn>
  void bind(std::size_t i, Fn& fn) {
    if (i == q_.edge_count()) {
      fn(m_);
      return;
    }
    const auto& qe = q_.edge(static_cast<QEdgeId>(i));
    VertexId x = m_.vertices[qe.a];
    VertexId y = m_.vertices[qe.b];
    for (const auto& d : incident(x)) {
      if (d.type != qe.type || d.other(x) != y) continue;
      if (std::find(m_.edges.begin(), m_.edges.end(), d.id) != m_.edges.end()) {
        continue;
      }
      m_.edges[i] = d.id;
      bind(i + 1, fn);
      m_.edges[i] = kNoEdge;
    }
  }

  const DynamicGraph& g_;
  const QueryGraph& q_;
  std::unordered_map<VertexId, std::size_t> local_;
  std::vector<std::vector<TemporalEdge>> adj_;
  std::vector<VertexId> vertices_;
  std::vector<QVertexId> order_;
  Embedding m_;
};

}  // namespace

std::vector<MatchRecord> inc_iso_match(const DynamicGraph& g, const QueryGraph& q,
                                       EdgeId e, Timestamp window,
                                       std::span<const OrderingConstraint> ordering) {
  const auto& anchor = g.edge(e);
  bool relevant = std::any_of(q.edges().begin(), q.edges().end(),
                              [&](const QueryEdge& qe) { return qe.type == anchor.type; });
  if (!relevant) return {};

  const Timestamp min_ts = anchor.timestamp - window;
  auto view = khop_subgraph(g, e, q.diameter(), min_ts);
  SubgraphMatcher matcher(g, q, view);
  std::vector<MatchRecord> out;
  matcher.enumerate([&](const Embedding& m) {
    if (std::find(m.edges.begin(), m.edges.end(), e) == m.edges.end()) return;
    Timestamp lo = std::numeric_limits<Timestamp>::max();
    Timestamp hi = std::numeric_limits<Timestamp>::min();
    for (EdgeId id : m.edges) {
      Timestamp ts = g.edge(id).timestamp;
      lo = std::min(lo, ts);
      hi = std::max(hi, ts);
    }
    if (hi - lo >= window) return;
    for (const auto& c : ordering) {
      Timestamp before_max = std::numeric_limits<Timestamp>::min();
      Timestamp after_min = std::numeric_limits<Timestamp>::max();
      for (QEdgeId x : c.before) {
        before_max = std::max(before_max, g.edge(m.edges[x]).timestamp);
      }
      for (QEdgeId x : c.after) {
        after_min = std::min(after_min, g.edge(m.edges[x]).timestamp);
      }
      if (!(before_max < after_min)) return;
    }
    MatchRecord r;
    r.map = m;
    r.t_low = lo;
    r.t_high = hi;
    r.emitted_at = g.current_time();
    r.trigger = e;
    r.signature = record_signature(m);
    out.push_back(std::move(r));
  });
  return out;
}

IncIsoMatchBaseline::IncIsoMatchBaseline(DynamicGraph& graph, const SJTree& tree,
                                         Timestamp window, MatchSink sink)
    : graph_(graph),
      tree_(tree),
      window_(window),
      sink_(std::move(sink)),
      ordering_(ordering_constraints(tree)) {
  if (window_ <= 0) throw ConfigError("time window must be positive");
}

std::vector<MatchRecord> IncIsoMatchBaseline::process_edge(const EdgeInsert& e) {
  return on_edge_inserted(graph_.update_graph(e));
}

std::vector<MatchRecord> IncIsoMatchBaseline::on_edge_inserted(EdgeId id) {
  ++stats_.edges_processed;
  const auto& q = tree_.query();
  const auto& anchor = graph_.edge(id);
  bool relevant = std::any_of(q.edges().begin(), q.edges().end(),
                              [&](const QueryEdge& qe) { return qe.type == anchor.type; });
  if (!relevant) {
    ++stats_.fast_rejects;
    return {};
  }
  auto found = inc_iso_match(graph_, q, id, window_, ordering_);
  stats_.emitted += found.size();
  if (sink_) {
    for (const auto& r : found) sink_(r);
  }
  return found;
}

}  // namespace sjstream
