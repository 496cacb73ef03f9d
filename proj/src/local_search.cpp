#include "sjstream/local_search.hpp"

#include <algorithm>
#include <unordered_set>

namespace sjstream {

namespace {

bool uses_vertex(const Embedding& m, VertexId v) {
  return std::find(m.vertices.begin(), m.vertices.end(), v) != m.vertices.end();
}

bool uses_edge(const Embedding& m, EdgeId e) {
  return std::find(m.edges.begin(), m.edges.end(), e) != m.edges.end();
}

PartialMatch finish(const DynamicGraph& g, const Embedding& m) {
  PartialMatch out;
  out.map = m;
  bool first = true;
  for (EdgeId e : m.edges) {
    if (e == kNoEdge) continue;
    Timestamp ts = g.edge(e).timestamp;
    if (first) {
      out.t_low = out.t_high = ts;
      first = false;
    } else {
      out.t_low = std::min(out.t_low, ts);
      out.t_high = std::max(out.t_high, ts);
    }
  }
  return out;
}

// Collects results across anchor seedings, dropping repeats.
class ResultSet {
 public:
  explicit ResultSet(const DynamicGraph& g) : g_(g) {}

  void add(const Embedding& m) {
    if (seen_.insert(match_signature(kNoNode, m)).second) {
      out_.push_back(finish(g_, m));
    }
  }

  std::vector<PartialMatch> take() { return std::move(out_); }

 private:
  const DynamicGraph& g_;
  std::unordered_set<std::string> seen_;
  std::vector<PartialMatch> out_;
};

// Calls fn(embedding) for every way of putting `anchor` on a primitive edge
// of the same type with type/label-compatible endpoints.
template <typename Fn>
void for_each_seed(const DynamicGraph& g, const QueryGraph& q,
                   const QuerySubgraph& primitive, const TemporalEdge& anchor,
                   Fn&& fn) {
  for (QEdgeId qe : primitive.edges) {
    const auto& e = q.edge(qe);
    if (e.type != anchor.type) continue;
    for (auto [qa, qb] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
      if (!vertex_compatible(g, q.vertex(qa), anchor.src) ||
          !vertex_compatible(g, q.vertex(qb), anchor.dst)) {
        continue;
      }
      auto m = Embedding::empty_for(q);
      m.vertices[qa] = anchor.src;
      m.vertices[qb] = anchor.dst;
      m.edges[qe] = anchor.id;
      fn(m);
    }
  }
}

bool anchor_admissible(const QueryGraph& q, const QuerySubgraph& primitive,
                       const TemporalEdge& anchor, Timestamp min_ts) {
  if (anchor.timestamp < min_ts) return false;
  return std::any_of(primitive.edges.begin(), primitive.edges.end(),
                     [&](QEdgeId e) { return q.edge(e).type == anchor.type; });
}

class StarMatcher {
 public:
  StarMatcher(const DynamicGraph& g, const QueryGraph& q,
              const QuerySubgraph& primitive, QVertexId center, Timestamp min_ts,
              ResultSet& out)
      : g_(g), q_(q), primitive_(primitive), center_(center), min_ts_(min_ts),
        out_(out) {}

  void run(Embedding& m) { extend(m, 0); }

 private:
  void extend(Embedding& m, std::size_t i) {
    if (i == primitive_.edges.size()) {
      out_.add(m);
      return;
    }
    QEdgeId qe = primitive_.edges[i];
    if (m.maps_edge(qe)) {
      extend(m, i + 1);
      return;
    }
    const auto& spoke = q_.edge(qe);
    QVertexId leaf = spoke.other(center_);
    const auto& leaf_v = q_.vertex(leaf);
    bool leaf_mapped = m.maps(leaf);
    for (const auto& inc : g_.neighbors(m.vertices[center_], spoke.type, min_ts_)) {
      if (uses_edge(m, inc.edge)) continue;
      if (leaf_mapped) {
        if (inc.neighbor != m.vertices[leaf]) continue;
      } else if (!vertex_compatible(g_, leaf_v, inc.neighbor) ||
                 uses_vertex(m, inc.neighbor)) {
        continue;
      }
      m.edges[qe] = inc.edge;
      if (!leaf_mapped) m.vertices[leaf] = inc.neighbor;
      extend(m, i + 1);
      m.edges[qe] = kNoEdge;
      if (!leaf_mapped) m.vertices[leaf] = kNoVertex;
    }
  }

  const DynamicGraph& g_;
  const QueryGraph& q_;
  const QuerySubgraph& primitive_;
  QVertexId center_;
  Timestamp min_ts_;
  ResultSet& out_;
};

// Anchored backtracking over vertices (connected expansion), then over the
// concrete data edge behind each query edge.
class BacktrackMatcher {
 public:
  BacktrackMatcher(const DynamicGraph& g, const QueryGraph& q,
                   const QuerySubgraph& primitive, Timestamp min_ts,
                   ResultSet& out)
      : g_(g), q_(q), primitive_(primitive), min_ts_(min_ts), out_(out) {}

  void run(Embedding& m) {
    order_ = expansion_order(m);
    map_vertices(m, 0);
  }

 private:
  std::vector<QVertexId> expansion_order(const Embedding& seed) const {
    std::vector<QVertexId> order;
    std::vector<bool> placed(q_.vertex_count(), false);
    for (auto v : primitive_.vertices) placed[v] = seed.maps(v);
    auto degree = [&](QVertexId v) {
      return std::count_if(primitive_.edges.begin(), primitive_.edges.end(),
                           [&](QEdgeId e) { return q_.edge(e).touches(v); });
    };
    while (true) {
      std::optional<QVertexId> best;
      for (auto v : primitive_.vertices) {
        if (placed[v]) continue;
        bool frontier = std::any_of(
            primitive_.edges.begin(), primitive_.edges.end(), [&](QEdgeId e) {
              const auto& qe = q_.edge(e);
              return qe.touches(v) && placed[qe.other(v)];
            });
        if (!frontier) continue;
        if (!best) {
          best = v;
          continue;
        }
        bool lv = q_.vertex(v).label.has_value();
        bool lb = q_.vertex(*best).label.has_value();
        if (lv != lb ? lv : degree(v) > degree(*best)) best = v;
      }
      if (!best) break;
      placed[*best] = true;
      order.push_back(*best);
    }
    return order;
  }

  bool degree_ok(QVertexId u, VertexId cand) const {
    for (QEdgeId e : primitive_.edges) {
      const auto& qe = q_.edge(e);
      if (!qe.touches(u)) continue;
      auto need = std::count_if(
          primitive_.edges.begin(), primitive_.edges.end(), [&](QEdgeId f) {
            return q_.edge(f).touches(u) && q_.edge(f).type == qe.type;
          });
      if (g_.neighbors(cand, qe.type, min_ts_).size() <
          static_cast<std::size_t>(need)) {
        return false;
      }
    }
    return true;
  }

  bool has_data_edge(VertexId x, VertexId y, EdgeType t) const {
    for (const auto& inc : g_.neighbors(x, t, min_ts_)) {
      if (inc.neighbor == y) return true;
    }
    return false;
  }

  void map_vertices(Embedding& m, std::size_t depth) {
    if (depth == order_.size()) {
      map_edges(m, 0);
      return;
    }
    QVertexId u = order_[depth];
    const auto& uv = q_.vertex(u);
    // Pivot: any primitive edge to an already mapped vertex.
    const QueryEdge* pivot = nullptr;
    for (QEdgeId e : primitive_.edges) {
      const auto& qe = q_.edge(e);
      if (qe.touches(u) && m.maps(qe.other(u))) {
        pivot = &qe;
        break;
      }
    }
    VertexId anchor_v = m.vertices[pivot->other(u)];
    std::vector<VertexId> candidates;
    for (const auto& inc : g_.neighbors(anchor_v, pivot->type, min_ts_)) {
      candidates.push_back(inc.neighbor);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
    for (VertexId cand : candidates) {
      if (!vertex_compatible(g_, uv, cand) || uses_vertex(m, cand) ||
          !degree_ok(u, cand)) {
        continue;
      }
      bool adjacent = true;
      for (QEdgeId e : primitive_.edges) {
        const auto& qe = q_.edge(e);
        if (!qe.touches(u) || !m.maps(qe.other(u))) continue;
        if (!has_data_edge(cand, m.vertices[qe.other(u)], qe.type)) {
          adjacent = false;
          break;
        }
      }
      if (!adjacent) continue;
      m.vertices[u] = cand;
      map_vertices(m, depth + 1);
      m.vertices[u] = kNoVertex;
    }
  }

  void map_edges(Embedding& m, std::size_t i) {
    if (i == primitive_.edges.size()) {
      out_.add(m);
      return;
    }
    QEdgeId e = primitive_.edges[i];
    if (m.maps_edge(e)) {
      map_edges(m, i + 1);
      return;
    }
    const auto& qe = q_.edge(e);
    VertexId x = m.vertices[qe.a];
    VertexId y = m.vertices[qe.b];
    for (const auto& inc : g_.neighbors(x, qe.type, min_ts_)) {
      if (inc.neighbor != y || uses_edge(m, inc.edge)) continue;
      m.edges[e] = inc.edge;
      map_edges(m, i + 1);
      m.edges[e] = kNoEdge;
    }
  }

  const DynamicGraph& g_;
  const QueryGraph& q_;
  const QuerySubgraph& primitive_;
  Timestamp min_ts_;
  ResultSet& out_;
  std::vector<QVertexId> order_;
};

}  // namespace

std::optional<QVertexId> star_center(const QueryGraph& q,
                                     const QuerySubgraph& primitive) {
  if (primitive.edges.empty()) return std::nullopt;
  std::optional<QVertexId> found;
  for (QVertexId v : primitive.vertices) {
    bool hub = std::all_of(primitive.edges.begin(), primitive.edges.end(),
                           [&](QEdgeId e) { return q.edge(e).touches(v); });
    if (!hub) continue;
    if (!found || (q.vertex(v).is_event && !q.vertex(*found).is_event)) {
      found = v;
    }
  }
  return found;
}

bool vertex_compatible(const DynamicGraph& g, const QueryVertex& qv, VertexId v) {
  const auto& rec = g.vertex(v);
  if (rec.type != qv.type) return false;
  return !qv.label || rec.label == *qv.label;
}

std::vector<PartialMatch> star_search(const DynamicGraph& g, const QueryGraph& q,
                                      const QuerySubgraph& primitive,
                                      const TemporalEdge& anchor,
                                      Timestamp min_ts) {
  auto center = star_center(q, primitive);
  if (!center) throw NotAStar("primitive has no vertex touching every edge");
  if (!anchor_admissible(q, primitive, anchor, min_ts)) return {};
  ResultSet out(g);
  StarMatcher matcher(g, q, primitive, *center, min_ts, out);
  for_each_seed(g, q, primitive, anchor, [&](Embedding& m) { matcher.run(m); });
  return out.take();
}

std::vector<PartialMatch> local_search(const DynamicGraph& g, const QueryGraph& q,
                                       const QuerySubgraph& primitive,
                                       const TemporalEdge& anchor,
                                       Timestamp min_ts) {
  if (!anchor_admissible(q, primitive, anchor, min_ts)) return {};
  if (star_center(q, primitive)) {
    return star_search(g, q, primitive, anchor, min_ts);
  }
  ResultSet out(g);
  BacktrackMatcher matcher(g, q, primitive, min_ts, out);
  for_each_seed(g, q, primitive, anchor, [&](Embedding& m) { matcher.run(m); });
  return out.take();
}

std::vector<PartialMatch> anchored_search(const DynamicGraph& g,
                                          const QueryGraph& q,
                                          const QuerySubgraph& primitive,
                                          const TemporalEdge& anchor,
                                          Timestamp min_ts) {
  if (!anchor_admissible(q, primitive, anchor, min_ts)) return {};
  ResultSet out(g);
  BacktrackMatcher matcher(g, q, primitive, min_ts, out);
  for_each_seed(g, q, primitive, anchor, [&](Embedding& m) { matcher.run(m); });
  return out.take();
}

}  // namespace sjstream
