#include "sjstream/oracle.hpp"

#include <algorithm>
#include <optional>

#include <fmt/format.h>

namespace sjstream {

GraphSnapshot GraphSnapshot::of(const DynamicGraph& g) {
  GraphSnapshot s;
  s.vertices.reserve(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) s.vertices.push_back(g.vertex(v));
  s.edges = g.edges();
  return s;
}

namespace {

class Enumerator {
 public:
  Enumerator(const GraphSnapshot& snap, const QueryGraph& q, Timestamp window,
             std::span<const OrderingConstraint> ordering)
      : snap_(snap), q_(q), window_(window), ordering_(ordering),
        incident_(snap.vertices.size()) {
    for (std::size_t i = 0; i < snap.edges.size(); ++i) {
      incident_[snap.edges[i].src].push_back(i);
      incident_[snap.edges[i].dst].push_back(i);
    }
    plan();
  }

  std::vector<MatchRecord> run() {
    if (q_.vertex_count() == 0) return {};
    m_ = Embedding::empty_for(q_);
    QVertexId first = order_.front();
    for (VertexId v = 0; v < snap_.vertices.size(); ++v) {
      if (!compatible(first, v)) continue;
      m_.vertices[first] = v;
      place(1, std::numeric_limits<Timestamp>::max(),
            std::numeric_limits<Timestamp>::min());
      m_.vertices[first] = kNoVertex;
    }
    std::sort(out_.begin(), out_.end(),
              [](const MatchRecord& a, const MatchRecord& b) {
                return a.signature < b.signature;
              });
    return std::move(out_);
  }

 private:
  // Connected order from a labeled vertex when there is one. Each next
  // vertex has the most edges back into the placed set; feature vertices win
  // ties. back_edges_[i] lists the query edges from order_[i] to earlier
  // vertices.
  void plan() {
    QVertexId start = 0;
    for (std::size_t v = 0; v < q_.vertex_count(); ++v) {
      if (q_.vertex(static_cast<QVertexId>(v)).label) {
        start = static_cast<QVertexId>(v);
        break;
      }
    }
    std::vector<bool> in_order(q_.vertex_count(), false);
    order_.push_back(start);
    in_order[start] = true;
    while (order_.size() < q_.vertex_count()) {
      std::optional<QVertexId> best;
      std::pair<std::size_t, bool> best_score{0, false};
      for (std::size_t v = 0; v < q_.vertex_count(); ++v) {
        if (in_order[v]) continue;
        std::size_t back = 0;
        for (const auto& e : q_.edges()) {
          if (e.touches(static_cast<QVertexId>(v)) &&
              in_order[e.other(static_cast<QVertexId>(v))]) {
            ++back;
          }
        }
        std::pair<std::size_t, bool> score{back, !q_.vertex(static_cast<QVertexId>(v)).is_event};
        if (back > 0 && (!best || score > best_score)) {
          best = static_cast<QVertexId>(v);
          best_score = score;
        }
      }
      if (!best) throw SpecError("oracle needs a connected query graph");
      order_.push_back(*best);
      in_order[*best] = true;
    }
    back_edges_.resize(order_.size());
    std::vector<bool> placed(q_.vertex_count(), false);
    for (std::size_t i = 0; i < order_.size(); ++i) {
      for (std::size_t e = 0; e < q_.edge_count(); ++e) {
        const auto& qe = q_.edge(static_cast<QEdgeId>(e));
        if (qe.touches(order_[i]) && placed[qe.other(order_[i])]) {
          back_edges_[i].push_back(static_cast<QEdgeId>(e));
        }
      }
      placed[order_[i]] = true;
    }
  }

  bool compatible(QVertexId qv, VertexId v) const {
    const auto& want = q_.vertex(qv);
    const auto& have = snap_.vertices[v];
    return have.type == want.type && (!want.label || have.label == *want.label);
  }

  bool used(VertexId v) const {
    return std::find(m_.vertices.begin(), m_.vertices.end(), v) !=
           m_.vertices.end();
  }

  void place(std::size_t depth, Timestamp lo, Timestamp hi) {
    if (depth == order_.size()) {
      record(lo, hi);
      return;
    }
    QVertexId u = order_[depth];
    // Candidates: neighbors of the data vertex behind the first back edge.
    const auto& pivot = q_.edge(back_edges_[depth].front());
    VertexId anchor = m_.vertices[pivot.other(u)];
    std::vector<VertexId> candidates;
    for (std::size_t i : incident_[anchor]) {
      candidates.push_back(snap_.edges[i].other(anchor));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
    for (VertexId c : candidates) {
      if (!compatible(u, c) || used(c)) continue;
      m_.vertices[u] = c;
      bind_edges(depth, 0, lo, hi);
      m_.vertices[u] = kNoVertex;
    }
  }

  void bind_edges(std::size_t depth, std::size_t k, Timestamp lo, Timestamp hi) {
    const auto& back = back_edges_[depth];
    if (k == back.size()) {
      place(depth + 1, lo, hi);
      return;
    }
    QEdgeId qe = back[k];
    const auto& e = q_.edge(qe);
    VertexId x = m_.vertices[e.a];
    VertexId y = m_.vertices[e.b];
    for (std::size_t i : incident_[x]) {
      const auto& d = snap_.edges[i];
      if (d.type != e.type || d.other(x) != y) continue;
      if (std::find(m_.edges.begin(), m_.edges.end(), d.id) != m_.edges.end()) {
        continue;
      }
      Timestamp nlo = std::min(lo, d.timestamp);
      Timestamp nhi = std::max(hi, d.timestamp);
      if (nhi - nlo >= window_) continue;
      m_.edges[qe] = d.id;
      bind_edges(depth, k + 1, nlo, nhi);
      m_.edges[qe] = kNoEdge;
    }
  }

  void record(Timestamp lo, Timestamp hi) {
    for (const auto& c : ordering_) {
      Timestamp before_max = std::numeric_limits<Timestamp>::min();
      Timestamp after_min = std::numeric_limits<Timestamp>::max();
      for (QEdgeId e : c.before) before_max = std::max(before_max, time_of(e));
      for (QEdgeId e : c.after) after_min = std::min(after_min, time_of(e));
      if (!(before_max < after_min)) return;
    }
    MatchRecord r;
    r.map = m_;
    r.t_low = lo;
    r.t_high = hi;
    r.signature = record_signature(m_);
    out_.push_back(std::move(r));
  }

  Timestamp time_of(QEdgeId e) const {
    EdgeId id = m_.edges[e];
    auto it = std::lower_bound(
        snap_.edges.begin(), snap_.edges.end(), id,
        [](const TemporalEdge& d, EdgeId want) { return d.id < want; });
    return it->timestamp;
  }

  const GraphSnapshot& snap_;
  const QueryGraph& q_;
  Timestamp window_;
  std::span<const OrderingConstraint> ordering_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<QVertexId> order_;
  std::vector<std::vector<QEdgeId>> back_edges_;
  Embedding m_;
  std::vector<MatchRecord> out_;
};

}  // namespace

std::vector<MatchRecord> enumerate_all(const GraphSnapshot& snap,
                                       const QueryGraph& q, Timestamp window,
                                       std::span<const OrderingConstraint> ordering,
                                       const OracleOptions& options) {
  if (snap.edges.size() > options.max_edges) {
    throw SizeGuardExceeded(fmt::format(
        "snapshot has {} edges; oracle limit is {}", snap.edges.size(),
        options.max_edges));
  }
  if (!q.connected()) {
    throw SpecError("oracle needs a connected query graph");
  }
  return Enumerator(snap, q, window, ordering).run();
}

std::set<std::string> signature_set(std::span<const MatchRecord> records) {
  std::set<std::string> out;
  for (const auto& r : records) out.insert(r.signature);
  return out;
}

}  // namespace sjstream
