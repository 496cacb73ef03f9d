#include "sjstream/match.hpp"

#include <algorithm>
#include <cstring>

#include <fmt/format.h>

namespace sjstream {

namespace {

template <typename T>
void append_raw(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

JoinKey make_join_key(const QuerySubgraph& cut, const Embedding& m) {
  JoinKey key;
  key.reserve(cut.vertices.size() * (sizeof(QVertexId) + sizeof(VertexId)));
  for (QVertexId v : cut.vertices) {
    if (v >= m.vertices.size() || !m.maps(v)) {
      throw DomainMismatch(
          fmt::format("cut vertex #{} is not mapped by the match", v));
    }
    append_raw(key, v);
    append_raw(key, m.vertices[v]);
  }
  return key;
}

JoinKey make_join_key(const QuerySubgraph& cut, const PartialMatch& m) {
  return make_join_key(cut, m.map);
}

std::string match_signature(NodeId node, const Embedding& m) {
  std::string sig;
  sig.reserve(sizeof(NodeId) + m.edges.size() * sizeof(EdgeId));
  append_raw(sig, node);
  for (EdgeId e : m.edges) append_raw(sig, e);
  return sig;
}

MatchStore::MatchStore(std::size_t node_count) : nodes_(node_count) {}

void MatchStore::insert_match(NodeId node, const JoinKey& key, PartialMatch m) {
  auto& nt = nodes_.at(node);
  auto sig = match_signature(node, m.map);
  if (!nt.signatures.insert(std::move(sig)).second) {
    throw DuplicateMatch(fmt::format("match already stored at node #{}", node));
  }
  m.node = node;
  nt.table[key].push_back(std::move(m));
  ++nt.count;
  ++total_;
  peak_total_ = std::max(peak_total_, total_);
}

bool MatchStore::contains(NodeId node, const std::string& signature) const {
  return nodes_.at(node).signatures.count(signature) > 0;
}

std::vector<PartialMatch> MatchStore::lookup_matches(NodeId node,
                                                     const JoinKey& key) const {
  std::vector<PartialMatch> out;
  for_each_match(node, key, [&](const PartialMatch& m) { out.push_back(m); });
  return out;
}

std::size_t MatchStore::prune(Timestamp cutoff) {
  std::size_t removed = 0;
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    auto& nt = nodes_[n];
    for (auto it = nt.table.begin(); it != nt.table.end();) {
      auto& bucket = it->second;
      auto dead = std::stable_partition(
          bucket.begin(), bucket.end(),
          [cutoff](const PartialMatch& m) { return m.t_low >= cutoff; });
      for (auto d = dead; d != bucket.end(); ++d) {
        nt.signatures.erase(match_signature(static_cast<NodeId>(n), d->map));
      }
      std::size_t k = static_cast<std::size_t>(bucket.end() - dead);
      bucket.erase(dead, bucket.end());
      removed += k;
      nt.count -= k;
      if (bucket.empty()) {
        it = nt.table.erase(it);
      } else {
        ++it;
      }
    }
  }
  total_ -= removed;
  return removed;
}

std::vector<PartialMatch> MatchStore::all_matches(NodeId node) const {
  std::vector<PartialMatch> out;
  for (const auto& [key, bucket] : nodes_.at(node).table) {
    out.insert(out.end(), bucket.begin(), bucket.end());
  }
  return out;
}

}  // namespace sjstream
