#include "sjstream/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "sjstream/baseline.hpp"

namespace sjstream {

EngineKind parse_engine_kind(const std::string& name) {
  if (name == "sjtree") return EngineKind::kSJTree;
  if (name == "baseline") return EngineKind::kBaseline;
  throw ConfigError(fmt::format("unknown engine '{}' (sjtree|baseline)", name));
}

double RunResult::peak_batch_seconds() const {
  double best = 0.0;
  for (const auto& b : batches) best = std::max(best, b.batch_seconds);
  return best;
}

double RunResult::edges_per_second() const {
  return total_seconds > 0.0 ? static_cast<double>(edges) / total_seconds : 0.0;
}

RunResult run_query(const QuerySpec& spec, const Schema& schema,
                    std::span<const EdgeInsert> edges, const RunOptions& options) {
  if (options.batch_size == 0) throw ConfigError("batch size must be positive");
  SJTree tree = spec.tree->rebind(spec.query);
  if (options.window) tree.set_window(*options.window);
  const Timestamp window = tree.window();

  DynamicGraph graph(schema, spec.disorder_slack);
  RunResult result;
  for (const auto& n : tree.nodes()) result.node_names.push_back(n.name);

  std::optional<ContinuousQueryEngine> engine;
  std::optional<IncIsoMatchBaseline> baseline;
  if (options.engine == EngineKind::kSJTree) {
    EngineConfig config;
    config.window = window;
    config.prune_interval_edges = options.prune_interval.value_or(spec.prune_interval);
    config.disorder_slack = spec.disorder_slack;
    engine.emplace(graph, tree, std::move(config));
  } else {
    baseline.emplace(graph, tree, window);
  }

  using Clock = std::chrono::steady_clock;
  std::vector<MatchRecord> found;
  for (std::size_t start = 0, index = 0; start < edges.size();
       start += options.batch_size, ++index) {
    auto batch = edges.subspan(start, std::min(options.batch_size, edges.size() - start));
    found.clear();
    auto t0 = Clock::now();
    for (const auto& e : batch) {
      auto out = engine ? engine->process_edge(e) : baseline->process_edge(e);
      found.insert(found.end(), std::make_move_iterator(out.begin()),
                   std::make_move_iterator(out.end()));
    }
    auto t1 = Clock::now();

    BatchMetrics m;
    m.batch_index = index;
    m.edges_processed = start + batch.size();
    m.batch_seconds = std::chrono::duration<double>(t1 - t0).count();
    result.total_seconds += m.batch_seconds;
    result.match_count += found.size();
    m.cumulative_matches = result.match_count;
    if (engine) {
      const auto& store = engine->store();
      m.stored_total = store.total();
      m.peak_stored = store.peak_total();
      for (std::size_t n = 0; n < store.node_count(); ++n) {
        m.stored_per_node.push_back(store.count(static_cast<NodeId>(n)));
      }
    } else {
      m.stored_per_node.assign(result.node_names.size(), 0);
    }
    result.peak_stored = m.peak_stored;
    result.batches.push_back(std::move(m));

    for (auto& r : found) {
      if (options.sink) options.sink(r);
      if (options.line_sink) options.line_sink(format_match_line(r, tree.query(), graph));
      if (options.keep_matches) result.matches.push_back(std::move(r));
    }
  }
  result.edges = edges.size();
  return result;
}

void write_metrics_csv(std::ostream& out, const RunResult& result) {
  out << "batch_index,edges_processed,batch_seconds,cumulative_matches,"
         "stored_total,peak_stored";
  for (const auto& name : result.node_names) out << ",stored_" << name;
  out << '\n';
  for (const auto& b : result.batches) {
    out << fmt::format("{},{},{:.9f},{},{},{}", b.batch_index, b.edges_processed,
                       b.batch_seconds, b.cumulative_matches, b.stored_total,
                       b.peak_stored);
    for (auto c : b.stored_per_node) out << ',' << c;
    out << '\n';
  }
}

std::vector<std::pair<std::string, std::size_t>> label_degrees(
    std::span<const StreamEdge> stream, const std::string& type) {
  std::map<std::string, std::pair<std::string, std::size_t>> by_key;
  auto count = [&](const std::string& key, const std::string& t,
                   const std::string& label) {
    if (t != type || label.empty()) return;
    auto& entry = by_key[key];
    entry.first = label;
    ++entry.second;
  };
  for (const auto& e : stream) {
    count(e.src_id, e.src_type, e.src_label);
    count(e.dst_id, e.dst_type, e.dst_label);
  }
  std::vector<std::pair<std::string, std::size_t>> out;
  out.reserve(by_key.size());
  for (auto& [key, entry] : by_key) out.push_back(std::move(entry));
  return out;
}

std::vector<std::vector<std::pair<std::string, std::size_t>>> pick_labels(
    std::vector<std::pair<std::string, std::size_t>> degrees, std::size_t bins,
    std::size_t per_bin) {
  if (bins == 0 || per_bin == 0) throw ConfigError("bins and per_bin must be positive");
  if (degrees.empty()) throw InsufficientLabels("no labeled vertices of the slot type");
  std::sort(degrees.begin(), degrees.end());
  std::size_t lo = degrees.front().second, hi = degrees.front().second;
  for (const auto& d : degrees) {
    lo = std::min(lo, d.second);
    hi = std::max(hi, d.second);
  }
  const double width = static_cast<double>(hi - lo) / static_cast<double>(bins);
  std::vector<std::vector<std::pair<std::string, std::size_t>>> out(bins);
  for (const auto& d : degrees) {
    std::size_t b = width > 0.0
                        ? static_cast<std::size_t>((d.second - lo) / width)
                        : 0;
    out[std::min(b, bins - 1)].push_back(d);
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (out[b].empty()) {
      throw InsufficientLabels(fmt::format(
          "degree bin {} [{:.1f}, {:.1f}) has no candidate labels", b,
          lo + b * width, lo + (b + 1) * width));
    }
    const double center = lo + (b + 0.5) * width;
    std::stable_sort(out[b].begin(), out[b].end(), [&](const auto& x, const auto& y) {
      return std::abs(x.second - center) < std::abs(y.second - center);
    });
    if (out[b].size() > per_bin) out[b].resize(per_bin);
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SweepRow> bench_degree_sweep(const QuerySpec& tmpl,
                                         const Schema& schema,
                                         std::span<const StreamEdge> stream,
                                         const SweepOptions& options) {
  auto slot = tmpl.query->label_slot();
  if (!slot) throw SpecError("degree sweep needs a template with a label slot");
  const auto& type = schema.name(tmpl.query->vertex(*slot).type);
  auto picks = pick_labels(label_degrees(stream, type), options.bins, options.per_bin);
  auto edges = resolve_all(schema, stream);

  RunOptions run = options.run;
  run.keep_matches = false;
  std::vector<SweepRow> rows;
  for (std::size_t b = 0; b < picks.size(); ++b) {
    for (const auto& [label, degree] : picks[b]) {
      auto result = run_query(instantiate(tmpl, label), schema, edges, run);
      std::vector<double> batch_times, edge_times;
      for (std::size_t i = 0; i < result.batches.size(); ++i) {
        const auto& m = result.batches[i];
        std::size_t n = m.edges_processed - (i ? result.batches[i - 1].edges_processed : 0);
        batch_times.push_back(m.batch_seconds);
        edge_times.push_back(m.batch_seconds / static_cast<double>(n));
      }
      rows.push_back({b, label, degree, median(batch_times), median(edge_times)});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "bin,label,degree,median_batch_seconds,median_edge_seconds\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{:.9f},{:.12f}\n", r.bin, r.label, r.degree,
                       r.median_batch_seconds, r.median_edge_seconds);
  }
}

std::vector<double> bin_medians(std::span<const SweepRow> rows) {
  std::map<std::size_t, std::vector<double>> by_bin;
  for (const auto& r : rows) by_bin[r.bin].push_back(r.median_edge_seconds);
  std::vector<double> out;
  for (auto& [bin, values] : by_bin) out.push_back(median(std::move(values)));
  return out;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("spearman needs two equal-length samples of size >= 2");
  }
  auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace sjstream
