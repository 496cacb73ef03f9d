#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sjstream/engine.hpp"
#include "sjstream/graph.hpp"
#include "sjstream/streamio.hpp"

namespace sjstream {

enum class EngineKind { kSJTree, kBaseline };

EngineKind parse_engine_kind(const std::string& name);

struct RunOptions {
  EngineKind engine = EngineKind::kSJTree;
  std::size_t batch_size = 1000;
  std::optional<std::size_t> prune_interval;  // overrides the spec
  std::optional<Timestamp> window;            // overrides the spec
  bool keep_matches = true;
  MatchSink sink;
  // Receives format_match_line output, produced outside the timed section.
  std::function<void(const std::string&)> line_sink;
};

struct BatchMetrics {
  std::size_t batch_index = 0;
  std::size_t edges_processed = 0;  // cumulative
  double batch_seconds = 0.0;
  std::size_t cumulative_matches = 0;
  std::size_t stored_total = 0;
  std::size_t peak_stored = 0;
  std::vector<std::size_t> stored_per_node;
};

struct RunResult {
  std::vector<std::string> node_names;
  std::vector<BatchMetrics> batches;
  std::vector<MatchRecord> matches;
  std::size_t match_count = 0;
  std::size_t edges = 0;
  std::size_t peak_stored = 0;
  double total_seconds = 0.0;

  double peak_batch_seconds() const;
  double edges_per_second() const;
};

/// Runs `spec` over already resolved edges on a fresh graph. Only query
/// processing (graph update, search, joins) is timed.
RunResult run_query(const QuerySpec& spec, const Schema& schema,
                    std::span<const EdgeInsert> edges, const RunOptions& options);

/// Header: batch_index,edges_processed,batch_seconds,cumulative_matches,
/// stored_total,peak_stored,stored_<node>... (one column per SJ-Tree node).
void write_metrics_csv(std::ostream& out, const RunResult& result);

struct SweepOptions {
  std::size_t bins = 10;
  std::size_t per_bin = 5;
  RunOptions run;
};

struct SweepRow {
  std::size_t bin = 0;
  std::string label;
  std::size_t degree = 0;
  double median_batch_seconds = 0.0;
  double median_edge_seconds = 0.0;
};

/// Labeled vertices of type `type` with their degree over the whole stream.
std::vector<std::pair<std::string, std::size_t>> label_degrees(
    std::span<const StreamEdge> stream, const std::string& type);

/// Splits the degree range into equal-width bins and picks up to `per_bin`
/// labels nearest each bin's center. Throws InsufficientLabels on an empty bin.
std::vector<std::vector<std::pair<std::string, std::size_t>>> pick_labels(
    std::vector<std::pair<std::string, std::size_t>> degrees, std::size_t bins,
    std::size_t per_bin);

/// Degree sweep over the template's label slot.
std::vector<SweepRow> bench_degree_sweep(const QuerySpec& tmpl,
                                         const Schema& schema,
                                         std::span<const StreamEdge> stream,
                                         const SweepOptions& options);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

/// Median per-edge time of each bin, in bin order.
std::vector<double> bin_medians(std::span<const SweepRow> rows);

double median(std::vector<double> values);
/// Spearman rank correlation, average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace sjstream
