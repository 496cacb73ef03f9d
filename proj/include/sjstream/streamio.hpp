#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sjstream/graph.hpp"
#include "sjstream/query.hpp"

namespace sjstream {

inline constexpr const char* kEdgeStreamHeader = "#sjstream-edges v1";
inline constexpr const char* kQuerySpecHeader = "#sjstream-query v1";

/// Edge as written in a stream file; names are resolved against a Schema
/// before insertion.
struct StreamEdge {
  Timestamp timestamp = 0;
  std::string src_id;
  std::string src_type;
  std::string src_label;
  std::string dst_id;
  std::string dst_type;
  std::string dst_label;
  std::string edge_type;

  friend bool operator==(const StreamEdge&, const StreamEdge&) = default;
};

/// Pulls edges one line at a time from a pipe-delimited stream:
///   timestamp|src_id|src_type|src_label|dst_id|dst_type|dst_label|edge_type
/// Blank lines and '#' comments are skipped; an optional first-line header
/// pins the format version.
class EdgeStreamReader {
 public:
  explicit EdgeStreamReader(std::istream& in);
  std::optional<StreamEdge> next();
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::vector<StreamEdge> parse_edge_stream(std::istream& in);
std::vector<StreamEdge> read_edge_stream_file(const std::string& path);
StreamEdge parse_edge_line(const std::string& line, std::size_t line_no);

void write_edge_stream(std::ostream& out, std::span<const StreamEdge> edges);
void write_edge_stream_file(const std::string& path,
                            std::span<const StreamEdge> edges);

/// Registers every vertex type and relation used by `edges`. Throws
/// SchemaViolation on a relation used between two different type pairs.
void register_stream_types(Schema& schema, std::span<const StreamEdge> edges);
EdgeInsert resolve(const Schema& schema, const StreamEdge& e);
std::vector<EdgeInsert> resolve_all(const Schema& schema,
                                    std::span<const StreamEdge> edges);

/// A parsed query specification.
struct QuerySpec {
  std::shared_ptr<const QueryGraph> query;
  std::shared_ptr<const SJTree> tree;
  Timestamp window = 0;
  std::size_t prune_interval = 0;
  Timestamp disorder_slack = 0;
};

/// Parses the line-oriented query format:
///
///   #sjstream-query v1
///   window 10
///   prune_interval 1000          (optional)
///   disorder_slack 0             (optional)
///   vertex e1 article event
///   vertex f keyword label=fire  (label=? marks a slot to fill per run)
///   edge q1 e1 f has_kw
///   leaf L1 q1 [q2 ...]
///   join R L1 L2 [ordered|unordered]
///
/// Types are registered into `schema`. Cut subgraphs are derived. The tree is
/// validated; any failure is a SpecError naming the offending node or line.
QuerySpec parse_query_spec(std::istream& in, Schema& schema);
QuerySpec read_query_spec_file(const std::string& path, Schema& schema);

/// Copy of `spec` with its label slot (or `vertex`, when given) set to
/// `label`.
QuerySpec instantiate(const QuerySpec& spec, const std::string& label,
                      std::optional<QVertexId> vertex = std::nullopt);

/// Synthetic event-centric k-partite stream.
///
/// Each event is a fresh vertex of `event_type` that emits one edge per
/// relation in `relations`, all carrying the event's tick timestamp. The
/// feature on the other side is drawn from a Zipf law over that feature
/// type's population, capped at max_degree. Planted hot spots are extra
/// features of `planted_type` with exact degrees, for degree sweeps.
struct GeneratorConfig {
  struct Population {
    std::string type;
    std::size_t size = 0;
  };
  struct Relation {
    std::string edge_type;
    std::string feature_type;
  };

  std::uint64_t seed = 1;
  std::size_t total_edges = 1000;
  std::string event_type = "article";
  std::vector<Population> vertex_types;  // feature populations (+ events)
  std::vector<Relation> relations;
  double zipf_exponent = 1.0;
  std::size_t max_degree = 0;  // 0 = uncapped
  Timestamp start_time = 0;
  Timestamp timestamp_step = 1;
  std::size_t events_per_tick = 1;
  std::size_t burst_every = 0;  // every n-th tick is a burst; 0 = never
  std::size_t burst_size = 1;
  std::string planted_type;
  std::vector<std::size_t> planted_degrees;

  void validate() const;
};

/// Reads `key=value` lines. List values are comma separated; populations
/// and relations use `name:value` items.
GeneratorConfig parse_generator_config(std::istream& in);
GeneratorConfig read_generator_config_file(const std::string& path);

/// Deterministic: identical configs give identical streams, byte for byte.
std::vector<StreamEdge> generate_stream(const GeneratorConfig& config);

/// Vertex key the generator uses for feature `index` of `type`, and for the
/// planted hot spot `index`.
std::string feature_key(const std::string& type, std::size_t index);
std::string planted_key(const std::string& type, std::size_t index);

}  // namespace sjstream
