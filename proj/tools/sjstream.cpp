#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "sjstream/bench.hpp"
#include "sjstream/streamio.hpp"

namespace {

using namespace sjstream;

constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

struct Loaded {
  std::unique_ptr<Schema> schema = std::make_unique<Schema>();
  QuerySpec spec;
  std::vector<StreamEdge> stream;
};

Loaded load(const std::string& spec_path, const std::string& stream_path) {
  Loaded l;
  l.spec = read_query_spec_file(spec_path, *l.schema);
  l.stream = read_edge_stream_file(stream_path);
  register_stream_types(*l.schema, l.stream);
  l.schema->freeze();
  spdlog::info("loaded {} edges, query with {} vertices / {} edges",
               l.stream.size(), l.spec.query->vertex_count(), l.spec.query->edge_count());
  return l;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  return out;
}

void configure_logging() {
  const char* level = std::getenv("SJSTREAM_LOG");
  spdlog::set_default_logger(spdlog::stderr_logger_mt("sjstream"));
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"sjstream: continuous windowed subgraph matching over edge streams"};
  app.require_subcommand(1);

  std::string spec_path, stream_path, engine_name = "sjtree";
  std::size_t batch_size = 1000;
  std::optional<std::size_t> prune_interval;
  std::optional<Timestamp> window;
  std::string metrics_path, matches_path;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "run a query over an edge stream");
  run->add_option("spec", spec_path, "query spec file")->required();
  run->add_option("stream", stream_path, "edge stream file")->required();
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--engine", engine_name, "sjtree or baseline");
    cmd->add_option("--batch-size", batch_size, "edges per metrics batch");
    cmd->add_option("--prune-interval", prune_interval, "prune every N edges (0 = off)");
    cmd->add_option("--window", window, "time window, overrides the spec");
    cmd->add_option("--seed", seed, "seed for any sampling");
  };
  add_common(run);
  run->add_option("--metrics", metrics_path, "metrics CSV output");
  run->add_option("--matches", matches_path, "match output (default stdout)");
  std::string label;
  run->add_option("--label", label, "fills the template's label slot");

  std::string sweep_out;
  std::size_t bins = 10, per_bin = 5;
  auto* sweep = app.add_subcommand("bench-degree", "degree sweep over a template's label slot");
  sweep->add_option("spec", spec_path, "query template with label=?")->required();
  sweep->add_option("stream", stream_path, "edge stream file")->required();
  add_common(sweep);
  sweep->add_option("--bins", bins, "degree bins");
  sweep->add_option("--per-bin", per_bin, "labels per bin");
  sweep->add_option("--out", sweep_out, "CSV output (default stdout)");

  std::string config_path, out_path;
  auto* gen = app.add_subcommand("generate", "write a synthetic edge stream");
  gen->add_option("config", config_path, "generator config (key=value)")->required();
  gen->add_option("out", out_path, "output stream file")->required();
  gen->add_option("--seed", seed, "overrides the config seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto config = read_generator_config_file(config_path);
      if (seed) config.seed = *seed;
      auto edges = generate_stream(config);
      write_edge_stream_file(out_path, edges);
      spdlog::info("wrote {} edges to {}", edges.size(), out_path);
      return 0;
    }

    RunOptions options;
    options.engine = parse_engine_kind(engine_name);
    options.batch_size = batch_size;
    options.prune_interval = prune_interval;
    options.window = window;
    auto loaded = load(spec_path, stream_path);

    if (*run) {
      if (!label.empty()) loaded.spec = instantiate(loaded.spec, label);
      auto edges = resolve_all(*loaded.schema, loaded.stream);
      std::ofstream match_file;
      std::ostream* match_out = &std::cout;
      if (!matches_path.empty()) {
        match_file = open_out(matches_path);
        match_out = &match_file;
      }
      options.keep_matches = false;
      options.line_sink = [&](const std::string& line) { *match_out << line << '\n'; };
      auto result = run_query(loaded.spec, *loaded.schema, edges, options);
      if (!metrics_path.empty()) {
        auto f = open_out(metrics_path);
        write_metrics_csv(f, result);
      }
      spdlog::info("{} matches, {} edges in {:.3f}s ({:.0f} edges/s)", result.match_count,
                   result.edges, result.total_seconds, result.edges_per_second());
      return 0;
    }

    SweepOptions sopts;
    sopts.bins = bins;
    sopts.per_bin = per_bin;
    sopts.run = options;
    auto rows = bench_degree_sweep(loaded.spec, *loaded.schema, loaded.stream, sopts);
    if (sweep_out.empty()) {
      write_sweep_csv(std::cout, rows);
    } else {
      auto f = open_out(sweep_out);
      write_sweep_csv(f, rows);
    }
    auto medians = bin_medians(rows);
    std::vector<double> idx;
    for (std::size_t i = 0; i < medians.size(); ++i) idx.push_back(static_cast<double>(i));
    spdlog::info("spearman(bin, median per-edge time) = {:.3f}", spearman(idx, medians));
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitInput;
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
