#include "sjstream/streamio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <variant>

#include <fmt/format.h>

namespace sjstream {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Whitespace tokenizer with double-quoted runs ("New York" stays whole).
std::vector<std::string> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  bool have = false;
  for (char c : line) {
    if (c == '"') {
      in_quotes = !in_quotes;
      have = true;
    } else if (!in_quotes && (c == ' ' || c == '\t' || c == '\r')) {
      if (have) out.push_back(std::move(cur));
      cur.clear();
      have = false;
    } else {
      cur += c;
      have = true;
    }
  }
  if (in_quotes) throw ParseError(line_no, line.size(), "unterminated quote");
  if (have) out.push_back(std::move(cur));
  return out;
}

void check_header(const std::string& line, std::string_view expected,
                  std::size_t line_no) {
  auto tag = expected.substr(0, expected.find(' '));
  if (line.rfind(tag, 0) == 0 && trim(line) != expected) {
    throw ParseError(line_no, 1,
                     fmt::format("unsupported header '{}', expected '{}'",
                                 trim(line), expected));
  }
}

}  // namespace

EdgeStreamReader::EdgeStreamReader(std::istream& in) : in_(in) {}

StreamEdge parse_edge_line(const std::string& line, std::size_t line_no) {
  auto fields = split(line, '|');
  if (fields.size() != 8) {
    throw ParseError(line_no, 1,
                     fmt::format("expected 8 '|'-separated fields, found {}",
                                 fields.size()));
  }
  std::size_t column = 1;
  auto col_of = [&](std::size_t field) {
    std::size_t c = 1;
    for (std::size_t i = 0; i < field; ++i) c += fields[i].size() + 1;
    return c;
  };
  StreamEdge e;
  auto ts = parse_number<Timestamp>(trim(fields[0]));
  if (!ts || *ts < 0) {
    throw ParseError(line_no, column,
                     fmt::format("bad timestamp '{}'", fields[0]));
  }
  e.timestamp = *ts;
  e.src_id = fields[1];
  e.src_type = fields[2];
  e.src_label = fields[3];
  e.dst_id = fields[4];
  e.dst_type = fields[5];
  e.dst_label = fields[6];
  e.edge_type = trim(fields[7]);
  const std::pair<std::size_t, const std::string*> required[] = {
      {1, &e.src_id}, {2, &e.src_type}, {4, &e.dst_id},
      {5, &e.dst_type}, {7, &e.edge_type}};
  for (auto [field, value] : required) {
    if (value->empty()) {
      throw ParseError(line_no, col_of(field),
                       fmt::format("field {} must not be empty", field + 1));
    }
  }
  return e;
}

std::optional<StreamEdge> EdgeStreamReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_ == 1) check_header(line, kEdgeStreamHeader, line_);
    if (trim(line).empty() || line.front() == '#') continue;
    return parse_edge_line(line, line_);
  }
  return std::nullopt;
}

std::vector<StreamEdge> parse_edge_stream(std::istream& in) {
  EdgeStreamReader reader(in);
  std::vector<StreamEdge> out;
  while (auto e = reader.next()) out.push_back(std::move(*e));
  return out;
}

std::vector<StreamEdge> read_edge_stream_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open edge stream '{}'", path));
  return parse_edge_stream(in);
}

void write_edge_stream(std::ostream& out, std::span<const StreamEdge> edges) {
  out << kEdgeStreamHeader << '\n';
  for (const auto& e : edges) {
    for (const std::string* f : {&e.src_id, &e.src_type, &e.src_label, &e.dst_id,
                                 &e.dst_type, &e.dst_label, &e.edge_type}) {
      if (f->find_first_of("|\n") != std::string::npos) {
        throw Error(fmt::format("field '{}' contains '|' or a newline", *f));
      }
    }
    out << e.timestamp << '|' << e.src_id << '|' << e.src_type << '|'
        << e.src_label << '|' << e.dst_id << '|' << e.dst_type << '|'
        << e.dst_label << '|' << e.edge_type << '\n';
  }
}

void write_edge_stream_file(const std::string& path,
                            std::span<const StreamEdge> edges) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  write_edge_stream(out, edges);
}

void register_stream_types(Schema& schema, std::span<const StreamEdge> edges) {
  for (const auto& e : edges) {
    auto a = schema.add_vertex_type(e.src_type);
    auto b = schema.add_vertex_type(e.dst_type);
    schema.add_edge_type(e.edge_type, a, b);
  }
}

EdgeInsert resolve(const Schema& schema, const StreamEdge& e) {
  EdgeInsert out;
  out.src = {e.src_id, schema.vertex_type(e.src_type), e.src_label};
  out.dst = {e.dst_id, schema.vertex_type(e.dst_type), e.dst_label};
  out.type = schema.edge_type(e.edge_type);
  out.timestamp = e.timestamp;
  return out;
}

std::vector<EdgeInsert> resolve_all(const Schema& schema,
                                    std::span<const StreamEdge> edges) {
  std::vector<EdgeInsert> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.push_back(resolve(schema, e));
  return out;
}

QuerySpec parse_query_spec(std::istream& in, Schema& schema) {
  auto query = std::make_shared<QueryGraph>();
  struct LeafDecl {
    std::string name;
    std::vector<std::string> edges;
    std::size_t line;
  };
  struct JoinDecl {
    std::string name, left, right;
    std::optional<bool> ordered;
    std::size_t line;
  };
  std::vector<std::variant<LeafDecl, JoinDecl>> nodes;
  std::optional<Timestamp> window;
  QuerySpec spec;

  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) -> SpecError {
    return SpecError(fmt::format("query spec line {}: {}", line_no, why));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      try {
        check_header(line, kQuerySpecHeader, line_no);
      } catch (const ParseError& e) {
        throw SpecError(e.what());
      }
    }
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<std::string> tok;
    try {
      tok = tokenize(body, line_no);
    } catch (const ParseError& e) {
      throw SpecError(e.what());
    }
    const auto& kw = tok[0];
    auto number = [&](std::size_t i) -> std::int64_t {
      if (tok.size() != 2) throw fail(fmt::format("'{}' takes one value", kw));
      auto v = parse_number<std::int64_t>(tok[i]);
      if (!v || *v < 0) throw fail(fmt::format("bad number '{}'", tok[i]));
      return *v;
    };
    try {
      if (kw == "window") {
        window = number(1);
        if (*window <= 0) throw fail("window must be positive");
      } else if (kw == "prune_interval") {
        spec.prune_interval = static_cast<std::size_t>(number(1));
      } else if (kw == "disorder_slack") {
        spec.disorder_slack = number(1);
      } else if (kw == "vertex") {
        if (tok.size() < 3) throw fail("vertex needs a name and a type");
        QueryVertex v;
        v.name = tok[1];
        v.type = schema.add_vertex_type(tok[2]);
        for (std::size_t i = 3; i < tok.size(); ++i) {
          if (tok[i] == "event") {
            v.is_event = true;
          } else if (tok[i].rfind("label=", 0) == 0) {
            auto value = tok[i].substr(6);
            if (value == "?") {
              v.label_slot = true;
            } else if (value.empty()) {
              throw fail("empty label");
            } else {
              v.label = value;
            }
          } else {
            throw fail(fmt::format("unknown vertex attribute '{}'", tok[i]));
          }
        }
        query->add_vertex(std::move(v));
      } else if (kw == "edge") {
        if (tok.size() != 5) throw fail("edge needs: name from to type");
        auto a = query->find_vertex(tok[2]);
        auto b = query->find_vertex(tok[3]);
        if (!a || !b) throw fail("edge references an undeclared vertex");
        auto t = schema.add_edge_type(tok[4], query->vertex(*a).type,
                                      query->vertex(*b).type);
        query->add_edge(tok[1], *a, *b, t);
      } else if (kw == "leaf") {
        if (tok.size() < 3) throw fail("leaf needs a name and at least one edge");
        nodes.emplace_back(LeafDecl{tok[1], {tok.begin() + 2, tok.end()}, line_no});
      } else if (kw == "join") {
        if (tok.size() != 4 && tok.size() != 5) {
          throw fail("join needs: name left right [ordered|unordered]");
        }
        JoinDecl j{tok[1], tok[2], tok[3], std::nullopt, line_no};
        if (tok.size() == 5) {
          if (tok[4] == "ordered") {
            j.ordered = true;
          } else if (tok[4] == "unordered") {
            j.ordered = false;
          } else {
            throw fail(fmt::format("unknown join flag '{}'", tok[4]));
          }
        }
        nodes.emplace_back(std::move(j));
      } else {
        throw fail(fmt::format("unknown directive '{}'", kw));
      }
    } catch (const SchemaViolation& e) {
      throw fail(e.what());
    } catch (const SpecError& e) {
      if (std::string(e.what()).rfind("query spec line", 0) == 0) throw;
      throw fail(e.what());
    }
  }

  if (!window) throw SpecError("query spec has no 'window' (it is mandatory)");
  if (query->vertex_count() == 0) throw SpecError("query spec declares no vertices");
  if (nodes.empty()) throw SpecError("query spec declares no SJ-Tree nodes");

  auto tree = std::make_shared<SJTree>(query, *window);
  for (const auto& decl : nodes) {
    if (const auto* leaf = std::get_if<LeafDecl>(&decl)) {
      line_no = leaf->line;
      if (tree->find_node(leaf->name)) throw fail("duplicate node name " + leaf->name);
      std::vector<QEdgeId> edges;
      for (const auto& name : leaf->edges) {
        auto e = query->find_edge(name);
        if (!e) throw fail(fmt::format("leaf '{}' uses unknown edge '{}'", leaf->name, name));
        edges.push_back(*e);
      }
      tree->add_leaf(leaf->name, std::move(edges));
    } else {
      const auto& j = std::get<JoinDecl>(decl);
      line_no = j.line;
      if (tree->find_node(j.name)) throw fail("duplicate node name " + j.name);
      auto l = tree->find_node(j.left);
      auto r = tree->find_node(j.right);
      if (!l || !r) throw fail(fmt::format("join '{}' references an undeclared child", j.name));
      try {
        tree->add_join(j.name, *l, *r, j.ordered);
      } catch (const SpecError& e) {
        throw fail(e.what());
      }
    }
  }
  tree->finalize();
  auto report = validate_sjtree(*tree);
  if (!report.ok()) {
    std::string detail;
    for (const auto& v : report.violations) {
      auto name = v.node < tree->nodes().size() ? tree->node(v.node).name
                                                : std::string("?");
      detail += fmt::format("\n  [{}] node '{}': {}", v.check, name, v.detail);
    }
    throw SpecError("SJ-Tree validation failed:" + detail);
  }
  spec.query = query;
  spec.tree = tree;
  spec.window = *window;
  return spec;
}

QuerySpec read_query_spec_file(const std::string& path, Schema& schema) {
  std::ifstream in(path);
  if (!in) throw SpecError(fmt::format("cannot open query spec '{}'", path));
  return parse_query_spec(in, schema);
}

QuerySpec instantiate(const QuerySpec& spec, const std::string& label,
                      std::optional<QVertexId> vertex) {
  auto target = vertex ? vertex : spec.query->label_slot();
  if (!target) throw SpecError("query has no label slot to instantiate");
  auto query = std::make_shared<QueryGraph>(*spec.query);
  query->set_label(*target, label);
  QuerySpec out = spec;
  out.query = query;
  out.tree = std::make_shared<SJTree>(spec.tree->rebind(query));
  return out;
}

// ---------------------------------------------------------------------------
// Generator

void GeneratorConfig::validate() const {
  if (total_edges == 0) throw ConfigError("total_edges must be positive");
  if (event_type.empty()) throw ConfigError("event_type is required");
  if (relations.empty()) throw ConfigError("at least one relation is required");
  if (!(zipf_exponent >= 0.0)) throw ConfigError("zipf_exponent must be >= 0");
  if (timestamp_step <= 0) throw ConfigError("timestamp_step must be positive");
  if (start_time < 0) throw ConfigError("start_time must be non-negative");
  if (events_per_tick == 0) throw ConfigError("events_per_tick must be positive");
  if (burst_every > 0 && burst_size == 0) {
    throw ConfigError("burst_size must be positive");
  }
  for (const auto& p : vertex_types) {
    if (p.size == 0) {
      throw ConfigError(fmt::format("population of '{}' must be positive", p.type));
    }
  }
  for (const auto& r : relations) {
    if (r.feature_type == event_type) {
      throw ConfigError(fmt::format("relation '{}' links {} to itself",
                                    r.edge_type, event_type));
    }
    auto it = std::find_if(vertex_types.begin(), vertex_types.end(),
                           [&](const Population& p) { return p.type == r.feature_type; });
    if (it == vertex_types.end()) {
      throw ConfigError(fmt::format("relation '{}' uses feature type '{}' with no population",
                                    r.edge_type, r.feature_type));
    }
  }
  if (!planted_degrees.empty()) {
    auto it = std::find_if(relations.begin(), relations.end(),
                           [&](const Relation& r) { return r.feature_type == planted_type; });
    if (it == relations.end()) {
      throw ConfigError(fmt::format("planted_type '{}' is not a relation's feature type",
                                    planted_type));
    }
  }
}

GeneratorConfig parse_generator_config(std::istream& in) {
  GeneratorConfig c;
  c.vertex_types.clear();
  std::string line;
  std::size_t line_no = 0;
  auto bad = [&](const std::string& why) {
    return ConfigError(fmt::format("generator config line {}: {}", line_no, why));
  };
  auto to_size = [&](const std::string& v) {
    auto n = parse_number<std::size_t>(trim(v));
    if (!n) throw bad(fmt::format("bad integer '{}'", v));
    return *n;
  };
  auto to_i64 = [&](const std::string& v) {
    auto n = parse_number<std::int64_t>(trim(v));
    if (!n) throw bad(fmt::format("bad integer '{}'", v));
    return *n;
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) throw bad("expected key=value");
    auto key = trim(body.substr(0, eq));
    auto value = trim(body.substr(eq + 1));
    if (key == "seed") {
      c.seed = to_size(value);
    } else if (key == "total_edges") {
      c.total_edges = to_size(value);
    } else if (key == "event_type") {
      c.event_type = value;
    } else if (key == "vertex_types") {
      c.vertex_types.clear();
      for (const auto& item : split(value, ',')) {
        auto parts = split(item, ':');
        if (parts.size() != 2) throw bad(fmt::format("bad population '{}'", item));
        c.vertex_types.push_back({trim(parts[0]), to_size(parts[1])});
      }
    } else if (key == "edge_types") {
      c.relations.clear();
      for (const auto& item : split(value, ',')) {
        auto parts = split(item, ':');
        if (parts.size() != 2) throw bad(fmt::format("bad relation '{}'", item));
        c.relations.push_back({trim(parts[0]), trim(parts[1])});
      }
    } else if (key == "zipf_exponent") {
      try {
        std::size_t used = 0;
        c.zipf_exponent = std::stod(value, &used);
        if (used != value.size()) throw bad("bad number");
      } catch (const std::logic_error&) {
        throw bad(fmt::format("bad number '{}'", value));
      }
    } else if (key == "max_degree") {
      c.max_degree = to_size(value);
    } else if (key == "start_time") {
      c.start_time = to_i64(value);
    } else if (key == "timestamp_step") {
      c.timestamp_step = to_i64(value);
    } else if (key == "events_per_tick") {
      c.events_per_tick = to_size(value);
    } else if (key == "burst_every") {
      c.burst_every = to_size(value);
    } else if (key == "burst_size") {
      c.burst_size = to_size(value);
    } else if (key == "planted_type") {
      c.planted_type = value;
    } else if (key == "planted_degrees") {
      c.planted_degrees.clear();
      if (!value.empty()) {
        for (const auto& item : split(value, ',')) c.planted_degrees.push_back(to_size(item));
      }
    } else {
      throw bad(fmt::format("unknown key '{}'", key));
    }
  }
  c.validate();
  return c;
}

GeneratorConfig read_generator_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open generator config '{}'", path));
  return parse_generator_config(in);
}

std::string feature_key(const std::string& type, std::size_t index) {
  return fmt::format("{}_{}", type, index);
}

std::string planted_key(const std::string& type, std::size_t index) {
  return fmt::format("{}_hot{}", type, index);
}

namespace {

// mt19937_64's output sequence is fixed by the standard; the helpers below
// avoid <random> distributions, whose algorithms are implementation-defined.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double exponent, std::size_t cap)
      : cap_(cap), load_(n, 0) {
    cumulative_.reserve(n);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      total += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cumulative_.push_back(total);
    }
  }

  std::size_t draw(PortableRng& rng) {
    double x = rng.unit() * cumulative_.back();
    auto r = static_cast<std::size_t>(
        std::upper_bound(cumulative_.begin(), cumulative_.end(), x) -
        cumulative_.begin());
    r = std::min(r, load_.size() - 1);
    if (cap_ > 0) {
      // Saturated features hand the draw to the next rank with room.
      for (std::size_t probe = 0; load_[r] >= cap_; ++probe) {
        if (probe == load_.size()) {
          throw ConfigError("every feature reached max_degree; raise it or the population");
        }
        r = (r + 1) % load_.size();
      }
    }
    ++load_[r];
    return r;
  }

 private:
  std::size_t cap_;
  std::vector<double> cumulative_;
  std::vector<std::size_t> load_;
};

}  // namespace

std::vector<StreamEdge> generate_stream(const GeneratorConfig& config) {
  config.validate();
  PortableRng rng(config.seed);
  const std::size_t per_event = config.relations.size();
  const std::size_t full_events = config.total_edges / per_event;
  const std::size_t remainder = config.total_edges % per_event;
  const std::size_t events = full_events + (remainder > 0 ? 1 : 0);

  auto population = [&](const std::string& type) -> std::size_t {
    for (const auto& p : config.vertex_types) {
      if (p.type == type) return p.size;
    }
    return 0;
  };
  const std::size_t event_population = population(config.event_type);

  std::vector<ZipfSampler> samplers;
  for (const auto& r : config.relations) {
    samplers.emplace_back(population(r.feature_type), config.zipf_exponent,
                          config.max_degree);
  }

  // Planted hot spots take exact slots on the first relation of their type.
  std::size_t planted_relation = per_event;
  std::vector<std::ptrdiff_t> planted_of;
  if (!config.planted_degrees.empty()) {
    for (std::size_t j = 0; j < per_event; ++j) {
      if (config.relations[j].feature_type == config.planted_type) {
        planted_relation = j;
        break;
      }
    }
    std::size_t slots = full_events + (planted_relation < remainder ? 1 : 0);
    std::size_t wanted = 0;
    for (auto d : config.planted_degrees) wanted += d;
    if (wanted > slots) {
      throw ConfigError(fmt::format(
          "planted degrees need {} events but the stream has {}", wanted, slots));
    }
    std::vector<std::size_t> order(slots);
    for (std::size_t i = 0; i < slots; ++i) order[i] = i;
    for (std::size_t i = slots; i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    planted_of.assign(slots, -1);
    std::size_t next = 0;
    for (std::size_t h = 0; h < config.planted_degrees.size(); ++h) {
      for (std::size_t k = 0; k < config.planted_degrees[h]; ++k) {
        planted_of[order[next++]] = static_cast<std::ptrdiff_t>(h);
      }
    }
  }

  std::vector<StreamEdge> out;
  out.reserve(config.total_edges);
  std::size_t tick = 0;
  std::size_t in_tick = 0;
  for (std::size_t ev = 0; ev < events; ++ev) {
    std::size_t tick_capacity =
        (config.burst_every > 0 && tick % config.burst_every == config.burst_every - 1)
            ? config.burst_size
            : config.events_per_tick;
    if (in_tick >= tick_capacity) {
      ++tick;
      in_tick = 0;
    }
    ++in_tick;
    const Timestamp ts =
        config.start_time + static_cast<Timestamp>(tick) * config.timestamp_step;
    const std::size_t event_index =
        event_population > 0 ? ev % event_population : ev;
    const std::string event_key = feature_key(config.event_type, event_index);
    const std::size_t edges_here = (ev < full_events) ? per_event : remainder;
    for (std::size_t j = 0; j < edges_here; ++j) {
      const auto& rel = config.relations[j];
      std::string key;
      if (j == planted_relation && planted_of[ev] >= 0) {
        key = planted_key(rel.feature_type, static_cast<std::size_t>(planted_of[ev]));
      } else {
        key = feature_key(rel.feature_type, samplers[j].draw(rng));
      }
      out.push_back({ts, event_key, config.event_type, "", key, rel.feature_type,
                     key, rel.edge_type});
    }
  }
  return out;
}

}  // namespace sjstream
