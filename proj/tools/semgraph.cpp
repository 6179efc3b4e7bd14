/*
 * Copyright 2026 The semgraph Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// semgraph command-line tool: ingest edge lists, run algorithms, benchmark
// variants and compare result files.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "semgraph/generators.hpp"
#include "semgraph/semgraph.hpp"

namespace {

using namespace semgraph;
using json = nlohmann::json;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Settings shared by run and bench. Unset optionals fall back to the
// environment (SEMGRAPH_CACHE_BYTES, SEMGRAPH_WORKERS) and then to defaults.
struct Settings {
  std::optional<std::size_t> cache_bytes;
  std::optional<unsigned> workers;
  std::size_t page_size = kDefaultPageSize;

  double damping = 0.85;
  double threshold = 1e-3;
  std::uint64_t max_iterations = 1000;

  std::size_t num_bfs = 2;
  std::size_t batch = kMaxBatch;
  std::uint64_t seed = 0x5eed;
  std::size_t sources = 0;  // 0: algorithm default

  std::size_t hash_threshold = 1024;
  std::string order = "reverse";
  double hybrid_fraction = 0.10;

  double min_gain = 1e-6;
  double min_pass_gain = 1e-4;

  IoOptions io() const {
    IoOptions o = IoOptions::from_env();
    if (cache_bytes) o.cache_bytes = *cache_bytes;
    o.page_size = page_size;
    return o;
  }
  RunOptions run() const {
    RunOptions o = RunOptions::from_env();
    if (workers) o.workers = *workers;
    return o;
  }
};

struct Outcome {
  std::vector<std::string> lines;
  // Variant-independent summary; bench rows of one suite must agree on it.
  std::string key;
  json digest = json::object();
  json config = json::object();
  RunResult run;
  std::vector<vertex_id> communities;
};

// Evenly spaced ids; deterministic and spread over the id range.
std::vector<vertex_id> spaced_sources(std::uint64_t n, std::size_t count) {
  std::vector<vertex_id> out;
  if (n == 0) return out;
  count = std::min<std::uint64_t>(count, n);
  for (std::size_t i = 0; i < count; ++i) out.push_back(static_cast<vertex_id>(i * n / count));
  return out;
}

template <typename T>
std::vector<vertex_id> top_ids(const std::vector<T>& values, std::size_t k, bool round = false) {
  std::vector<vertex_id> ids(values.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  auto value = [&](vertex_id v) -> double {
    const double x = static_cast<double>(values[v]);
    if (!round || x == 0.0) return x;
    // Nine significant digits so float summation order does not reorder ties.
    const double scale = std::pow(10.0, 8 - std::floor(std::log10(std::abs(x))));
    return std::round(x * scale) / scale;
  };
  k = std::min(k, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(),
                    [&](vertex_id a, vertex_id b) {
                      const double va = value(a), vb = value(b);
                      return va != vb ? va > vb : a < b;
                    });
  ids.resize(k);
  return ids;
}

std::string join(const std::vector<vertex_id>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(ids[i]);
  }
  return s;
}

template <typename T>
std::string fnv_hex(const std::vector<T>& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (T x : values) {
    const auto u = static_cast<std::uint64_t>(x);
    for (int i = 0; i < 8; ++i) {
      h ^= (u >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- algorithm dispatch -----------------------------------------------------

const std::vector<std::string> kAlgorithms = {"pagerank", "diameter", "betweenness",
                                              "coreness", "triangles", "louvain"};

std::string default_variant(const std::string& algo) {
  if (algo == "pagerank") return "push";
  if (algo == "diameter") return "multi";
  if (algo == "betweenness") return "multi_async";
  if (algo == "coreness") return "pruned-hybrid";
  if (algo == "triangles") return to_string(TriangleLevel::restarted_hash);
  return "default";
}

PageRankVariant parse_pagerank(const std::string& v) {
  if (v == "push") return PageRankVariant::push;
  if (v == "pull") return PageRankVariant::pull;
  throw usage_error("unknown pagerank variant '" + v + "' (push, pull)");
}

BfsVariant parse_bfs(const std::string& v) {
  if (v == "uni") return BfsVariant::uni;
  if (v == "multi") return BfsVariant::multi;
  throw usage_error("unknown bfs variant '" + v + "' (uni, multi)");
}

BcVariant parse_bc(const std::string& v) {
  for (auto x : {BcVariant::uni, BcVariant::multi_sync, BcVariant::multi_async}) {
    if (v == to_string(x)) return x;
  }
  throw usage_error("unknown betweenness variant '" + v + "' (uni, multi_sync, multi_async)");
}

CorenessConfig parse_coreness(const std::string& v, const Settings& s) {
  CorenessConfig c;
  c.hybrid_fraction = s.hybrid_fraction;
  if (v == "plain") {
    c.pruning = false, c.hybrid_messaging = false;
  } else if (v == "pruned") {
    c.pruning = true, c.hybrid_messaging = false;
  } else if (v == "hybrid") {
    c.pruning = false, c.hybrid_messaging = true;
  } else if (v == "pruned-hybrid") {
    c.pruning = true, c.hybrid_messaging = true;
  } else {
    throw usage_error("unknown coreness variant '" + v + "' (plain, pruned, hybrid, pruned-hybrid)");
  }
  return c;
}

TriangleLevel parse_triangles(const std::string& v) {
  for (auto x : {TriangleLevel::scan, TriangleLevel::binsearch, TriangleLevel::hash, TriangleLevel::restarted_hash}) {
    if (v == to_string(x)) return x;
  }
  throw usage_error("unknown triangles variant '" + v +
                    "' (scan, scan+binsearch, scan+binsearch+hash, scan+revbinsearch+hash)");
}

EnumerationOrder parse_order(const std::string& v) {
  if (v == "forward") return EnumerationOrder::forward;
  if (v == "reverse") return EnumerationOrder::reverse;
  throw usage_error("unknown enumeration order '" + v + "' (forward, reverse)");
}

void check_variant(const std::string& algo, const std::string& variant, const Settings& s) {
  if (algo == "pagerank") parse_pagerank(variant);
  else if (algo == "diameter") parse_bfs(variant);
  else if (algo == "betweenness") parse_bc(variant);
  else if (algo == "coreness") parse_coreness(variant, s);
  else if (algo == "triangles") parse_triangles(variant), parse_order(s.order);
  else if (algo == "louvain") {
    if (variant != "default") throw usage_error("louvain has no variants");
  } else {
    throw usage_error("unknown algorithm '" + algo + "'");
  }
}

Outcome run_pagerank(IoEngine& io, const std::string& variant, const Settings& s) {
  PageRankConfig cfg{s.damping, s.threshold, s.max_iterations};
  auto r = pagerank(io, cfg, parse_pagerank(variant), s.run());
  Outcome o;
  o.config = {{"damping", cfg.damping}, {"delta_threshold", cfg.delta_threshold},
              {"max_iterations", cfg.max_iterations}};
  for (double x : r.ranks) o.lines.push_back(fmt(x));
  const auto top = top_ids(r.ranks, 20);
  o.key = "top20=" + join(top);
  o.digest = {{"top20", top}, {"iterations", r.iterations}};
  o.run = r.run;
  return o;
}

Outcome run_diameter(IoEngine& io, const std::string& variant, const Settings& s) {
  DiameterConfig cfg;
  cfg.num_bfs = s.num_bfs;
  cfg.batch = s.batch;
  cfg.variant = parse_bfs(variant);
  cfg.seed = s.seed;
  auto r = estimate_diameter(io, cfg, s.run());
  Outcome o;
  o.config = {{"num_bfs", cfg.num_bfs}, {"batch", cfg.batch}, {"seed", cfg.seed}};
  o.lines.push_back(std::to_string(r.estimate));
  o.key = "estimate=" + std::to_string(r.estimate);
  o.digest = {{"estimate", r.estimate}, {"sweeps", r.sweeps.size()}};
  o.run = r.run;
  return o;
}

// Eccentricities of evenly spaced sources; the bench "bfs" suite.
Outcome run_bfs_sweep(IoEngine& io, const std::string& variant, const Settings& s) {
  const auto sources = spaced_sources(io.graph().num_vertices(), s.sources ? s.sources : 32);
  auto r = bfs_eccentricities(io, sources, parse_bfs(variant), s.batch, s.run());
  Outcome o;
  std::vector<std::uint64_t> ecc;
  for (const auto& w : r.sweeps) ecc.push_back(w.eccentricity);
  for (auto e : ecc) o.lines.push_back(std::to_string(e));
  o.key = "ecc=" + fnv_hex(ecc);
  o.run = r.run;
  return o;
}

Outcome run_betweenness(IoEngine& io, const std::string& variant, const Settings& s) {
  const std::uint64_t n = io.graph().num_vertices();
  const auto sources = spaced_sources(n, s.sources ? s.sources : n);
  auto r = betweenness(io, sources, parse_bc(variant), s.batch, s.run());
  Outcome o;
  o.config = {{"sources", sources.size()}, {"batch", s.batch}};
  for (double x : r.centrality) o.lines.push_back(fmt(x));
  const auto top = top_ids(r.centrality, 20, true);
  o.key = "top20=" + join(top);
  o.digest = {{"top20", top}};
  o.run = r.run;
  return o;
}

Outcome run_coreness(IoEngine& io, const std::string& variant, const Settings& s) {
  const auto cfg = parse_coreness(variant, s);
  auto r = coreness(io, cfg, s.run());
  Outcome o;
  o.config = {{"pruning", cfg.pruning}, {"hybrid_messaging", cfg.hybrid_messaging},
              {"hybrid_fraction", cfg.hybrid_fraction}};
  for (auto c : r.core) o.lines.push_back(std::to_string(c));
  o.key = "k_max=" + std::to_string(r.k_max) + ";core=" + fnv_hex(r.core);
  o.digest = {{"k_max", r.k_max}, {"k_iterations", r.k_sequence.size()}};
  o.run = r.run;
  return o;
}

Outcome run_triangles(IoEngine& io, const std::string& variant, const Settings& s) {
  TriangleConfig cfg;
  cfg.level = parse_triangles(variant);
  cfg.hash_degree_threshold = s.hash_threshold;
  cfg.order = parse_order(s.order);
  auto r = triangle_count(io, cfg, s.run());
  Outcome o;
  o.config = {{"hash_degree_threshold", cfg.hash_degree_threshold}, {"order", s.order}};
  for (auto c : r.per_vertex) o.lines.push_back(std::to_string(c));
  o.key = "total=" + std::to_string(r.total);
  o.digest = {{"total", r.total}, {"comparisons", r.comparisons}};
  o.run = r.run;
  return o;
}

Outcome run_louvain(IoEngine& io, const Settings& s) {
  LouvainConfig cfg;
  cfg.min_modularity_gain = s.min_gain;
  cfg.min_pass_gain = s.min_pass_gain;
  auto r = louvain(io, cfg, s.run());
  Outcome o;
  o.config = {{"min_modularity_gain", cfg.min_modularity_gain}, {"min_pass_gain", cfg.min_pass_gain}};
  for (double q : r.level_modularity) o.lines.push_back(fmt(q));
  auto reps = r.assignment;
  std::sort(reps.begin(), reps.end());
  const auto communities = static_cast<std::size_t>(std::unique(reps.begin(), reps.end()) - reps.begin());
  o.key = "levels=" + std::to_string(r.level_modularity.size());
  o.digest = {{"modularity_per_level", r.level_modularity}, {"communities", communities}, {"rounds", r.rounds}};
  o.communities = std::move(r.assignment);
  o.run = r.run;
  return o;
}

Outcome dispatch(IoEngine& io, const std::string& algo, const std::string& variant, const Settings& s) {
  if (algo == "pagerank") return run_pagerank(io, variant, s);
  if (algo == "diameter") return run_diameter(io, variant, s);
  if (algo == "bfs") return run_bfs_sweep(io, variant, s);
  if (algo == "betweenness") return run_betweenness(io, variant, s);
  if (algo == "coreness") return run_coreness(io, variant, s);
  if (algo == "triangles") return run_triangles(io, variant, s);
  if (algo == "louvain") return run_louvain(io, s);
  throw usage_error("unknown algorithm '" + algo + "'");
}

struct Measured {
  Outcome outcome;
  IoStats stats;
  double wall_ms = 0;
};

// One run on a fresh engine, with the stats window reset just before it.
Measured measure(const GraphHandle& g, const std::string& algo, const std::string& variant, const Settings& s) {
  IoEngine io(g, s.io());
  io.reset_stats();
  const auto t0 = std::chrono::steady_clock::now();
  Measured m{dispatch(io, algo, variant, s), {}, 0};
  const auto t1 = std::chrono::steady_clock::now();
  m.stats = io.stats();
  m.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return m;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw io_error("write failed: " + path);
}

json stats_json(const IoStats& st) {
  json j = json::object();
  st.for_each_counter([&](const char* name, std::uint64_t v) { j[name] = v; });
  j["cache_hit_ratio"] = st.cache_hit_ratio();
  return j;
}

// ---- subcommands ------------------------------------------------------------

int cmd_ingest(const std::string& edges, const std::string& out, bool directed) {
  IngestOptions opts;
  opts.directed = directed;
  const auto g = ingest_edge_list_file(edges, out, opts);
  std::cout << "n=" << g.num_vertices() << " m=" << g.num_edges() << " directed=" << (g.directed() ? 1 : 0)
            << '\n';
  return 0;
}

int cmd_generate(const std::string& model, std::uint64_t n, std::uint64_t m, std::uint64_t per_vertex,
                 std::uint64_t seed, bool directed, const std::string& out) {
  EdgeList edges;
  if (model == "er") {
    edges = erdos_renyi(n, m, seed, directed);
  } else if (model == "ba") {
    edges = barabasi_albert(n, per_vertex, seed, directed);
  } else {
    throw usage_error("unknown model '" + model + "' (er, ba)");
  }
  std::ofstream os(out);
  if (!os) throw io_error("cannot write " + out);
  write_edge_list(os, edges);
  std::cout << "edges=" << edges.size() << '\n';
  return 0;
}

int cmd_run(const std::string& graph, const std::string& algo, std::string variant, const Settings& s,
            const std::string& stats_out, const std::string& result_out, const std::string& communities_out) {
  if (std::find(kAlgorithms.begin(), kAlgorithms.end(), algo) == kAlgorithms.end()) {
    throw usage_error("unknown algorithm '" + algo + "'");
  }
  if (variant.empty()) variant = default_variant(algo);
  check_variant(algo, variant, s);

  const auto g = open_graph(graph);
  const auto m = measure(g, algo, variant, s);
  const auto& o = m.outcome;

  if (!result_out.empty()) write_lines(result_out, o.lines);
  if (!communities_out.empty()) {
    std::vector<std::string> lines;
    for (auto c : o.communities) lines.push_back(std::to_string(c));
    write_lines(communities_out, lines);
  }

  const IoOptions io_opts = s.io();
  json config = o.config;
  config["cache_bytes"] = io_opts.cache_bytes;
  config["page_size"] = io_opts.page_size;
  config["workers"] = s.run().workers;

  json report = {{"algorithm", algo},
                 {"variant", variant},
                 {"config", config},
                 {"wall_time_ms", m.wall_ms},
                 {"stats", stats_json(m.stats)},
                 {"digest", o.digest},
                 {"supersteps", o.run.supersteps},
                 {"memory",
                  {{"engine_peak_bytes", o.run.memory.engine_peak_bytes},
                   {"program_state_bytes", o.run.memory.program_state_bytes},
                   {"cache_peak_bytes", o.run.memory.cache_peak_bytes}}},
                 {"result_path", result_out.empty() ? json(nullptr) : json(result_out)}};
  if (!stats_out.empty()) {
    std::ofstream os(stats_out);
    if (!os) throw io_error("cannot write " + stats_out);
    os << report.dump(2) << '\n';
  }
  std::cout << algo << ' ' << variant << ' ' << o.key << " wall_time_ms=" << fmt(m.wall_ms)
            << " bytes_read=" << m.stats.bytes_read_from_disk << " read_requests=" << m.stats.read_requests_issued
            << '\n';
  return 0;
}

int cmd_bench(const std::string& graph, const std::string& suite, const Settings& s, const std::string& out) {
  std::string algo;
  std::vector<std::string> variants;
  if (suite == "pagerank") {
    algo = "pagerank", variants = {"push", "pull"};
  } else if (suite == "bfs") {
    algo = "bfs", variants = {"uni", "multi"};
  } else if (suite == "bc") {
    algo = "betweenness", variants = {"uni", "multi_sync", "multi_async"};
  } else if (suite == "coreness") {
    algo = "coreness", variants = {"plain", "pruned", "hybrid", "pruned-hybrid"};
  } else if (suite == "triangles") {
    algo = "triangles";
    for (auto l : {TriangleLevel::scan, TriangleLevel::binsearch, TriangleLevel::hash, TriangleLevel::restarted_hash}) {
      variants.emplace_back(to_string(l));
    }
  } else {
    throw usage_error("unknown suite '" + suite + "' (pagerank, bfs, bc, coreness, triangles)");
  }

  Settings bs = s;
  if (suite == "bc" && bs.sources == 0) bs.sources = 32;
  const auto g = open_graph(graph);

  std::ostringstream csv;
  csv << "variant,wall_time_ms,bytes_read,read_requests,cache_hit_ratio,digest\n";
  for (const auto& v : variants) {
    const auto m = measure(g, algo, v, bs);
    csv << v << ',' << fmt(m.wall_ms) << ',' << m.stats.bytes_read_from_disk << ','
        << m.stats.read_requests_issued << ',' << fmt(m.stats.cache_hit_ratio()) << ',' << m.outcome.key << '\n';
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream os(out);
    if (!os) throw io_error("cannot write " + out);
    os << csv.str();
  }
  return 0;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

std::optional<double> as_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return x;
}

// Exit 0 when both files have the same line count and every numeric line
// differs by at most `tolerance` (non-numeric lines must match exactly).
int cmd_compare(const std::string& a, const std::string& b, double tolerance) {
  const auto la = read_lines(a);
  const auto lb = read_lines(b);
  if (la.size() != lb.size()) {
    std::cout << "line counts differ: " << la.size() << " vs " << lb.size() << '\n';
    return kExitFailure;
  }
  double worst = 0;
  std::size_t worst_line = 0, mismatches = 0;
  for (std::size_t i = 0; i < la.size(); ++i) {
    const auto x = as_number(la[i]), y = as_number(lb[i]);
    double d = 0;
    if (x && y) {
      d = std::abs(*x - *y);
    } else if (la[i] != lb[i]) {
      d = std::numeric_limits<double>::infinity();
    }
    if (d > tolerance) ++mismatches;
    if (d > worst) worst = d, worst_line = i + 1;
  }
  std::cout << "lines=" << la.size() << " max_abs_diff=" << fmt(worst);
  if (worst > 0) std::cout << " at_line=" << worst_line;
  std::cout << " tolerance=" << fmt(tolerance) << ' ' << (mismatches == 0 ? "OK" : "DIFFER") << '\n';
  return mismatches == 0 ? 0 : kExitFailure;
}

void add_engine_flags(CLI::App* cmd, Settings& s) {
  cmd->add_option("--cache-bytes", s.cache_bytes, "Page cache capacity (default: SEMGRAPH_CACHE_BYTES or 64 MiB)");
  cmd->add_option("--workers", s.workers, "Engine workers (default: SEMGRAPH_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--page-size", s.page_size, "Cache page size in bytes")->check(CLI::PositiveNumber);
  cmd->add_option("--damping", s.damping, "PageRank damping factor");
  cmd->add_option("--threshold", s.threshold, "PageRank delta threshold, relative to 1/n");
  cmd->add_option("--max-iterations", s.max_iterations, "PageRank iteration cap");
  cmd->add_option("--num-bfs", s.num_bfs, "Diameter: number of BFS sweeps");
  cmd->add_option("--batch", s.batch, "BFS/betweenness sources per multi-source run")
      ->check(CLI::Range(std::size_t{1}, kMaxBatch));
  cmd->add_option("--seed", s.seed, "Diameter: seed for the initial sources");
  cmd->add_option("--sources", s.sources, "Betweenness/BFS: number of evenly spaced sources (0: default)");
  cmd->add_option("--hash-threshold", s.hash_threshold, "Triangles: degree above which lists are hashed");
  cmd->add_option("--order", s.order, "Triangles: enumeration order (forward, reverse)");
  cmd->add_option("--hybrid-fraction", s.hybrid_fraction, "Coreness: point-to-point switch fraction");
  cmd->add_option("--min-gain", s.min_gain, "Louvain: minimum modularity gain per move");
  cmd->add_option("--min-pass-gain", s.min_pass_gain, "Louvain: minimum modularity gain per pass");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semgraph: semi-external graph analytics"};
  app.require_subcommand(1);

  std::string edges, out_name;
  bool directed = false;
  auto* ingest = app.add_subcommand("ingest", "Convert a text edge list into the on-disk graph format");
  ingest->add_option("edgelist", edges, "Edge list file")->required();
  ingest->add_option("-o,--output", out_name, "Output graph name")->required();
  ingest->add_flag("--directed", directed, "Treat edges as arcs");

  Settings settings;
  std::string graph, algo, variant, stats_out, result_out, communities_out;
  auto* run = app.add_subcommand("run", "Run one algorithm and report I/O statistics");
  run->add_option("graph", graph, "Graph name")->required();
  run->add_option("--algo", algo, "pagerank, diameter, betweenness, coreness, triangles or louvain")->required();
  run->add_option("--variant", variant, "Algorithm variant");
  run->add_option("--stats-out", stats_out, "Write the run report as JSON");
  run->add_option("--out", result_out, "Write results, one value per line");
  run->add_option("--communities-out", communities_out, "Louvain: write the community of each vertex");
  add_engine_flags(run, settings);

  std::string suite, bench_out;
  auto* bench = app.add_subcommand("bench", "Run every variant of a suite and print CSV");
  bench->add_option("graph", graph, "Graph name")->required();
  bench->add_option("--suite", suite, "pagerank, bfs, bc, coreness or triangles")->required();
  bench->add_option("--out", bench_out, "Write the CSV here instead of stdout");
  add_engine_flags(bench, settings);

  std::string file_a, file_b;
  double tolerance = 0.0;
  auto* compare = app.add_subcommand("compare", "Compare two result files line by line");
  compare->add_option("a", file_a, "First result file")->required();
  compare->add_option("b", file_b, "Second result file")->required();
  compare->add_option("--tolerance", tolerance, "Largest allowed absolute difference");

  std::string model = "er", gen_out;
  std::uint64_t gen_n = 0, gen_m = 0, per_vertex = 4, gen_seed = 1;
  bool gen_directed = false;
  auto* generate = app.add_subcommand("generate", "Write a random edge list");
  generate->add_option("--model", model, "er or ba");
  generate->add_option("-n", gen_n, "Vertices")->required();
  generate->add_option("-m", gen_m, "Edges (er)");
  generate->add_option("--per-vertex", per_vertex, "Edges per new vertex (ba)");
  generate->add_option("--seed", gen_seed, "Random seed");
  generate->add_flag("--directed", gen_directed, "Generate arcs");
  generate->add_option("-o,--output", gen_out, "Output edge list")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*ingest) return cmd_ingest(edges, out_name, directed);
    if (*run) return cmd_run(graph, algo, variant, settings, stats_out, result_out, communities_out);
    if (*bench) return cmd_bench(graph, suite, settings, bench_out);
    if (*compare) return cmd_compare(file_a, file_b, tolerance);
    if (*generate) return cmd_generate(model, gen_n, gen_m, per_vertex, gen_seed, gen_directed, gen_out);
  } catch (const usage_error& e) {
    std::cerr << "semgraph: " << e.what() << '\n';
    return kExitUsage;
  } catch (const semgraph::domain_error& e) {
    std::cerr << "semgraph: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "semgraph: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
