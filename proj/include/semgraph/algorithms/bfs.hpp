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
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "semgraph/engine.hpp"

namespace semgraph {

inline constexpr std::uint64_t kUnreachable = std::numeric_limits<std::uint64_t>::max();
inline constexpr std::size_t kMaxBatch = 64;

enum class BfsVariant : std::uint8_t { uni, multi };

inline const char* to_string(BfsVariant v) { return v == BfsVariant::uni ? "uni" : "multi"; }

struct Sweep {
  vertex_id source = 0;
  std::uint64_t eccentricity = 0;
  vertex_id farthest = 0;  // smallest id at maximum distance
};

struct SweepResult {
  std::vector<Sweep> sweeps;
  RunResult run;  // accumulated over every engine run
};

namespace detail {

inline void accumulate(RunResult& into, const RunResult& r) {
  into.supersteps += r.supersteps;
  into.stats += r.stats;
  into.memory.engine_peak_bytes = std::max(into.memory.engine_peak_bytes, r.memory.engine_peak_bytes);
  into.memory.program_state_bytes = std::max(into.memory.program_state_bytes, r.memory.program_state_bytes);
  into.memory.cache_peak_bytes = std::max(into.memory.cache_peak_bytes, r.memory.cache_peak_bytes);
}

// Label-correcting BFS; min-combined distances make async runs agree with sync.
class UniBfs {
 public:
  using message_type = std::uint64_t;
  static void combine(std::uint64_t& a, const std::uint64_t& b) { a = std::min(a, b); }

  UniBfs(std::uint64_t n, vertex_id source) : dist_(n, kUnreachable), dirty_(n, 0) {
    dist_[source] = 0;
    dirty_[source] = 1;
  }

  void on_activate(vertex_id v, Context<UniBfs>& ctx) {
    if (!dirty_[v]) return;
    dirty_[v] = 0;
    ctx.request(Direction::out);
  }
  void on_adjacency(vertex_id v, vertex_id, Direction, std::span<const vertex_id> list, Context<UniBfs>& ctx) {
    if (!list.empty()) ctx.multicast(list, dist_[v] + 1);
  }
  void on_message(vertex_id v, std::uint32_t, const std::uint64_t& d, Context<UniBfs>&) {
    if (d < dist_[v]) {
      dist_[v] = d;
      dirty_[v] = 1;
    }
  }

  std::size_t state_bytes() const { return dist_.capacity() * 8 + dirty_.capacity(); }
  std::size_t state_bytes_per_vertex() const { return 9; }

  std::vector<std::uint64_t>& distances() { return dist_; }

 private:
  std::vector<std::uint64_t> dist_;
  std::vector<std::uint8_t> dirty_;
};

// Up to 64 concurrent traversals; bit i of a vertex's bitmap says traversal i
// has reached it. Level-synchronous, so always run in sync mode.
class MultiBfs {
 public:
  using message_type = std::uint64_t;
  static void combine(std::uint64_t& a, const std::uint64_t& b) { a |= b; }

  MultiBfs(std::uint64_t n, std::span<const vertex_id> sources)
      : seen_(n, 0), pending_(n, 0), packed_(sources.size(), 0) {
    for (std::size_t i = 0; i < sources.size(); ++i) {
      seen_[sources[i]] |= bit(i);
      pending_[sources[i]] |= bit(i);
      packed_[i] = pack(0, sources[i]);
    }
  }

  void on_activate(vertex_id v, Context<MultiBfs>& ctx) {
    if (pending_[v] != 0) ctx.request(Direction::out);
  }
  void on_adjacency(vertex_id v, vertex_id, Direction, std::span<const vertex_id> list, Context<MultiBfs>& ctx) {
    const std::uint64_t paths = pending_[v];
    pending_[v] = 0;
    if (!list.empty()) ctx.multicast(list, paths);
  }
  void on_message(vertex_id v, std::uint32_t, const std::uint64_t& paths, Context<MultiBfs>& ctx) {
    const std::uint64_t fresh = paths & ~seen_[v];
    if (fresh == 0) return;
    seen_[v] |= fresh;
    pending_[v] |= fresh;
    // Farthest vertex per traversal: a max over (depth, -id).
    const auto value = static_cast<std::int64_t>(pack(ctx.superstep(), v));
    for (std::uint64_t f = fresh; f != 0; f &= f - 1) {
      ctx.reduce_int(kKeyBase + std::countr_zero(f), ReduceOp::max, value);
    }
  }
  void end_superstep(BarrierContext& b) {
    for (std::size_t i = 0; i < packed_.size(); ++i) {
      packed_[i] = std::max(packed_[i], static_cast<std::uint64_t>(
                                            std::max<std::int64_t>(0, b.reduced_int(kKeyBase + i, ReduceOp::max))));
    }
  }

  std::size_t state_bytes() const { return (seen_.capacity() + pending_.capacity()) * 8 + packed_.capacity() * 8; }
  std::size_t state_bytes_per_vertex() const { return 16; }

  Sweep sweep(std::size_t i, vertex_id source) const {
    return {source, packed_[i] >> 32, 0xffffffffull - (packed_[i] & 0xffffffffull)};
  }

 private:
  static constexpr std::uint64_t kKeyBase = 1000;
  static std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }
  static std::uint64_t pack(std::uint64_t depth, vertex_id v) { return (depth << 32) | (0xffffffffull - v); }

  std::vector<std::uint64_t> seen_;
  std::vector<std::uint64_t> pending_;
  std::vector<std::uint64_t> packed_;
};

inline void check_source(const GraphHandle& g, vertex_id s) {
  if (s >= g.num_vertices()) throw out_of_range_error("source " + std::to_string(s) + " out of range");
}

}  // namespace detail

struct BfsResult {
  std::vector<std::uint64_t> distances;  // kUnreachable where not reached
  RunResult run;
};

/// Hop distances from `source` along out-edges.
inline BfsResult bfs_distances(IoEngine& io, vertex_id source, const RunOptions& opts = RunOptions::from_env()) {
  detail::check_source(io.graph(), source);
  detail::UniBfs prog(io.graph().num_vertices(), source);
  BfsResult r;
  r.run = run(io, prog, Activation::of({source}), opts);
  r.distances = std::move(prog.distances());
  return r;
}

/// Eccentricity and farthest vertex for each source. `uni` runs one BFS per
/// source; `multi` runs them `batch` at a time sharing adjacency reads.
inline SweepResult bfs_eccentricities(IoEngine& io, std::span<const vertex_id> sources, BfsVariant variant,
                                      std::size_t batch = kMaxBatch, RunOptions opts = RunOptions::from_env()) {
  const auto& g = io.graph();
  for (vertex_id s : sources) detail::check_source(g, s);
  SweepResult out;
  if (variant == BfsVariant::uni) {
    for (vertex_id s : sources) {
      auto r = bfs_distances(io, s, opts);
      Sweep sw{s, 0, s};
      for (vertex_id v = 0; v < r.distances.size(); ++v) {
        if (r.distances[v] != kUnreachable && r.distances[v] > sw.eccentricity) {
          sw.eccentricity = r.distances[v];
          sw.farthest = v;
        }
      }
      out.sweeps.push_back(sw);
      detail::accumulate(out.run, r.run);
    }
    return out;
  }
  if (batch == 0 || batch > kMaxBatch) throw error("batch must be in [1, 64]");
  if (g.num_vertices() > 0xffffffffull) throw error("multi-source BFS supports at most 2^32 vertices");
  opts.mode = Mode::sync;
  for (std::size_t first = 0; first < sources.size(); first += batch) {
    const auto chunk = sources.subspan(first, std::min(batch, sources.size() - first));
    detail::MultiBfs prog(g.num_vertices(), chunk);
    std::vector<vertex_id> active(chunk.begin(), chunk.end());
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
    detail::accumulate(out.run, run(io, prog, Activation::of(active), opts));
    for (std::size_t i = 0; i < chunk.size(); ++i) out.sweeps.push_back(prog.sweep(i, chunk[i]));
  }
  return out;
}

struct DiameterConfig {
  std::size_t num_bfs = 2;
  std::size_t batch = 32;
  BfsVariant variant = BfsVariant::uni;
  std::uint64_t seed = 0x5eed;
};

struct DiameterResult {
  std::uint64_t estimate = 0;
  std::vector<Sweep> sweeps;
  RunResult run;
};

/// Lower bound on the diameter from repeated BFS sweeps. The first source is
/// the highest-degree vertex (smallest id on ties); each later sweep starts
/// from the farthest vertex of an earlier one. The multi variant runs rounds
/// of up to `batch` sources: round one adds seeded random vertices to the
/// max-degree start, later rounds use the previous round's farthest vertices.
inline DiameterResult estimate_diameter(IoEngine& io, const DiameterConfig& cfg = {},
                                        const RunOptions& opts = RunOptions::from_env()) {
  const auto& g = io.graph();
  const std::uint64_t n = g.num_vertices();
  if (n == 0) throw error("diameter of an empty graph is undefined");
  if (cfg.num_bfs == 0) throw error("num_bfs must be >= 1");
  if (cfg.batch == 0 || cfg.batch > kMaxBatch) throw error("batch must be in [1, 64]");

  vertex_id start = 0;
  for (vertex_id v = 1; v < n; ++v) {
    if (g.degree(v, Direction::out) > g.degree(start, Direction::out)) start = v;
  }

  DiameterResult out;
  std::vector<std::uint8_t> used(n, 0);
  std::vector<vertex_id> round{start};
  used[start] = 1;
  if (cfg.variant == BfsVariant::multi) {
    const std::size_t first = std::min<std::size_t>({cfg.batch, (cfg.num_bfs + 1) / 2, n});
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<vertex_id> pick(0, n - 1);
    while (round.size() < first) {
      const vertex_id v = pick(rng);
      if (!used[v]) {
        used[v] = 1;
        round.push_back(v);
      }
    }
  }
  const std::size_t width = cfg.variant == BfsVariant::multi ? cfg.batch : 1;
  while (!round.empty()) {
    auto r = bfs_eccentricities(io, round, cfg.variant, std::max<std::size_t>(1, round.size()), opts);
    detail::accumulate(out.run, r.run);
    std::vector<vertex_id> next;
    for (const Sweep& s : r.sweeps) {
      out.estimate = std::max(out.estimate, s.eccentricity);
      out.sweeps.push_back(s);
      if (out.sweeps.size() + next.size() < cfg.num_bfs && next.size() < width && !used[s.farthest]) {
        used[s.farthest] = 1;
        next.push_back(s.farthest);
      }
    }
    if (out.sweeps.size() >= cfg.num_bfs) break;
    round = std::move(next);
  }
  return out;
}

}  // namespace semgraph
