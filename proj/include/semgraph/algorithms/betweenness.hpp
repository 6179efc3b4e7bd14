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
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "semgraph/algorithms/bfs.hpp"
#include "semgraph/engine.hpp"

namespace semgraph {

enum class BcVariant : std::uint8_t { uni, multi_sync, multi_async };

inline const char* to_string(BcVariant v) {
  switch (v) {
    case BcVariant::uni: return "uni";
    case BcVariant::multi_sync: return "multi_sync";
    case BcVariant::multi_async: return "multi_async";
  }
  return "?";
}

struct BetweennessResult {
  std::vector<double> centrality;
  // Sum of dependencies accumulated from each source, in input order.
  std::vector<double> source_dependency;
  RunResult run;
};

namespace detail {

// Brandes with one lane per source. Each lane moves through BFS (count
// shortest paths), BP (push dependencies back one level per superstep) and
// ACC (add dependencies into the centrality vector). With lockstep set every
// lane runs the same phase; otherwise a lane moves on as soon as its own
// phase completes, so BFS and BP work from different sources share a
// superstep and its adjacency reads.
class BrandesLanes {
 public:
  enum Phase : std::uint32_t { idle, bfs, bfs_done, bp, acc };

  struct Message {
    double value;
    std::uint32_t phase;
  };
  using message_type = Message;
  static void combine(Message& a, const Message& b) { a.value += b.value; }

  BrandesLanes(const GraphHandle& g, std::span<const vertex_id> sources, bool lockstep, unsigned workers,
               std::vector<double>& bc)
      : directed_(g.directed()),
        n_(g.num_vertices()),
        width_(sources.size()),
        lockstep_(lockstep),
        bc_(bc),
        dist_(n_ * width_, kUnreached),
        sigma_(n_ * width_, 0.0),
        delta_(n_ * width_, 0.0),
        lanes_(width_),
        reached_(workers, std::vector<std::vector<std::uint32_t>>(width_)) {
    for (std::size_t l = 0; l < width_; ++l) {
      Lane& ln = lanes_[l];
      ln.source = sources[l];
      ln.phase = bfs;
      ln.stack = {static_cast<std::uint32_t>(sources[l])};
      ln.level_start = {0};
      dist_[at(sources[l], l)] = 0;
      sigma_[at(sources[l], l)] = 1.0;
    }
  }

  std::size_t lanes() const { return width_; }

  void on_activate(vertex_id v, Context<BrandesLanes>& ctx) {
    bool need_out = false;
    bool need_in = false;
    for (std::size_t l = 0; l < width_; ++l) {
      const std::size_t i = at(v, l);
      const std::uint32_t d = dist_[i];
      if (d == kUnreached) continue;
      const Lane& ln = lanes_[l];
      if (ln.phase == bfs && d == ln.level) {
        need_out = true;
      } else if (ln.phase == bp && d == ln.bp_level) {
        (directed_ ? need_in : need_out) = true;
      } else if (ln.phase == acc) {
        if (v != ln.source) {
          bc_[v] += delta_[i];
          ctx.reduce(kAccKey + l, ReduceOp::sum, delta_[i]);
        }
        dist_[i] = kUnreached;
        sigma_[i] = 0.0;
        delta_[i] = 0.0;
      }
    }
    if (need_out) ctx.request(Direction::out);
    if (need_in) ctx.request(Direction::in);
  }

  void on_adjacency(vertex_id v, vertex_id, Direction dir, std::span<const vertex_id> list,
                    Context<BrandesLanes>& ctx) {
    if (list.empty()) return;
    const Direction back = directed_ ? Direction::in : Direction::out;
    for (std::size_t l = 0; l < width_; ++l) {
      const std::size_t i = at(v, l);
      const std::uint32_t d = dist_[i];
      if (d == kUnreached) continue;
      const Lane& ln = lanes_[l];
      const auto lane = static_cast<std::uint32_t>(l);
      if (ln.phase == bfs && d == ln.level && dir == Direction::out) {
        ctx.multicast(list, Message{sigma_[i], bfs}, lane);
      } else if (ln.phase == bp && d == ln.bp_level && dir == back) {
        ctx.multicast(list, Message{(1.0 + delta_[i]) / sigma_[i], bp}, lane);
      }
    }
  }

  void on_message(vertex_id v, std::uint32_t l, const Message& m, Context<BrandesLanes>& ctx) {
    const std::size_t i = at(v, l);
    const Lane& ln = lanes_[l];
    // BP messages land after the barrier that lowered bp_level, possibly
    // the one that moved the lane on to ACC.
    const bool expected = m.phase == bfs ? ln.phase == bfs : (ln.phase == bp || ln.phase == acc);
    if (!expected) throw error("betweenness: message phase does not match its lane");
    if (m.phase == bfs) {
      if (dist_[i] != kUnreached) return;
      dist_[i] = ln.level;
      sigma_[i] = m.value;
      reached_[ctx.worker()][l].push_back(static_cast<std::uint32_t>(v));
      ctx.reduce_int(kReachKey + l, ReduceOp::sum, 1);
      ctx.reduce_int(kDepthKey + l, ReduceOp::max, ln.level);
    } else if (dist_[i] == ln.bp_level) {
      delta_[i] += sigma_[i] * m.value;
    }
  }

  void end_superstep(BarrierContext& b) {
    // Lanes already past BFS advance first so a lane entering BP at this
    // barrier does not also take its first BP step.
    for (std::size_t l = 0; l < width_; ++l) {
      Lane& ln = lanes_[l];
      if (ln.phase == bp) {
        --ln.bp_level;
        if (ln.bp_level >= 2) activate_level(b, l, ln.bp_level);
        else enter_acc(b, l);
      } else if (ln.phase == acc) {
        ln.dependency = b.reduced(kAccKey + l, ReduceOp::sum);
        ln.stack.clear();
        ln.stack.shrink_to_fit();
        ln.level_start.clear();
        ln.phase = idle;
      }
    }
    bool all_done = true;
    std::uint32_t global_depth = 0;
    for (std::size_t l = 0; l < width_; ++l) {
      Lane& ln = lanes_[l];
      if (ln.phase == bfs) {
        if (ln.level >= 1) {
          ln.level_start.push_back(static_cast<std::uint32_t>(ln.stack.size()));
          for (auto& per_worker : reached_) {
            ln.stack.insert(ln.stack.end(), per_worker[l].begin(), per_worker[l].end());
            per_worker[l].clear();
          }
          if (b.reduced_int(kReachKey + l, ReduceOp::sum) == 0) {
            ln.depth = ln.level - 1;
            ln.phase = bfs_done;
          }
        }
        // Nothing in flight: the level just expanded sent no messages, so
        // it is the last one.
        if (ln.phase == bfs && b.idle()) {
          ln.depth = ln.level;
          ln.phase = bfs_done;
        }
        if (ln.phase == bfs) ++ln.level;
      }
      if (ln.phase == bfs) all_done = false;
      if (ln.phase == bfs_done) global_depth = std::max(global_depth, ln.depth);
    }
    for (std::size_t l = 0; l < width_; ++l) {
      Lane& ln = lanes_[l];
      if (ln.phase != bfs_done) continue;
      if (!lockstep_) start_bp(b, l, ln.depth);
      else if (all_done) start_bp(b, l, global_depth);
    }
  }

  std::size_t state_bytes() const {
    std::size_t s = dist_.capacity() * 4 + (sigma_.capacity() + delta_.capacity() + bc_.capacity()) * 8;
    for (const auto& ln : lanes_) s += ln.stack.capacity() * 4 + ln.level_start.capacity() * 4;
    for (const auto& w : reached_) {
      for (const auto& v : w) s += v.capacity() * 4;
    }
    return s;
  }
  // dist + sigma + delta per lane, stack and reached buffers at up to
  // twice their length, plus the shared result.
  std::size_t state_bytes_per_vertex() const { return 36 * width_ + 8; }

  double dependency(std::size_t lane) const { return lanes_[lane].dependency; }

 private:
  static constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();
  static constexpr std::uint64_t kReachKey = 1000;
  static constexpr std::uint64_t kDepthKey = 2000;
  static constexpr std::uint64_t kAccKey = 3000;

  struct Lane {
    vertex_id source = 0;
    Phase phase = idle;
    std::uint32_t level = 0;
    std::uint32_t depth = 0;
    std::uint32_t bp_level = 0;
    std::vector<std::uint32_t> stack;        // reached vertices in BFS order
    std::vector<std::uint32_t> level_start;  // stack offset of each level
    double dependency = 0.0;
  };

  std::size_t at(vertex_id v, std::size_t lane) const { return v * width_ + lane; }

  void activate_level(BarrierContext& b, std::size_t l, std::uint32_t level) {
    const Lane& ln = lanes_[l];
    if (level > ln.depth) return;
    const std::size_t hi = level + 1 < ln.level_start.size() ? ln.level_start[level + 1] : ln.stack.size();
    for (std::size_t k = ln.level_start[level]; k < hi; ++k) b.activate(ln.stack[k]);
  }

  void start_bp(BarrierContext& b, std::size_t l, std::uint32_t depth) {
    Lane& ln = lanes_[l];
    if (depth >= 2) {
      ln.phase = bp;
      ln.bp_level = depth;
      activate_level(b, l, depth);
    } else {
      enter_acc(b, l);
    }
  }

  void enter_acc(BarrierContext& b, std::size_t l) {
    Lane& ln = lanes_[l];
    ln.phase = acc;
    for (std::uint32_t v : ln.stack) b.activate(v);
  }

  bool directed_;
  std::uint64_t n_;
  std::size_t width_;
  bool lockstep_;
  std::vector<double>& bc_;
  std::vector<std::uint32_t> dist_;
  std::vector<double> sigma_;
  std::vector<double> delta_;
  std::vector<Lane> lanes_;
  std::vector<std::vector<std::vector<std::uint32_t>>> reached_;  // [worker][lane]
};

}  // namespace detail

/// Sum over `sources` of Brandes dependencies (ordered pairs, unnormalised,
/// endpoints excluded). Directed graphs search along out-edges and
/// propagate dependencies back along in-edges. Multi variants process the
/// sources in batches of up to 64 with one engine run per batch.
inline BetweennessResult betweenness(IoEngine& io, std::span<const vertex_id> sources,
                                     BcVariant variant = BcVariant::multi_async, std::size_t batch = kMaxBatch,
                                     RunOptions opts = RunOptions::from_env()) {
  const auto& g = io.graph();
  const std::uint64_t n = g.num_vertices();
  for (vertex_id s : sources) detail::check_source(g, s);
  if (n > std::numeric_limits<std::uint32_t>::max() - 1) throw error("betweenness supports fewer than 2^32 vertices");
  if (batch == 0 || batch > kMaxBatch) throw error("batch must be in [1, 64]");
  if (variant == BcVariant::uni) batch = 1;
  opts.mode = Mode::sync;

  BetweennessResult out;
  out.centrality.assign(n, 0.0);
  for (std::size_t first = 0; first < sources.size(); first += batch) {
    const auto chunk = sources.subspan(first, std::min(batch, sources.size() - first));
    detail::BrandesLanes prog(g, chunk, variant == BcVariant::multi_sync, std::max(1u, opts.workers),
                              out.centrality);
    std::vector<vertex_id> active(chunk.begin(), chunk.end());
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
    detail::accumulate(out.run, run(io, prog, Activation::of(active), opts));
    for (std::size_t l = 0; l < chunk.size(); ++l) out.source_dependency.push_back(prog.dependency(l));
  }
  return out;
}

}  // namespace semgraph
