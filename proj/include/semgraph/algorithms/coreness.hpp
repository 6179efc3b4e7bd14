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

#include "semgraph/engine.hpp"

namespace semgraph {

struct CorenessConfig {
  bool pruning = true;
  bool hybrid_messaging = true;
  // A deleted vertex whose remaining degree is at most this fraction of its
  // original degree notifies live neighbours one by one instead of
  // multicasting to its whole list.
  double hybrid_fraction = 0.10;
};

struct CorenessResult {
  std::vector<std::uint32_t> core;
  // Every k value processed, in order.
  std::vector<std::uint32_t> k_sequence;
  std::uint32_t k_max = 0;
  RunResult run;
};

namespace detail {

class CorenessProgram {
 public:
  using message_type = std::uint32_t;
  static void combine(std::uint32_t& a, const std::uint32_t& b) { a += b; }

  CorenessProgram(const GraphHandle& g, const CorenessConfig& cfg, unsigned workers)
      : g_(g),
        cfg_(cfg),
        n_(g.num_vertices()),
        eff_(n_),
        core_(n_, kNoCore),
        dying_(n_, 0),
        gone_(n_, 0),
        died_(workers),
        moves_(workers) {
    std::uint64_t max_deg = 0;
    for (vertex_id v = 0; v < n_; ++v) {
      eff_[v] = static_cast<std::uint32_t>(g.degree(v, Direction::out));
      max_deg = std::max<std::uint64_t>(max_deg, eff_[v]);
    }
    hist_.assign(max_deg + 1, 0);
    for (std::uint32_t d : eff_) ++hist_[d];
    remaining_ = n_;
  }

  /// Picks the first k and returns the vertices to delete in it.
  std::vector<vertex_id> start() {
    if (n_ == 0) return {};
    k_ = cfg_.pruning ? min_remaining() : 0;
    return begin_iteration();
  }

  void on_activate(vertex_id v, Context<CorenessProgram>& ctx) {
    if (gone_[v] || dying_[v] || eff_[v] > k_) return;
    dying_[v] = 1;
    core_[v] = k_;
    died_[ctx.worker()].push_back(v);
    if (eff_[v] > 0) ctx.request(Direction::out);
  }

  void on_adjacency(vertex_id v, vertex_id, Direction, std::span<const vertex_id> list,
                    Context<CorenessProgram>& ctx) {
    const double orig = static_cast<double>(list.size());
    if (cfg_.hybrid_messaging && static_cast<double>(eff_[v]) <= cfg_.hybrid_fraction * orig) {
      for (vertex_id u : list) {
        if (!gone_[u]) ctx.send(u, 1u);
      }
    } else {
      ctx.multicast(list, 1u);
    }
  }

  void on_message(vertex_id v, std::uint32_t, const std::uint32_t& count, Context<CorenessProgram>& ctx) {
    if (gone_[v] || dying_[v]) return;
    const std::uint32_t before = eff_[v];
    eff_[v] = before > count ? before - count : 0;
    moves_[ctx.worker()].push_back({before, eff_[v]});
  }

  void end_superstep(BarrierContext& b) {
    for (auto& per_worker : moves_) {
      for (auto [from, to] : per_worker) {
        --hist_[from];
        ++hist_[to];
      }
      per_worker.clear();
    }
    for (auto& per_worker : died_) {
      for (vertex_id v : per_worker) {
        gone_[v] = 1;
        --hist_[eff_[v]];
        --remaining_;
      }
      per_worker.clear();
    }
    if (!b.idle()) return;
    if (remaining_ == 0) return;
    k_ = cfg_.pruning ? min_remaining() : k_ + 1;
    for (vertex_id v : begin_iteration()) b.activate(v);
  }

  std::size_t state_bytes() const {
    std::size_t s = (eff_.capacity() + core_.capacity()) * 4 + dying_.capacity() + gone_.capacity() +
                    hist_.capacity() * 8 + k_sequence_.capacity() * 4;
    for (const auto& w : died_) s += w.capacity() * sizeof(vertex_id);
    for (const auto& w : moves_) s += w.capacity() * sizeof(std::pair<std::uint32_t, std::uint32_t>);
    return s;
  }
  // Degrees, cores and flags, the degree histogram (at most n + 1 buckets),
  // the k sequence and the per-superstep buffers at up to twice their length.
  std::size_t state_bytes_per_vertex() const { return 4 + 4 + 2 + 8 + 4 + 16 + 16; }

  std::vector<std::uint32_t> take_core() { return std::move(core_); }
  std::vector<std::uint32_t> take_k_sequence() { return std::move(k_sequence_); }

 private:
  static constexpr std::uint32_t kNoCore = std::numeric_limits<std::uint32_t>::max();

  std::uint32_t min_remaining() const {
    for (std::size_t d = 0; d < hist_.size(); ++d) {
      if (hist_[d] > 0) return static_cast<std::uint32_t>(d);
    }
    return 0;
  }

  // Records k and collects the remaining vertices at or below it. Without
  // pruning, values of k that delete nothing still count as processed.
  std::vector<vertex_id> begin_iteration() {
    for (;;) {
      k_sequence_.push_back(k_);
      std::vector<vertex_id> out;
      for (vertex_id v = 0; v < n_; ++v) {
        if (!gone_[v] && eff_[v] <= k_) out.push_back(v);
      }
      if (!out.empty()) return out;
      ++k_;
    }
  }

  const GraphHandle& g_;
  CorenessConfig cfg_;
  std::uint64_t n_;
  std::uint32_t k_ = 0;
  std::uint64_t remaining_ = 0;
  std::vector<std::uint32_t> eff_;
  std::vector<std::uint32_t> core_;
  std::vector<std::uint8_t> dying_;
  std::vector<std::uint8_t> gone_;  // updated only at barriers
  std::vector<std::int64_t> hist_;  // remaining vertices per effective degree
  std::vector<std::uint32_t> k_sequence_;
  std::vector<std::vector<vertex_id>> died_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> moves_;
};

}  // namespace detail

/// Core number of every vertex by iterated deletion. With pruning each
/// iteration jumps to the smallest remaining degree instead of k + 1.
inline CorenessResult coreness(IoEngine& io, const CorenessConfig& cfg = {},
                               const RunOptions& opts = RunOptions::from_env()) {
  const auto& g = io.graph();
  if (g.directed()) throw domain_error("coreness requires an undirected graph");
  if (!(cfg.hybrid_fraction >= 0 && cfg.hybrid_fraction <= 1)) throw error("coreness: hybrid fraction must be in [0,1]");
  if (g.num_vertices() > std::numeric_limits<std::uint32_t>::max()) throw error("coreness supports fewer than 2^32 vertices");
  CorenessResult out;
  if (g.num_vertices() == 0) return out;
  detail::CorenessProgram prog(g, cfg, std::max(1u, opts.workers));
  auto first = prog.start();
  out.run = run(io, prog, Activation::of(std::move(first)), opts);
  out.core = prog.take_core();
  out.k_sequence = prog.take_k_sequence();
  out.k_max = *std::max_element(out.core.begin(), out.core.end());
  return out;
}

}  // namespace semgraph
