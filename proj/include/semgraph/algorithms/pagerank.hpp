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

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semgraph/engine.hpp"

namespace semgraph {

enum class PageRankVariant : std::uint8_t { pull, push };

inline const char* to_string(PageRankVariant v) { return v == PageRankVariant::pull ? "pull" : "push"; }

struct PageRankConfig {
  double damping = 0.85;
  // Relative to the uniform rank 1/n.
  double delta_threshold = 1e-3;
  std::uint64_t max_iterations = 1000;
};

struct PageRankResult {
  std::vector<double> ranks;
  std::uint64_t iterations = 0;
  RunResult run;
};

namespace detail {

// Ranks are accumulated as integers scaled by 2^60 so sums do not depend on
// the order in which workers deliver contributions.
inline constexpr double kRankScale = 1152921504606846976.0;  // 2^60

inline std::int64_t to_fixed(double x) { return std::llround(x * kRankScale); }

inline std::int64_t scaled_share(double c, std::int64_t mass, std::uint64_t parts) {
  return std::llround(c * static_cast<double>(mass) / static_cast<double>(parts));
}

inline std::vector<double> normalized(const std::vector<std::int64_t>& fixed) {
  std::vector<double> out(fixed.size());
  long double total = 0;
  for (std::int64_t x : fixed) total += static_cast<long double>(x);
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    out[i] = total > 0 ? static_cast<double>(static_cast<long double>(fixed[i]) / total) : 0.0;
  }
  return out;
}

inline constexpr std::uint64_t kDanglingKey = 1;

// Residual pushing: a vertex holding pending mass p sends c*p/N_v to each
// out-neighbour. Dangling mass is folded into a lazily applied uniform term.
// Once nothing is above the threshold, one flush round pushes every nonzero
// residual so sub-threshold remainders do not pile up at high in-degree
// vertices.
class PageRankPush {
 public:
  using message_type = std::int64_t;
  static void combine(std::int64_t& a, const std::int64_t& b) { a += b; }

  PageRankPush(const GraphHandle& g, const PageRankConfig& cfg)
      : g_(g), n_(g.num_vertices()), c_(cfg.damping), max_iter_(cfg.max_iterations) {
    const std::int64_t base = to_fixed((1.0 - c_) / static_cast<double>(n_));
    threshold_ = std::max<std::int64_t>(1, to_fixed(cfg.delta_threshold / static_cast<double>(n_)));
    rank_.assign(n_, base);
    pending_.assign(n_, base);
    seen_.assign(n_, 0);
  }

  void on_activate(vertex_id v, Context<PageRankPush>& ctx) {
    absorb_uniform(v);
    if (pending_[v] == 0 || (!flushing_ && std::llabs(pending_[v]) < threshold_)) return;
    if (g_.degree(v, Direction::out) == 0) {
      ctx.reduce_int(kDanglingKey, ReduceOp::sum, scaled_share(c_, pending_[v], 1));
      pending_[v] = 0;
      return;
    }
    ctx.request(Direction::out);
  }

  void on_adjacency(vertex_id v, vertex_id, Direction, std::span<const vertex_id> list,
                    Context<PageRankPush>& ctx) {
    const std::int64_t share = scaled_share(c_, pending_[v], list.size());
    pending_[v] = 0;
    if (share != 0) ctx.multicast(list, share);
  }

  void on_message(vertex_id v, std::uint32_t, const std::int64_t& m, Context<PageRankPush>&) {
    rank_[v] += m;
    pending_[v] += m;
  }

  void end_superstep(BarrierContext& b) {
    uniform_total_ += b.reduced_int(kDanglingKey, ReduceOp::sum);
    flushing_ = false;
    if (uniform_total_ / static_cast<std::int64_t>(n_) - broadcast_ >= threshold_) {
      broadcast_ = uniform_total_ / static_cast<std::int64_t>(n_);
      b.activate_all();
    } else if (b.idle() && !flushed_) {
      flushed_ = flushing_ = true;
      broadcast_ = uniform_total_ / static_cast<std::int64_t>(n_);
      b.activate_all();
    }
    iterations_ = b.superstep() + 1;
    if (iterations_ >= max_iter_) b.stop();
  }

  std::size_t state_bytes() const { return (rank_.capacity() + pending_.capacity() + seen_.capacity()) * 8; }
  std::size_t state_bytes_per_vertex() const { return 24; }

  std::vector<double> finish() {
    for (vertex_id v = 0; v < n_; ++v) rank_[v] += uniform_total_ / static_cast<std::int64_t>(n_) - seen_[v];
    return normalized(rank_);
  }
  std::uint64_t iterations() const { return iterations_; }

 private:
  void absorb_uniform(vertex_id v) {
    const std::int64_t q = broadcast_;
    const std::int64_t gain = q - seen_[v];
    if (gain != 0) {
      rank_[v] += gain;
      pending_[v] += gain;
      seen_[v] = q;
    }
  }

  const GraphHandle& g_;
  std::uint64_t n_;
  double c_;
  std::uint64_t max_iter_;
  std::int64_t threshold_ = 1;
  std::vector<std::int64_t> rank_;
  std::vector<std::int64_t> pending_;
  std::vector<std::int64_t> seen_;
  std::int64_t uniform_total_ = 0;
  std::int64_t broadcast_ = 0;
  bool flushing_ = false;
  bool flushed_ = false;
  std::uint64_t iterations_ = 0;
};

// Jacobi iteration: an active vertex gathers its in-neighbours' ranks from
// the previous superstep; when its own rank moved by at least the threshold
// it reads its out-list and activates those neighbours.
class PageRankPull {
 public:
  using message_type = NoMessage;

  PageRankPull(const GraphHandle& g, const PageRankConfig& cfg)
      : g_(g), n_(g.num_vertices()), c_(cfg.damping), max_iter_(cfg.max_iterations) {
    base_ = to_fixed((1.0 - c_) / static_cast<double>(n_));
    threshold_ = std::max<std::int64_t>(1, to_fixed(cfg.delta_threshold / static_cast<double>(n_)));
    const std::int64_t init = to_fixed(1.0 / static_cast<double>(n_));
    old_.assign(n_, init);
    next_.assign(n_, init);
    for (vertex_id v = 0; v < n_; ++v) {
      if (g.degree(v, Direction::out) == 0) dangling_ += init;
    }
    dangling_used_ = dangling_;
  }

  void on_activate(vertex_id v, Context<PageRankPull>& ctx) {
    if (g_.degree(v, Direction::in) == 0) {
      update(v, 0, ctx);
      return;
    }
    ctx.request(Direction::in);
  }

  void on_adjacency(vertex_id v, vertex_id, Direction d, std::span<const vertex_id> list,
                    Context<PageRankPull>& ctx) {
    if (d == Direction::out) {
      for (vertex_id w : list) ctx.activate(w);
      return;
    }
    std::int64_t gathered = 0;
    for (vertex_id u : list) gathered += scaled_share(c_, old_[u], g_.degree(u, Direction::out));
    update(v, gathered, ctx);
  }

  void on_message(vertex_id, std::uint32_t, const NoMessage&, Context<PageRankPull>&) {}

  void end_superstep(BarrierContext& b) {
    old_ = next_;
    dangling_ += b.reduced_int(kDanglingKey, ReduceOp::sum);
    if (std::llabs(scaled_share(c_, dangling_ - dangling_used_, n_)) >= threshold_) {
      dangling_used_ = dangling_;
      b.activate_all();
    }
    iterations_ = b.superstep() + 1;
    if (iterations_ >= max_iter_) b.stop();
  }

  std::size_t state_bytes() const { return (old_.capacity() + next_.capacity()) * 8; }
  std::size_t state_bytes_per_vertex() const { return 16; }

  std::vector<double> finish() { return normalized(old_); }
  std::uint64_t iterations() const { return iterations_; }

 private:
  void update(vertex_id v, std::int64_t gathered, Context<PageRankPull>& ctx) {
    const std::int64_t r = base_ + gathered + scaled_share(c_, dangling_used_, n_);
    next_[v] = r;
    const std::int64_t delta = r - old_[v];
    if (std::llabs(delta) < threshold_) return;
    if (g_.degree(v, Direction::out) == 0) {
      ctx.reduce_int(kDanglingKey, ReduceOp::sum, delta);
    } else {
      ctx.request(Direction::out);
    }
  }

  const GraphHandle& g_;
  std::uint64_t n_;
  double c_;
  std::uint64_t max_iter_;
  std::int64_t base_ = 0;
  std::int64_t threshold_ = 1;
  std::vector<std::int64_t> old_;
  std::vector<std::int64_t> next_;
  std::int64_t dangling_ = 0;
  std::int64_t dangling_used_ = 0;
  std::uint64_t iterations_ = 0;
};

template <class P>
PageRankResult run_pagerank(IoEngine& io, const PageRankConfig& cfg, RunOptions opts) {
  P prog(io.graph(), cfg);
  opts.superstep_cap = std::max(opts.superstep_cap, cfg.max_iterations + 1);
  PageRankResult r;
  r.run = run(io, prog, Activation::all_vertices(), opts);
  r.ranks = prog.finish();
  r.iterations = prog.iterations();
  return r;
}

}  // namespace detail

/// Damped PageRank, R(u) = (1-c)/n + c * (sum over in-neighbours v of
/// R(v)/N_v + D/n), D being the rank held by vertices without out-edges.
/// Ranks are normalised to sum to 1. Requires a directed graph.
inline PageRankResult pagerank(IoEngine& io, const PageRankConfig& cfg = {},
                               PageRankVariant variant = PageRankVariant::push,
                               const RunOptions& opts = RunOptions::from_env()) {
  const auto& g = io.graph();
  if (!g.directed()) throw domain_error("pagerank requires a directed graph");
  if (!(cfg.damping > 0 && cfg.damping < 1)) throw error("pagerank: damping must be in (0,1)");
  if (!(cfg.delta_threshold > 0)) throw error("pagerank: threshold must be positive");
  if (g.num_vertices() == 0) return {};
  if (variant == PageRankVariant::push) return detail::run_pagerank<detail::PageRankPush>(io, cfg, opts);
  return detail::run_pagerank<detail::PageRankPull>(io, cfg, opts);
}

}  // namespace semgraph
