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
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "semgraph/engine.hpp"

namespace semgraph {

struct LouvainConfig {
  // A node moves only for a larger modularity gain than this.
  double min_modularity_gain = 1e-6;
  // A level ends after a pass of rounds that gains no more than this.
  double min_pass_gain = 1e-4;
  std::uint32_t max_levels = 32;
  // Moving rounds per level before the level is closed regardless.
  std::uint32_t max_rounds = 256;
};

struct LouvainResult {
  // Community of every vertex, named by its smallest member id.
  std::vector<vertex_id> assignment;
  // Modularity after each level.
  std::vector<double> level_modularity;
  std::uint32_t rounds = 0;
  RunResult run;
};

namespace detail {

// Modularity scaled by (2m)^2 so comparisons are exact:
// 2m * (intra-community endpoint count) - sum over communities of tot^2.
using ScaledQ = __int128;

inline double unscale(ScaledQ q, std::uint64_t two_m) {
  if (two_m == 0) return 0.0;
  const long double d = static_cast<long double>(two_m);
  return static_cast<double>(static_cast<long double>(q) / (d * d));
}

class ModularityProgram {
 public:
  using message_type = NoMessage;

  explicit ModularityProgram(const std::vector<std::uint32_t>& comm) : comm_(comm) {}

  void on_activate(vertex_id, Context<ModularityProgram>& ctx) { ctx.request(Direction::out); }
  void on_adjacency(vertex_id v, vertex_id, Direction, std::span<const vertex_id> list,
                    Context<ModularityProgram>& ctx) {
    std::int64_t intra = 0;
    for (vertex_id w : list) intra += comm_[w] == comm_[v];
    ctx.reduce_int(1, ReduceOp::sum, intra);
  }
  void on_message(vertex_id, std::uint32_t, const NoMessage&, Context<ModularityProgram>&) {}
  void end_superstep(BarrierContext& b) {
    if (b.superstep() == 0) intra_ = b.reduced_int(1, ReduceOp::sum);
  }

  std::size_t state_bytes() const { return comm_.capacity() * 4; }
  std::size_t state_bytes_per_vertex() const { return 4; }

  std::int64_t intra() const { return intra_; }

 private:
  const std::vector<std::uint32_t>& comm_;
  std::int64_t intra_ = 0;
};

// One superstep per moving round. Every live node (a community of the
// previous level, addressed through its representative) reads the lists of
// its member vertices, sums edge weight per neighbouring community and
// proposes a move. Moves are applied together at the barrier; a round
// that does not raise modularity is undone and later rounds let only a
// hashed subset of nodes move. The graph files are only read; levels are
// formed by remapping vertices to representatives.
class LouvainProgram {
 public:
  using message_type = NoMessage;

  LouvainProgram(const GraphHandle& g, const LouvainConfig& cfg, unsigned workers)
      : cfg_(cfg),
        n_(g.num_vertices()),
        node_(n_),
        comm_(n_),
        tot_(n_),
        node_deg_(n_),
        count_(n_, 1),
        deleted_(n_, 0),
        members_(n_),
        start_(n_),
        size_(n_, 1),
        held_(workers),
        proposals_(workers) {
    for (vertex_id v = 0; v < n_; ++v) {
      const auto d = g.degree(v, Direction::out);
      node_[v] = comm_[v] = members_[v] = start_[v] = static_cast<std::uint32_t>(v);
      tot_[v] = node_deg_[v] = d;
      two_m_ += d;
    }
  }

  std::vector<vertex_id> live_nodes() const {
    std::vector<vertex_id> out;
    for (vertex_id v = 0; v < n_; ++v) {
      if (!deleted_[v]) out.push_back(v);
    }
    return out;
  }

  void on_activate(vertex_id r, Context<LouvainProgram>& ctx) {
    auto agg = std::make_unique<Aggregate>();
    agg->remaining = size_[r];
    held_[ctx.worker()].emplace(r, std::move(agg));
    for (std::uint32_t i = 0; i < size_[r]; ++i) ctx.request(members_[start_[r] + i], Direction::out);
  }

  void on_adjacency(vertex_id r, vertex_id, Direction, std::span<const vertex_id> list,
                    Context<LouvainProgram>& ctx) {
    auto& held = held_[ctx.worker()];
    Aggregate& a = *held.at(r);
    const std::uint32_t own = comm_[r];
    std::int64_t intra = 0;
    const auto before = a.weight.size();
    for (vertex_id w : list) {
      const std::uint32_t c = comm_[node_[w]];
      intra += c == own;
      if (node_[w] == r) continue;  // edge inside this node
      ++a.weight[c];
    }
    ctx.track_transient(static_cast<std::int64_t>((a.weight.size() - before) * kMapEntryBytes));
    ctx.reduce_int(kIntraKey, ReduceOp::sum, intra);
    if (--a.remaining > 0) return;
    propose(r, a, ctx);
    ctx.track_transient(-static_cast<std::int64_t>(a.weight.size() * kMapEntryBytes));
    held.erase(r);
  }

  void on_message(vertex_id, std::uint32_t, const NoMessage&, Context<LouvainProgram>&) {}
  void end_superstep(BarrierContext& b) {
    const ScaledQ q = scaled_q(b.reduced_int(kIntraKey, ReduceOp::sum));
    std::vector<Move> moves;
    for (auto& p : proposals_) {
      moves.insert(moves.end(), p.begin(), p.end());
      p.clear();
    }
    if (round_in_level_ == 0) pass_start_q_ = q;
    ++rounds_;
    ++round_in_level_;
    bool close = round_in_level_ >= cfg_.max_rounds;
    const bool reverted = !last_moves_.empty() && q <= last_q_;
    if (reverted) {
      // The last round's moves, taken together, did not help. Undo them and
      // let fewer nodes move per round from now on.
      for (const Move& m : last_moves_) apply(m.node, m.to, m.from);
      last_moves_.clear();
      --applied_rounds_;
      q_ = last_q_;
      pass_rounds_ = 0;
      pass_start_q_ = q_;
      if (stride_ >= kMaxStride) close = true;
      else stride_ *= 2;
    } else if (moves.empty()) {
      q_ = q;
      last_moves_.clear();
    } else if (!close) {
      q_ = q;
      last_q_ = q;
      for (const Move& m : moves) apply(m.node, m.from, m.to);
      last_moves_ = std::move(moves);
      ++applied_rounds_;
    } else {
      q_ = q;
    }
    // A pass gives every node a turn in both directions. The level ends
    // once a pass gains no more than the threshold.
    if (!reverted && ++pass_rounds_ >= 2 * stride_) {
      if (unscale(q_ - pass_start_q_, two_m_) <= cfg_.min_pass_gain) {
        // At stride 1 whole neighbourhoods move together and can stall
        // without a revert; retry with half the nodes before giving up.
        if (stride_ == 1) stride_ = 2;
        else close = true;
      }
      pass_start_q_ = q_;
      pass_rounds_ = 0;
    }
    if (!close) {
      activate_live(b);
      return;
    }
    const bool changed = applied_rounds_ > 0;
    if (changed || levels_.empty()) levels_.push_back(unscale(q_, two_m_));
    contract();
    if (!changed || levels_.size() >= cfg_.max_levels) {
      b.stop();
      return;
    }
    activate_live(b);
  }

  std::size_t state_bytes() const {
    std::size_t s = (node_.capacity() + comm_.capacity() + count_.capacity() + members_.capacity() +
                     start_.capacity() + size_.capacity()) * 4 +
                    (tot_.capacity() + node_deg_.capacity()) * 8 + deleted_.capacity() +
                    last_moves_.capacity() * sizeof(Move);
    for (const auto& p : proposals_) s += p.capacity() * sizeof(Move);
    return s;
  }
  // Index arrays, community totals, and move lists at up to twice their length.
  std::size_t state_bytes_per_vertex() const { return 6 * 4 + 2 * 8 + 1 + 4 * sizeof(Move); }

  std::vector<vertex_id> assignment() const { return {node_.begin(), node_.end()}; }
  std::vector<double> take_levels() { return std::move(levels_); }
  std::uint32_t rounds() const { return rounds_; }

 private:
  static constexpr std::uint64_t kIntraKey = 1;
  // Rough cost of one hash-map entry, for transient accounting.
  static constexpr std::size_t kMapEntryBytes = 32;
  static constexpr std::uint32_t kMaxStride = 16;

  // Nodes in a community with others move only toward smaller community
  // ids or only toward larger ones, alternating per block of rounds, so
  // two nodes cannot trade places.
  bool downward() const { return (round_in_level_ / stride_) % 2 == 0; }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  struct Move {
    std::uint32_t node;
    std::uint32_t from;
    std::uint32_t to;
  };

  struct Aggregate {
    std::unordered_map<std::uint32_t, std::uint64_t> weight;  // community -> edge count
    std::uint32_t remaining = 0;
  };

  ScaledQ scaled_q(std::int64_t intra) const {
    ScaledQ q = static_cast<ScaledQ>(two_m_) * intra;
    for (vertex_id c = 0; c < n_; ++c) {
      if (count_[c] > 0) q -= static_cast<ScaledQ>(tot_[c]) * tot_[c];
    }
    return q;
  }

  // Score of node r (degree k) joining community c, up to a common factor:
  // 2m * w(r, c) - tot(c) * k, with r itself removed from its own community.
  void propose(vertex_id r, const Aggregate& a, Context<LouvainProgram>& ctx) {
    if (two_m_ == 0) return;
    const std::uint32_t own = comm_[r];
    const auto k = static_cast<ScaledQ>(node_deg_[r]);
    const auto two_m = static_cast<ScaledQ>(two_m_);
    const auto it = a.weight.find(own);
    const ScaledQ stay = two_m * (it == a.weight.end() ? 0 : it->second) - (tot_[own] - k) * k;
    ScaledQ best = stay;
    std::uint32_t target = own;
    const bool alone = count_[own] == 1;
    for (const auto& [c, w] : a.weight) {
      if (c == own) continue;
      // Two singletons may only merge toward the smaller id, so they do not
      // swap places in the same round.
      if (alone && count_[c] == 1 && c > own) continue;
      if (!alone && downward() != (c < own)) continue;
      const ScaledQ s = two_m * w - tot_[c] * k;
      if (s > best || (s == best && target != own && c < target)) {
        best = s;
        target = c;
      }
    }
    if (target == own) return;
    const long double gain = static_cast<long double>(best - stay) /
                             (static_cast<long double>(two_m_) * static_cast<long double>(two_m_) / 2.0L);
    if (gain <= cfg_.min_modularity_gain) return;
    if (mix(r + level_salt_) % stride_ != round_in_level_ % stride_) return;
    proposals_[ctx.worker()].push_back({static_cast<std::uint32_t>(r), own, target});
  }

  void apply(std::uint32_t r, std::uint32_t from, std::uint32_t to) {
    comm_[r] = to;
    tot_[from] -= node_deg_[r];
    tot_[to] += node_deg_[r];
    --count_[from];
    ++count_[to];
  }

  void activate_live(BarrierContext& b) {
    for (vertex_id v = 0; v < n_; ++v) {
      if (!deleted_[v]) b.activate(v);
    }
  }

  // Communities become the nodes of the next level, each represented by its
  // smallest live node. Non-representatives are marked deleted.
  void contract() {
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t>& rep = start_;  // reused as community -> new representative
    std::fill(rep.begin(), rep.end(), kNone);
    for (vertex_id r = 0; r < n_; ++r) {
      if (deleted_[r]) continue;
      const std::uint32_t c = comm_[r];
      if (rep[c] == kNone) rep[c] = static_cast<std::uint32_t>(r);
    }
    for (vertex_id r = 0; r < n_; ++r) {
      if (deleted_[r]) continue;
      const std::uint32_t nr = rep[comm_[r]];
      if (nr != r) {
        node_deg_[nr] += node_deg_[r];
        node_deg_[r] = 0;
        deleted_[r] = 1;
      }
    }
    for (vertex_id v = 0; v < n_; ++v) node_[v] = rep[comm_[node_[v]]];
    std::fill(size_.begin(), size_.end(), 0);
    // Counting sort of vertices by node rebuilds the member table.
    for (vertex_id v = 0; v < n_; ++v) ++size_[node_[v]];
    std::uint32_t offset = 0;
    for (vertex_id r = 0; r < n_; ++r) {
      start_[r] = offset;
      offset += size_[r];
    }
    std::vector<std::uint32_t> fill(start_.begin(), start_.end());
    for (vertex_id v = 0; v < n_; ++v) members_[fill[node_[v]]++] = static_cast<std::uint32_t>(v);
    for (vertex_id r = 0; r < n_; ++r) {
      comm_[r] = static_cast<std::uint32_t>(r);
      tot_[r] = node_deg_[r];
      count_[r] = deleted_[r] ? 0 : 1;
    }
    last_moves_.clear();
    round_in_level_ = 0;
    applied_rounds_ = 0;
    pass_rounds_ = 0;
    stride_ = 1;
    level_salt_ += n_;
  }

  LouvainConfig cfg_;
  std::uint64_t n_;
  std::uint64_t two_m_ = 0;
  std::vector<std::uint32_t> node_;      // vertex -> representative of its node
  std::vector<std::uint32_t> comm_;      // node -> community (a node id)
  std::vector<std::uint64_t> tot_;       // community -> degree total
  std::vector<std::uint64_t> node_deg_;  // node -> degree total
  std::vector<std::uint32_t> count_;     // community -> live nodes in it
  std::vector<std::uint8_t> deleted_;    // nodes merged into another
  std::vector<std::uint32_t> members_;   // vertices grouped by node
  std::vector<std::uint32_t> start_;     // node -> offset into members_
  std::vector<std::uint32_t> size_;      // node -> member count
  std::vector<std::unordered_map<vertex_id, std::unique_ptr<Aggregate>>> held_;  // per worker
  std::vector<std::vector<Move>> proposals_;                                     // per worker
  std::vector<Move> last_moves_;
  ScaledQ q_ = 0;
  ScaledQ last_q_ = 0;
  std::uint32_t round_in_level_ = 0;
  std::uint32_t applied_rounds_ = 0;
  ScaledQ pass_start_q_ = 0;
  std::uint32_t pass_rounds_ = 0;
  std::uint32_t stride_ = 1;  // a node moves only in rounds matching its hash modulo this
  std::uint64_t level_salt_ = 0;
  std::uint32_t rounds_ = 0;
  std::vector<double> levels_;
};

}  // namespace detail

/// Modularity of a partition given as one community id per vertex.
inline double modularity(IoEngine& io, std::span<const vertex_id> assignment,
                         const RunOptions& opts = RunOptions::from_env()) {
  const auto& g = io.graph();
  const std::uint64_t n = g.num_vertices();
  if (g.directed()) throw domain_error("modularity requires an undirected graph");
  if (assignment.size() != n) throw error("modularity: assignment must cover every vertex");
  if (n > std::numeric_limits<std::uint32_t>::max()) throw error("modularity supports fewer than 2^32 vertices");
  // Dense community numbering and degree totals.
  std::vector<vertex_id> ids(assignment.begin(), assignment.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::uint32_t> comm(n);
  std::vector<std::uint64_t> tot(ids.size(), 0);
  std::uint64_t two_m = 0;
  for (vertex_id v = 0; v < n; ++v) {
    comm[v] = static_cast<std::uint32_t>(std::lower_bound(ids.begin(), ids.end(), assignment[v]) - ids.begin());
    const auto d = g.degree(v, Direction::out);
    tot[comm[v]] += d;
    two_m += d;
  }
  if (two_m == 0) return 0.0;
  detail::ModularityProgram prog(comm);
  run(io, prog, Activation::all_vertices(), opts);
  detail::ScaledQ q = static_cast<detail::ScaledQ>(two_m) * prog.intra();
  for (std::uint64_t t : tot) q -= static_cast<detail::ScaledQ>(t) * t;
  return detail::unscale(q, two_m);
}

/// Multi-level greedy modularity optimisation. Graphs without edges keep
/// every vertex in its own community with modularity 0.
inline LouvainResult louvain(IoEngine& io, const LouvainConfig& cfg = {},
                             const RunOptions& opts = RunOptions::from_env()) {
  const auto& g = io.graph();
  if (g.directed()) throw domain_error("louvain requires an undirected graph");
  if (g.num_vertices() > std::numeric_limits<std::uint32_t>::max() - 1) {
    throw error("louvain supports fewer than 2^32 - 1 vertices");
  }
  if (cfg.max_levels == 0 || cfg.max_rounds == 0) throw error("louvain: max_levels and max_rounds must be positive");
  LouvainResult out;
  if (g.num_vertices() == 0) return out;
  detail::LouvainProgram prog(g, cfg, std::max(1u, opts.workers));
  RunOptions o = opts;
  o.mode = Mode::sync;
  out.run = run(io, prog, Activation::of(prog.live_nodes()), o);
  out.assignment = prog.assignment();
  out.level_modularity = prog.take_levels();
  out.rounds = prog.rounds();
  return out;
}

}  // namespace semgraph
