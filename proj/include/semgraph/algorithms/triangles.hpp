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
#include <memory>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "semgraph/engine.hpp"

namespace semgraph {

enum class TriangleLevel : std::uint8_t { scan, binsearch, hash, restarted_hash };

inline const char* to_string(TriangleLevel l) {
  switch (l) {
    case TriangleLevel::scan: return "scan";
    case TriangleLevel::binsearch: return "scan+binsearch";
    case TriangleLevel::hash: return "scan+binsearch+hash";
    case TriangleLevel::restarted_hash: return "scan+revbinsearch+hash";
  }
  return "?";
}

enum class EnumerationOrder : std::uint8_t { forward, reverse };

struct TriangleConfig {
  TriangleLevel level = TriangleLevel::restarted_hash;
  // Lists longer than this are put in a hash set (hash levels only).
  std::size_t hash_degree_threshold = 1024;
  EnumerationOrder order = EnumerationOrder::reverse;
};

struct TriangleResult {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> per_vertex;
  // Element comparisons, binary-search probes and hash lookups performed
  // while intersecting lists.
  std::uint64_t comparisons = 0;
  RunResult run;
};

namespace detail {

// Intersection kernels. Each returns the common elements of two ascending
// lists and adds the work it did to `cmp`.
struct Intersector {
  std::uint64_t cmp = 0;

  template <typename Out>
  void scan(std::span<const vertex_id> a, std::span<const vertex_id> b, Out&& out) {
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
      ++cmp;
      if (a[i] < b[j]) ++i;
      else if (b[j] < a[i]) ++j;
      else {
        out(a[i]);
        ++i;
        ++j;
      }
    }
  }

  // Looks up each element of `small` in `big`; a restarted search keeps the
  // lower end of the range where the previous one stopped.
  template <typename Out>
  void binary(std::span<const vertex_id> small, std::span<const vertex_id> big, bool restarted, Out&& out) {
    std::size_t lo = 0;
    for (vertex_id x : small) {
      std::size_t first = restarted ? lo : 0;
      std::size_t len = big.size() - first;
      while (len > 0) {
        ++cmp;
        const std::size_t half = len / 2;
        if (big[first + half] < x) {
          first += half + 1;
          len -= half + 1;
        } else {
          len = half;
        }
      }
      if (first == big.size()) {
        if (restarted) break;
        continue;
      }
      ++cmp;
      if (big[first] == x) out(x);
      lo = first;
    }
  }

  template <typename Out>
  void probe(std::span<const vertex_id> list, const std::unordered_set<vertex_id>& set, Out&& out) {
    for (vertex_id x : list) {
      ++cmp;
      if (set.count(x)) out(x);
    }
  }
};

inline bool binary_pays_off(std::size_t small, std::size_t big) {
  return small * static_cast<std::size_t>(std::bit_width(big)) < small + big;
}

// Each triangle is found once, by its highest-ranked vertex c, while
// intersecting its lower-ranked neighbours L(c) with the list of one of
// them, b. Rank orders by degree, then id. A vertex holds L(c) and fetches
// the lists of L(c) one at a time.
class TriangleProgram {
 public:
  using message_type = std::uint64_t;
  static void combine(std::uint64_t& a, const std::uint64_t& b) { a += b; }

  TriangleProgram(const GraphHandle& g, const TriangleConfig& cfg, unsigned workers)
      : g_(g), cfg_(cfg), count_(g.num_vertices(), 0), started_(g.num_vertices(), 0), held_(workers),
        kernels_(workers) {}

  void on_activate(vertex_id v, Context<TriangleProgram>& ctx) {
    if (started_[v]) return;
    started_[v] = 1;
    if (g_.degree(v, Direction::out) >= 2) ctx.request(Direction::out);
  }

  void on_adjacency(vertex_id v, vertex_id owner, Direction, std::span<const vertex_id> list,
                    Context<TriangleProgram>& ctx) {
    auto& held = held_[ctx.worker()];
    if (owner == v) {
      auto h = std::make_unique<Held>();
      for (vertex_id u : list) {
        if (below(u, v)) h->lower.push_back(u);
      }
      if (h->lower.size() < 2) return;
      if (hashing() && h->lower.size() > cfg_.hash_degree_threshold) {
        h->set.reserve(h->lower.size());
        h->set.insert(h->lower.begin(), h->lower.end());
      }
      h->bytes = static_cast<std::int64_t>(h->lower.capacity() * sizeof(vertex_id) +
                                           h->set.bucket_count() * sizeof(void*) +
                                           h->set.size() * (sizeof(vertex_id) + 2 * sizeof(void*)));
      ctx.track_transient(h->bytes);
      Held& ref = *h;
      held.emplace(v, std::move(h));
      request_next(ref, ctx);
      return;
    }
    Held& h = *held.at(v);
    std::uint64_t found = 0;
    auto hit = [&](vertex_id w) {
      if (w == owner || !below(w, owner)) return;
      ++found;
      ctx.send(w, 1);
    };
    intersect(ctx.worker(), list, h, hit);
    if (found) {
      count_[v] += found;
      ctx.send(owner, found);
    }
    if (h.next < h.lower.size()) {
      request_next(h, ctx);
    } else {
      ctx.track_transient(-h.bytes);
      held.erase(v);
    }
  }

  void on_message(vertex_id v, std::uint32_t, const std::uint64_t& m, Context<TriangleProgram>&) {
    count_[v] += m;
  }

  std::size_t state_bytes() const { return count_.capacity() * 8 + started_.capacity(); }
  std::size_t state_bytes_per_vertex() const { return 9; }

  std::vector<std::uint64_t> take_counts() { return std::move(count_); }
  std::uint64_t comparisons() const {
    std::uint64_t c = 0;
    for (const auto& k : kernels_) c += k.cmp;
    return c;
  }

 private:
  struct Held {
    std::vector<vertex_id> lower;  // ascending ids
    std::unordered_set<vertex_id> set;
    std::size_t next = 0;
    std::int64_t bytes = 0;
  };

  bool hashing() const { return cfg_.level == TriangleLevel::hash || cfg_.level == TriangleLevel::restarted_hash; }

  bool below(vertex_id a, vertex_id b) const {
    const auto da = g_.degree(a, Direction::out);
    const auto db = g_.degree(b, Direction::out);
    return da < db || (da == db && a < b);
  }

  void request_next(Held& h, Context<TriangleProgram>& ctx) {
    const std::size_t k = h.next++;
    const vertex_id b = cfg_.order == EnumerationOrder::forward ? h.lower[k] : h.lower[h.lower.size() - 1 - k];
    ctx.request(b, Direction::out);
  }

  template <typename Out>
  void intersect(unsigned worker, std::span<const vertex_id> list, const Held& h, Out&& out) {
    Intersector& k = kernels_[worker];
    const std::span<const vertex_id> mine(h.lower);
    if (!h.set.empty()) {
      k.probe(list, h.set, out);
      return;
    }
    if (cfg_.level == TriangleLevel::scan) {
      k.scan(list, mine, out);
      return;
    }
    const bool restarted = cfg_.level == TriangleLevel::restarted_hash;
    const auto small = list.size() <= mine.size() ? list : mine;
    const auto big = list.size() <= mine.size() ? mine : list;
    if (binary_pays_off(small.size(), big.size())) k.binary(small, big, restarted, out);
    else k.scan(small, big, out);
  }

  const GraphHandle& g_;
  TriangleConfig cfg_;
  std::vector<std::uint64_t> count_;
  std::vector<std::uint8_t> started_;
  std::vector<std::unordered_map<vertex_id, std::unique_ptr<Held>>> held_;  // per worker
  std::vector<Intersector> kernels_;                                       // per worker
};

}  // namespace detail

/// Counts triangles. Per-vertex counts sum to three times the total.
inline TriangleResult triangle_count(IoEngine& io, const TriangleConfig& cfg = {},
                                     const RunOptions& opts = RunOptions::from_env()) {
  const auto& g = io.graph();
  if (g.directed()) throw domain_error("triangle counting requires an undirected graph");
  TriangleResult out;
  if (g.num_vertices() == 0) return out;
  detail::TriangleProgram prog(g, cfg, std::max(1u, opts.workers));
  out.run = run(io, prog, Activation::all_vertices(), opts);
  out.per_vertex = prog.take_counts();
  for (std::uint64_t c : out.per_vertex) out.total += c;
  out.total /= 3;
  out.comparisons = prog.comparisons();
  return out;
}

}  // namespace semgraph
