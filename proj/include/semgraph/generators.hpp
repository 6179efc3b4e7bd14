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
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "semgraph/common.hpp"
#include "semgraph/graph_store.hpp"

namespace semgraph {

using EdgeList = std::vector<std::pair<vertex_id, vertex_id>>;

/// G(n, m) random graph: m distinct edges (arcs if directed), no self-loops.
inline EdgeList erdos_renyi(std::uint64_t n, std::uint64_t m, std::uint64_t seed, bool directed = false) {
  EdgeList edges;
  if (n < 2) return edges;
  const std::uint64_t max_edges = directed ? n * (n - 1) : n * (n - 1) / 2;
  m = std::min(m, max_edges);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<vertex_id> pick(0, n - 1);
  std::set<std::pair<vertex_id, vertex_id>> seen;
  while (edges.size() < m) {
    vertex_id u = pick(rng), v = pick(rng);
    if (u == v) continue;
    auto key = directed ? std::pair{u, v} : std::pair{std::min(u, v), std::max(u, v)};
    if (seen.insert(key).second) edges.emplace_back(u, v);
  }
  return edges;
}

/// Preferential attachment: each new vertex links to `per_vertex` distinct
/// earlier vertices chosen proportionally to degree. Directed output points
/// from the new vertex to its targets, plus a `reverse_fraction` of arcs
/// flipped so in- and out-degree are both skewed.
inline EdgeList barabasi_albert(std::uint64_t n, std::uint64_t per_vertex, std::uint64_t seed,
                                bool directed = false, double reverse_fraction = 0.5) {
  EdgeList edges;
  if (n < 2 || per_vertex == 0) return edges;
  std::mt19937_64 rng(seed);
  std::vector<vertex_id> pool;  // one entry per edge endpoint
  const std::uint64_t core = std::min<std::uint64_t>(n, per_vertex + 1);
  for (vertex_id u = 0; u < core; ++u) {
    for (vertex_id v = u + 1; v < core; ++v) {
      edges.emplace_back(u, v);
      pool.push_back(u);
      pool.push_back(v);
    }
  }
  std::bernoulli_distribution flip(reverse_fraction);
  std::vector<vertex_id> targets;
  for (vertex_id u = core; u < n; ++u) {
    targets.clear();
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    while (targets.size() < std::min<std::uint64_t>(per_vertex, u)) {
      const vertex_id t = pool[pick(rng)];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (vertex_id t : targets) {
      if (directed && flip(rng)) edges.emplace_back(t, u);
      else edges.emplace_back(u, t);
      pool.push_back(u);
      pool.push_back(t);
    }
  }
  return edges;
}

/// Cliques of the given sizes on consecutive ids, each joined to the next by
/// one edge between their first vertices.
inline EdgeList clique_chain(const std::vector<std::uint64_t>& sizes) {
  EdgeList edges;
  vertex_id base = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    for (vertex_id u = 0; u < sizes[c]; ++u) {
      for (vertex_id v = u + 1; v < sizes[c]; ++v) edges.emplace_back(base + u, base + v);
    }
    if (c + 1 < sizes.size()) edges.emplace_back(base, base + sizes[c]);
    base += sizes[c];
  }
  return edges;
}

/// A hub joined to `leaves` vertices, plus a ring through the leaves and
/// `extra` random chords among them.
inline EdgeList hub_and_ring(std::uint64_t leaves, std::uint64_t extra, std::uint64_t seed) {
  EdgeList edges;
  for (vertex_id v = 1; v <= leaves; ++v) {
    edges.emplace_back(0, v);
    edges.emplace_back(v, v % leaves + 1);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<vertex_id> pick(1, leaves);
  for (std::uint64_t i = 0; i < extra; ++i) {
    const vertex_id a = pick(rng);
    const vertex_id b = pick(rng);
    if (a != b) edges.emplace_back(a, b);
  }
  return edges;
}

inline void write_edge_list(std::ostream& os, const EdgeList& edges) {
  for (const auto& [u, v] : edges) os << u << ' ' << v << '\n';
}

/// Ingests an in-memory edge list. Every id in [0, n) is declared first so
/// the dense numbering equals the input numbering (isolated vertices kept).
inline GraphHandle ingest_edges(const EdgeList& edges, std::uint64_t n, const std::string& out_base,
                                IngestOptions opts = {}) {
  std::stringstream ss;
  write_edge_list(ss, edges);
  opts.preassign = n;
  return ingest_edge_list(ss, out_base, opts);
}

}  // namespace semgraph
