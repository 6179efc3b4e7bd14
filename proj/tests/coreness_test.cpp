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

#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "semgraph/algorithms/coreness.hpp"
#include "semgraph/generators.hpp"

namespace semgraph {
namespace {

using testing::OracleGraph;
using testing::TempDir;

const CorenessConfig kConfigs[] = {
    {.pruning = false, .hybrid_messaging = false},
    {.pruning = false, .hybrid_messaging = true},
    {.pruning = true, .hybrid_messaging = false},
    {.pruning = true, .hybrid_messaging = true},
};

RunOptions workers(unsigned w) {
  RunOptions o;
  o.workers = w;
  return o;
}

std::vector<std::uint64_t> widen(const std::vector<std::uint32_t>& v) { return {v.begin(), v.end()}; }

TEST(Coreness, CompleteGraph) {
  TempDir tmp;
  auto g = ingest_edges(clique_chain({4}), 4, tmp.file("k4"));
  for (const auto& cfg : kConfigs) {
    IoEngine io(g, {});
    auto r = coreness(io, cfg, workers(1));
    EXPECT_EQ(r.core, std::vector<std::uint32_t>(4, 3));
    EXPECT_EQ(r.k_max, 3u);
  }
}

TEST(Coreness, Star) {
  TempDir tmp;
  auto g = ingest_edges({{0, 1}, {0, 2}, {0, 3}, {0, 4}}, 5, tmp.file("s5"));
  IoEngine io(g, {});
  EXPECT_EQ(coreness(io, {}, workers(1)).core, std::vector<std::uint32_t>(5, 1));
}

TEST(Coreness, IsolatedVerticesHaveCoreZero) {
  TempDir tmp;
  auto g = ingest_edges({{0, 1}}, 4, tmp.file("g"));
  for (const auto& cfg : kConfigs) {
    IoEngine io(g, {});
    EXPECT_EQ(coreness(io, cfg, workers(2)).core, (std::vector<std::uint32_t>{1, 1, 0, 0}));
  }
}

TEST(Coreness, MatchesPeelingOracle) {
  TempDir tmp;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::uint64_t n = 20 + (seed * 37) % 181;
    auto edges = seed % 2 ? barabasi_albert(n, 1 + seed % 6, seed) : erdos_renyi(n, n * (1 + seed % 5), seed);
    OracleGraph og(edges, n, false);
    auto g = ingest_edges(edges, n, tmp.file("g" + std::to_string(seed)));
    const auto expected = testing::peeling(og);
    for (const auto& cfg : kConfigs) {
      IoEngine io(g, {});
      auto r = coreness(io, cfg, workers(1 + seed % 4));
      ASSERT_EQ(widen(r.core), expected) << "seed " << seed << " pruning " << cfg.pruning << " hybrid "
                                         << cfg.hybrid_messaging;
    }
  }
}

TEST(Coreness, PruningSkipsAbsentCoreValues) {
  TempDir tmp;
  const std::vector<std::uint64_t> sizes{11, 21, 31, 41, 51};
  const std::uint64_t n = 155;
  auto g = ingest_edges(clique_chain(sizes), n, tmp.file("chain"));
  IoEngine a(g, {});
  IoEngine b(g, {});
  auto plain = coreness(a, {.pruning = false, .hybrid_messaging = false}, workers(1));
  auto pruned = coreness(b, {.pruning = true, .hybrid_messaging = true}, workers(1));
  EXPECT_EQ(plain.core, pruned.core);
  EXPECT_EQ(pruned.k_max, 50u);
  EXPECT_EQ(plain.k_sequence.size(), 51u);
  EXPECT_EQ(pruned.k_sequence, (std::vector<std::uint32_t>{10, 20, 30, 40, 50}));
}

TEST(Coreness, PrunedSequenceIsStrictlyIncreasing) {
  TempDir tmp;
  const std::uint64_t n = 300;
  auto g = ingest_edges(barabasi_albert(n, 4, 9), n, tmp.file("g"));
  IoEngine io(g, {});
  auto r = coreness(io, {}, workers(2));
  ASSERT_FALSE(r.k_sequence.empty());
  EXPECT_TRUE(std::is_sorted(r.k_sequence.begin(), r.k_sequence.end()));
  EXPECT_EQ(std::set<std::uint32_t>(r.k_sequence.begin(), r.k_sequence.end()).size(), r.k_sequence.size());
  EXPECT_EQ(r.k_sequence.back(), r.k_max);
}

TEST(Coreness, HybridSwitchesToPointToPoint) {
  TempDir tmp;
  const std::uint64_t n = 400;
  auto g = ingest_edges(barabasi_albert(n, 3, 5), n, tmp.file("g"));
  IoEngine a(g, {});
  IoEngine b(g, {});
  auto multicast_only = coreness(a, {.pruning = true, .hybrid_messaging = false}, workers(1));
  auto hybrid = coreness(b, {.pruning = true, .hybrid_messaging = true, .hybrid_fraction = 0.5}, workers(1));
  EXPECT_EQ(multicast_only.core, hybrid.core);
  EXPECT_EQ(multicast_only.run.stats.messages_point_to_point, 0u);
  EXPECT_GT(hybrid.run.stats.messages_point_to_point, 0u);
  EXPECT_LT(hybrid.run.stats.messages_multicast, multicast_only.run.stats.messages_multicast);
  // Only live neighbours are addressed, so fewer than the 2m list entries.
  EXPECT_LT(hybrid.run.stats.messages_point_to_point, 2 * g.num_edges());
}

TEST(Coreness, AgreesAcrossWorkerCounts) {
  TempDir tmp;
  const std::uint64_t n = 2000;
  auto g = ingest_edges(barabasi_albert(n, 5, 21), n, tmp.file("g"));
  IoEngine a(g, {});
  IoEngine b(g, {});
  auto r1 = coreness(a, {}, workers(1));
  auto r4 = coreness(b, {}, workers(4));
  EXPECT_EQ(r1.core, r4.core);
  EXPECT_EQ(r1.k_sequence, r4.k_sequence);
}

TEST(Coreness, DirectedGraphRejected) {
  TempDir tmp;
  auto g = ingest_edges({{0, 1}}, 2, tmp.file("d"), {.directed = true});
  IoEngine io(g, {});
  EXPECT_THROW(coreness(io), domain_error);
}

}  // namespace
}  // namespace semgraph
