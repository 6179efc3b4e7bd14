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

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "semgraph/algorithms/pagerank.hpp"
#include "semgraph/generators.hpp"

namespace semgraph {
namespace {

using testing::OracleGraph;
using testing::TempDir;

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

RunOptions workers(unsigned w) {
  RunOptions o;
  o.workers = w;
  return o;
}

TEST(PageRank, DirectedCycleIsUniform) {
  TempDir tmp;
  auto g = ingest_edges({{0, 1}, {1, 2}, {2, 0}}, 3, tmp.file("c3"), {.directed = true});
  for (auto variant : {PageRankVariant::push, PageRankVariant::pull}) {
    IoEngine io(g, {});
    auto r = pagerank(io, {}, variant, workers(1));
    ASSERT_EQ(r.ranks.size(), 3u);
    for (double x : r.ranks) EXPECT_NEAR(x, 1.0 / 3, 1e-12);
  }
}

TEST(PageRank, SingleVertex) {
  TempDir tmp;
  auto g = ingest_edges({}, 1, tmp.file("one"), {.directed = true});
  for (auto variant : {PageRankVariant::push, PageRankVariant::pull}) {
    IoEngine io(g, {});
    auto r = pagerank(io, {}, variant, workers(1));
    ASSERT_EQ(r.ranks.size(), 1u);
    EXPECT_DOUBLE_EQ(r.ranks[0], 1.0);
  }
}

TEST(PageRank, MatchesPowerIteration) {
  TempDir tmp;
  for (int seed = 0; seed < 5; ++seed) {
    const std::uint64_t n = 100;
    auto edges = erdos_renyi(n, 400, seed, true);
    OracleGraph og(edges, n, true);
    auto g = ingest_edges(edges, n, tmp.file("g"), {.directed = true});
    const auto expected = testing::power_iteration(og, 0.85);
    PageRankConfig cfg;
    cfg.delta_threshold = 1e-4;
    for (auto variant : {PageRankVariant::push, PageRankVariant::pull}) {
      IoEngine io(g, {});
      auto r = pagerank(io, cfg, variant, workers(1));
      EXPECT_LT(linf(r.ranks, expected), 1e-5) << to_string(variant) << " seed " << seed;
      EXPECT_NEAR(std::accumulate(r.ranks.begin(), r.ranks.end(), 0.0), 1.0, 1e-6);
    }
  }
}

TEST(PageRank, PushAndPullAgreeWithinTenThresholds) {
  TempDir tmp;
  struct Case {
    EdgeList edges;
    std::uint64_t n;
  };
  std::vector<Case> cases{{erdos_renyi(100, 500, 4, true), 100},
                          {erdos_renyi(2000, 8000, 4, true), 2000},
                          {barabasi_albert(1000, 5, 3, true), 1000}};
  for (const auto& c : cases) {
    auto g = ingest_edges(c.edges, c.n, tmp.file("g"), {.directed = true});
    PageRankConfig cfg;
    IoEngine io_push(g, {});
    IoEngine io_pull(g, {});
    auto push = pagerank(io_push, cfg, PageRankVariant::push, workers(1));
    auto pull = pagerank(io_pull, cfg, PageRankVariant::pull, workers(1));
    EXPECT_LE(linf(push.ranks, pull.ranks), 10 * cfg.delta_threshold / c.n) << "n=" << c.n;
  }
}

TEST(PageRank, PushIssuesFewerReadsWhenGraphFitsCache) {
  TempDir tmp;
  const std::uint64_t n = 5000;
  auto g = ingest_edges(barabasi_albert(n, 8, 3, true), n, tmp.file("ba"), {.directed = true});
  IoEngine io_push(g, {});
  IoEngine io_pull(g, {});
  auto push = pagerank(io_push, {}, PageRankVariant::push, workers(1));
  auto pull = pagerank(io_pull, {}, PageRankVariant::pull, workers(1));
  EXPECT_LT(push.run.stats.read_requests_issued, pull.run.stats.read_requests_issued);
  EXPECT_LT(push.run.stats.bytes_read_from_disk, pull.run.stats.bytes_read_from_disk);
}

TEST(PageRank, IdenticalAcrossWorkerCounts) {
  TempDir tmp;
  const std::uint64_t n = 800;
  auto g = ingest_edges(barabasi_albert(n, 4, 9, true), n, tmp.file("ba"), {.directed = true});
  for (auto variant : {PageRankVariant::push, PageRankVariant::pull}) {
    IoEngine io1(g, {});
    IoEngine io4(g, {});
    auto a = pagerank(io1, {}, variant, workers(1));
    auto b = pagerank(io4, {}, variant, workers(4));
    EXPECT_EQ(a.ranks, b.ranks);
  }
}

TEST(PageRank, UndirectedIsDomainError) {
  TempDir tmp;
  auto g = ingest_edges({{0, 1}}, 2, tmp.file("u"));
  IoEngine io(g, {});
  EXPECT_THROW(pagerank(io), domain_error);
}

TEST(PageRank, MaxIterationsRespected) {
  TempDir tmp;
  const std::uint64_t n = 300;
  auto g = ingest_edges(erdos_renyi(n, 1500, 1, true), n, tmp.file("g"), {.directed = true});
  IoEngine io(g, {});
  PageRankConfig cfg;
  cfg.max_iterations = 3;
  auto r = pagerank(io, cfg, PageRankVariant::pull, workers(1));
  EXPECT_EQ(r.iterations, 3u);
  EXPECT_EQ(r.run.supersteps, 3u);
}

TEST(PageRank, StatsWindowsAreAdditive) {
  TempDir tmp;
  const std::uint64_t n = 500;
  auto g = ingest_edges(barabasi_albert(n, 3, 5, true), n, tmp.file("g"), {.directed = true});
  const IoOptions small{.page_size = 256, .cache_bytes = 16 * 256, .io_threads = 1};

  IoEngine io(g, small);
  pagerank(io, {}, PageRankVariant::push, workers(1));
  const auto first = io.reset_stats();
  pagerank(io, {}, PageRankVariant::pull, workers(1));
  const auto second = io.reset_stats();

  // Same sequence without a reset in between.
  IoEngine combined(g, small);
  pagerank(combined, {}, PageRankVariant::push, workers(1));
  pagerank(combined, {}, PageRankVariant::pull, workers(1));
  EXPECT_EQ(first + second, combined.stats());
}

}  // namespace
}  // namespace semgraph
