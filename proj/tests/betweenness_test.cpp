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

#include <numeric>

#include "oracles.hpp"
#include "semgraph/algorithms/betweenness.hpp"
#include "semgraph/generators.hpp"

namespace semgraph {
namespace {

using testing::OracleGraph;
using testing::TempDir;

constexpr BcVariant kVariants[] = {BcVariant::uni, BcVariant::multi_sync, BcVariant::multi_async};

std::vector<vertex_id> all_vertices(std::uint64_t n) {
  std::vector<vertex_id> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

RunOptions workers(unsigned w) {
  RunOptions o;
  o.workers = w;
  return o;
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b, double tol, const std::string& what) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << what << " vertex " << i;
}

TEST(Betweenness, PathOfThree) {
  TempDir tmp;
  auto g = ingest_edges({{0, 1}, {1, 2}}, 3, tmp.file("p3"));
  for (auto v : kVariants) {
    IoEngine io(g, {});
    auto r = betweenness(io, all_vertices(3), v, 64, workers(1));
    expect_close(r.centrality, {0.0, 2.0, 0.0}, 1e-12, to_string(v));
  }
}

TEST(Betweenness, StarWithThreeLeaves) {
  TempDir tmp;
  auto g = ingest_edges({{0, 1}, {0, 2}, {0, 3}}, 4, tmp.file("s4"));
  for (auto v : kVariants) {
    IoEngine io(g, {});
    auto r = betweenness(io, all_vertices(4), v, 64, workers(1));
    expect_close(r.centrality, {6.0, 0.0, 0.0, 0.0}, 1e-12, to_string(v));
  }
}

TEST(Betweenness, MatchesDenseBrandes) {
  TempDir tmp;
  for (int seed = 0; seed < 30; ++seed) {
    const std::uint64_t n = 10 + (seed * 13) % 51;
    const bool directed = seed % 4 == 3;
    auto edges = seed % 2 ? barabasi_albert(n, 2, seed, directed) : erdos_renyi(n, 2 * n, seed, directed);
    OracleGraph og(edges, n, directed);
    auto g = ingest_edges(edges, n, tmp.file("g"), {.directed = directed});
    const auto sources = all_vertices(n);
    const auto expected = testing::brandes(og, sources);
    for (auto v : kVariants) {
      IoEngine io(g, {.page_size = 256, .cache_bytes = 4096, .io_threads = 1});
      auto r = betweenness(io, sources, v, 16, workers(1));
      expect_close(r.centrality, expected, 1e-9, std::string(to_string(v)) + " seed " + std::to_string(seed));
    }
  }
}

TEST(Betweenness, AgreesAcrossWorkerCounts) {
  TempDir tmp;
  const std::uint64_t n = 300;
  auto g = ingest_edges(barabasi_albert(n, 3, 4), n, tmp.file("g"));
  std::vector<vertex_id> sources;
  for (vertex_id s = 0; s < 40; ++s) sources.push_back(s * 7 % n);
  for (auto v : kVariants) {
    IoEngine a(g, {});
    IoEngine b(g, {});
    auto r1 = betweenness(a, sources, v, 64, workers(1));
    auto r4 = betweenness(b, sources, v, 64, workers(4));
    // Combined sums may fold in a different order, so reals agree to 1e-9.
    expect_close(r4.centrality, r1.centrality, 1e-9, to_string(v));
  }
}

TEST(Betweenness, SubsetOfSourcesAndDependencies) {
  TempDir tmp;
  const std::uint64_t n = 120;
  auto edges = erdos_renyi(n, 300, 77);
  OracleGraph og(edges, n, false);
  auto g = ingest_edges(edges, n, tmp.file("g"));
  const std::vector<vertex_id> sources{5, 17, 17, 90};
  const auto expected = testing::brandes(og, sources);
  IoEngine io(g, {});
  auto r = betweenness(io, sources, BcVariant::multi_async, 64, workers(2));
  expect_close(r.centrality, expected, 1e-9, "subset");
  ASSERT_EQ(r.source_dependency.size(), sources.size());
  double total = 0;
  for (double d : r.source_dependency) total += d;
  EXPECT_NEAR(total, std::accumulate(r.centrality.begin(), r.centrality.end(), 0.0), 1e-9);
}

TEST(Betweenness, BatchesLargerThanSixtyFour) {
  TempDir tmp;
  const std::uint64_t n = 90;
  auto edges = barabasi_albert(n, 2, 8);
  OracleGraph og(edges, n, false);
  auto g = ingest_edges(edges, n, tmp.file("g"));
  const auto sources = all_vertices(n);
  IoEngine io(g, {});
  auto r = betweenness(io, sources, BcVariant::multi_sync, 64, workers(1));
  expect_close(r.centrality, testing::brandes(og, sources), 1e-9, "batched");
}

TEST(Betweenness, InvalidSourceRejected) {
  TempDir tmp;
  auto g = ingest_edges({{0, 1}}, 2, tmp.file("g"));
  IoEngine io(g, {});
  const std::vector<vertex_id> bad{3};
  EXPECT_THROW(betweenness(io, bad), out_of_range_error);
}

}  // namespace
}  // namespace semgraph
