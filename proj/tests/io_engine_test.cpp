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

#include <filesystem>
#include <map>
#include <random>
#include <set>

#include <json.hpp>

#include "semgraph/generators.hpp"
#include "semgraph/io_engine.hpp"
#include "test_support.hpp"

namespace semgraph {
namespace {

using testing::OracleGraph;
using testing::TempDir;

// Textbook second-chance clock over an access string of page ids.
std::uint64_t simulate_clock_misses(const std::vector<std::uint64_t>& accesses, std::size_t frames) {
  struct Slot {
    bool used = false;
    std::uint64_t page = 0;
    bool ref = false;
  };
  std::vector<Slot> slots(frames);
  std::size_t hand = 0;
  std::uint64_t misses = 0;
  for (std::uint64_t p : accesses) {
    bool hit = false;
    for (auto& s : slots) {
      if (s.used && s.page == p) {
        s.ref = true;
        hit = true;
        break;
      }
    }
    if (hit) continue;
    ++misses;
    for (;;) {
      Slot& s = slots[hand];
      hand = (hand + 1) % frames;
      if (!s.used || !s.ref) {
        s = {true, p, true};
        break;
      }
      s.ref = false;
    }
  }
  return misses;
}

std::vector<AdjacencyRequest> one(vertex_id v, Direction d = Direction::out) { return {{v, d, v}}; }

TEST(IoEngine, WarmCacheSecondAccessHits) {
  TempDir tmp;
  auto g = ingest_edges({{0, 1}, {0, 2}, {1, 2}}, 3, tmp.file("k3"));
  IoEngine io(g, {.page_size = 4096, .cache_bytes = 1 << 20, .io_threads = 1});
  CompletionQueue q;
  io.submit(one(0), q);
  auto c1 = q.pop();
  ASSERT_FALSE(c1.error);
  EXPECT_EQ(*c1.list, (AdjacencyList{1, 2}));
  const auto cold = io.stats();
  EXPECT_EQ(cold.bytes_read_from_disk, 4096u);
  EXPECT_EQ(cold.cache_hits, 0u);
  io.submit(one(0), q);
  q.pop();
  const auto warm = io.stats();
  EXPECT_EQ(warm.bytes_read_from_disk, cold.bytes_read_from_disk);
  EXPECT_EQ(warm.cache_hits, 1u);
  EXPECT_EQ(warm.cache_accesses, 2u);
}

TEST(IoEngine, SharedPageReadOnceTwoCompletions) {
  TempDir tmp;
  auto g = ingest_edges({{0, 1}, {0, 2}, {1, 2}}, 3, tmp.file("k3"));
  IoEngine io(g, {.page_size = 4096, .cache_bytes = 1 << 20, .io_threads = 2});
  CompletionQueue q;
  std::vector<AdjacencyRequest> batch{{0, Direction::out, 10}, {2, Direction::out, 20}};
  io.submit(batch, q);
  std::map<std::uint64_t, AdjacencyList> got;
  for (int i = 0; i < 2; ++i) {
    auto c = q.pop();
    got[c.request.tag] = *c.list;
  }
  EXPECT_EQ(got[10], (AdjacencyList{1, 2}));
  EXPECT_EQ(got[20], (AdjacencyList{0, 1}));
  EXPECT_EQ(io.stats().read_requests_issued, 1u);
  EXPECT_EQ(io.stats().bytes_read_from_disk, 4096u);
}

TEST(IoEngine, DuplicateRequestsInBatchCoalesce) {
  TempDir tmp;
  const std::uint64_t n = 200;
  auto g = ingest_edges(erdos_renyi(n, 3000, 4), n, tmp.file("g"));
  IoEngine io(g, {.page_size = 64, .cache_bytes = 64 * 1024, .io_threads = 0});
  CompletionQueue q;
  std::vector<AdjacencyRequest> batch;
  for (int rep = 0; rep < 3; ++rep) {
    for (vertex_id v = 0; v < n; v += 7) batch.push_back({v, Direction::out, v * 10 + rep});
  }
  std::set<std::pair<std::uint64_t, std::uint64_t>> pages;
  for (vertex_id v = 0; v < n; v += 7) {
    const auto off = g.index().offset(v, Direction::out);
    const auto deg = g.index().degree(v, Direction::out);
    for (auto p = off / 64; p * 64 < off + deg * 8; ++p) pages.emplace(0, p);
  }
  io.submit(batch, q);
  std::size_t completions = 0;
  Completion c;
  while (q.try_pop(c)) ++completions;
  EXPECT_EQ(completions, batch.size());
  EXPECT_LE(io.stats().read_requests_issued, pages.size());
  // Each list was assembled once: accesses equal the distinct pages per list.
  std::uint64_t per_list = 0;
  for (vertex_id v = 0; v < n; v += 7) {
    const auto off = g.index().offset(v, Direction::out);
    const auto deg = g.index().degree(v, Direction::out);
    for (auto p = off / 64; p * 64 < off + deg * 8; ++p) ++per_list;
  }
  EXPECT_EQ(io.stats().cache_accesses, per_list);
}

TEST(IoEngine, MissesMatchReferenceClockSimulator) {
  TempDir tmp;
  const std::uint64_t n = 120;
  auto edges = erdos_renyi(n, 700, 21);
  OracleGraph og(edges, n, false);
  auto g = ingest_edges(edges, n, tmp.file("g"));
  const std::size_t page = 64;

  // Offsets from the oracle degrees, not from the index under test.
  std::vector<std::uint64_t> offset(n + 1, 0);
  for (vertex_id v = 0; v < n; ++v) offset[v + 1] = offset[v] + og.out[v].size() * 8;

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    IoEngine io(g, {.page_size = page, .cache_bytes = 4 * page, .io_threads = 0});
    std::vector<std::uint64_t> accesses;
    CompletionQueue q;
    for (int i = 0; i < 500; ++i) {
      const vertex_id v = rng() % n;
      for (auto p = offset[v] / page; p * page < offset[v + 1]; ++p) accesses.push_back(p);
      io.submit(one(v), q);
      auto c = q.pop();
      ASSERT_EQ(*c.list, og.out[v]);
    }
    const auto misses = simulate_clock_misses(accesses, 4);
    const auto s = io.stats();
    EXPECT_EQ(s.bytes_read_from_disk, page * misses);
    EXPECT_EQ(s.cache_accesses, accesses.size());
    EXPECT_EQ(s.cache_hits, accesses.size() - misses);
    EXPECT_LE(io.cache().peak_resident_bytes(), 4 * page);
  }
}

TEST(IoEngine, CountersReproducibleWithFixedOrder) {
  TempDir tmp;
  const std::uint64_t n = 500;
  auto g = ingest_edges(barabasi_albert(n, 4, 2), n, tmp.file("g"));
  IoStats first;
  for (int run = 0; run < 3; ++run) {
    IoEngine io(g, {.page_size = 256, .cache_bytes = 8 * 256, .io_threads = 1});
    CompletionQueue q;
    for (vertex_id v = 0; v < n; v += 3) {
      io.submit(one(v), q);
      q.pop();
    }
    if (run == 0) first = io.stats();
    else EXPECT_EQ(io.stats(), first);
  }
}

TEST(IoEngine, ConcurrentReadersSeeCorrectLists) {
  TempDir tmp;
  const std::uint64_t n = 400;
  auto edges = erdos_renyi(n, 5000, 6, true);
  OracleGraph og(edges, n, true);
  auto g = ingest_edges(edges, n, tmp.file("g"), {.directed = true});
  IoEngine io(g, {.page_size = 64, .cache_bytes = 16 * 64, .io_threads = 4});
  CompletionQueue q;
  std::vector<AdjacencyRequest> batch;
  for (vertex_id v = 0; v < n; ++v) {
    batch.push_back({v, Direction::out, v});
    batch.push_back({v, Direction::in, v});
  }
  io.submit(batch, q);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto c = q.pop();
    ASSERT_FALSE(c.error);
    const auto& expected = c.request.dir == Direction::in ? og.in[c.request.tag] : og.out[c.request.tag];
    EXPECT_EQ(*c.list, expected);
  }
  EXPECT_LE(io.cache().peak_resident_bytes(), 16u * 64);
  EXPECT_LE(io.stats().cache_hits, io.stats().cache_accesses);
  EXPECT_EQ(io.stats().bytes_read_from_disk % 64, 0u);
}

TEST(IoEngine, ResetStatsReturnsSnapshot) {
  TempDir tmp;
  auto g = ingest_edges({{0, 1}}, 2, tmp.file("e"));
  IoEngine io(g, {});
  io.read_adjacency(0, Direction::out);
  const auto snap = io.reset_stats();
  EXPECT_EQ(snap.cache_accesses, 1u);
  EXPECT_EQ(io.stats(), IoStats{});
  EXPECT_EQ(io.reset_stats(), IoStats{});
}

TEST(IoEngine, InvalidVertexRejectedAtSubmit) {
  TempDir tmp;
  auto g = ingest_edges({{0, 1}}, 2, tmp.file("e"));
  IoEngine io(g, {});
  CompletionQueue q;
  EXPECT_THROW(io.submit(one(5), q), out_of_range_error);
}

TEST(IoEngine, ReadFailureCarriesVertex) {
  TempDir tmp;
  const std::uint64_t n = 50;
  auto g = ingest_edges(erdos_renyi(n, 300, 1), n, tmp.file("g"));
  std::filesystem::resize_file(tmp.file("g.adj"), 16);
  IoEngine io(g, {.page_size = 64, .cache_bytes = 1024, .io_threads = 1});
  CompletionQueue q;
  const vertex_id v = n - 1;
  io.submit(one(v), q);
  auto c = q.pop();
  ASSERT_TRUE(c.error);
  try {
    std::rethrow_exception(c.error);
  } catch (const request_error& e) {
    EXPECT_EQ(e.vertex(), v);
  }
}

TEST(IoStats, JsonHasEveryCounter) {
  IoStats s;
  s.bytes_read_from_disk = 4096;
  s.barrier_count = 3;
  auto j = nlohmann::json::parse(s.to_json());
  for (const char* k : {"bytes_read_from_disk", "read_requests_issued", "cache_accesses", "cache_hits",
                        "messages_point_to_point", "messages_multicast", "barrier_count"}) {
    ASSERT_TRUE(j.contains(k)) << k;
    EXPECT_TRUE(j[k].is_number_integer());
  }
  EXPECT_EQ(j["bytes_read_from_disk"], 4096);
  EXPECT_EQ(j["barrier_count"], 3);
}

TEST(IoOptions, CacheBytesFromEnvironment) {
  setenv("SEMGRAPH_CACHE_BYTES", "123456", 1);
  EXPECT_EQ(IoOptions::from_env().cache_bytes, 123456u);
  unsetenv("SEMGRAPH_CACHE_BYTES");
  EXPECT_EQ(IoOptions::from_env().cache_bytes, kDefaultCacheBytes);
}

}  // namespace
}  // namespace semgraph
