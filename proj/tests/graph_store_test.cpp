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
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "semgraph/generators.hpp"
#include "semgraph/graph_store.hpp"
#include "semgraph/io_engine.hpp"
#include "test_support.hpp"

namespace semgraph {
namespace {

using testing::OracleGraph;
using testing::TempDir;

GraphHandle ingest_text(const std::string& text, const std::string& base, bool directed = false) {
  std::istringstream in(text);
  return ingest_edge_list(in, base, {.directed = directed});
}

TEST(Ingest, Triangle) {
  TempDir tmp;
  auto g = ingest_text("0 1\n1 2\n2 0\n", tmp.file("k3"));
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 3u);
  EXPECT_FALSE(g.directed());
  for (vertex_id v = 0; v < 3; ++v) EXPECT_EQ(g.degree(v, Direction::out), 2u);
}

TEST(Ingest, DuplicatesAndReversalCollapse) {
  TempDir tmp;
  auto g = ingest_text("0 1\n0 1\n1 0\n", tmp.file("g"));
  EXPECT_EQ(g.num_vertices(), 2u);
  EXPECT_EQ(g.num_edges(), 1u);
}

TEST(Ingest, CommentsWhitespaceSelfLoopsAndRemap) {
  TempDir tmp;
  auto g = ingest_text("# header\n\n  100\t7 \n7   7\n7 42\n", tmp.file("g"));
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.load_original_ids(), (std::vector<std::uint64_t>{100, 7, 42}));
  EXPECT_EQ(g.degree(1, Direction::out), 2u);
}

TEST(Ingest, EmptyInputIsValidEmptyGraph) {
  TempDir tmp;
  auto g = ingest_text("", tmp.file("empty"));
  EXPECT_EQ(g.num_vertices(), 0u);
  EXPECT_EQ(g.num_edges(), 0u);
  auto again = open_graph(tmp.file("empty"));
  EXPECT_EQ(again.num_vertices(), 0u);
}

TEST(Ingest, MalformedLineReportsLineNumber) {
  TempDir tmp;
  for (const char* bad : {"0 1\n# ok\n2 x\n", "0 1\n\n3\n", "0 1\n1 2\n1 2 3\n", "#\n0 1\n-1 2\n"}) {
    try {
      ingest_text(bad, tmp.file("bad"));
      FAIL() << "no error for " << bad;
    } catch (const parse_error& e) {
      EXPECT_EQ(e.line(), 3u) << bad;
    }
  }
}

TEST(Ingest, HeaderMatchesIndependentRecount) {
  TempDir tmp;
  auto edges = erdos_renyi(400, 1000, 17);
  // Add noise the ingester must drop.
  edges.push_back(edges[5]);
  edges.emplace_back(edges[9].second, edges[9].first);
  edges.emplace_back(3, 3);
  std::stringstream text;
  write_edge_list(text, edges);
  const std::string s = text.str();

  // Line-by-line recount.
  std::set<std::uint64_t> ids;
  std::set<std::pair<std::uint64_t, std::uint64_t>> undirected;
  std::istringstream lines(s);
  std::uint64_t a, b;
  while (lines >> a >> b) {
    ids.insert(a);
    ids.insert(b);
    if (a != b) undirected.emplace(std::min(a, b), std::max(a, b));
  }
  std::istringstream in(s);
  auto g = ingest_edge_list(in, tmp.file("er"));
  EXPECT_EQ(g.num_vertices(), ids.size());
  EXPECT_EQ(g.num_edges(), undirected.size());
  EXPECT_EQ(g.num_edges(), 1000u);
}

TEST(OpenGraph, RoundTripK3) {
  TempDir tmp;
  ingest_text("0 1\n1 2\n2 0\n", tmp.file("k3"));
  auto g = open_graph(tmp.file("k3"));
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 3u);
  auto g2 = open_graph(tmp.file("k3.gyh"));
  EXPECT_EQ(g2.num_vertices(), 3u);
}

void patch(const std::string& path, std::uint64_t offset, std::span<const unsigned char> bytes) {
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(static_cast<std::streamoff>(offset));
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

TEST(OpenGraph, ValidationErrorsAreDistinct) {
  TempDir tmp;
  const std::string base = tmp.file("k4");
  ingest_text("0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n", base);

  {
    const unsigned char junk[4] = {'X', 'X', 'X', 'X'};
    patch(base + ".gyh", 0, junk);
    EXPECT_THROW(open_graph(base), magic_error);
    const unsigned char good[4] = {'S', 'E', 'M', 'G'};
    patch(base + ".gyh", 0, good);
  }
  {
    unsigned char v[8];
    detail::store_le<std::uint64_t>(v, 2);
    patch(base + ".gyh", 8, v);
    EXPECT_THROW(open_graph(base), version_error);
    detail::store_le<std::uint64_t>(v, 1);
    patch(base + ".gyh", 8, v);
  }
  EXPECT_NO_THROW(open_graph(base));
  {
    const auto size = std::filesystem::file_size(base + ".gyi");
    std::filesystem::resize_file(base + ".gyi", size - 4);
    EXPECT_THROW(open_graph(base), truncated_index_error);
    std::filesystem::resize_file(base + ".gyi", size);
  }
  {
    // Index no longer matches the adjacency file length.
    std::ofstream(base + ".adj", std::ios::app | std::ios::binary) << std::string(8, '\0');
    EXPECT_THROW(open_graph(base), consistency_error);
    std::filesystem::resize_file(base + ".adj", 12 * 8);
    EXPECT_NO_THROW(open_graph(base));
  }
  {
    // Degree of vertex 0 changed: offsets stop chaining.
    unsigned char d[4];
    detail::store_le<std::uint32_t>(d, 2);
    patch(base + ".gyi", 8, d);
    EXPECT_THROW(open_graph(base), consistency_error);
  }
  EXPECT_THROW(open_graph(tmp.file("missing")), io_error);
}

TEST(Degree, DirectedEdge) {
  TempDir tmp;
  auto g = ingest_text("0 1\n", tmp.file("d"), true);
  EXPECT_TRUE(g.directed());
  EXPECT_EQ(degree(g, 0, Direction::out), 1u);
  EXPECT_EQ(degree(g, 0, Direction::in), 0u);
  EXPECT_EQ(degree(g, 1, Direction::in), 1u);
  EXPECT_EQ(degree(g, 1, Direction::both), 1u);
  EXPECT_THROW(degree(g, 2, Direction::out), out_of_range_error);
}

TEST(Degree, CompleteGraphK4) {
  TempDir tmp;
  auto g = ingest_text("0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n", tmp.file("k4"));
  for (vertex_id v = 0; v < 4; ++v) EXPECT_EQ(degree(g, v, Direction::both), 3u);
}

TEST(Degree, RandomGraphsMatchAdjacencyMapOracle) {
  TempDir tmp;
  for (bool directed : {false, true}) {
    for (int seed = 0; seed < 5; ++seed) {
      const std::uint64_t n = 150;
      auto edges = barabasi_albert(n, 3, seed, directed);
      OracleGraph og(edges, n, directed);
      auto g = ingest_edges(edges, n, tmp.file("g"), {.directed = directed});
      ASSERT_EQ(g.num_edges(), og.edges());
      for (vertex_id v = 0; v < n; ++v) {
        EXPECT_EQ(g.degree(v, Direction::out), og.out[v].size());
        EXPECT_EQ(g.degree(v, Direction::in), og.in[v].size());
      }
    }
  }
}

TEST(GraphStore, RoundTripThroughIoEngine) {
  TempDir tmp;
  for (bool directed : {false, true}) {
    const std::uint64_t n = 300;
    auto edges = erdos_renyi(n, 2000, 99, directed);
    OracleGraph og(edges, n, directed);
    const auto writes_before = adjacency_write_count();
    auto g = ingest_edges(edges, n, tmp.file("rt"), {.directed = directed});
    EXPECT_GT(adjacency_write_count(), writes_before);
    const auto writes_after_ingest = adjacency_write_count();
    IoEngine io(g, {.page_size = 128, .cache_bytes = 1024, .io_threads = 2});
    for (vertex_id v = 0; v < n; ++v) {
      EXPECT_EQ(io.read_adjacency(v, Direction::out), og.out[v]);
      EXPECT_EQ(io.read_adjacency(v, Direction::in), og.in[v]);
    }
    EXPECT_EQ(adjacency_write_count(), writes_after_ingest);
  }
}

TEST(GraphStore, IndexMemoryIsLinearInVertices) {
  TempDir tmp;
  const std::uint64_t n = 5000;
  auto und = ingest_edges(erdos_renyi(n, 40000, 1), n, tmp.file("u"));
  EXPECT_LE(und.index().memory_bytes(), 24 * n + 64);
  auto dir = ingest_edges(erdos_renyi(n, 40000, 1, true), n, tmp.file("d"), {.directed = true});
  EXPECT_LE(dir.index().memory_bytes(), 48 * n + 64);
}

TEST(GraphStore, HeaderEncodingIsLittleEndian) {
  GraphHeader h;
  h.num_vertices = 0x0102;
  h.num_edges = 3;
  h.flags = kFlagDirected;
  const auto buf = h.encode();
  EXPECT_EQ(std::string(buf.begin(), buf.begin() + 4), "SEMG");
  EXPECT_EQ(buf[8], 1);
  EXPECT_EQ(buf[16], 0x02);
  EXPECT_EQ(buf[17], 0x01);
  EXPECT_EQ(buf[32], 1);
  const auto back = GraphHeader::decode(buf);
  EXPECT_EQ(back.num_vertices, 0x0102u);
  EXPECT_TRUE(back.directed());
}

}  // namespace
}  // namespace semgraph
