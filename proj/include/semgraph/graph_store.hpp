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

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semgraph/common.hpp"

namespace semgraph {

inline constexpr std::array<char, 4> kGraphMagic = {'S', 'E', 'M', 'G'};
inline constexpr std::uint64_t kGraphVersion = 1;
inline constexpr std::size_t kHeaderBytes = 40;
inline constexpr std::uint64_t kFlagDirected = 1;
inline constexpr std::size_t kEdgeBytes = 8;

struct GraphHeader {
  std::uint64_t version = kGraphVersion;
  std::uint64_t num_vertices = 0;
  std::uint64_t num_edges = 0;
  std::uint64_t flags = 0;

  bool directed() const { return (flags & kFlagDirected) != 0; }

  std::array<unsigned char, kHeaderBytes> encode() const {
    std::array<unsigned char, kHeaderBytes> buf{};
    std::memcpy(buf.data(), kGraphMagic.data(), 4);
    detail::store_le<std::uint64_t>(buf.data() + 8, version);
    detail::store_le<std::uint64_t>(buf.data() + 16, num_vertices);
    detail::store_le<std::uint64_t>(buf.data() + 24, num_edges);
    detail::store_le<std::uint64_t>(buf.data() + 32, flags);
    return buf;
  }

  static GraphHeader decode(std::span<const unsigned char> buf) {
    if (buf.size() < kHeaderBytes) throw format_error("graph header shorter than 40 bytes");
    if (std::memcmp(buf.data(), kGraphMagic.data(), 4) != 0) throw magic_error("bad graph magic");
    GraphHeader h;
    h.version = detail::load_le<std::uint64_t>(buf.data() + 8);
    if (h.version != kGraphVersion) {
      throw version_error("unsupported graph version " + std::to_string(h.version));
    }
    h.num_vertices = detail::load_le<std::uint64_t>(buf.data() + 16);
    h.num_edges = detail::load_le<std::uint64_t>(buf.data() + 24);
    h.flags = detail::load_le<std::uint64_t>(buf.data() + 32);
    return h;
  }
};

// On-disk index record: u64 offset, u32 degree, u32 zero pad, once per stored
// direction (out, then in for directed graphs).
inline constexpr std::size_t kIndexRecordBytes = 16;

/// In-memory per-vertex degree and byte offset of the adjacency list, per
/// stored direction. 12 bytes per vertex per direction.
class VertexIndex {
 public:
  VertexIndex() = default;
  explicit VertexIndex(std::size_t n, bool directed) : directed_(directed) {
    out_offset_.resize(n);
    out_degree_.resize(n);
    if (directed) {
      in_offset_.resize(n);
      in_degree_.resize(n);
    }
  }

  std::size_t size() const { return out_degree_.size(); }
  bool directed() const { return directed_; }

  std::uint32_t degree(vertex_id v, Direction d) const {
    if (d == Direction::in && directed_) return in_degree_[v];
    return out_degree_[v];
  }
  std::uint64_t offset(vertex_id v, Direction d) const {
    if (d == Direction::in && directed_) return in_offset_[v];
    return out_offset_[v];
  }

  void set(vertex_id v, Direction d, std::uint64_t offset, std::uint32_t degree) {
    if (d == Direction::in && directed_) {
      in_offset_[v] = offset;
      in_degree_[v] = degree;
    } else {
      out_offset_[v] = offset;
      out_degree_[v] = degree;
    }
  }

  std::size_t memory_bytes() const {
    return out_offset_.capacity() * sizeof(std::uint64_t) +
           out_degree_.capacity() * sizeof(std::uint32_t) +
           in_offset_.capacity() * sizeof(std::uint64_t) +
           in_degree_.capacity() * sizeof(std::uint32_t);
  }

 private:
  bool directed_ = false;
  std::vector<std::uint64_t> out_offset_;
  std::vector<std::uint32_t> out_degree_;
  std::vector<std::uint64_t> in_offset_;
  std::vector<std::uint32_t> in_degree_;
};

namespace detail {

inline std::atomic<std::uint64_t>& adjacency_write_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

class ReadOnlyFile {
 public:
  ReadOnlyFile() = default;
  explicit ReadOnlyFile(const std::string& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd_ < 0) throw io_error("cannot open " + path + ": " + std::strerror(errno));
    struct stat st {};
    if (::fstat(fd_, &st) != 0) {
      ::close(fd_);
      throw io_error("cannot stat " + path);
    }
    size_ = static_cast<std::uint64_t>(st.st_size);
  }
  ReadOnlyFile(const ReadOnlyFile&) = delete;
  ReadOnlyFile& operator=(const ReadOnlyFile&) = delete;
  ReadOnlyFile(ReadOnlyFile&& o) noexcept { *this = std::move(o); }
  ReadOnlyFile& operator=(ReadOnlyFile&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
      size_ = o.size_;
      path_ = std::move(o.path_);
    }
    return *this;
  }
  ~ReadOnlyFile() { reset(); }

  bool is_open() const { return fd_ >= 0; }
  std::uint64_t size() const { return size_; }
  const std::string& path() const { return path_; }

  // Reads up to buf.size() bytes at offset; short reads only at end of file.
  std::size_t read_at(std::uint64_t offset, std::span<unsigned char> buf) const {
    std::size_t done = 0;
    while (done < buf.size()) {
      ssize_t r = ::pread(fd_, buf.data() + done, buf.size() - done,
                          static_cast<off_t>(offset + done));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw io_error("pread " + path_ + ": " + std::strerror(errno));
      }
      if (r == 0) break;
      done += static_cast<std::size_t>(r);
    }
    return done;
  }

 private:
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }
  int fd_ = -1;
  std::uint64_t size_ = 0;
  std::string path_;
};

class BinaryWriter {
 public:
  BinaryWriter(const std::string& path, bool adjacency) : path_(path), adjacency_(adjacency) {
    f_ = std::fopen(path.c_str(), "wb");
    if (!f_) throw io_error("cannot create " + path + ": " + std::strerror(errno));
  }
  BinaryWriter(const BinaryWriter&) = delete;
  BinaryWriter& operator=(const BinaryWriter&) = delete;
  ~BinaryWriter() {
    if (f_) std::fclose(f_);
  }

  void write(std::span<const unsigned char> bytes) {
    if (bytes.empty()) return;
    if (std::fwrite(bytes.data(), 1, bytes.size(), f_) != bytes.size()) {
      throw io_error("short write to " + path_);
    }
    if (adjacency_) adjacency_write_counter().fetch_add(1, std::memory_order_relaxed);
  }

  void close() {
    if (f_ && std::fclose(f_) != 0) {
      f_ = nullptr;
      throw io_error("close " + path_ + " failed");
    }
    f_ = nullptr;
  }

 private:
  std::FILE* f_ = nullptr;
  std::string path_;
  bool adjacency_;
};

inline void write_u64_list(BinaryWriter& w, std::span<const vertex_id> ids,
                           std::vector<unsigned char>& scratch) {
  scratch.resize(ids.size() * kEdgeBytes);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    store_le<std::uint64_t>(scratch.data() + i * kEdgeBytes, ids[i]);
  }
  w.write(scratch);
}

inline std::string strip_graph_suffix(std::string path) {
  for (std::string_view ext : {".gyh", ".gyi", ".adj", ".iadj", ".ids"}) {
    if (path.size() > ext.size() && path.ends_with(ext)) {
      path.resize(path.size() - ext.size());
      break;
    }
  }
  return path;
}

}  // namespace detail

/// Number of write calls issued against adjacency files since process start.
/// Only ingestion writes adjacency data; algorithm runs must leave it unchanged.
inline std::uint64_t adjacency_write_count() {
  return detail::adjacency_write_counter().load(std::memory_order_relaxed);
}

struct GraphPaths {
  std::string base;
  std::string header() const { return base + ".gyh"; }
  std::string index() const { return base + ".gyi"; }
  std::string out_adjacency() const { return base + ".adj"; }
  std::string in_adjacency() const { return base + ".iadj"; }
  std::string id_map() const { return base + ".ids"; }
};

/// An opened graph: validated header, in-memory vertex index and read-only
/// handles to the adjacency files. Immutable after construction.
class GraphHandle {
 public:
  GraphHandle() = default;
  GraphHandle(GraphHandle&&) noexcept = default;
  GraphHandle& operator=(GraphHandle&&) noexcept = default;

  std::uint64_t num_vertices() const { return header_.num_vertices; }
  std::uint64_t num_edges() const { return header_.num_edges; }
  bool directed() const { return header_.directed(); }
  const GraphHeader& header() const { return header_; }
  const VertexIndex& index() const { return index_; }
  const GraphPaths& paths() const { return paths_; }

  /// Degree lookup served from the in-memory index. For undirected graphs
  /// every direction returns the single stored degree; for directed graphs
  /// `both` is out + in.
  std::uint64_t degree(vertex_id v, Direction d) const {
    if (v >= num_vertices()) {
      throw out_of_range_error("vertex " + std::to_string(v) + " out of range (n=" +
                               std::to_string(num_vertices()) + ")");
    }
    if (!directed()) return index_.degree(v, Direction::out);
    if (d == Direction::both) {
      return std::uint64_t{index_.degree(v, Direction::out)} + index_.degree(v, Direction::in);
    }
    return index_.degree(v, d);
  }

  /// File that stores adjacency lists for direction d (in == out for undirected).
  const detail::ReadOnlyFile& adjacency_file(Direction d) const {
    return (d == Direction::in && directed()) ? in_adj_ : out_adj_;
  }

  /// Original (pre-remap) id of every vertex, loaded on demand.
  std::vector<std::uint64_t> load_original_ids() const {
    detail::ReadOnlyFile f(paths_.id_map());
    if (f.size() != num_vertices() * 8) throw consistency_error("id map size mismatch");
    std::vector<unsigned char> raw(f.size());
    f.read_at(0, raw);
    std::vector<std::uint64_t> ids(num_vertices());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      ids[i] = detail::load_le<std::uint64_t>(raw.data() + 8 * i);
    }
    return ids;
  }

 private:
  friend GraphHandle open_graph(const std::string& path);

  GraphPaths paths_;
  GraphHeader header_;
  VertexIndex index_;
  detail::ReadOnlyFile out_adj_;
  detail::ReadOnlyFile in_adj_;
};

inline GraphHandle open_graph(const std::string& path) {
  GraphHandle g;
  g.paths_.base = detail::strip_graph_suffix(path);

  detail::ReadOnlyFile hf(g.paths_.header());
  std::array<unsigned char, kHeaderBytes> hbuf{};
  if (hf.read_at(0, hbuf) != kHeaderBytes) throw format_error("graph header truncated");
  g.header_ = GraphHeader::decode(hbuf);

  const std::uint64_t n = g.header_.num_vertices;
  const bool directed = g.header_.directed();
  const std::size_t record = kIndexRecordBytes * (directed ? 2 : 1);

  detail::ReadOnlyFile idx(g.paths_.index());
  if (idx.size() < n * record) {
    throw truncated_index_error("index holds " + std::to_string(idx.size()) + " bytes, expected " +
                                std::to_string(n * record));
  }
  if (idx.size() != n * record) throw consistency_error("index has trailing bytes");

  g.out_adj_ = detail::ReadOnlyFile(g.paths_.out_adjacency());
  if (directed) g.in_adj_ = detail::ReadOnlyFile(g.paths_.in_adjacency());

  g.index_ = VertexIndex(n, directed);
  std::vector<unsigned char> chunk;
  constexpr std::uint64_t kChunkVertices = 1 << 16;
  std::array<std::uint64_t, 2> expected_offset{0, 0};
  std::array<std::uint64_t, 2> degree_sum{0, 0};
  for (std::uint64_t first = 0; first < n; first += kChunkVertices) {
    const std::uint64_t count = std::min(kChunkVertices, n - first);
    chunk.resize(count * record);
    idx.read_at(first * record, chunk);
    for (std::uint64_t i = 0; i < count; ++i) {
      const unsigned char* rec = chunk.data() + i * record;
      for (int d = 0; d < (directed ? 2 : 1); ++d) {
        const unsigned char* r = rec + d * kIndexRecordBytes;
        const auto off = detail::load_le<std::uint64_t>(r);
        const auto deg = detail::load_le<std::uint32_t>(r + 8);
        if (off != expected_offset[d]) {
          throw consistency_error("vertex " + std::to_string(first + i) +
                                  ": offset does not follow previous degree");
        }
        expected_offset[d] = off + std::uint64_t{deg} * kEdgeBytes;
        degree_sum[d] += deg;
        g.index_.set(first + i, d == 0 ? Direction::out : Direction::in, off, deg);
      }
    }
  }

  if (expected_offset[0] != g.out_adj_.size()) {
    throw consistency_error("out-adjacency length " + std::to_string(g.out_adj_.size()) +
                            " does not match index (" + std::to_string(expected_offset[0]) + ")");
  }
  if (directed) {
    if (expected_offset[1] != g.in_adj_.size()) {
      throw consistency_error("in-adjacency length does not match index");
    }
    if (degree_sum[0] != g.header_.num_edges || degree_sum[1] != g.header_.num_edges) {
      throw consistency_error("degree sums do not match edge count");
    }
  } else if (degree_sum[0] != 2 * g.header_.num_edges) {
    throw consistency_error("degree sum is not twice the edge count");
  }
  return g;
}

struct IngestOptions {
  bool directed = false;
  // Raw ids 0..preassign-1 are numbered before the stream is read, so they
  // keep their value and appear even when isolated.
  std::uint64_t preassign = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Splits a line into two nonnegative integers; throws parse_error otherwise.
inline std::pair<std::uint64_t, std::uint64_t> parse_edge_line(std::string_view line,
                                                               std::size_t lineno) {
  std::array<std::uint64_t, 2> vals{};
  std::size_t count = 0;
  std::size_t pos = 0;
  const auto is_ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
  };
  while (pos < line.size()) {
    while (pos < line.size() && is_ws(line[pos])) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !is_ws(line[end])) ++end;
    if (count == 2) throw parse_error(lineno, "expected exactly two vertex ids");
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
    if (ec != std::errc() || ptr != line.data() + end) {
      throw parse_error(lineno, "invalid vertex id '" + std::string(line.substr(pos, end - pos)) +
                                    "'");
    }
    vals[count++] = v;
    pos = end;
  }
  if (count != 2) throw parse_error(lineno, "expected exactly two vertex ids");
  return {vals[0], vals[1]};
}

inline void write_direction(const std::string& path, std::size_t n,
                            const std::vector<std::pair<vertex_id, vertex_id>>& arcs,
                            std::vector<std::pair<std::uint64_t, std::uint32_t>>& index_out) {
  BinaryWriter w(path, true);
  index_out.assign(n, {0, 0});
  std::vector<unsigned char> scratch;
  std::vector<vertex_id> list;
  std::size_t i = 0;
  std::uint64_t offset = 0;
  for (vertex_id v = 0; v < n; ++v) {
    list.clear();
    while (i < arcs.size() && arcs[i].first == v) list.push_back(arcs[i++].second);
    index_out[v] = {offset, static_cast<std::uint32_t>(list.size())};
    write_u64_list(w, list, scratch);
    offset += list.size() * kEdgeBytes;
  }
  w.close();
}

}  // namespace detail

/// Converts a text edge list ("u v" per line, '#' comments) into the on-disk
/// format at `out_base` and returns the opened graph. Ids are remapped densely
/// by first appearance; self-loops and duplicate edges are dropped.
inline GraphHandle ingest_edge_list(std::istream& in, const std::string& out_base,
                                    IngestOptions opts = {}) {
  std::unordered_map<std::uint64_t, vertex_id> remap;
  std::vector<std::uint64_t> original;
  std::vector<std::pair<vertex_id, vertex_id>> arcs;

  const auto dense = [&](std::uint64_t raw) {
    auto [it, inserted] = remap.try_emplace(raw, original.size());
    if (inserted) original.push_back(raw);
    return it->second;
  };

  for (std::uint64_t raw = 0; raw < opts.preassign; ++raw) dense(raw);

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto [a, b] = detail::parse_edge_line(t, lineno);
    const vertex_id u = dense(a);
    const vertex_id v = dense(b);
    if (u == v) continue;
    arcs.emplace_back(u, v);
    if (!opts.directed) arcs.emplace_back(v, u);
  }
  if (in.bad()) throw io_error("error reading edge list");

  const std::size_t n = original.size();
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  GraphPaths paths{detail::strip_graph_suffix(out_base)};
  GraphHeader h;
  h.num_vertices = n;
  h.num_edges = opts.directed ? arcs.size() : arcs.size() / 2;
  h.flags = opts.directed ? kFlagDirected : 0;

  std::vector<std::pair<std::uint64_t, std::uint32_t>> out_index;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> in_index;
  detail::write_direction(paths.out_adjacency(), n, arcs, out_index);
  if (opts.directed) {
    for (auto& [u, v] : arcs) std::swap(u, v);
    std::sort(arcs.begin(), arcs.end());
    detail::write_direction(paths.in_adjacency(), n, arcs, in_index);
  }
  arcs.clear();
  arcs.shrink_to_fit();

  {
    detail::BinaryWriter w(paths.index(), false);
    const std::size_t record = kIndexRecordBytes * (opts.directed ? 2 : 1);
    std::vector<unsigned char> buf(record * n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      unsigned char* r = buf.data() + v * record;
      detail::store_le<std::uint64_t>(r, out_index[v].first);
      detail::store_le<std::uint32_t>(r + 8, out_index[v].second);
      if (opts.directed) {
        detail::store_le<std::uint64_t>(r + 16, in_index[v].first);
        detail::store_le<std::uint32_t>(r + 24, in_index[v].second);
      }
    }
    w.write(buf);
    w.close();
  }
  {
    detail::BinaryWriter w(paths.id_map(), false);
    std::vector<unsigned char> scratch;
    detail::write_u64_list(w, original, scratch);
    w.close();
  }
  {
    // Header last: a graph is only openable once every other file is complete.
    detail::BinaryWriter w(paths.header(), false);
    const auto buf = h.encode();
    w.write(buf);
    w.close();
  }
  return open_graph(paths.base);
}

inline GraphHandle ingest_edge_list_file(const std::string& edge_list_path,
                                         const std::string& out_base, IngestOptions opts = {}) {
  std::ifstream in(edge_list_path);
  if (!in) throw io_error("cannot open edge list " + edge_list_path);
  return ingest_edge_list(in, out_base, opts);
}

inline std::uint64_t degree(const GraphHandle& g, vertex_id v, Direction d) {
  return g.degree(v, d);
}

}  // namespace semgraph
