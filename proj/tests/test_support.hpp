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

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "semgraph/generators.hpp"
#include "semgraph/graph_store.hpp"

namespace semgraph::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "semgraph-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Sorted, deduplicated, loop-free adjacency built directly from the edges.
struct OracleGraph {
  std::uint64_t n = 0;
  bool directed = false;
  std::vector<std::vector<vertex_id>> out;
  std::vector<std::vector<vertex_id>> in;

  OracleGraph(const EdgeList& edges, std::uint64_t n_, bool directed_)
      : n(n_), directed(directed_), out(n_), in(n_) {
    for (auto [u, v] : edges) {
      if (u == v) continue;
      out[u].push_back(v);
      if (directed) in[v].push_back(u);
      else out[v].push_back(u);
    }
    for (auto* lists : {&out, &in}) {
      for (auto& l : *lists) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
      }
    }
    if (!directed) in = out;
  }

  std::uint64_t edges() const {
    std::uint64_t s = 0;
    for (auto& l : out) s += l.size();
    return directed ? s : s / 2;
  }
};

}  // namespace semgraph::testing
