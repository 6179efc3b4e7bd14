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

#include <bit>
#include <cstdint>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

namespace semgraph {

using vertex_id = std::uint64_t;

inline constexpr vertex_id kInvalidVertex = std::numeric_limits<vertex_id>::max();

enum class Direction : std::uint8_t { out = 0, in = 1, both = 2 };

inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::out: return "out";
    case Direction::in: return "in";
    case Direction::both: return "both";
  }
  return "?";
}

// Error hierarchy. Everything the library throws derives from semgraph::error.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class parse_error : public error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class io_error : public error {
 public:
  using error::error;
};

class format_error : public error {
 public:
  using error::error;
};
class magic_error : public format_error {
 public:
  using format_error::format_error;
};
class version_error : public format_error {
 public:
  using format_error::format_error;
};
class truncated_index_error : public format_error {
 public:
  using format_error::format_error;
};
class consistency_error : public format_error {
 public:
  using format_error::format_error;
};

class out_of_range_error : public error {
 public:
  using error::error;
};

/// Algorithm precondition on the graph kind (e.g. directed required).
class domain_error : public error {
 public:
  using error::error;
};

/// Failed adjacency read; carries the vertex whose list could not be read.
class request_error : public io_error {
 public:
  request_error(vertex_id v, const std::string& what)
      : io_error("adjacency read for vertex " + std::to_string(v) + " failed: " + what),
        vertex_(v) {}
  vertex_id vertex() const noexcept { return vertex_; }

 private:
  vertex_id vertex_;
};

class memory_contract_error : public error {
 public:
  using error::error;
};

class superstep_cap_error : public error {
 public:
  using error::error;
};

class not_ready_error : public error {
 public:
  using error::error;
};

namespace detail {

template <typename T>
constexpr T byteswap_(T v) {
  T out = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out = static_cast<T>((out << 8) | ((v >> (8 * i)) & 0xff));
  }
  return out;
}

template <typename T>
inline T load_le(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) v = byteswap_(v);
  return v;
}

template <typename T>
inline void store_le(unsigned char* p, T v) {
  if constexpr (std::endian::native == std::endian::big) v = byteswap_(v);
  std::memcpy(p, &v, sizeof(T));
}

}  // namespace detail

}  // namespace semgraph
