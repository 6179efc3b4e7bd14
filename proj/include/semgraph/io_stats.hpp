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

#include <atomic>
#include <cstdint>
#include <string>
#include <utility>

namespace semgraph {

/// Snapshot of the monotone I/O and messaging counters for one run window.
struct IoStats {
  std::uint64_t bytes_read_from_disk = 0;
  std::uint64_t read_requests_issued = 0;
  std::uint64_t cache_accesses = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t messages_point_to_point = 0;
  std::uint64_t messages_multicast = 0;
  std::uint64_t barrier_count = 0;

  template <typename Fn>
  void for_each_counter(Fn&& fn) const {
    fn("bytes_read_from_disk", bytes_read_from_disk);
    fn("read_requests_issued", read_requests_issued);
    fn("cache_accesses", cache_accesses);
    fn("cache_hits", cache_hits);
    fn("messages_point_to_point", messages_point_to_point);
    fn("messages_multicast", messages_multicast);
    fn("barrier_count", barrier_count);
  }

  double cache_hit_ratio() const {
    return cache_accesses == 0 ? 0.0
                               : static_cast<double>(cache_hits) / static_cast<double>(cache_accesses);
  }

  IoStats& operator+=(const IoStats& o) {
    bytes_read_from_disk += o.bytes_read_from_disk;
    read_requests_issued += o.read_requests_issued;
    cache_accesses += o.cache_accesses;
    cache_hits += o.cache_hits;
    messages_point_to_point += o.messages_point_to_point;
    messages_multicast += o.messages_multicast;
    barrier_count += o.barrier_count;
    return *this;
  }
  friend IoStats operator+(IoStats a, const IoStats& b) { return a += b; }
  friend bool operator==(const IoStats&, const IoStats&) = default;

  /// Flat JSON object of counter name to integer.
  std::string to_json() const {
    std::string s = "{";
    bool first = true;
    for_each_counter([&](const char* name, std::uint64_t v) {
      if (!first) s += ", ";
      first = false;
      s += "\"";
      s += name;
      s += "\": ";
      s += std::to_string(v);
    });
    s += "}";
    return s;
  }
};

/// Shared counters updated concurrently by I/O and compute workers.
class AtomicIoStats {
 public:
  std::atomic<std::uint64_t> bytes_read_from_disk{0};
  std::atomic<std::uint64_t> read_requests_issued{0};
  std::atomic<std::uint64_t> cache_accesses{0};
  std::atomic<std::uint64_t> cache_hits{0};
  std::atomic<std::uint64_t> messages_point_to_point{0};
  std::atomic<std::uint64_t> messages_multicast{0};
  std::atomic<std::uint64_t> barrier_count{0};

  IoStats snapshot() const {
    IoStats s;
    s.bytes_read_from_disk = bytes_read_from_disk.load();
    s.read_requests_issued = read_requests_issued.load();
    s.cache_accesses = cache_accesses.load();
    s.cache_hits = cache_hits.load();
    s.messages_point_to_point = messages_point_to_point.load();
    s.messages_multicast = messages_multicast.load();
    s.barrier_count = barrier_count.load();
    return s;
  }

  /// Zeroes every counter and returns the values they held.
  IoStats reset() {
    IoStats s;
    s.bytes_read_from_disk = bytes_read_from_disk.exchange(0);
    s.read_requests_issued = read_requests_issued.exchange(0);
    s.cache_accesses = cache_accesses.exchange(0);
    s.cache_hits = cache_hits.exchange(0);
    s.messages_point_to_point = messages_point_to_point.exchange(0);
    s.messages_multicast = messages_multicast.exchange(0);
    s.barrier_count = barrier_count.exchange(0);
    return s;
  }
};

}  // namespace semgraph
