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

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "semgraph/common.hpp"
#include "semgraph/io_stats.hpp"

namespace semgraph {

struct PageKey {
  std::uint32_t file = 0;
  std::uint64_t page = 0;
  friend bool operator==(const PageKey&, const PageKey&) = default;
};

struct PageKeyHash {
  std::size_t operator()(const PageKey& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.page * 0x9e3779b97f4a7c15ULL ^ k.file);
  }
};

/// Bounded page cache with clock (second-chance) replacement.
///
/// Frames sit on a ring swept by a hand. A hit sets the frame's reference
/// bit. On a miss the hand advances: an empty frame is taken immediately, a
/// frame with its reference bit set gets the bit cleared and is skipped, and
/// the first unreferenced, unpinned frame is evicted. A freshly loaded page
/// starts with its reference bit set and the hand moves past it.
///
/// Callers hold pages through `Pin` handles; pinned and loading frames are
/// never chosen as victims. Concurrent misses on the same page share one load.
class PageCache {
  enum class FrameState : std::uint8_t { empty, loading, ready };

  struct Frame {
    PageKey key;
    FrameState state = FrameState::empty;
    bool referenced = false;
    std::uint32_t pins = 0;
    std::size_t valid = 0;
    std::unique_ptr<unsigned char[]> data;
  };

 public:
  /// Loads one page into `buf` (page_size bytes) and returns the valid byte count.
  using Loader = std::function<std::size_t(std::span<unsigned char> buf)>;

  class Pin {
   public:
    Pin() = default;
    Pin(const Pin&) = delete;
    Pin& operator=(const Pin&) = delete;
    Pin(Pin&& o) noexcept : cache_(o.cache_), frame_(o.frame_) { o.cache_ = nullptr; }
    Pin& operator=(Pin&& o) noexcept {
      if (this != &o) {
        release();
        cache_ = o.cache_;
        frame_ = o.frame_;
        o.cache_ = nullptr;
      }
      return *this;
    }
    ~Pin() { release(); }

    std::span<const unsigned char> bytes() const {
      const Frame& f = cache_->frames_[frame_];
      return {f.data.get(), f.valid};
    }
    bool hit() const { return hit_; }

   private:
    friend class PageCache;
    Pin(PageCache* c, std::size_t frame, bool hit) : cache_(c), frame_(frame), hit_(hit) {}
    void release() {
      if (cache_) cache_->unpin(frame_);
      cache_ = nullptr;
    }
    PageCache* cache_ = nullptr;
    std::size_t frame_ = 0;
    bool hit_ = false;
  };

  PageCache(std::size_t page_size, std::size_t capacity_pages, AtomicIoStats& stats)
      : page_size_(page_size), frames_(capacity_pages), stats_(stats) {
    if (page_size < 8 || (page_size & (page_size - 1)) != 0) {
      throw error("page size must be a power of two >= 8");
    }
    if (capacity_pages == 0) throw error("page cache needs at least one frame");
    map_.reserve(capacity_pages * 2);
  }

  std::size_t page_size() const { return page_size_; }
  std::size_t capacity_pages() const { return frames_.size(); }

  std::size_t resident_pages() const {
    std::lock_guard lk(mu_);
    return resident_;
  }
  std::size_t peak_resident_bytes() const {
    std::lock_guard lk(mu_);
    return peak_resident_ * page_size_;
  }

  /// Returns the page pinned in memory, loading it on a miss.
  Pin acquire(PageKey key, const Loader& load) {
    std::unique_lock lk(mu_);
    stats_.cache_accesses.fetch_add(1, std::memory_order_relaxed);
    for (;;) {
      auto it = map_.find(key);
      if (it != map_.end()) {
        Frame& f = frames_[it->second];
        if (f.state == FrameState::loading) {
          // Another worker is reading this page; share its load.
          cv_.wait(lk);
          continue;
        }
        f.referenced = true;
        ++f.pins;
        stats_.cache_hits.fetch_add(1, std::memory_order_relaxed);
        return Pin(this, it->second, true);
      }
      const std::size_t victim = find_victim();
      if (victim == kNone) {
        cv_.wait(lk);
        continue;
      }
      Frame& f = frames_[victim];
      if (f.state == FrameState::ready) {
        map_.erase(f.key);
      } else {
        ++resident_;
        if (resident_ > frames_.size()) throw memory_contract_error("page cache over capacity");
        peak_resident_ = std::max(peak_resident_, resident_);
        if (!f.data) f.data = std::make_unique<unsigned char[]>(page_size_);
      }
      f.key = key;
      f.state = FrameState::loading;
      f.referenced = true;
      f.pins = 1;
      f.valid = 0;
      map_.emplace(key, victim);
      lk.unlock();

      std::size_t valid = 0;
      std::exception_ptr failure;
      try {
        valid = load({f.data.get(), page_size_});
      } catch (...) {
        failure = std::current_exception();
      }
      stats_.read_requests_issued.fetch_add(1, std::memory_order_relaxed);
      stats_.bytes_read_from_disk.fetch_add(page_size_, std::memory_order_relaxed);

      lk.lock();
      if (failure) {
        map_.erase(key);
        f.state = FrameState::empty;
        f.pins = 0;
        f.referenced = false;
        --resident_;
        cv_.notify_all();
        std::rethrow_exception(failure);
      }
      f.valid = valid;
      f.state = FrameState::ready;
      cv_.notify_all();
      return Pin(this, victim, false);
    }
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  // Called with mu_ held. Two full sweeps suffice: the first clears every
  // reference bit it passes.
  std::size_t find_victim() {
    const std::size_t n = frames_.size();
    for (std::size_t scanned = 0; scanned < 2 * n + 1; ++scanned) {
      const std::size_t i = hand_;
      hand_ = (hand_ + 1) % n;
      Frame& f = frames_[i];
      if (f.state == FrameState::empty) return i;
      if (f.pins > 0 || f.state == FrameState::loading) continue;
      if (f.referenced) {
        f.referenced = false;
        continue;
      }
      return i;
    }
    return kNone;
  }

  void unpin(std::size_t frame) {
    std::lock_guard lk(mu_);
    if (--frames_[frame].pins == 0) cv_.notify_all();
  }

  std::size_t page_size_;
  std::vector<Frame> frames_;
  std::unordered_map<PageKey, std::size_t, PageKeyHash> map_;
  std::size_t hand_ = 0;
  std::size_t resident_ = 0;
  std::size_t peak_resident_ = 0;
  AtomicIoStats& stats_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace semgraph
