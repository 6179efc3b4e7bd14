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
#include <bit>
#include <cstdint>
#include <memory>

#include "semgraph/common.hpp"

namespace semgraph {

/// Bitset over vertex ids with lock-free set/test. Used for the current and
/// next frontier: a vertex appears at most once per superstep.
class AtomicBitset {
 public:
  AtomicBitset() = default;
  explicit AtomicBitset(std::size_t bits)
      : bits_(bits), words_((bits + 63) / 64), data_(std::make_unique<std::atomic<std::uint64_t>[]>(words_)) {
    clear();
  }

  std::size_t size() const { return bits_; }
  std::size_t memory_bytes() const { return words_ * sizeof(std::uint64_t); }

  /// Returns true if the bit was newly set.
  bool set(std::size_t i) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    return (data_[i >> 6].fetch_or(mask, std::memory_order_acq_rel) & mask) == 0;
  }
  /// Returns true if the bit was set before.
  bool reset(std::size_t i) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    return (data_[i >> 6].fetch_and(~mask, std::memory_order_acq_rel) & mask) != 0;
  }
  bool test(std::size_t i) const {
    return (data_[i >> 6].load(std::memory_order_acquire) >> (i & 63)) & 1;
  }

  void clear() {
    for (std::size_t w = 0; w < words_; ++w) data_[w].store(0, std::memory_order_relaxed);
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::size_t w = 0; w < words_; ++w) c += std::popcount(data_[w].load(std::memory_order_relaxed));
    return c;
  }

  bool any_in(std::size_t lo, std::size_t hi) const { return next_set(lo, hi) < hi; }

  /// First set bit in [from, hi), or hi.
  std::size_t next_set(std::size_t from, std::size_t hi) const {
    while (from < hi) {
      std::size_t w = from >> 6;
      std::uint64_t word = data_[w].load(std::memory_order_acquire) >> (from & 63);
      if (word != 0) {
        const std::size_t i = from + std::countr_zero(word);
        return i < hi ? i : hi;
      }
      from = (w + 1) << 6;
    }
    return hi;
  }

  void swap(AtomicBitset& o) noexcept {
    std::swap(bits_, o.bits_);
    std::swap(words_, o.words_);
    std::swap(data_, o.data_);
  }

 private:
  std::size_t bits_ = 0;
  std::size_t words_ = 0;
  std::unique_ptr<std::atomic<std::uint64_t>[]> data_;
};

/// Current and next active-vertex sets.
class Frontier {
 public:
  explicit Frontier(std::size_t n) : current_(n), next_(n) {}

  AtomicBitset& current() { return current_; }
  AtomicBitset& next() { return next_; }
  const AtomicBitset& current() const { return current_; }
  const AtomicBitset& next() const { return next_; }

  /// Idempotent: marks v active for the next superstep.
  bool activate(vertex_id v) { return next_.set(v); }

  /// next becomes current; next is cleared.
  void advance() {
    current_.swap(next_);
    next_.clear();
  }

  std::size_t memory_bytes() const { return current_.memory_bytes() + next_.memory_bytes(); }

 private:
  AtomicBitset current_;
  AtomicBitset next_;
};

}  // namespace semgraph
