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

#include <cstdint>
#include <limits>
#include <vector>

#include "semgraph/common.hpp"

namespace semgraph {

enum class ReduceOp : std::uint8_t { max, min, sum };

template <typename T>
constexpr T reduce_identity(ReduceOp op) {
  switch (op) {
    case ReduceOp::max:
      if constexpr (std::numeric_limits<T>::has_infinity) return -std::numeric_limits<T>::infinity();
      else return std::numeric_limits<T>::lowest();
    case ReduceOp::min:
      if constexpr (std::numeric_limits<T>::has_infinity) return std::numeric_limits<T>::infinity();
      else return std::numeric_limits<T>::max();
    case ReduceOp::sum: return T{};
  }
  return T{};
}

template <typename T>
constexpr T reduce_apply(ReduceOp op, T a, T b) {
  switch (op) {
    case ReduceOp::max: return a < b ? b : a;
    case ReduceOp::min: return b < a ? b : a;
    case ReduceOp::sum: return a + b;
  }
  return a;
}

/// One accumulator per worker partition; folded in partition order at the
/// barrier so contributions never contend.
template <typename T>
class ReductionSlot {
 public:
  ReductionSlot(ReduceOp op, std::size_t partitions)
      : op_(op), acc_(partitions, reduce_identity<T>(op)) {
    if (partitions == 0) throw error("reduction slot needs at least one partition");
  }

  ReduceOp op() const { return op_; }
  std::size_t partitions() const { return acc_.size(); }

  void contribute(std::size_t partition, T value) {
    acc_[partition] = reduce_apply(op_, acc_[partition], value);
  }

  /// Fold of all partitions; identity of the operator when nothing was contributed.
  T combine() const {
    T out = reduce_identity<T>(op_);
    for (const T& a : acc_) out = reduce_apply(op_, out, a);
    return out;
  }

  void reset() { std::fill(acc_.begin(), acc_.end(), reduce_identity<T>(op_)); }

 private:
  ReduceOp op_;
  std::vector<T> acc_;
};

}  // namespace semgraph
