// Copyright 2026 The tfm-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Exact 0-1 knapsack over integer sizes, the allocation kernel shared by all
// revenue-maximizing mechanisms.
//
// Ties between optimal subsets are broken toward the lexicographically
// smallest ascending id sequence. The solver runs a suffix DP
// best[i][c] = best score using items i.. with capacity c, then walks the
// items in id order and keeps an item whenever an optimal completion still
// exists with it. Keeping the earliest possible id yields the lexicographic
// minimum because no optimal set is a strict subset of another (every kept
// item strictly raises the score).

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tfm/model.hpp"

namespace tfm {

struct KnapsackItem {
  TxId id;
  std::int64_t size = 1;
  Total weight = 0;
};

// How items of weight exactly zero are treated.
enum class ZeroWeight {
  kExclude,       // never include weight <= 0 items
  kFillCapacity,  // include weight-0 items when room remains: maximize
                  // (weight, total size) lexicographically
};

struct AllocationResult {
  std::vector<TxId> included;  // ascending
  Total objective_value = 0;
};

namespace detail {

struct Score {
  Total weight = 0;
  std::int64_t size = 0;
  friend constexpr auto operator<=>(const Score&, const Score&) = default;
  constexpr Score operator+(const Score& o) const {
    return {weight + o.weight, size + o.size};
  }
};

}  // namespace detail

// `items` must be sorted by ascending id with unique ids.
inline AllocationResult knapsack_max(std::span<const KnapsackItem> items,
                                     std::int64_t capacity,
                                     ZeroWeight zero = ZeroWeight::kExclude) {
  if (capacity < 0) throw std::invalid_argument("knapsack capacity must be >= 0");
  using detail::Score;

  // Candidates: positive weight, or zero weight under kFillCapacity, and
  // individually fitting.
  thread_local std::vector<KnapsackItem> cand;
  cand.clear();
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    if (it.size < 1) throw std::invalid_argument("knapsack item size must be >= 1");
    if (i > 0 && !(items[i - 1].id < it.id)) {
      throw std::invalid_argument("knapsack items must have ascending unique ids");
    }
    const bool keep = it.weight > 0 || (it.weight == 0 && zero == ZeroWeight::kFillCapacity);
    if (keep && it.size <= capacity) cand.push_back(it);
  }

  const bool count_size = zero == ZeroWeight::kFillCapacity;
  auto score_of = [count_size](const KnapsackItem& it) {
    return Score{it.weight, count_size ? it.size : 0};
  };

  const std::size_t n = cand.size();
  const std::size_t width = static_cast<std::size_t>(capacity) + 1;
  thread_local std::vector<Score> best;
  best.assign((n + 1) * width, Score{});
  auto at = [&](std::size_t i, std::int64_t c) -> Score& {
    return best[i * width + static_cast<std::size_t>(c)];
  };
  for (std::size_t i = n; i-- > 0;) {
    const auto& it = cand[i];
    for (std::int64_t c = 0; c <= capacity; ++c) {
      Score s = at(i + 1, c);
      if (it.size <= c) {
        const Score with = at(i + 1, c - it.size) + score_of(it);
        if (with > s) s = with;
      }
      at(i, c) = s;
    }
  }

  AllocationResult out;
  std::int64_t c = capacity;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& it = cand[i];
    if (it.size <= c && at(i + 1, c - it.size) + score_of(it) == at(i, c)) {
      out.included.push_back(it.id);
      out.objective_value += it.weight;
      c -= it.size;
    }
  }
  return out;
}

}  // namespace tfm
