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

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "tfm/model.hpp"

namespace tfm {

// Parameters of the history-dependent reserve price.
struct BaseFeeSchedule {
  Money genesis_fee;
  std::int64_t adjustment_quotient = 8;  // 1/8 = 12.5% at empty/full blocks
  std::int64_t target_size = 1;
  std::int64_t max_size = 2;

  static BaseFeeSchedule make(Money genesis_fee, std::int64_t target_size,
                              std::int64_t adjustment_quotient = 8) {
    return {genesis_fee, adjustment_quotient, target_size, 2 * target_size};
  }
};

inline std::string validation_error(const BaseFeeSchedule& s) {
  if (s.target_size < 1) return "target_size: must be >= 1";
  if (s.max_size != 2 * s.target_size) return "max_size: must equal 2 * target_size";
  if (s.adjustment_quotient < 1) return "adjustment_quotient: must be >= 1";
  return {};
}

inline void validate(const BaseFeeSchedule& s) {
  if (auto e = validation_error(s); !e.empty()) throw std::invalid_argument(e);
}

// r + trunc(r * (S - C) / (q * C)), clamped at zero: linear between -1/q at an
// empty block and +1/q at a full (2C) one, unchanged at the target.
inline Money next_base_fee(const BaseFeeSchedule& s, Money r, std::int64_t block_size) {
  if (block_size < 0 || block_size > s.max_size) {
    throw std::out_of_range("block size " + std::to_string(block_size) +
                            " outside [0, max_size]");
  }
  const __int128 num = static_cast<__int128>(r.amount()) * (block_size - s.target_size);
  const __int128 den = static_cast<__int128>(s.adjustment_quotient) * s.target_size;
  const __int128 next = r.amount() + num / den;  // C++ division truncates toward zero
  return Money(next < 0 ? 0 : static_cast<std::int64_t>(next));
}

inline ChainState genesis(const BaseFeeSchedule& s) {
  return ChainState{s.genesis_fee, {}, 0};
}

inline ChainState advance(const BaseFeeSchedule& s, const ChainState& chain,
                          std::int64_t block_size) {
  ChainState next = chain;
  next.base_fee = next_base_fee(s, chain.base_fee, block_size);
  next.block_size_history.push_back(block_size);
  ++next.height;
  return next;
}

// Rebuilds the chain state from the genesis fee and a size history.
inline ChainState replay(const BaseFeeSchedule& s, std::span<const std::int64_t> sizes) {
  ChainState chain = genesis(s);
  for (std::int64_t size : sizes) chain = advance(s, chain, size);
  return chain;
}

// Demand at price r + mu exceeds the maximum block size.
inline bool is_excessively_low(Money r, Money mu, std::span<const Transaction> txs,
                               std::int64_t max_size) {
  std::int64_t demand = 0;
  for (const auto& t : txs) {
    if (t.valuation >= r + mu) demand += t.size;
  }
  return demand > max_size;
}

}  // namespace tfm
