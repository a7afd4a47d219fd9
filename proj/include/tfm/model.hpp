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

// Core value types of the fee-market model: per-size prices, transactions,
// mempools, chain state and settled blocks.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace tfm {

// Signed, size-weighted money total (utilities, objective values).
using Total = std::int64_t;

// Exact rational parameter (beta, gamma, OCA transfers).
using Ratio = boost::rational<std::int64_t>;

// A non-negative price per unit of transaction size, in atomic units.
class Money {
 public:
  constexpr Money() = default;
  constexpr explicit Money(std::int64_t amount) : amount_(amount) {
    if (amount < 0) throw std::domain_error("Money must be non-negative");
  }

  constexpr std::int64_t amount() const { return amount_; }

  friend constexpr auto operator<=>(Money, Money) = default;

  friend constexpr Money operator+(Money a, Money b) {
    return Money(a.amount_ + b.amount_);
  }
  // Throws std::domain_error when b > a.
  friend constexpr Money operator-(Money a, Money b) {
    return Money(a.amount_ - b.amount_);
  }

 private:
  std::int64_t amount_ = 0;
};

inline constexpr Money kZero{};

constexpr Money min(Money a, Money b) { return a < b ? a : b; }
constexpr Money max(Money a, Money b) { return a < b ? b : a; }

// price * size as a signed total.
constexpr Total total(Money price, std::int64_t size) {
  return price.amount() * size;
}

// floor(ratio * m) for a non-negative ratio.
inline Money scale_floor(const Ratio& ratio, Money m) {
  if (ratio < 0) throw std::domain_error("negative scale factor");
  const __int128 num = static_cast<__int128>(ratio.numerator()) * m.amount();
  return Money(static_cast<std::int64_t>(num / ratio.denominator()));
}

struct TxId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(TxId, TxId) = default;
};

// One pending transaction. `valuation` is private to the creator: no
// allocation, payment or burning rule reads it.
struct Transaction {
  TxId id;
  std::int64_t size = 1;
  Money valuation;
  Money fee_cap;
  Money tip;
  bool is_fake = false;

  // A transaction whose induced bid is `bid` under every mechanism and base
  // fee (cap = tip = bid, so min(r + tip, cap) = bid).
  static Transaction with_bid(TxId id, std::int64_t size, Money bid,
                              Money valuation = kZero) {
    if (size < 1) throw std::invalid_argument("transaction size must be >= 1");
    return Transaction{id, size, valuation, bid, bid, false};
  }

  static Transaction fake(TxId id, std::int64_t size, Money bid) {
    Transaction t = with_bid(id, size, bid);
    t.is_fake = true;
    return t;
  }
};

inline void validate(const Transaction& tx) {
  if (tx.size < 1) {
    throw std::invalid_argument("transaction " + std::to_string(tx.id.value) +
                                ": size must be >= 1");
  }
}

inline std::int64_t total_size(std::span<const Transaction> txs) {
  std::int64_t s = 0;
  for (const auto& t : txs) s += t.size;
  return s;
}

// Transactions ordered by id, ids unique.
class Mempool {
 public:
  Mempool() = default;
  explicit Mempool(std::vector<Transaction> txs) : txs_(std::move(txs)) {
    std::sort(txs_.begin(), txs_.end(),
              [](const Transaction& a, const Transaction& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < txs_.size(); ++i) {
      validate(txs_[i]);
      if (i > 0 && txs_[i - 1].id == txs_[i].id) {
        throw std::invalid_argument("duplicate transaction id " +
                                    std::to_string(txs_[i].id.value));
      }
    }
  }

  std::span<const Transaction> transactions() const { return txs_; }
  std::size_t size() const { return txs_.size(); }
  bool empty() const { return txs_.empty(); }

  const Transaction* find(TxId id) const {
    auto it = std::lower_bound(
        txs_.begin(), txs_.end(), id,
        [](const Transaction& t, TxId key) { return t.id < key; });
    return it != txs_.end() && it->id == id ? &*it : nullptr;
  }

 private:
  std::vector<Transaction> txs_;
};

// Base fee plus the size history it was derived from. Use
// basefee.hpp's genesis()/advance() to keep the two in sync.
struct ChainState {
  Money base_fee;
  std::vector<std::int64_t> block_size_history;
  std::int64_t height = 0;

  static ChainState at_base_fee(Money r) { return ChainState{r, {}, 0}; }
};

// A settled block: included ids with per-size payment (to the miner) and
// burn.
struct BlockOutcome {
  std::vector<TxId> included;  // ascending
  std::map<TxId, Money> payment;
  std::map<TxId, Money> burn;
  std::map<TxId, std::int64_t> size;
  std::int64_t total_size = 0;

  bool contains(TxId id) const {
    return std::binary_search(included.begin(), included.end(), id);
  }
};

// True iff the transactions fit in `capacity`.
inline bool is_feasible(std::span<const Transaction> txs, std::int64_t capacity) {
  return total_size(txs) <= capacity;
}

}  // namespace tfm
