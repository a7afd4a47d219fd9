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

// The six transaction fee mechanisms as (allocation, payment, burn) rules.
//
//   kind            payment p          burn q        capacity  eligible
//   FPA             b                  0             C         all
//   SPA             min included b     0             C         all
//   BetaBurnFPA     b - floor(beta b)  floor(beta b) C         all
//   M1559           b - r              r             2C        cap >= r
//   BetaBurn1559    b - floor(beta r)  floor(beta r) 2C        cap >= r
//   Tipless         delta              r             2C        b == r+delta
//
// Every kind except SPA has a separable payment rule and allocates by
// maximizing sum (p - mu) * s over eligible transactions.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tfm/knapsack.hpp"
#include "tfm/model.hpp"

namespace tfm {

enum class MechanismKind { kFpa, kSpa, kBetaBurnFpa, k1559, kBetaBurn1559, kTipless };

inline constexpr MechanismKind kAllMechanisms[] = {
    MechanismKind::kFpa,  MechanismKind::kSpa,          MechanismKind::kBetaBurnFpa,
    MechanismKind::k1559, MechanismKind::kBetaBurn1559, MechanismKind::kTipless};

inline std::string_view to_string(MechanismKind k) {
  switch (k) {
    case MechanismKind::kFpa: return "fpa";
    case MechanismKind::kSpa: return "spa";
    case MechanismKind::kBetaBurnFpa: return "beta-burn-fpa";
    case MechanismKind::k1559: return "1559";
    case MechanismKind::kBetaBurn1559: return "beta-burn-1559";
    case MechanismKind::kTipless: return "tipless";
  }
  return "?";
}

inline std::optional<MechanismKind> parse_mechanism_kind(std::string_view s) {
  for (auto k : kAllMechanisms) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

// Display name used in the report card.
inline std::string_view display_name(MechanismKind k) {
  switch (k) {
    case MechanismKind::kFpa: return "FPA";
    case MechanismKind::kSpa: return "SPA";
    case MechanismKind::kBetaBurnFpa: return "beta-burn FPA";
    case MechanismKind::k1559: return "1559";
    case MechanismKind::kBetaBurn1559: return "beta-burn 1559";
    case MechanismKind::kTipless: return "tipless";
  }
  return "?";
}

constexpr bool uses_base_fee(MechanismKind k) {
  return k == MechanismKind::k1559 || k == MechanismKind::kBetaBurn1559 ||
         k == MechanismKind::kTipless;
}

constexpr bool is_separable(MechanismKind k) { return k != MechanismKind::kSpa; }

struct MechanismDescriptor {
  MechanismKind kind = MechanismKind::kFpa;
  Ratio beta{0};
  Money delta;
  Money mu;
  std::int64_t target_size = 1;
  std::int64_t max_size = 1;

  // Builds a descriptor with max_size derived from the kind.
  static MechanismDescriptor make(MechanismKind kind, std::int64_t target_size,
                                  Money mu = kZero, Ratio beta = Ratio(0),
                                  Money delta = kZero) {
    MechanismDescriptor m{kind, beta, delta, mu, target_size,
                          uses_base_fee(kind) ? 2 * target_size : target_size};
    return m;
  }
};

// Returns an empty string when valid, else "field: rule".
inline std::string validation_error(const MechanismDescriptor& m) {
  if (m.target_size < 1) return "target_size: must be >= 1";
  const std::int64_t want = uses_base_fee(m.kind) ? 2 * m.target_size : m.target_size;
  if (m.max_size != want) {
    return uses_base_fee(m.kind) ? "max_size: must equal 2 * target_size for " +
                                       std::string(to_string(m.kind))
                                 : "max_size: must equal target_size for " +
                                       std::string(to_string(m.kind));
  }
  switch (m.kind) {
    case MechanismKind::kBetaBurnFpa:
      if (m.beta <= 0 || m.beta > 1) return "beta: must be in (0,1] for beta-burn-fpa";
      break;
    case MechanismKind::kBetaBurn1559:
      if (m.beta < 0 || m.beta >= 1) return "beta: must be in [0,1) for beta-burn-1559";
      break;
    default:
      if (m.beta < 0 || m.beta > 1) return "beta: must be in [0,1]";
  }
  return {};
}

inline void validate(const MechanismDescriptor& m) {
  if (auto e = validation_error(m); !e.empty()) throw std::invalid_argument(e);
}

// min(r + tip, cap): the bid a (fee cap, tip) pair stands for at base fee r.
constexpr Money induced_bid(Money fee_cap, Money tip, Money base_fee) {
  return min(base_fee + tip, fee_cap);
}

// The bid the mechanism reads from `tx` at base fee r.
inline Money bid_of(const MechanismDescriptor& m, Money r, const Transaction& tx) {
  switch (m.kind) {
    case MechanismKind::k1559:
    case MechanismKind::kBetaBurn1559:
      return induced_bid(tx.fee_cap, tx.tip, r);
    case MechanismKind::kTipless:
      return induced_bid(tx.fee_cap, m.delta, r);
    default:
      return tx.fee_cap;
  }
}

// Whether the protocol accepts `tx` in a block with base fee r.
inline bool is_eligible(const MechanismDescriptor& m, Money r, const Transaction& tx) {
  switch (m.kind) {
    case MechanismKind::k1559:
    case MechanismKind::kBetaBurn1559:
      return tx.fee_cap >= r;
    case MechanismKind::kTipless:
      return bid_of(m, r, tx) == r + m.delta;
    default:
      return true;
  }
}

struct UnitCharge {
  Money payment;
  Money burn;
};

// Per-size payment and burn of an included transaction with bid `bid` in a
// block whose lowest included bid is `lowest` (only SPA reads `lowest`).
// Precondition: the transaction is eligible.
inline UnitCharge unit_charge(const MechanismDescriptor& m, Money r, Money bid,
                              Money lowest) {
  switch (m.kind) {
    case MechanismKind::kFpa:
      return {bid, kZero};
    case MechanismKind::kSpa:
      return {lowest, kZero};
    case MechanismKind::kBetaBurnFpa: {
      const Money q = scale_floor(m.beta, bid);
      return {bid - q, q};
    }
    case MechanismKind::k1559:
      return {bid - r, r};
    case MechanismKind::kBetaBurn1559: {
      const Money q = scale_floor(m.beta, r);
      return {bid - q, q};
    }
    case MechanismKind::kTipless:
      return {m.delta, r};
  }
  throw std::logic_error("unknown mechanism kind");
}

// Burning mechanisms include zero-margin transactions while room remains.
inline ZeroWeight zero_weight_policy(MechanismKind k) {
  return uses_base_fee(k) || k == MechanismKind::kBetaBurnFpa ? ZeroWeight::kFillCapacity
                                                               : ZeroWeight::kExclude;
}

namespace detail {

inline void require_sorted_unique(std::span<const Transaction> txs) {
  for (std::size_t i = 1; i < txs.size(); ++i) {
    if (!(txs[i - 1].id < txs[i].id)) {
      throw std::invalid_argument("transactions must have ascending unique ids");
    }
  }
}

inline AllocationResult allocate_spa(const MechanismDescriptor& m,
                                     std::span<const Transaction> txs) {
  thread_local std::vector<std::size_t> order;
  order.resize(txs.size());
  for (std::size_t i = 0; i < txs.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return txs[a].fee_cap > txs[b].fee_cap;  // ids already ascending
  });
  AllocationResult out;
  std::int64_t used = 0;
  Money lowest;
  for (std::size_t i : order) {
    if (used + txs[i].size > m.max_size) break;
    used += txs[i].size;
    lowest = txs[i].fee_cap;
    out.included.push_back(txs[i].id);
  }
  std::sort(out.included.begin(), out.included.end());
  out.objective_value = (lowest.amount() - m.mu.amount()) * used;
  return out;
}

}  // namespace detail

// The intended allocation rule over `txs` (ascending unique ids) at base fee r.
inline AllocationResult allocate(const MechanismDescriptor& m, Money r,
                                 std::span<const Transaction> txs) {
  detail::require_sorted_unique(txs);
  if (m.kind == MechanismKind::kSpa) return detail::allocate_spa(m, txs);

  thread_local std::vector<KnapsackItem> items;
  items.clear();
  for (const auto& tx : txs) {
    if (!is_eligible(m, r, tx)) continue;
    const Money b = bid_of(m, r, tx);
    const Money p = unit_charge(m, r, b, b).payment;
    items.push_back({tx.id, tx.size, (p.amount() - m.mu.amount()) * tx.size});
  }
  return knapsack_max(items, m.max_size, zero_weight_policy(m.kind));
}

inline AllocationResult allocate(const MechanismDescriptor& m, const ChainState& chain,
                                 const Mempool& mempool) {
  return allocate(m, chain.base_fee, mempool.transactions());
}

// Greedy block building (sort by per-size miner margin, add while it fits);
// the heuristic most deployed miners run instead of the exact optimum.
inline AllocationResult allocate_greedy(const MechanismDescriptor& m, Money r,
                                        std::span<const Transaction> txs) {
  detail::require_sorted_unique(txs);
  if (m.kind == MechanismKind::kSpa) return detail::allocate_spa(m, txs);
  struct Cand {
    TxId id;
    std::int64_t size;
    std::int64_t margin;  // per size
  };
  std::vector<Cand> cands;
  for (const auto& tx : txs) {
    if (!is_eligible(m, r, tx)) continue;
    const Money b = bid_of(m, r, tx);
    cands.push_back({tx.id, tx.size,
                     unit_charge(m, r, b, b).payment.amount() - m.mu.amount()});
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.margin > b.margin; });
  const bool take_zero = zero_weight_policy(m.kind) == ZeroWeight::kFillCapacity;
  AllocationResult out;
  std::int64_t used = 0;
  for (const auto& c : cands) {
    if (c.margin < 0 || (c.margin == 0 && !take_zero)) break;
    if (used + c.size > m.max_size) continue;
    used += c.size;
    out.included.push_back(c.id);
    out.objective_value += c.margin * c.size;
  }
  std::sort(out.included.begin(), out.included.end());
  return out;
}

// Throws std::invalid_argument unless `txs` is a block the protocol accepts:
// within max_size and every transaction eligible.
inline void validate_block(const MechanismDescriptor& m, Money r,
                           std::span<const Transaction> txs) {
  if (total_size(txs) > m.max_size) {
    throw std::invalid_argument("block exceeds the maximum block size");
  }
  for (const auto& tx : txs) {
    if (!is_eligible(m, r, tx)) {
      throw std::invalid_argument(
          "transaction " + std::to_string(tx.id.value) +
          (m.kind == MechanismKind::kTipless
               ? " is invalid: bid differs from base fee + hard-coded tip"
               : " is invalid: fee cap below the base fee"));
    }
  }
}

// Payments and burns for the included transactions.
inline BlockOutcome settle(const MechanismDescriptor& m, Money r,
                           std::span<const Transaction> included) {
  detail::require_sorted_unique(included);
  validate_block(m, r, included);
  BlockOutcome out;
  if (included.empty()) return out;
  Money lowest = bid_of(m, r, included.front());
  for (const auto& tx : included) lowest = min(lowest, bid_of(m, r, tx));
  for (const auto& tx : included) {
    const UnitCharge c = unit_charge(m, r, bid_of(m, r, tx), lowest);
    out.included.push_back(tx.id);
    out.payment.emplace(tx.id, c.payment);
    out.burn.emplace(tx.id, c.burn);
    out.size.emplace(tx.id, tx.size);
    out.total_size += tx.size;
  }
  return out;
}

inline BlockOutcome settle(const MechanismDescriptor& m, const ChainState& chain,
                           std::span<const Transaction> included) {
  return settle(m, chain.base_fee, included);
}

// The subset of `txs` named by `ids` (both ascending).
inline std::vector<Transaction> select(std::span<const Transaction> txs,
                                       std::span<const TxId> ids) {
  std::vector<Transaction> out;
  out.reserve(ids.size());
  std::size_t j = 0;
  for (const auto& tx : txs) {
    while (j < ids.size() && ids[j] < tx.id) ++j;
    if (j < ids.size() && ids[j] == tx.id) out.push_back(tx);
  }
  return out;
}

// allocate followed by settle.
inline BlockOutcome run_mechanism(const MechanismDescriptor& m, Money r,
                                  std::span<const Transaction> txs) {
  const AllocationResult a = allocate(m, r, txs);
  const auto chosen = select(txs, a.included);
  return settle(m, r, chosen);
}

}  // namespace tfm
