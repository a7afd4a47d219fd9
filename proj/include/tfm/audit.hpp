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

// Brute-force auditing of three incentive properties on small instances:
//
//   MMIC      no fake transactions and no alternative block raise the myopic
//             miner's utility above the intended allocation's;
//   DSIC      a named candidate strategy is a best response for every user
//             against every competitor bid profile on the grid;
//   OCA-proof the strategy's on-chain outcome attains the maximum joint
//             utility over every bid profile on the grid.
//
// Bids range over a finite grid, so a Pass is relative to the grid while a
// Violated verdict carries a witness that certify() re-checks through the
// public settle/utility functions. Enumeration order is fixed, so witnesses
// are deterministic.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tfm/basefee.hpp"
#include "tfm/mechanism.hpp"
#include "tfm/model.hpp"
#include "tfm/strategy.hpp"
#include "tfm/utility.hpp"

namespace tfm {

enum class Property { kMmic, kDsic, kOcaProof };

inline std::string_view to_string(Property p) {
  switch (p) {
    case Property::kMmic: return "MMIC";
    case Property::kDsic: return "DSIC";
    case Property::kOcaProof: return "OCAProof";
  }
  return "?";
}

inline std::optional<Property> parse_property(std::string_view s) {
  if (s == "mmic" || s == "MMIC") return Property::kMmic;
  if (s == "dsic" || s == "DSIC") return Property::kDsic;
  if (s == "oca" || s == "OCAProof" || s == "oca-proof") return Property::kOcaProof;
  return std::nullopt;
}

class SearchSpaceOverflow : public std::length_error {
 public:
  using std::length_error::length_error;
};

// The strategy under test leaves some included user with p + q > v.
class NotIndividuallyRational : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DeviationSpace {
  std::vector<Money> bid_grid;  // ascending, unique
  int max_fake_count = 2;
  std::vector<std::int64_t> fake_sizes;
};

struct GridOptions {
  Money step{1};
  bool dense = false;  // also every multiple of step up to the closure max
  int max_fake_count = 2;
};

// Grid closure: 0, every bid and valuation, r, r - step, r + mu, r + delta,
// and one step above each. Fake sizes are 1 and the smallest real size.
inline DeviationSpace make_deviation_space(const MechanismDescriptor& m, Money r,
                                           std::span<const Transaction> txs,
                                           std::span<const Money> extra_bids,
                                           const GridOptions& opt = {}) {
  if (opt.step.amount() < 1) throw std::invalid_argument("grid step must be >= 1");
  std::set<Money> base{kZero, r, r + m.mu, r + m.delta};
  if (r >= opt.step) base.insert(r - opt.step);
  for (const auto& t : txs) {
    base.insert(bid_of(m, r, t));
    base.insert(t.fee_cap);
    base.insert(t.valuation);
  }
  for (Money b : extra_bids) base.insert(b);
  std::set<Money> grid = base;
  for (Money b : base) grid.insert(b + opt.step);
  if (opt.dense) {
    const Money top = *grid.rbegin();
    for (Money b = kZero; b <= top; b = b + opt.step) grid.insert(b);
  }
  DeviationSpace dev;
  dev.bid_grid.assign(grid.begin(), grid.end());
  dev.max_fake_count = opt.max_fake_count;
  dev.fake_sizes.push_back(1);
  if (!txs.empty()) {
    std::int64_t smallest = txs.front().size;
    for (const auto& t : txs) smallest = std::min(smallest, t.size);
    if (smallest != 1) dev.fake_sizes.push_back(smallest);
  }
  return dev;
}

// Everything needed to re-run an audit.
struct AuditInstance {
  MechanismDescriptor mechanism;
  Money base_fee;
  std::vector<Transaction> transactions;  // real, ascending ids
  std::optional<BiddingStrategy> strategy;
  bool forbid_overbidding = false;
};

struct MmicWitness {
  std::vector<Transaction> fakes;
  std::vector<TxId> block;  // real and fake ids, ascending
  Total honest_utility = 0;
  Total deviation_utility = 0;
  Total delta() const { return deviation_utility - honest_utility; }
};

struct DsicWitness {
  TxId tx;
  std::map<TxId, Money> competitor_bids;
  Money strategy_bid;
  Money deviating_bid;
  Total strategy_utility = 0;
  Total deviation_utility = 0;
  Total delta() const { return deviation_utility - strategy_utility; }
};

struct OcaWitness {
  std::map<TxId, Money> bids;
  std::vector<TxId> allocation;
  std::map<TxId, Ratio> transfers;  // per size, creator -> miner
  Total strategy_joint = 0;
  Total best_joint = 0;
  std::map<TxId, Ratio> user_deltas;
  Ratio miner_delta;
};

using Witness = std::variant<MmicWitness, DsicWitness, OcaWitness>;

struct AuditVerdict {
  Property property = Property::kMmic;
  AuditInstance instance;
  bool violated = false;
  // MMIC: honest / best miner utility. OCA: J_sigma / J*. DSIC: the
  // witness's strategy / deviation utility (0 on Pass).
  Total reference_value = 0;
  Total best_value = 0;
  std::optional<Witness> witness;
};

// Work limits for the exhaustive searches.
inline constexpr std::uint64_t kMaxSearchStates = 200'000'000;

namespace detail {

inline Transaction rebid(const Transaction& tx, Money bid) {
  Transaction t = tx;
  t.fee_cap = bid;
  t.tip = bid;
  return t;
}

inline std::uint64_t saturating_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    out *= base;
  }
  return out;
}

// The intended outcome on `txs`, as an inclusion flag per position plus the
// lowest included bid.
struct QuickOutcome {
  std::vector<char> included;
  Money lowest;
};

inline void quick_outcome(const MechanismDescriptor& m, Money r,
                          std::span<const Transaction> txs, QuickOutcome& out) {
  const AllocationResult a = allocate(m, r, txs);
  out.included.assign(txs.size(), 0);
  bool first = true;
  std::size_t j = 0;
  for (std::size_t i = 0; i < txs.size() && j < a.included.size(); ++i) {
    if (txs[i].id == a.included[j]) {
      out.included[i] = 1;
      const Money b = bid_of(m, r, txs[i]);
      out.lowest = first ? b : min(out.lowest, b);
      first = false;
      ++j;
    }
  }
}

inline Total quick_user_utility(const MechanismDescriptor& m, Money r,
                                const Transaction& tx, const QuickOutcome& o,
                                std::size_t i) {
  if (!o.included[i]) return 0;
  const UnitCharge c = unit_charge(m, r, bid_of(m, r, tx), o.lowest);
  return (tx.valuation.amount() - c.payment.amount() - c.burn.amount()) * tx.size;
}

inline Total quick_joint_utility(const MechanismDescriptor& m, Money r,
                                 std::span<const Transaction> txs, const QuickOutcome& o) {
  Total j = 0;
  for (std::size_t i = 0; i < txs.size(); ++i) {
    if (!o.included[i]) continue;
    const UnitCharge c = unit_charge(m, r, bid_of(m, r, txs[i]), o.lowest);
    j += (txs[i].valuation.amount() - c.burn.amount() - m.mu.amount()) * txs[i].size;
  }
  return j;
}

}  // namespace detail

// A myopic miner's best block: fake set and included ids.
struct BestResponse {
  std::vector<Transaction> fakes;
  std::vector<TxId> block;
  Total utility = 0;
};

// Exhaustive best response over every fake multiset (options: fake_sizes x
// bid_grid, at most max_fake_count) and every protocol-valid block of real
// and fake transactions. Ties prefer the fuller block, then enumeration order
// (fewer fakes first, fakes by ascending size and bid, real subsets by
// ascending bitmask).
inline BestResponse best_response(const MechanismDescriptor& m, Money r,
                                  std::span<const Transaction> real,
                                  const DeviationSpace& dev) {
  detail::require_sorted_unique(real);
  const std::size_t n = real.size();
  if (n > 20) throw SearchSpaceOverflow("best response: more than 20 real transactions");

  // Fake options, filtered to those the protocol accepts.
  std::uint32_t next_id = real.empty() ? 1 : real.back().id.value + 1;
  std::vector<std::int64_t> sizes = dev.fake_sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  std::vector<Transaction> options;
  for (std::int64_t s : sizes) {
    for (Money b : dev.bid_grid) {
      Transaction f = Transaction::fake(TxId{0}, s, b);
      if (is_eligible(m, r, f) && s <= m.max_size) options.push_back(f);
    }
  }
  const int k_max = std::max(0, dev.max_fake_count);
  {
    // sum_{k<=k_max} C(|options|+k-1, k) multisets, times 2^n blocks
    std::uint64_t multisets = 1, term = 1;
    for (int k = 1; k <= k_max; ++k) {
      term = term * (options.size() + k - 1) / k;
      multisets += term;
    }
    const std::uint64_t blocks = std::uint64_t{1} << n;
    if (multisets > kMaxSearchStates / blocks) {
      throw SearchSpaceOverflow("best response search exceeds " +
                                std::to_string(kMaxSearchStates) + " states");
    }
  }

  // Charges depend on (own bid, lowest bid in block); tabulate per item over
  // every bid that can be the block minimum.
  std::vector<Money> bids;
  for (const auto& t : real) bids.push_back(bid_of(m, r, t));
  for (const auto& f : options) bids.push_back(bid_of(m, r, f));
  std::vector<Money> levels = bids;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  auto level_of = [&](Money b) {
    return static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), b) -
                                    levels.begin());
  };
  const std::size_t L = levels.size();
  const std::size_t items = n + options.size();
  std::vector<std::size_t> item_level(items);
  std::vector<Total> pay_total(items * L, 0), burn_total(items * L, 0);
  std::vector<char> real_ok(n);
  for (std::size_t i = 0; i < n; ++i) real_ok[i] = is_eligible(m, r, real[i]);
  for (std::size_t i = 0; i < items; ++i) {
    const Money b = bids[i];
    const std::int64_t s = i < n ? real[i].size : options[i - n].size;
    item_level[i] = level_of(b);
    if (i < n && !real_ok[i]) continue;  // never in a valid block
    for (std::size_t l = 0; l <= item_level[i]; ++l) {
      const UnitCharge c = unit_charge(m, r, b, levels[l]);
      pay_total[i * L + l] = total(c.payment, s);
      burn_total[i * L + l] = total(c.burn, s);
    }
  }

  const std::uint64_t masks = std::uint64_t{1} << n;
  std::vector<std::int64_t> mask_size(masks, 0);
  std::vector<std::size_t> mask_level(masks, L);
  std::vector<char> mask_ok(masks, 1);
  for (std::uint64_t mask = 1; mask < masks; ++mask) {
    const std::size_t i = static_cast<std::size_t>(std::countr_zero(mask));
    const std::uint64_t rest = mask & (mask - 1);
    mask_ok[mask] = mask_ok[rest] && real_ok[i];
    mask_size[mask] = mask_size[rest] + real[i].size;
    mask_level[mask] = std::min(mask_level[rest], item_level[i]);
  }

  BestResponse best;
  bool have = false;
  std::int64_t best_size = -1;
  std::vector<std::size_t> combo;  // non-decreasing option indices
  const Total mu = m.mu.amount();

  auto visit = [&]() {
    std::int64_t fsize = 0;
    std::size_t flevel = L;
    for (std::size_t o : combo) {
      fsize += options[o].size;
      flevel = std::min(flevel, item_level[n + o]);
    }
    if (fsize > m.max_size) return;
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
      if (!mask_ok[mask]) continue;
      const std::int64_t size = mask_size[mask] + fsize;
      if (size > m.max_size) continue;
      const std::size_t lvl = std::min(mask_level[mask], flevel);
      Total u = -mu * size;
      for (std::uint64_t bits = mask; bits; bits &= bits - 1) {
        const auto i = static_cast<std::size_t>(std::countr_zero(bits));
        u += pay_total[i * L + lvl];
      }
      for (std::size_t o : combo) u -= burn_total[(n + o) * L + lvl];
      if (!have || u > best.utility || (u == best.utility && size > best_size)) {
        have = true;
        best.utility = u;
        best_size = size;
        best.fakes.clear();
        best.block.clear();
        for (std::uint64_t bits = mask; bits; bits &= bits - 1) {
          best.block.push_back(real[static_cast<std::size_t>(std::countr_zero(bits))].id);
        }
        for (std::size_t o : combo) {
          Transaction f = options[o];
          f.id = TxId{next_id + static_cast<std::uint32_t>(best.fakes.size())};
          best.fakes.push_back(f);
          best.block.push_back(f.id);
        }
      }
    }
  };

  // Multisets in order of size, then lexicographic.
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0 && options.empty()) break;
    combo.assign(static_cast<std::size_t>(k), 0);
    while (true) {
      visit();
      int pos = k - 1;
      while (pos >= 0 && combo[static_cast<std::size_t>(pos)] + 1 == options.size()) --pos;
      if (pos < 0) break;
      const std::size_t v = combo[static_cast<std::size_t>(pos)] + 1;
      for (int q = pos; q < k; ++q) combo[static_cast<std::size_t>(q)] = v;
    }
  }
  return best;
}

// Miner utility of the intended, fake-free block.
inline Total honest_miner_utility(const MechanismDescriptor& m, Money r,
                                  std::span<const Transaction> real) {
  const BlockOutcome o = run_mechanism(m, r, real);
  std::set<TxId> ids;
  for (const auto& t : real) ids.insert(t.id);
  return miner_utility(m, o, ids);
}

inline AuditVerdict check_mmic(const MechanismDescriptor& m, const ChainState& chain,
                               const Mempool& mempool, const DeviationSpace& dev) {
  validate(m);
  const Money r = chain.base_fee;
  const auto real = mempool.transactions();
  AuditVerdict v;
  v.property = Property::kMmic;
  v.instance = {m, r, {real.begin(), real.end()}, std::nullopt, false};
  v.reference_value = honest_miner_utility(m, r, real);
  const BestResponse br = best_response(m, r, real, dev);
  v.best_value = std::max(br.utility, v.reference_value);
  if (br.utility > v.reference_value) {
    v.violated = true;
    v.witness = MmicWitness{br.fakes, br.block, v.reference_value, br.utility};
  }
  return v;
}

// DSIC of `strategy`: for each transaction, each competitor profile over the
// grid and each deviating bid, the strategy's bid must do at least as well.
// With forbid_overbidding every bid (competitor or deviation) is capped at the
// bidder's valuation. Stops at the first violation.
inline AuditVerdict check_dsic(const MechanismDescriptor& m, const ChainState& chain,
                               std::span<const Transaction> txs,
                               const BiddingStrategy& strategy, const DeviationSpace& dev,
                               bool forbid_overbidding) {
  validate(m);
  detail::require_sorted_unique(txs);
  const Money r = chain.base_fee;
  const std::size_t n = txs.size();
  const std::vector<Money>& grid = dev.bid_grid;
  if (n > 0 && detail::saturating_pow(grid.size(), n) > kMaxSearchStates / n) {
    throw SearchSpaceOverflow("dsic search exceeds " + std::to_string(kMaxSearchStates) +
                              " states");
  }

  AuditVerdict verdict;
  verdict.property = Property::kDsic;
  verdict.instance = {m, r, {txs.begin(), txs.end()}, strategy, forbid_overbidding};

  // Allowed bids per transaction.
  std::vector<std::vector<Money>> allowed(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (Money b : grid) {
      if (!forbid_overbidding || b <= txs[j].valuation) allowed[j].push_back(b);
    }
  }

  std::vector<Transaction> work(txs.begin(), txs.end());
  detail::QuickOutcome outcome;
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    const Money sigma = eval_strategy(strategy, txs[t].valuation, r, m.mu, m.delta);
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != t) others.push_back(j);
    }
    bool empty_choice = false;
    for (std::size_t j : others) empty_choice |= allowed[j].empty();
    if (empty_choice) continue;
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      for (std::size_t j : others) work[j] = detail::rebid(txs[j], allowed[j][idx[j]]);
      work[t] = detail::rebid(txs[t], sigma);
      detail::quick_outcome(m, r, work, outcome);
      const Total base = detail::quick_user_utility(m, r, work[t], outcome, t);
      for (Money d : allowed[t]) {
        work[t] = detail::rebid(txs[t], d);
        detail::quick_outcome(m, r, work, outcome);
        const Total u = detail::quick_user_utility(m, r, work[t], outcome, t);
        if (u > base) {
          DsicWitness w;
          w.tx = txs[t].id;
          for (std::size_t j : others) w.competitor_bids[txs[j].id] = allowed[j][idx[j]];
          w.strategy_bid = sigma;
          w.deviating_bid = d;
          w.strategy_utility = base;
          w.deviation_utility = u;
          verdict.violated = true;
          verdict.reference_value = base;
          verdict.best_value = u;
          verdict.witness = w;
          return verdict;
        }
      }
      // Next competitor profile (odometer, last competitor fastest).
      std::size_t k = others.size();
      while (k > 0) {
        const std::size_t j = others[k - 1];
        if (++idx[j] < allowed[j].size()) break;
        idx[j] = 0;
        --k;
      }
      if (k == 0) break;
    }
  }
  return verdict;
}

struct JointOptimum {
  Total best_joint = 0;
  std::map<TxId, Money> bids;
};

// Maximum joint utility over every bid profile in bid_grid^n, with the first
// maximizing profile in odometer order.
inline JointOptimum brute_force_joint_opt(const MechanismDescriptor& m,
                                          const ChainState& chain,
                                          std::span<const Transaction> txs,
                                          const DeviationSpace& dev) {
  detail::require_sorted_unique(txs);
  const Money r = chain.base_fee;
  const std::size_t n = txs.size();
  const std::vector<Money>& grid = dev.bid_grid;
  JointOptimum best;
  if (n == 0) return best;
  if (grid.empty()) throw std::invalid_argument("empty bid grid");
  if (detail::saturating_pow(grid.size(), n) > kMaxSearchStates) {
    throw SearchSpaceOverflow("joint-utility search exceeds " +
                              std::to_string(kMaxSearchStates) + " profiles");
  }
  std::vector<Transaction> work(txs.begin(), txs.end());
  std::vector<std::size_t> idx(n, 0);
  detail::QuickOutcome outcome;
  bool have = false;
  while (true) {
    for (std::size_t j = 0; j < n; ++j) work[j] = detail::rebid(txs[j], grid[idx[j]]);
    detail::quick_outcome(m, r, work, outcome);
    const Total joint = detail::quick_joint_utility(m, r, work, outcome);
    if (!have || joint > best.best_joint) {
      have = true;
      best.best_joint = joint;
      best.bids.clear();
      for (std::size_t j = 0; j < n; ++j) best.bids[txs[j].id] = grid[idx[j]];
    }
    std::size_t k = n;
    while (k > 0) {
      if (++idx[k - 1] < grid.size()) break;
      idx[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }
  return best;
}

namespace detail {

// Settled outcome of `txs` rebid per `bids` (all public-path code).
inline std::pair<std::vector<Transaction>, BlockOutcome> settle_profile(
    const MechanismDescriptor& m, Money r, std::span<const Transaction> txs,
    const std::map<TxId, Money>& bids) {
  std::vector<Transaction> rebids;
  for (const auto& t : txs) rebids.push_back(rebid(t, bids.at(t.id)));
  BlockOutcome o = run_mechanism(m, r, rebids);
  return {std::move(rebids), std::move(o)};
}

inline std::map<TxId, Money> strategy_profile(const MechanismDescriptor& m, Money r,
                                              std::span<const Transaction> txs,
                                              const BiddingStrategy& s) {
  std::map<TxId, Money> bids;
  for (const auto& t : txs) bids[t.id] = eval_strategy(s, t.valuation, r, m.mu, m.delta);
  return bids;
}

inline std::map<TxId, Money> valuations_of(std::span<const Transaction> txs) {
  std::map<TxId, Money> v;
  for (const auto& t : txs) v[t.id] = t.valuation;
  return v;
}

inline std::set<TxId> ids_of(std::span<const Transaction> txs) {
  std::set<TxId> ids;
  for (const auto& t : txs) ids.insert(t.id);
  return ids;
}

}  // namespace detail

// OCA-proofness of `strategy` on one instance: its outcome must reach the
// grid's maximum joint utility. A gap is turned into an off-chain agreement
// that splits the surplus equally among the n creators and the miner.
inline AuditVerdict check_oca_proof(const MechanismDescriptor& m, const ChainState& chain,
                                    std::span<const Transaction> txs,
                                    const BiddingStrategy& strategy,
                                    const DeviationSpace& dev) {
  validate(m);
  detail::require_sorted_unique(txs);
  const Money r = chain.base_fee;
  AuditVerdict verdict;
  verdict.property = Property::kOcaProof;
  verdict.instance = {m, r, {txs.begin(), txs.end()}, strategy, false};

  const auto sigma_bids = detail::strategy_profile(m, r, txs, strategy);
  const auto [sigma_txs, sigma_out] = detail::settle_profile(m, r, txs, sigma_bids);
  for (const auto& t : sigma_txs) {
    if (!sigma_out.contains(t.id)) continue;
    if (sigma_out.payment.at(t.id) + sigma_out.burn.at(t.id) > t.valuation) {
      throw NotIndividuallyRational(
          std::string(to_string(strategy.kind)) + " charges transaction " +
          std::to_string(t.id.value) + " more than its valuation");
    }
  }
  const auto values = detail::valuations_of(txs);
  const Total j_sigma = joint_utility(sigma_out, values, m.mu);
  const JointOptimum opt = brute_force_joint_opt(m, chain, txs, dev);
  verdict.reference_value = j_sigma;
  verdict.best_value = std::max(opt.best_joint, j_sigma);
  if (opt.best_joint <= j_sigma) return verdict;

  const auto [best_txs, best_out] = detail::settle_profile(m, r, txs, opt.bids);
  const auto ids = detail::ids_of(txs);
  const Ratio share(opt.best_joint - j_sigma, static_cast<std::int64_t>(txs.size()) + 1);
  OcaWitness w;
  w.bids = opt.bids;
  w.allocation = best_out.included;
  w.strategy_joint = j_sigma;
  w.best_joint = opt.best_joint;
  for (std::size_t i = 0; i < txs.size(); ++i) {
    const Total gain = user_utility(best_txs[i], best_out) - user_utility(sigma_txs[i], sigma_out);
    w.transfers[txs[i].id] = (Ratio(gain) - share) / txs[i].size;
    w.user_deltas[txs[i].id] = share;
  }
  w.miner_delta = share;
  verdict.violated = true;
  verdict.witness = w;
  return verdict;
}

// Re-evaluates a Violated verdict's witness from its instance through the
// public settle/utility path. True iff every claimed beneficiary strictly
// gains.
inline bool certify(const AuditVerdict& v) {
  if (!v.violated || !v.witness) return false;
  const AuditInstance& in = v.instance;
  const MechanismDescriptor& m = in.mechanism;
  const Money r = in.base_fee;
  const std::span<const Transaction> txs = in.transactions;
  try {
    if (const auto* w = std::get_if<MmicWitness>(&*v.witness)) {
      std::vector<Transaction> block;
      for (TxId id : w->block) {
        auto real = std::find_if(txs.begin(), txs.end(),
                                 [&](const Transaction& t) { return t.id == id; });
        if (real != txs.end()) {
          block.push_back(*real);
          continue;
        }
        auto fake = std::find_if(w->fakes.begin(), w->fakes.end(),
                                 [&](const Transaction& t) { return t.id == id; });
        if (fake == w->fakes.end()) return false;
        block.push_back(*fake);
      }
      std::sort(block.begin(), block.end(),
                [](const Transaction& a, const Transaction& b) { return a.id < b.id; });
      const Total honest = honest_miner_utility(m, r, txs);
      const Total dev = miner_utility(m, settle(m, r, block), detail::ids_of(txs));
      return honest == w->honest_utility && dev == w->deviation_utility && dev > honest;
    }
    if (const auto* w = std::get_if<DsicWitness>(&*v.witness)) {
      if (!in.strategy) return false;
      auto target = std::find_if(txs.begin(), txs.end(),
                                 [&](const Transaction& t) { return t.id == w->tx; });
      if (target == txs.end()) return false;
      if (w->strategy_bid !=
          eval_strategy(*in.strategy, target->valuation, r, m.mu, m.delta)) {
        return false;
      }
      if (in.forbid_overbidding) {
        if (w->deviating_bid > target->valuation) return false;
        for (const auto& t : txs) {
          if (t.id != w->tx && w->competitor_bids.at(t.id) > t.valuation) return false;
        }
      }
      auto utility_with = [&](Money own) {
        std::map<TxId, Money> bids = w->competitor_bids;
        bids[w->tx] = own;
        const auto [rebids, out] = detail::settle_profile(m, r, txs, bids);
        const auto pos = static_cast<std::size_t>(target - txs.begin());
        return user_utility(rebids[pos], out);
      };
      const Total base = utility_with(w->strategy_bid);
      const Total dev = utility_with(w->deviating_bid);
      return base == w->strategy_utility && dev == w->deviation_utility && dev > base;
    }
    if (const auto* w = std::get_if<OcaWitness>(&*v.witness)) {
      if (!in.strategy) return false;
      const auto ids = detail::ids_of(txs);
      const auto [s_txs, s_out] =
          detail::settle_profile(m, r, txs, detail::strategy_profile(m, r, txs, *in.strategy));
      const auto [b_txs, b_out] = detail::settle_profile(m, r, txs, w->bids);
      if (b_out.included != w->allocation) return false;
      Ratio transfer_sum(0);
      for (std::size_t i = 0; i < txs.size(); ++i) {
        const Ratio tau = w->transfers.at(txs[i].id);
        const Ratio paid = tau * txs[i].size;
        transfer_sum += paid;
        const Ratio gain =
            Ratio(user_utility(b_txs[i], b_out)) - paid - user_utility(s_txs[i], s_out);
        if (gain <= 0) return false;
      }
      const Ratio miner_gain = Ratio(miner_utility(m, b_out, ids)) + transfer_sum -
                               miner_utility(m, s_out, ids);
      return miner_gain > 0;
    }
  } catch (const std::exception&) {
    return false;
  }
  return false;
}

}  // namespace tfm
