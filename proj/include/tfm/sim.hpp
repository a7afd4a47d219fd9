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

// Multi-block simulation: Poisson demand feeds a persistent mempool, the
// miner builds one block per height, and the base fee follows block sizes.
//
// Randomness: block h draws from SplitMix64 seeded with
// mix64(seed ^ mix64(h + 0x9e3779b97f4a7c15)), so every block's draws are a
// pure function of (seed, h). Distributions are the standard library's, so
// traces are bit-identical for a given build, not across standard libraries.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tfm/audit.hpp"
#include "tfm/basefee.hpp"
#include "tfm/mechanism.hpp"
#include "tfm/model.hpp"
#include "tfm/strategy.hpp"
#include "tfm/utility.hpp"

namespace tfm {

// SplitMix64 (Steele, Lea, Flood 2014). Satisfies
// UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  static constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Independent stream for block `height` of run `seed`.
  static SplitMix64 for_block(std::uint64_t seed, std::int64_t height) {
    return SplitMix64(
        mix64(seed ^ mix64(static_cast<std::uint64_t>(height) + 0x9e3779b97f4a7c15ULL)));
  }

 private:
  std::uint64_t state_;
};

struct ValuationDistribution {
  enum class Kind { kUniform, kLogUniform, kPointMass };
  Kind kind = Kind::kUniform;
  Money lo;
  Money hi;
};

struct SizeDistribution {
  enum class Kind { kUniform, kPointMass };
  Kind kind = Kind::kPointMass;
  std::int64_t lo = 1;
  std::int64_t hi = 1;
};

// From `height` on (until the next spike entry) the arrival rate is
// multiplied and valuations shifted.
struct DemandSpike {
  std::int64_t height = 0;
  double rate_multiplier = 1.0;
  Money valuation_shift;
};

struct DemandProcess {
  double arrival_rate = 0.0;  // mean arrivals per block
  ValuationDistribution valuation;
  SizeDistribution size;
  std::vector<DemandSpike> spikes;  // ascending height
};

enum class MinerBehavior { kIntendedRule, kMyopicOptimal, kGreedyHeuristic };

inline std::string_view to_string(MinerBehavior b) {
  switch (b) {
    case MinerBehavior::kIntendedRule: return "intended";
    case MinerBehavior::kMyopicOptimal: return "myopic-optimal";
    case MinerBehavior::kGreedyHeuristic: return "greedy";
  }
  return "?";
}

struct MempoolPolicy {
  enum class Kind { kPersistUntilIncluded, kEvictAfter };
  Kind kind = Kind::kPersistUntilIncluded;
  std::int64_t blocks = 0;  // kEvictAfter: blocks a transaction may wait
};

struct Scenario {
  MechanismDescriptor mechanism;
  BaseFeeSchedule schedule;
  DemandProcess demand;
  BiddingStrategy strategy;
  MinerBehavior miner_behavior = MinerBehavior::kIntendedRule;
  std::int64_t horizon = 1;
  std::uint64_t seed = 0;
  MempoolPolicy mempool_policy;
};

// Largest mempool the myopic-optimal miner searches exhaustively.
inline constexpr std::size_t kMaxMyopicMempool = 12;

// Returns "key.path: rule" for the first violated invariant, else "".
inline std::string validation_error(const Scenario& s) {
  if (auto e = validation_error(s.mechanism); !e.empty()) return "mechanism." + e;
  if (auto e = validation_error(s.schedule); !e.empty()) return "schedule." + e;
  if (s.schedule.target_size != s.mechanism.target_size) {
    return "schedule.target_size: must equal mechanism.target_size";
  }
  if (auto e = validation_error(s.strategy); !e.empty()) return "strategy." + e;
  const auto& d = s.demand;
  if (!(d.arrival_rate >= 0) || !std::isfinite(d.arrival_rate)) {
    return "demand.arrival_rate: must be a finite number >= 0";
  }
  if (d.valuation.lo > d.valuation.hi) return "demand.valuation: lo must be <= hi";
  if (d.valuation.kind == ValuationDistribution::Kind::kLogUniform &&
      d.valuation.lo < Money(1)) {
    return "demand.valuation: log-uniform needs lo >= 1";
  }
  if (d.size.lo < 1) return "demand.size: lo must be >= 1";
  if (d.size.lo > d.size.hi) return "demand.size: lo must be <= hi";
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for (std::size_t i = 0; i < d.spikes.size(); ++i) {
    const auto& sp = d.spikes[i];
    const std::string key = "demand.spikes[" + std::to_string(i) + "]";
    if (!(sp.rate_multiplier > 0) || !std::isfinite(sp.rate_multiplier)) {
      return key + ".rate_multiplier: must be > 0";
    }
    if (sp.height < 0 || sp.height <= prev) {
      return key + ".height: must be >= 0 and strictly ascending";
    }
    prev = sp.height;
  }
  if (s.horizon < 1) return "horizon: must be >= 1";
  if (s.mempool_policy.kind == MempoolPolicy::Kind::kEvictAfter &&
      s.mempool_policy.blocks < 1) {
    return "mempool_policy.blocks: must be >= 1";
  }
  return {};
}

inline void validate(const Scenario& s) {
  if (auto e = validation_error(s); !e.empty()) throw std::invalid_argument(e);
}

struct SimState {
  ChainState chain;
  Mempool mempool;
  std::map<TxId, std::int64_t> arrival_height;
  std::uint32_t next_id = 1;

  static SimState genesis(const Scenario& s) {
    return SimState{tfm::genesis(s.schedule), Mempool{}, {}, 1};
  }
};

struct BlockRecord {
  std::int64_t height = 0;
  Money base_fee;
  std::int64_t block_size = 0;
  Total burn_total = 0;        // burns paid by real included transactions
  Total tip_revenue = 0;       // payments to the miner from real transactions
  Total user_utility_total = 0;
  std::int64_t mempool_depth = 0;  // pending after this block
  std::int64_t included_count = 0;  // real transactions
  std::int64_t evicted_count = 0;
  std::int64_t arrivals = 0;
  std::int64_t fake_count = 0;
  Total miner_utility = 0;
  Total welfare = 0;  // sum (v - mu) * s over real included
};

struct Trace {
  std::vector<BlockRecord> blocks;
};

struct StepResult {
  BlockOutcome outcome;
  BlockRecord record;
  SimState next;
};

namespace detail {

inline const DemandSpike* active_spike(const DemandProcess& d, std::int64_t height) {
  const DemandSpike* active = nullptr;
  for (const auto& sp : d.spikes) {
    if (sp.height <= height) active = &sp;
  }
  return active;
}

inline Money draw_valuation(const ValuationDistribution& d, SplitMix64& rng) {
  switch (d.kind) {
    case ValuationDistribution::Kind::kPointMass:
      return d.lo;
    case ValuationDistribution::Kind::kUniform:
      return Money(std::uniform_int_distribution<std::int64_t>(d.lo.amount(),
                                                               d.hi.amount())(rng));
    case ValuationDistribution::Kind::kLogUniform: {
      const double lo = std::log(static_cast<double>(d.lo.amount()));
      const double hi = std::log(static_cast<double>(d.hi.amount()) + 1.0);
      const double x = std::exp(std::uniform_real_distribution<double>(lo, hi)(rng));
      const auto v = static_cast<std::int64_t>(std::floor(x));
      return Money(std::clamp(v, d.lo.amount(), d.hi.amount()));
    }
  }
  throw std::logic_error("unknown valuation distribution");
}

inline std::int64_t draw_size(const SizeDistribution& d, SplitMix64& rng) {
  if (d.kind == SizeDistribution::Kind::kPointMass) return d.lo;
  return std::uniform_int_distribution<std::int64_t>(d.lo, d.hi)(rng);
}

}  // namespace detail

// One block: arrivals, block building, settlement, base-fee update, mempool
// maintenance.
inline StepResult step(const Scenario& sc, const SimState& state) {
  const MechanismDescriptor& m = sc.mechanism;
  const std::int64_t h = state.chain.height;
  const Money r = state.chain.base_fee;
  const Money r_rule = uses_base_fee(m.kind) ? r : kZero;
  SplitMix64 rng = SplitMix64::for_block(sc.seed, h);

  StepResult res;
  SimState& next = res.next;
  next.arrival_height = state.arrival_height;
  next.next_id = state.next_id;

  // Arrivals, bidding against the current base fee.
  std::vector<Transaction> pending(state.mempool.transactions().begin(),
                                   state.mempool.transactions().end());
  double rate = sc.demand.arrival_rate;
  Money shift;
  if (const DemandSpike* sp = detail::active_spike(sc.demand, h)) {
    rate *= sp->rate_multiplier;
    shift = sp->valuation_shift;
  }
  std::int64_t arrivals = 0;
  if (rate > 0) arrivals = std::poisson_distribution<std::int64_t>(rate)(rng);
  for (std::int64_t i = 0; i < arrivals; ++i) {
    const Money v = detail::draw_valuation(sc.demand.valuation, rng) + shift;
    const std::int64_t size = detail::draw_size(sc.demand.size, rng);
    const BidParams bp = to_bid_params(sc.strategy, v, r_rule, m.mu, m.delta);
    const TxId id{next.next_id++};
    pending.push_back(Transaction{id, size, v, bp.fee_cap, bp.tip, false});
    next.arrival_height[id] = h;
  }
  const Mempool pool(std::move(pending));
  const auto txs = pool.transactions();

  // Block building.
  std::vector<Transaction> block;
  switch (sc.miner_behavior) {
    case MinerBehavior::kIntendedRule:
      block = select(txs, allocate(m, r_rule, txs).included);
      break;
    case MinerBehavior::kGreedyHeuristic:
      block = select(txs, allocate_greedy(m, r_rule, txs).included);
      break;
    case MinerBehavior::kMyopicOptimal: {
      if (txs.size() > kMaxMyopicMempool) {
        throw SearchSpaceOverflow("myopic-optimal miner: mempool of " +
                                  std::to_string(txs.size()) + " exceeds " +
                                  std::to_string(kMaxMyopicMempool));
      }
      const DeviationSpace dev =
          make_deviation_space(m, r_rule, txs, {}, GridOptions{Money(1), false, 1});
      const BestResponse br = best_response(m, r_rule, txs, dev);
      block = select(txs, br.block);
      for (const auto& f : br.fakes) block.push_back(f);
      std::sort(block.begin(), block.end(),
                [](const Transaction& a, const Transaction& b) { return a.id < b.id; });
      break;
    }
  }
  res.outcome = settle(m, r_rule, block);
  const BlockOutcome& out = res.outcome;

  BlockRecord& rec = res.record;
  rec.height = h;
  rec.base_fee = r;
  rec.block_size = out.total_size;
  rec.arrivals = arrivals;
  std::set<TxId> real_ids;
  for (const auto& t : txs) real_ids.insert(t.id);
  for (const auto& t : block) {
    if (t.is_fake) {
      ++rec.fake_count;
      continue;
    }
    ++rec.included_count;
    rec.burn_total += total(out.burn.at(t.id), t.size);
    rec.tip_revenue += total(out.payment.at(t.id), t.size);
    rec.user_utility_total += user_utility(t, out);
    rec.welfare += (t.valuation.amount() - m.mu.amount()) * t.size;
  }
  rec.miner_utility = miner_utility(m, out, real_ids);

  next.chain = advance(sc.schedule, state.chain, out.total_size);

  // Mempool maintenance.
  std::vector<Transaction> remaining;
  for (const auto& t : txs) {
    if (out.contains(t.id)) {
      next.arrival_height.erase(t.id);
      continue;
    }
    const std::int64_t waited = h - next.arrival_height.at(t.id) + 1;
    if (sc.mempool_policy.kind == MempoolPolicy::Kind::kEvictAfter &&
        waited >= sc.mempool_policy.blocks) {
      ++rec.evicted_count;
      next.arrival_height.erase(t.id);
      continue;
    }
    remaining.push_back(t);
  }
  rec.mempool_depth = static_cast<std::int64_t>(remaining.size());
  next.mempool = Mempool(std::move(remaining));
  return res;
}

inline Trace run(const Scenario& sc) {
  validate(sc);
  Trace trace;
  trace.blocks.reserve(static_cast<std::size_t>(sc.horizon));
  SimState state = SimState::genesis(sc);
  for (std::int64_t i = 0; i < sc.horizon; ++i) {
    StepResult res = step(sc, state);
    trace.blocks.push_back(res.record);
    state = std::move(res.next);
  }
  return trace;
}

// True iff the base-fee column is reproduced by replaying the size column.
inline bool replays(const BaseFeeSchedule& s, const Trace& trace) {
  Money r = s.genesis_fee;
  for (const auto& b : trace.blocks) {
    if (b.base_fee != r) return false;
    r = next_base_fee(s, r, b.block_size);
  }
  return true;
}

struct Summary {
  std::int64_t blocks = 0;
  double mean_base_fee = 0.0;
  Money max_base_fee;
  Total total_burn = 0;
  Total total_tip_revenue = 0;
  Total total_user_utility = 0;
  Total welfare = 0;
  double mean_size_ratio = 0.0;  // mean block size / target size
};

inline Summary summarize(const Trace& trace, std::int64_t target_size) {
  if (trace.blocks.empty()) throw std::invalid_argument("cannot summarize an empty trace");
  if (target_size < 1) throw std::invalid_argument("target size must be >= 1");
  Summary s;
  s.blocks = static_cast<std::int64_t>(trace.blocks.size());
  double fee_sum = 0.0;
  double size_sum = 0.0;
  for (const auto& b : trace.blocks) {
    fee_sum += static_cast<double>(b.base_fee.amount());
    size_sum += static_cast<double>(b.block_size);
    s.max_base_fee = max(s.max_base_fee, b.base_fee);
    s.total_burn += b.burn_total;
    s.total_tip_revenue += b.tip_revenue;
    s.total_user_utility += b.user_utility_total;
    s.welfare += b.welfare;
  }
  s.mean_base_fee = fee_sum / static_cast<double>(s.blocks);
  s.mean_size_ratio = size_sum / static_cast<double>(s.blocks) / static_cast<double>(target_size);
  return s;
}

}  // namespace tfm
