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

#include <vector>

#include <gtest/gtest.h>

#include "tfm/io.hpp"
#include "tfm/sim.hpp"

namespace tfm {
namespace {

Scenario base_scenario(MechanismKind kind = MechanismKind::k1559) {
  Scenario s;
  s.mechanism = MechanismDescriptor::make(kind, 10);
  s.schedule = BaseFeeSchedule::make(Money(1000), 10);
  s.demand.arrival_rate = 0;
  s.demand.valuation = {ValuationDistribution::Kind::kUniform, Money(0), Money(2000)};
  s.strategy = {StrategyKind::kStraightforward1559, Ratio(1)};
  s.horizon = 1;
  s.seed = 9;
  return s;
}

TEST(SplitMix64, KnownSequence) {
  // Reference values of SplitMix64 seeded with 0.
  SplitMix64 g(0);
  EXPECT_EQ(g(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(g(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(g(), 0x06c45d188009454fULL);
}

TEST(Step, NoDemandEmptiesTheBlockAndLowersTheFee) {
  const Scenario s = base_scenario();
  const auto res = step(s, SimState::genesis(s));
  EXPECT_TRUE(res.outcome.included.empty());
  EXPECT_EQ(res.next.chain.base_fee, Money(875));
  EXPECT_EQ(res.record.block_size, 0);
}

TEST(Step, ValuationsBelowThePriceStayOut) {
  Scenario s = base_scenario();
  s.demand.arrival_rate = 5;
  s.demand.valuation = {ValuationDistribution::Kind::kPointMass, Money(900), Money(900)};
  const auto res = step(s, SimState::genesis(s));
  EXPECT_GT(res.record.arrivals, 0);
  EXPECT_TRUE(res.outcome.included.empty());
  EXPECT_EQ(res.record.mempool_depth, res.record.arrivals);
}

TEST(Step, StraightforwardBidderPaysOnlyTheBaseFee) {
  Scenario s = base_scenario();
  s.schedule.genesis_fee = Money(3);
  // The single transaction is injected directly; no arrivals are drawn.
  SimState state = SimState::genesis(s);
  const BidParams p = to_bid_params(s.strategy, Money(10), Money(3), kZero, kZero);
  state.mempool = Mempool({Transaction{TxId{1}, 1, Money(10), p.fee_cap, p.tip, false}});
  state.arrival_height[TxId{1}] = 0;
  state.next_id = 2;
  const auto res = step(s, state);
  ASSERT_TRUE(res.outcome.contains(TxId{1}));
  EXPECT_EQ(res.outcome.payment.at(TxId{1}), kZero);
  EXPECT_EQ(res.outcome.burn.at(TxId{1}), Money(3));
  EXPECT_EQ(res.record.burn_total, 3);
  EXPECT_EQ(res.record.user_utility_total, 7);
  EXPECT_TRUE(res.next.mempool.empty());
}

TEST(Run, SingleEmptyBlock) {
  const Scenario s = base_scenario();
  const Trace t = run(s);
  ASSERT_EQ(t.blocks.size(), 1u);
  EXPECT_EQ(t.blocks[0].base_fee, Money(1000));
  EXPECT_EQ(trace_csv(t),
            "height,base_fee,block_size,burn_total,tip_revenue,user_utility_total,"
            "mempool_depth\n0,1000,0,0,0,0,0\n");
}

TEST(Run, HeavyDemandRaisesTheBaseFeeStrictly) {
  Scenario s = base_scenario();
  s.demand.arrival_rate = 60;
  s.demand.valuation = {ValuationDistribution::Kind::kPointMass, Money(5000), Money(5000)};
  s.horizon = 40;
  const Trace t = run(s);
  // Every block fills to 2C while the price is below 5000.
  std::size_t rising = 0;
  while (rising + 1 < t.blocks.size() && t.blocks[rising].block_size == 20) {
    ASSERT_LT(t.blocks[rising].base_fee, t.blocks[rising + 1].base_fee);
    ++rising;
  }
  EXPECT_GE(rising, 5u);
  EXPECT_TRUE(replays(s.schedule, t));
}

TEST(Run, DeterministicPerSeedAndSeedSensitive) {
  Scenario s = base_scenario();
  s.demand.arrival_rate = 15;
  s.demand.size = {SizeDistribution::Kind::kUniform, 1, 3};
  s.horizon = 200;
  s.mempool_policy = {MempoolPolicy::Kind::kEvictAfter, 5};
  const Trace a = run(s), b = run(s);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  s.seed = 10;
  EXPECT_NE(to_json(run(s)).dump(), to_json(a).dump());
}

TEST(Run, EvictionRemovesStaleTransactions) {
  Scenario s = base_scenario();
  s.demand.arrival_rate = 3;
  s.demand.valuation = {ValuationDistribution::Kind::kPointMass, Money(1), Money(1)};
  s.horizon = 30;
  s.mempool_policy = {MempoolPolicy::Kind::kEvictAfter, 2};
  const Trace t = run(s);
  std::int64_t evicted = 0;
  for (const auto& b : t.blocks) {
    evicted += b.evicted_count;
    EXPECT_EQ(b.included_count, 0);
  }
  EXPECT_GT(evicted, 0);
}

TEST(Run, SpikesMultiplyArrivals) {
  Scenario s = base_scenario();
  s.demand.arrival_rate = 2;
  s.demand.spikes = {{50, 10.0, kZero}, {100, 1.0, kZero}};
  s.horizon = 150;
  const Trace t = run(s);
  std::int64_t before = 0, during = 0, after = 0;
  for (const auto& b : t.blocks) {
    (b.height < 50 ? before : b.height < 100 ? during : after) += b.arrivals;
  }
  EXPECT_GT(during, 5 * before);
  EXPECT_GT(during, 5 * after);
}

TEST(Run, MyopicMinerMatchesTheRuleForSeparableMechanisms) {
  for (auto kind : {MechanismKind::kFpa, MechanismKind::k1559, MechanismKind::kSpa}) {
    Scenario s = base_scenario(kind);
    s.mechanism = MechanismDescriptor::make(kind, 3);
    s.schedule = BaseFeeSchedule::make(Money(20), 3);
    s.demand.arrival_rate = 2;
    s.demand.valuation = {ValuationDistribution::Kind::kUniform, Money(0), Money(40)};
    s.strategy = {};
    s.horizon = 40;
    s.mempool_policy = {MempoolPolicy::Kind::kEvictAfter, 3};
    SimState state = SimState::genesis(s);
    Scenario myopic = s;
    myopic.miner_behavior = MinerBehavior::kMyopicOptimal;
    for (std::int64_t h = 0; h < s.horizon; ++h) {
      if (state.mempool.size() > 5) break;
      const auto honest = step(s, state);
      const auto greedy = step(myopic, state);
      ASSERT_GE(greedy.record.miner_utility, honest.record.miner_utility);
      if (is_separable(kind)) {
        ASSERT_EQ(greedy.record.miner_utility, honest.record.miner_utility) << to_string(kind);
      }
      state = honest.next;
    }
  }
}

TEST(Run, ConservationPerBlock) {
  Scenario s = base_scenario();
  s.demand.arrival_rate = 12;
  s.demand.size = {SizeDistribution::Kind::kUniform, 1, 3};
  s.horizon = 300;
  s.mempool_policy = {MempoolPolicy::Kind::kEvictAfter, 4};
  SimState state = SimState::genesis(s);
  for (std::int64_t h = 0; h < s.horizon; ++h) {
    const auto res = step(s, state);
    Total paid = 0;
    for (TxId id : res.outcome.included) {
      paid += total(res.outcome.payment.at(id) + res.outcome.burn.at(id), res.outcome.size.at(id));
    }
    ASSERT_EQ(res.record.burn_total + res.record.tip_revenue, paid);
    state = res.next;
  }
}

TEST(Summarize, Aggregates) {
  Trace one;
  one.blocks.push_back(BlockRecord{});
  const Summary s = summarize(one, 10);
  EXPECT_EQ(s.total_burn, 0);
  EXPECT_EQ(s.mean_size_ratio, 0.0);

  Trace full;
  BlockRecord b;
  b.block_size = 20;
  b.burn_total = 7;
  full.blocks = {b, b};
  const Summary f = summarize(full, 10);
  EXPECT_EQ(f.mean_size_ratio, 2.0);
  EXPECT_EQ(f.total_burn, 14);
  EXPECT_THROW(summarize(Trace{}, 10), std::invalid_argument);
}

TEST(Scenario, Validation) {
  Scenario s = base_scenario();
  s.horizon = 0;
  EXPECT_NE(validation_error(s).find("horizon"), std::string::npos);
  s = base_scenario();
  s.demand.valuation = {ValuationDistribution::Kind::kUniform, Money(5), Money(2)};
  EXPECT_NE(validation_error(s).find("demand.valuation"), std::string::npos);
  s = base_scenario();
  s.demand.spikes = {{3, 0.0, kZero}};
  EXPECT_NE(validation_error(s).find("rate_multiplier"), std::string::npos);
  s = base_scenario();
  s.schedule = BaseFeeSchedule::make(Money(1), 11);
  EXPECT_NE(validation_error(s).find("target_size"), std::string::npos);
  EXPECT_THROW(run(s), std::invalid_argument);
}

}  // namespace
}  // namespace tfm
