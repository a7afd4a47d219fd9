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

#include "oracle.hpp"
#include "tfm/mechanism.hpp"

namespace tfm {
namespace {

Transaction tx(std::uint32_t id, std::int64_t size, std::int64_t bid) {
  return Transaction::with_bid(TxId{id}, size, Money(bid));
}

std::vector<TxId> ids(std::initializer_list<std::uint32_t> v) {
  std::vector<TxId> out;
  for (auto x : v) out.push_back(TxId{x});
  return out;
}

MechanismDescriptor random_descriptor(oracle::Gen& gen, MechanismKind kind) {
  const Money mu(gen.uniform(0, 3));
  Ratio beta(0);
  if (kind == MechanismKind::kBetaBurnFpa) beta = Ratio(gen.uniform(1, 4), 4);
  if (kind == MechanismKind::kBetaBurn1559) beta = Ratio(gen.uniform(0, 3), 4);
  const Money delta = kind == MechanismKind::kTipless ? Money(gen.uniform(0, 3)) : kZero;
  return MechanismDescriptor::make(kind, gen.uniform(1, 5), mu, beta, delta);
}

// Transactions with independent caps and tips, some aimed at the tipless
// posted price so that rule has eligible input.
std::vector<Transaction> random_txs(oracle::Gen& gen, const MechanismDescriptor& m, Money r,
                                    std::size_t n) {
  std::vector<Transaction> out;
  for (std::size_t i = 0; i < n; ++i) {
    Transaction t{TxId{static_cast<std::uint32_t>(i + 1)}, gen.uniform(1, 3),
                  Money(gen.uniform(0, 20)), Money(gen.uniform(0, 20)),
                  Money(gen.uniform(0, 8)), false};
    if (m.kind == MechanismKind::kTipless && gen.coin()) t.fee_cap = r + m.delta + t.tip;
    out.push_back(t);
  }
  return out;
}

TEST(Descriptor, ValidatesSizesAndBeta) {
  EXPECT_EQ(validation_error(MechanismDescriptor::make(MechanismKind::k1559, 4)), "");
  auto m = MechanismDescriptor::make(MechanismKind::k1559, 4);
  m.max_size = 7;
  EXPECT_NE(validation_error(m).find("max_size"), std::string::npos);
  auto f = MechanismDescriptor::make(MechanismKind::kFpa, 4);
  f.max_size = 8;
  EXPECT_NE(validation_error(f).find("max_size"), std::string::npos);
  EXPECT_NE(validation_error(MechanismDescriptor::make(MechanismKind::kBetaBurnFpa, 1, kZero,
                                                       Ratio(0)))
                .find("beta"),
            std::string::npos);
  EXPECT_EQ(validation_error(MechanismDescriptor::make(MechanismKind::kBetaBurnFpa, 1, kZero,
                                                       Ratio(1))),
            "");
  EXPECT_NE(validation_error(MechanismDescriptor::make(MechanismKind::kBetaBurn1559, 1, kZero,
                                                       Ratio(1)))
                .find("beta"),
            std::string::npos);
  EXPECT_EQ(validation_error(MechanismDescriptor::make(MechanismKind::kBetaBurn1559, 1, kZero,
                                                       Ratio(0))),
            "");
  EXPECT_EQ(parse_mechanism_kind("beta-burn-1559"), MechanismKind::kBetaBurn1559);
  EXPECT_FALSE(parse_mechanism_kind("vickrey"));
}

TEST(Allocate, FirstPriceKnapsack) {
  const auto m = MechanismDescriptor::make(MechanismKind::kFpa, 4);
  const std::vector<Transaction> txs{tx(1, 2, 5), tx(2, 3, 4), tx(3, 2, 4)};
  const auto a = allocate(m, kZero, txs);
  EXPECT_EQ(a.included, ids({1, 3}));
  EXPECT_EQ(a.objective_value, 18);
}

TEST(Allocate, Eip1559DropsNegativeMargins) {
  const auto m = MechanismDescriptor::make(MechanismKind::k1559, 2, Money(1));
  const std::vector<Transaction> txs{tx(1, 2, 5), tx(2, 2, 3), tx(3, 2, 6)};
  EXPECT_EQ(allocate(m, Money(3), txs).included, ids({1, 3}));
}

TEST(Allocate, Eip1559SkipsCapsBelowBaseFee) {
  const auto m = MechanismDescriptor::make(MechanismKind::k1559, 2);
  const std::vector<Transaction> txs{Transaction{TxId{1}, 1, kZero, Money(4), Money(9), false},
                                     Transaction{TxId{2}, 1, kZero, Money(7), Money(1), false}};
  EXPECT_EQ(allocate(m, Money(5), txs).included, ids({2}));
}

TEST(Allocate, ZeroMarginPolicyPerMechanism) {
  const std::vector<Transaction> txs{tx(1, 1, 0), tx(2, 1, 5)};
  // FPA leaves a zero bid out; the burning variant fills the room with it.
  const auto fpa = MechanismDescriptor::make(MechanismKind::kFpa, 2);
  EXPECT_EQ(allocate(fpa, kZero, txs).included, ids({2}));
  const auto half = MechanismDescriptor::make(MechanismKind::kBetaBurnFpa, 2, kZero, Ratio(1, 2));
  EXPECT_EQ(allocate(half, kZero, txs).included, ids({1, 2}));
  // Burning everything leaves every margin at zero, so the block fills by size.
  const auto full = MechanismDescriptor::make(MechanismKind::kBetaBurnFpa, 1, kZero, Ratio(1));
  EXPECT_EQ(allocate(full, kZero, txs).included, ids({1}));
  EXPECT_EQ(allocate(full, kZero, txs).objective_value, 0);
}

TEST(Allocate, SecondPriceTakesTheLongestPrefix) {
  const auto m = MechanismDescriptor::make(MechanismKind::kSpa, 3);
  const std::vector<Transaction> txs{tx(1, 1, 10), tx(2, 1, 8), tx(3, 1, 3), tx(4, 1, 2)};
  EXPECT_EQ(allocate(m, kZero, txs).included, ids({1, 2, 3}));
  // The prefix stops at the first transaction that does not fit.
  const std::vector<Transaction> big{tx(1, 1, 10), tx(2, 3, 8), tx(3, 1, 3)};
  EXPECT_EQ(allocate(m, kZero, big).included, ids({1}));
}

TEST(Allocate, TiplessFillsByTotalSize) {
  const auto m = MechanismDescriptor::make(MechanismKind::kTipless, 2, Money(1), Ratio(0), Money(1));
  auto posted = [](std::uint32_t id, std::int64_t size) {
    return Transaction{TxId{id}, size, kZero, Money(6), Money(0), false};
  };
  // A capacity of 3 has no whole target size, so it is set directly.
  auto mm = m;
  mm.max_size = 3;
  const std::vector<Transaction> txs{posted(1, 2), posted(2, 2), posted(3, 1)};
  EXPECT_EQ(allocate(mm, Money(5), txs).included, ids({1, 3}));
  // A tip below the marginal cost makes every transaction a loss.
  auto loss = MechanismDescriptor::make(MechanismKind::kTipless, 2, Money(2), Ratio(0), Money(1));
  EXPECT_TRUE(allocate(loss, Money(5), txs).included.empty());
}

TEST(Settle, PerMechanismCharges) {
  const auto e = MechanismDescriptor::make(MechanismKind::k1559, 2);
  const auto o = settle(e, Money(3), std::vector{tx(1, 1, 5)});
  EXPECT_EQ(o.payment.at(TxId{1}), Money(2));
  EXPECT_EQ(o.burn.at(TxId{1}), Money(3));

  const auto b = MechanismDescriptor::make(MechanismKind::kBetaBurnFpa, 2, kZero, Ratio(1, 2));
  const auto ob = settle(b, kZero, std::vector{tx(1, 1, 8)});
  EXPECT_EQ(ob.payment.at(TxId{1}), Money(4));
  EXPECT_EQ(ob.burn.at(TxId{1}), Money(4));

  const auto s = MechanismDescriptor::make(MechanismKind::kSpa, 3);
  const auto os = settle(s, kZero, std::vector{tx(1, 1, 10), tx(2, 1, 8), tx(3, 1, 3)});
  for (auto id : ids({1, 2, 3})) {
    EXPECT_EQ(os.payment.at(id), Money(3));
    EXPECT_EQ(os.burn.at(id), kZero);
  }
  EXPECT_EQ(os.total_size, 3);
  EXPECT_TRUE(settle(s, kZero, std::vector<Transaction>{}).included.empty());
}

TEST(Settle, RejectsProtocolInvalidBlocks) {
  const auto t = MechanismDescriptor::make(MechanismKind::kTipless, 2, kZero, Ratio(0), Money(1));
  EXPECT_THROW(settle(t, Money(5), std::vector{tx(1, 1, 5)}), std::invalid_argument);
  EXPECT_NO_THROW(settle(t, Money(5), std::vector{tx(1, 1, 6)}));
  const auto e = MechanismDescriptor::make(MechanismKind::k1559, 1);
  EXPECT_THROW(settle(e, Money(5), std::vector{tx(1, 1, 4)}), std::invalid_argument);
  EXPECT_THROW(settle(e, kZero, std::vector{tx(1, 3, 4)}), std::invalid_argument);
}

TEST(Property, AllocationIsFeasibleAndMatchesOracleRevenue) {
  oracle::Gen gen(4242);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto kind = kAllMechanisms[gen.uniform(0, 5)];
    const auto m = random_descriptor(gen, kind);
    const Money r(uses_base_fee(kind) ? gen.uniform(0, 10) : 0);
    const auto txs = random_txs(gen, m, r, static_cast<std::size_t>(gen.uniform(0, 10)));
    const auto a = allocate(m, r, txs);
    const auto chosen = select(txs, a.included);
    ASSERT_TRUE(is_feasible(chosen, m.max_size));
    const BlockOutcome o = settle(m, r, chosen);
    Total revenue = 0;
    for (const auto& t : chosen) {
      const auto [p, q] = oracle::charge(m, r.amount(), oracle::effective_bid(m, r.amount(), t),
                                         [&] {
                                           std::int64_t low = INT64_MAX;
                                           for (const auto& u : chosen) {
                                             low = std::min(low, oracle::effective_bid(
                                                                     m, r.amount(), u));
                                           }
                                           return low;
                                         }());
      ASSERT_EQ(o.payment.at(t.id).amount(), p) << "trial " << trial;
      ASSERT_EQ(o.burn.at(t.id).amount(), q) << "trial " << trial;
      revenue += (p - m.mu.amount()) * t.size;
    }
    if (is_separable(kind)) {
      ASSERT_EQ(revenue, oracle::max_revenue(m, r.amount(), txs)) << "trial " << trial;
      ASSERT_EQ(a.objective_value, revenue);
    }
    const auto g = allocate_greedy(m, r, txs);
    ASSERT_TRUE(is_feasible(select(txs, g.included), m.max_size));
  }
}

TEST(Property, SeparableChargesIgnoreTheRestOfTheBlock) {
  oracle::Gen gen(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto kind = kAllMechanisms[gen.uniform(0, 5)];
    if (!is_separable(kind)) continue;
    auto m = random_descriptor(gen, kind);
    m.max_size = 1000;
    m.target_size = uses_base_fee(kind) ? 500 : 1000;
    const Money r(uses_base_fee(kind) ? gen.uniform(0, 10) : 0);
    auto pool = random_txs(gen, m, r, 8);
    std::vector<Transaction> eligible;
    for (const auto& t : pool) {
      if (is_eligible(m, r, t)) eligible.push_back(t);
    }
    if (eligible.empty()) continue;
    const Transaction target = eligible.front();
    const auto alone = settle(m, r, std::vector{target});
    std::vector<Transaction> others;
    for (std::size_t i = 1; i < eligible.size(); ++i) {
      if (gen.coin()) others.push_back(eligible[i]);
    }
    std::vector<Transaction> block{target};
    block.insert(block.end(), others.begin(), others.end());
    const auto with = settle(m, r, block);
    ASSERT_EQ(with.payment.at(target.id), alone.payment.at(target.id));
    ASSERT_EQ(with.burn.at(target.id), alone.burn.at(target.id));
  }
}

TEST(Property, TiplessChargesAreConstant) {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = random_descriptor(gen, MechanismKind::kTipless);
    const Money r(gen.uniform(0, 10));
    const auto txs = random_txs(gen, m, r, 8);
    const auto o = run_mechanism(m, r, txs);
    for (TxId id : o.included) {
      ASSERT_EQ(o.payment.at(id), m.delta);
      ASSERT_EQ(o.burn.at(id), r);
    }
  }
}

// With a zero base fee and matched capacity, 1559 collects the same revenue
// as a first-price auction and picks the same block whenever the optimum is
// unique. Zero-margin bids are left out: 1559 fills the block with them.
TEST(Property, ZeroBaseFee1559IsFirstPrice) {
  oracle::Gen gen(1559);
  int unique_optima = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::int64_t c = gen.uniform(1, 4);
    const auto fpa = MechanismDescriptor::make(MechanismKind::kFpa, 2 * c);
    const auto e = MechanismDescriptor::make(MechanismKind::k1559, c);
    std::vector<Transaction> txs;
    const auto n = static_cast<std::size_t>(gen.uniform(0, 8));
    for (std::size_t i = 0; i < n; ++i) {
      txs.push_back(tx(static_cast<std::uint32_t>(i + 1), gen.uniform(1, 3), gen.uniform(1, 20)));
    }
    const auto a = run_mechanism(fpa, kZero, txs);
    const auto b = run_mechanism(e, kZero, txs);
    Total ra = 0, rb = 0;
    for (TxId id : a.included) ra += total(a.payment.at(id), a.size.at(id));
    for (TxId id : b.included) rb += total(b.payment.at(id), b.size.at(id));
    ASSERT_EQ(ra, rb) << "trial " << trial;
    for (TxId id : b.included) ASSERT_EQ(b.burn.at(id), kZero);

    // Count optimal subsets to know whether the block is forced.
    std::vector<KnapsackItem> items;
    for (const auto& t : txs) items.push_back({t.id, t.size, total(t.fee_cap, t.size)});
    int optima = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      Total w = 0;
      std::int64_t s = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1) {
          w += items[i].weight;
          s += items[i].size;
        }
      }
      if (s <= 2 * c && w == ra) ++optima;
    }
    if (optima == 1) {
      ++unique_optima;
      ASSERT_EQ(a.included, b.included) << "trial " << trial;
      for (TxId id : a.included) ASSERT_EQ(a.payment.at(id), b.payment.at(id));
    }
  }
  EXPECT_GT(unique_optima, 500);
}

}  // namespace
}  // namespace tfm
