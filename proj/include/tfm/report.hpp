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

// Audit campaigns: seeded random instance generators, the named
// counterexamples, and the 6 x 3 report card.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tfm/audit.hpp"
#include "tfm/basefee.hpp"
#include "tfm/mechanism.hpp"
#include "tfm/model.hpp"
#include "tfm/sim.hpp"
#include "tfm/strategy.hpp"

namespace tfm {

inline constexpr Property kAllProperties[] = {Property::kMmic, Property::kDsic,
                                              Property::kOcaProof};

// Candidate dominant strategy checked for DSIC.
inline BiddingStrategy default_dsic_strategy(MechanismKind k) {
  switch (k) {
    case MechanismKind::k1559:
    case MechanismKind::kBetaBurn1559: return {StrategyKind::kStraightforward1559, Ratio(1)};
    case MechanismKind::kTipless: return {StrategyKind::kTipless, Ratio(1)};
    default: return {StrategyKind::kTruthful, Ratio(1)};
  }
}

// Posted-price mechanisms assume creators cannot bid above their valuation.
inline bool default_forbid_overbidding(MechanismKind k) {
  return k == MechanismKind::k1559 || k == MechanismKind::kBetaBurn1559;
}

// Individually rational strategy checked for OCA-proofness.
inline BiddingStrategy default_oca_strategy(MechanismKind k) {
  switch (k) {
    case MechanismKind::kFpa:
    case MechanismKind::kBetaBurnFpa: return {StrategyKind::kScaledFpa, Ratio(1)};
    case MechanismKind::k1559:
    case MechanismKind::kBetaBurn1559: return {StrategyKind::kScaled1559, Ratio(1)};
    case MechanismKind::kTipless: return {StrategyKind::kTipless, Ratio(1)};
    case MechanismKind::kSpa: return {StrategyKind::kTruthful, Ratio(1)};
  }
  return {};
}

// Excessively-low regime of an instance. Mechanisms without a base fee are
// judged at price mu against their capacity.
inline bool is_low_regime(const AuditInstance& in) {
  const Money r = uses_base_fee(in.mechanism.kind) ? in.base_fee : kZero;
  return is_excessively_low(r, in.mechanism.mu, in.transactions, in.mechanism.max_size);
}

// Runs one audit. A missing strategy falls back to the property's default for
// the mechanism.
inline AuditVerdict run_audit(const AuditInstance& in, Property p, const GridOptions& grid = {}) {
  const MechanismDescriptor& m = in.mechanism;
  const Money r = uses_base_fee(m.kind) ? in.base_fee : kZero;
  const ChainState chain = ChainState::at_base_fee(r);
  const DeviationSpace dev = make_deviation_space(m, r, in.transactions, {}, grid);
  switch (p) {
    case Property::kMmic:
      return check_mmic(m, chain, Mempool(in.transactions), dev);
    case Property::kDsic:
      return check_dsic(m, chain, in.transactions,
                        in.strategy.value_or(default_dsic_strategy(m.kind)), dev,
                        in.forbid_overbidding);
    case Property::kOcaProof:
      return check_oca_proof(m, chain, in.transactions,
                             in.strategy.value_or(default_oca_strategy(m.kind)), dev);
  }
  throw std::logic_error("unknown property");
}

// ---- named counterexamples -------------------------------------------------

struct NamedCounterexample {
  std::string name;
  std::string summary;
  Property property = Property::kMmic;
  AuditInstance instance;
};

namespace report_detail {

inline Transaction unit_bid(std::uint32_t id, std::int64_t bid) {
  return Transaction::with_bid(TxId{id}, 1, Money(bid), Money(bid));
}

// A creator with valuation v whose bid is v in every mechanism.
inline Transaction valued(std::uint32_t id, std::int64_t size, std::int64_t v) {
  return Transaction::with_bid(TxId{id}, size, Money(v), Money(v));
}

}  // namespace report_detail

inline std::vector<NamedCounterexample> named_counterexamples() {
  using report_detail::unit_bid;
  using report_detail::valued;
  std::vector<NamedCounterexample> out;

  {  // Second-price block of three: a fake bid raises the clearing price.
    NamedCounterexample c{"spa-fake-bid",
                          "SPA, capacity 3, unit bids {10, 8, 3}: a fake bid of 8 lifts "
                          "miner revenue from 9 to 16",
                          Property::kMmic,
                          {}};
    c.instance.mechanism = MechanismDescriptor::make(MechanismKind::kSpa, 3);
    c.instance.transactions = {unit_bid(1, 10), unit_bid(2, 8), unit_bid(3, 3)};
    out.push_back(c);
  }
  {  // Burning half of a first-price bid: a near-zero bid beats the truthful one.
    NamedCounterexample c{"beta-burn-fpa-oca",
                          "beta-burn FPA (beta=1/2), one transaction v=10: bidding 1 "
                          "burns nothing, so the coalition beats the truthful bid",
                          Property::kOcaProof,
                          {}};
    c.instance.mechanism =
        MechanismDescriptor::make(MechanismKind::kBetaBurnFpa, 1, kZero, Ratio(1, 2));
    c.instance.transactions = {valued(1, 1, 10)};
    c.instance.strategy = default_oca_strategy(MechanismKind::kBetaBurnFpa);
    out.push_back(c);
  }
  {  // Valuation between the partial burn and the base fee.
    NamedCounterexample c{"beta-burn-1559-oca",
                          "beta-burn 1559 (beta=1/2, r=10, mu=0), one transaction v=6: "
                          "bidding r includes it at burn 5, joint utility 1 > 0",
                          Property::kOcaProof,
                          {}};
    c.instance.mechanism =
        MechanismDescriptor::make(MechanismKind::kBetaBurn1559, 1, kZero, Ratio(1, 2));
    c.instance.base_fee = Money(10);
    c.instance.transactions = {valued(1, 1, 6)};
    c.instance.strategy = default_oca_strategy(MechanismKind::kBetaBurn1559);
    out.push_back(c);
  }
  {  // Tipless fills by size when demand at r overflows the block.
    NamedCounterexample c{"tipless-low-basefee-oca",
                          "tipless (r=1, delta=mu=0, max size 2), sizes {2,1,1} with "
                          "values {2,10,9}: the size-filling block is not the "
                          "joint-utility optimum",
                          Property::kOcaProof,
                          {}};
    c.instance.mechanism = MechanismDescriptor::make(MechanismKind::kTipless, 1);
    c.instance.base_fee = Money(1);
    c.instance.transactions = {valued(1, 2, 2), valued(2, 1, 10), valued(3, 1, 9)};
    c.instance.strategy = default_oca_strategy(MechanismKind::kTipless);
    out.push_back(c);
  }
  {  // Zero base fee with one slot: 1559 degenerates to a first-price auction.
    NamedCounterexample c{"1559-low-basefee-dsic",
                          "1559 (r=0, mu=0), two transactions each filling the block, "
                          "values {10, 8}: the excluded bidder gains by bidding 1",
                          Property::kDsic,
                          {}};
    c.instance.mechanism = MechanismDescriptor::make(MechanismKind::k1559, 1);
    c.instance.transactions = {valued(1, 2, 10), valued(2, 2, 8)};
    c.instance.strategy = default_dsic_strategy(MechanismKind::k1559);
    c.instance.forbid_overbidding = true;
    out.push_back(c);
  }
  return out;
}

inline std::optional<NamedCounterexample> find_counterexample(std::string_view name) {
  for (auto& c : named_counterexamples()) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

// ---- random instances ------------------------------------------------------

struct BatteryConfig {
  std::uint64_t seed = 1;
  int instances = 100;          // random instances per cell
  std::optional<int> max_txs;   // overrides the per-property default
  Money grid_step{1};
  std::int64_t max_value = 20;  // bids and valuations in [0, max_value]
  std::int64_t max_size = 3;    // transaction sizes in [1, max_size]
};

inline int default_max_txs(Property p) {
  switch (p) {
    case Property::kMmic: return 6;
    case Property::kDsic: return 3;
    case Property::kOcaProof: return 4;
  }
  return 1;
}

// Parameters that are held fixed for a mechanism within a battery.
struct MechanismParams {
  Ratio beta{0};
  std::optional<std::int64_t> mu;  // fixed mu, else drawn
};

inline MechanismParams default_params(MechanismKind k, Property p) {
  MechanismParams params;
  if (k == MechanismKind::kBetaBurnFpa || k == MechanismKind::kBetaBurn1559) {
    params.beta = Ratio(1, 2);
  }
  // Beta-burn 1559 matches 1559 for its users only without a miner cost.
  if (k == MechanismKind::kBetaBurn1559 && p == Property::kDsic) params.mu = 0;
  return params;
}

namespace report_detail {

inline std::int64_t uniform(SplitMix64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline SplitMix64 cell_rng(std::uint64_t seed, MechanismKind k, Property p, std::int64_t index) {
  const auto tag = static_cast<std::uint64_t>(k) * 3 + static_cast<std::uint64_t>(p) + 1;
  return SplitMix64::for_block(seed ^ SplitMix64::mix64(tag * 0xd1b54a32d192ed03ULL), index);
}

}  // namespace report_detail

// A random audit instance for (k, p). MMIC instances carry arbitrary bids;
// DSIC and OCA instances carry valuations and the property's default
// strategy (bids are set by the audit).
inline AuditInstance random_instance(MechanismKind k, Property p, const MechanismParams& params,
                                     SplitMix64& rng, const BatteryConfig& cfg) {
  using report_detail::uniform;
  const int n_max = cfg.max_txs.value_or(default_max_txs(p));
  const auto n = static_cast<std::size_t>(uniform(rng, 1, std::max(1, n_max)));
  const Money mu(params.mu.value_or(uniform(rng, 0, 3)));
  const std::int64_t target = uses_base_fee(k) ? uniform(rng, 1, 4) : uniform(rng, 1, 6);
  const Money delta = k == MechanismKind::kTipless ? mu : kZero;
  AuditInstance in;
  in.mechanism = MechanismDescriptor::make(k, target, mu, params.beta, delta);
  in.base_fee = uses_base_fee(k) ? Money(uniform(rng, 0, 15)) : kZero;
  const Money r = in.base_fee;
  for (std::size_t i = 0; i < n; ++i) {
    const TxId id{static_cast<std::uint32_t>(i + 1)};
    const std::int64_t size = uniform(rng, 1, cfg.max_size);
    const Money v(uniform(rng, 0, cfg.max_value));
    if (p == Property::kMmic) {
      Money bid = v;
      // Tipless bids are mostly the posted price, else they are never eligible.
      if (k == MechanismKind::kTipless && uniform(rng, 0, 3) != 0) bid = r + delta;
      in.transactions.push_back(Transaction::with_bid(id, size, bid, v));
    } else {
      const BiddingStrategy s =
          p == Property::kDsic ? default_dsic_strategy(k) : default_oca_strategy(k);
      const BidParams bp = to_bid_params(s, v, r, mu, delta);
      in.transactions.push_back(Transaction{id, size, v, bp.fee_cap, bp.tip, false});
    }
  }
  if (p == Property::kDsic) {
    in.strategy = default_dsic_strategy(k);
    in.forbid_overbidding = default_forbid_overbidding(k);
  } else if (p == Property::kOcaProof) {
    in.strategy = default_oca_strategy(k);
  }
  return in;
}

// ---- report card -------------------------------------------------------------

enum class CellStatus { kAllPass, kViolated, kConditional };

inline std::string_view to_string(CellStatus s) {
  switch (s) {
    case CellStatus::kAllPass: return "all-pass";
    case CellStatus::kViolated: return "violated";
    case CellStatus::kConditional: return "conditional";
  }
  return "?";
}

// Table entries: yes, no, usually (holds unless the base fee is excessively
// low), almost (fails, with a reported gap).
enum class Expected { kYes, kNo, kUsually, kAlmost };

inline std::string_view to_string(Expected e) {
  switch (e) {
    case Expected::kYes: return "yes";
    case Expected::kNo: return "no";
    case Expected::kUsually: return "usually";
    case Expected::kAlmost: return "almost";
  }
  return "?";
}

inline Expected expected_cell(MechanismKind k, Property p) {
  using E = Expected;
  const int col = static_cast<int>(p);
  switch (k) {
    case MechanismKind::kFpa: return std::array{E::kYes, E::kNo, E::kYes}[col];
    case MechanismKind::kSpa: return std::array{E::kNo, E::kAlmost, E::kAlmost}[col];
    case MechanismKind::kBetaBurnFpa: return std::array{E::kYes, E::kNo, E::kNo}[col];
    case MechanismKind::k1559: return std::array{E::kYes, E::kUsually, E::kYes}[col];
    case MechanismKind::kBetaBurn1559: return std::array{E::kYes, E::kUsually, E::kNo}[col];
    case MechanismKind::kTipless: return std::array{E::kYes, E::kYes, E::kUsually}[col];
  }
  return E::kYes;
}

inline bool matches(Expected e, CellStatus s) {
  switch (e) {
    case Expected::kYes: return s == CellStatus::kAllPass;
    case Expected::kNo: return s == CellStatus::kViolated;
    case Expected::kUsually: return s == CellStatus::kConditional;
    case Expected::kAlmost: return s != CellStatus::kAllPass;
  }
  return false;
}

struct ReportRow {
  MechanismKind mechanism = MechanismKind::kFpa;
  Property property = Property::kMmic;
  CellStatus status = CellStatus::kAllPass;
  std::int64_t instances_normal = 0;
  std::int64_t instances_low = 0;
  std::int64_t violations_normal = 0;
  std::int64_t violations_low = 0;
  Total max_gap = 0;  // largest best_value - reference_value seen
  std::vector<std::string> named;  // named instances included in this cell
  std::optional<AuditVerdict> first_violation;
  Expected expected = Expected::kYes;
  bool match = false;

  std::int64_t violations() const { return violations_normal + violations_low; }
  std::string regime_note() const {
    if (status != CellStatus::kConditional) return {};
    return "violations only with an excessively low base fee (" +
           std::to_string(violations_low) + "/" + std::to_string(instances_low) + ")";
  }
};

// Named instances audited in a cell. The zero-base-fee DSIC instance is
// shared by both 1559 variants.
inline std::vector<NamedCounterexample> named_for_cell(MechanismKind k, Property p) {
  std::vector<NamedCounterexample> out;
  for (auto c : named_counterexamples()) {
    if (c.property != p) continue;
    if (c.instance.mechanism.kind == k) {
      out.push_back(c);
    } else if (c.name == "1559-low-basefee-dsic" && k == MechanismKind::kBetaBurn1559) {
      c.instance.mechanism.kind = k;
      c.instance.strategy = default_dsic_strategy(k);
      out.push_back(c);
    }
  }
  return out;
}

inline void record(ReportRow& row, const AuditVerdict& v, bool low) {
  (low ? row.instances_low : row.instances_normal) += 1;
  if (!v.violated) return;
  (low ? row.violations_low : row.violations_normal) += 1;
  row.max_gap = std::max(row.max_gap, v.best_value - v.reference_value);
  if (!row.first_violation) row.first_violation = v;
}

inline CellStatus classify(const ReportRow& row) {
  if (row.violations_normal > 0) return CellStatus::kViolated;
  if (row.violations_low > 0) return CellStatus::kConditional;
  return CellStatus::kAllPass;
}

inline ReportRow run_cell(MechanismKind k, Property p, const BatteryConfig& cfg) {
  ReportRow row;
  row.mechanism = k;
  row.property = p;
  const GridOptions grid{cfg.grid_step, false, 2};
  for (const auto& c : named_for_cell(k, p)) {
    row.named.push_back(c.name);
    record(row, run_audit(c.instance, p, grid), is_low_regime(c.instance));
  }
  const MechanismParams params = default_params(k, p);
  for (int i = 0; i < cfg.instances; ++i) {
    SplitMix64 rng = report_detail::cell_rng(cfg.seed, k, p, i);
    const AuditInstance in = random_instance(k, p, params, rng, cfg);
    record(row, run_audit(in, p, grid), is_low_regime(in));
  }
  row.status = classify(row);
  row.expected = expected_cell(k, p);
  row.match = matches(row.expected, row.status);
  return row;
}

// 18 rows in canonical order: mechanism, then property.
inline std::vector<ReportRow> run_report_card(const BatteryConfig& cfg) {
  std::vector<ReportRow> rows;
  for (auto k : kAllMechanisms) {
    for (auto p : kAllProperties) rows.push_back(run_cell(k, p, cfg));
  }
  return rows;
}

}  // namespace tfm
