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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. All comparisons are exact; runtime limits
// are wall-clock seconds.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "oracle.hpp"
#include "tfm/io.hpp"
#include "tfm/report.hpp"
#include "tfm/sim.hpp"

namespace tfm {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> body;
};

constexpr std::uint64_t kSeed = 20260101;

// Seeded battery of `count` random instances for (k, p).
template <typename Filter>
std::pair<int, int> battery(MechanismKind k, Property p, const MechanismParams& params,
                            int count, const BatteryConfig& cfg, Filter keep) {
  int audited = 0, violations = 0;
  for (std::int64_t i = 0; audited < count; ++i) {
    SplitMix64 rng = report_detail::cell_rng(cfg.seed, k, p, i);
    const AuditInstance in = random_instance(k, p, params, rng, cfg);
    if (!keep(in)) continue;
    ++audited;
    const AuditVerdict v = run_audit(in, p, GridOptions{cfg.grid_step, false, 2});
    if (v.violated) {
      if (!certify(v)) throw std::runtime_error("uncertifiable witness");
      ++violations;
    }
  }
  return {audited, violations};
}

auto any = [](const AuditInstance&) { return true; };
auto not_low = [](const AuditInstance& in) { return !is_low_regime(in); };

BatteryConfig config(Property p) {
  BatteryConfig cfg;
  cfg.seed = kSeed;
  cfg.max_txs = default_max_txs(p);
  return cfg;
}

Outcome spa_fake_bid() {
  const auto c = find_counterexample("spa-fake-bid");
  if (!c) return {false, "missing counterexample"};
  const AuditVerdict v = run_audit(c->instance, c->property);
  if (!v.witness) return {false, "no witness"};
  const auto& w = std::get<MmicWitness>(*v.witness);
  const bool fake8 = w.fakes.size() == 1 && w.fakes[0].fee_cap == Money(8);
  std::ostringstream os;
  os << "honest " << v.reference_value << ", deviation " << v.best_value << ", fake bid "
     << (w.fakes.empty() ? -1 : w.fakes[0].fee_cap.amount());
  return {v.violated && v.reference_value == 9 && v.best_value == 16 && fake8 && certify(v),
          os.str()};
}

Outcome mmic_battery() {
  const BatteryConfig cfg = config(Property::kMmic);
  std::ostringstream os;
  bool ok = true;
  for (auto k : {MechanismKind::kFpa, MechanismKind::kBetaBurnFpa, MechanismKind::k1559,
                 MechanismKind::kBetaBurn1559, MechanismKind::kTipless}) {
    const auto [n, bad] =
        battery(k, Property::kMmic, default_params(k, Property::kMmic), 1000, cfg, any);
    ok &= bad == 0;
    os << to_string(k) << " " << bad << "/" << n << "; ";
  }
  const auto [n, bad] = battery(MechanismKind::kSpa, Property::kMmic,
                                default_params(MechanismKind::kSpa, Property::kMmic), 1000,
                                cfg, any);
  ok &= bad >= 1;
  os << "spa " << bad << "/" << n;
  return {ok, os.str()};
}

Outcome tipless_dsic() {
  const BatteryConfig cfg = config(Property::kDsic);
  const auto [n, bad] = battery(MechanismKind::kTipless, Property::kDsic,
                                default_params(MechanismKind::kTipless, Property::kDsic), 500,
                                cfg, any);
  return {bad == 0, std::to_string(bad) + "/" + std::to_string(n) + " violations"};
}

Outcome conditional_1559_dsic() {
  const BatteryConfig cfg = config(Property::kDsic);
  const auto [n, bad] = battery(MechanismKind::k1559, Property::kDsic,
                                default_params(MechanismKind::k1559, Property::kDsic), 500,
                                cfg, not_low);
  const auto c = find_counterexample("1559-low-basefee-dsic");
  const AuditVerdict v = run_audit(c->instance, c->property);
  const bool witness = v.violated && v.witness &&
                       std::holds_alternative<DsicWitness>(*v.witness) && certify(v);
  std::ostringstream os;
  os << bad << "/" << n << " non-low violations; low instance "
     << (witness ? "violated with witness" : "not refuted");
  if (witness) {
    const auto& w = std::get<DsicWitness>(*v.witness);
    os << " (tx " << w.tx.value << ": bid " << w.strategy_bid.amount() << " -> "
       << w.deviating_bid.amount() << ")";
  }
  return {bad == 0 && is_low_regime(c->instance) && witness, os.str()};
}

Outcome oca_verdicts() {
  const BatteryConfig cfg = config(Property::kOcaProof);
  const Property p = Property::kOcaProof;
  std::ostringstream os;
  bool ok = true;
  for (auto k : {MechanismKind::kFpa, MechanismKind::k1559}) {
    const auto [n, bad] = battery(k, p, default_params(k, p), 300, cfg, any);
    ok &= bad == 0;
    os << to_string(k) << " " << bad << "/" << n << "; ";
  }
  for (const Ratio beta : {Ratio(1, 4), Ratio(1, 2), Ratio(1)}) {
    const auto [n, bad] =
        battery(MechanismKind::kBetaBurnFpa, p, MechanismParams{beta, {}}, 300, cfg, any);
    ok &= bad >= 1;
    os << "beta-burn-fpa(" << beta.numerator() << "/" << beta.denominator() << ") " << bad
       << "/" << n << "; ";
  }
  // Valuation strictly between the partial burn and the posted price.
  for (const Ratio beta : {Ratio(0), Ratio(1, 2)}) {
    for (const std::int64_t mu : {0, 1}) {
      AuditInstance in;
      in.mechanism = MechanismDescriptor::make(MechanismKind::kBetaBurn1559, 1, Money(mu), beta);
      in.base_fee = Money(10);
      in.transactions = {Transaction::with_bid(TxId{1}, 1, Money(6 + mu), Money(6 + mu))};
      in.strategy = default_oca_strategy(MechanismKind::kBetaBurn1559);
      const AuditVerdict v = run_audit(in, p);
      ok &= v.violated && certify(v);
      os << "beta-burn-1559(" << beta.numerator() << "/" << beta.denominator() << ",mu=" << mu
         << ") " << (v.violated ? "violated" : "pass") << "; ";
    }
  }
  const auto [n, bad] = battery(MechanismKind::kTipless, p,
                                default_params(MechanismKind::kTipless, p), 300, cfg, not_low);
  const auto c = find_counterexample("tipless-low-basefee-oca");
  const AuditVerdict v = run_audit(c->instance, c->property);
  ok &= bad == 0 && v.violated && certify(v) && is_low_regime(c->instance);
  os << "tipless " << bad << "/" << n << " non-low, low instance "
     << (v.violated ? "violated" : "pass");
  return {ok, os.str()};
}

Outcome base_fee_endpoints() {
  const auto s = BaseFeeSchedule::make(Money(1000), 10);
  const Money lo = next_base_fee(s, Money(1000), 0);
  const Money hi = next_base_fee(s, Money(1000), 20);
  const Money mid = next_base_fee(s, Money(1000), 10);
  std::ostringstream os;
  os << "empty " << lo.amount() << ", full " << hi.amount() << ", target " << mid.amount();
  return {lo == Money(875) && hi == Money(1125) && mid == Money(1000), os.str()};
}

Outcome knapsack_equivalence() {
  oracle::Gen gen(kSeed);
  int mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto n = static_cast<std::size_t>(gen.uniform(0, 15));
    std::vector<KnapsackItem> items;
    for (std::size_t i = 0; i < n; ++i) {
      items.push_back({TxId{static_cast<std::uint32_t>(i + 1)}, gen.uniform(1, 6),
                       gen.uniform(-5, 25)});
    }
    const std::int64_t cap = gen.uniform(0, 30);
    const bool fill = gen.coin();
    const auto got =
        knapsack_max(items, cap, fill ? ZeroWeight::kFillCapacity : ZeroWeight::kExclude);
    const auto want = oracle::knapsack(items, cap, fill);
    if (got.included != want.ids || got.objective_value != want.weight) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + "/10000 mismatches"};
}

Outcome report_card() {
  BatteryConfig cfg;
  cfg.seed = kSeed;
  const auto rows = run_report_card(cfg);
  int matched = 0;
  std::string misses;
  for (const auto& r : rows) {
    if (r.match) {
      ++matched;
    } else {
      misses += " " + std::string(to_string(r.mechanism)) + "/" +
                std::string(to_string(r.property));
    }
  }
  return {rows.size() == 18 && matched == 18,
          "matched " + std::to_string(matched) + "/18" + misses};
}

Outcome sim_determinism() {
  Scenario sc;
  sc.mechanism = MechanismDescriptor::make(MechanismKind::k1559, 20, Money(1));
  sc.schedule = BaseFeeSchedule::make(Money(1000), 20);
  sc.demand.arrival_rate = 25;
  sc.demand.valuation = {ValuationDistribution::Kind::kUniform, Money(0), Money(2500)};
  sc.demand.size = {SizeDistribution::Kind::kUniform, 1, 3};
  sc.demand.spikes = {{2000, 3.0, kZero}, {2600, 1.0, kZero}};
  sc.strategy = {StrategyKind::kStraightforward1559, Ratio(1)};
  sc.horizon = 10000;
  sc.seed = 42;
  sc.mempool_policy = {MempoolPolicy::Kind::kEvictAfter, 20};

  const std::string a = trace_csv(run(sc)) + to_json(run(sc)).dump();
  const std::string b = trace_csv(run(sc)) + to_json(run(sc)).dump();

  int broken = 0;
  SimState state = SimState::genesis(sc);
  Trace stepped;
  for (std::int64_t h = 0; h < sc.horizon; ++h) {
    const StepResult res = step(sc, state);
    Total paid = 0;
    for (TxId id : res.outcome.included) {
      paid += total(res.outcome.payment.at(id) + res.outcome.burn.at(id),
                    res.outcome.size.at(id));
    }
    if (res.record.burn_total + res.record.tip_revenue != paid) ++broken;
    stepped.blocks.push_back(res.record);
    state = res.next;
  }
  const bool same = a == b && trace_csv(stepped) + to_json(stepped).dump() == a;
  return {same && broken == 0 && replays(sc.schedule, stepped),
          std::string(same ? "identical" : "differing") + " runs, " + std::to_string(broken) +
              " blocks break conservation"};
}

}  // namespace
}  // namespace tfm

int main() {
  using namespace tfm;
  const std::vector<Criterion> criteria = {
      {1, "spa fake-bid attack", 1, spa_fake_bid},
      {2, "mmic battery", 120, mmic_battery},
      {3, "tipless dsic", 120, tipless_dsic},
      {4, "1559 conditional dsic", 120, conditional_1559_dsic},
      {5, "oca verdicts", 300, oca_verdicts},
      {6, "base-fee endpoints", 1, base_fee_endpoints},
      {7, "knapsack oracle equivalence", 60, knapsack_equivalence},
      {8, "report card", 300, report_card},
      {9, "simulation determinism and conservation", 30, sim_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = out.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s [%.2fs, limit %.0fs%s]\n", pass ? "PASS" : "FAIL",
                c.number, c.name.c_str(), out.detail.c_str(), secs, c.limit_seconds,
                in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
