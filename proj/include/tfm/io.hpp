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

// JSON scenario/instance files, verdict and trace export, trace CSV.
//
// Money and other integer totals are written as decimal strings; readers also
// accept JSON integers. Rationals are {"num": n, "den": d}. Every object is
// schema-strict: unknown keys are rejected, and errors carry a key path such
// as "demand.spikes[1].rate_multiplier".

#include <charconv>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tfm/audit.hpp"
#include "tfm/basefee.hpp"
#include "tfm/mechanism.hpp"
#include "tfm/model.hpp"
#include "tfm/sim.hpp"
#include "tfm/strategy.hpp"

namespace tfm {

using Json = nlohmann::ordered_json;

// Malformed or invalid input. what() starts with the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace io_detail {

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

// Typed, path-tracking view of a JSON value.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const Json& raw() const { return *j_; }

  [[noreturn]] void fail(std::string_view msg) const {
    throw ConfigError((path_.empty() ? std::string("<root>") : path_) + ": " +
                      std::string(msg));
  }

  // Requires an object whose keys all appear in `allowed`.
  void object(std::initializer_list<std::string_view> allowed) const {
    if (!j_->is_object()) fail("expected an object");
    for (const auto& [k, _] : j_->items()) {
      bool ok = false;
      for (auto a : allowed) ok |= (a == k);
      if (!ok) throw ConfigError(join(path_, k) + ": unknown key");
    }
  }

  bool has(std::string_view key) const { return j_->contains(key); }

  Reader at(std::string_view key) const {
    auto it = j_->find(key);
    if (it == j_->end()) throw ConfigError(join(path_, key) + ": missing required key");
    return Reader(*it, join(path_, key));
  }

  std::optional<Reader> opt(std::string_view key) const {
    auto it = j_->find(key);
    if (it == j_->end()) return std::nullopt;
    return Reader(*it, join(path_, key));
  }

  std::size_t array_size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  Reader operator[](std::size_t i) const {
    return Reader((*j_)[i], path_ + "[" + std::to_string(i) + "]");
  }

  std::int64_t integer() const {
    if (j_->is_number_integer()) return j_->get<std::int64_t>();
    if (j_->is_string()) {
      const auto& s = j_->get_ref<const std::string&>();
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec == std::errc() && p == s.data() + s.size() && !s.empty()) return v;
    }
    fail("expected an integer (JSON number or decimal string)");
  }

  std::uint64_t u64() const {
    if (j_->is_number_unsigned()) return j_->get<std::uint64_t>();
    if (j_->is_string()) {
      const auto& s = j_->get_ref<const std::string&>();
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec == std::errc() && p == s.data() + s.size() && !s.empty()) return v;
    }
    fail("expected an unsigned 64-bit integer");
  }

  Money money() const {
    const std::int64_t v = integer();
    if (v < 0) fail("money must be >= 0");
    return Money(v);
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    return j_->get<double>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }

  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  Ratio ratio() const {
    object({"num", "den"});
    const std::int64_t num = at("num").integer();
    const std::int64_t den = at("den").integer();
    if (den <= 0) at("den").fail("must be > 0");
    return Ratio(num, den);
  }

 private:
  const Json* j_;
  std::string path_;
};

// Throws a ConfigError at `prefix` for a non-empty "field: rule" message.
inline void check(const std::string& prefix, const std::string& error) {
  if (error.empty()) return;
  throw ConfigError(prefix.empty() ? error : prefix + "." + error);
}

}  // namespace io_detail

// ---- encoding ------------------------------------------------------------

inline Json to_json(Money m) { return std::to_string(m.amount()); }
inline Json total_json(Total t) { return std::to_string(t); }
inline Json to_json(const Ratio& r) { return Json{{"num", r.numerator()}, {"den", r.denominator()}}; }

inline Json to_json(const MechanismDescriptor& m) {
  return Json{{"kind", to_string(m.kind)},    {"target_size", m.target_size},
              {"max_size", m.max_size},       {"beta", to_json(m.beta)},
              {"delta", to_json(m.delta)},    {"mu", to_json(m.mu)}};
}

inline Json to_json(const BaseFeeSchedule& s) {
  return Json{{"genesis_fee", to_json(s.genesis_fee)},
              {"adjustment_quotient", s.adjustment_quotient},
              {"target_size", s.target_size},
              {"max_size", s.max_size}};
}

inline Json to_json(const BiddingStrategy& s) {
  return Json{{"kind", to_string(s.kind)}, {"gamma", to_json(s.gamma)}};
}

inline Json to_json(const Transaction& t) {
  Json j{{"id", t.id.value},          {"size", t.size},       {"valuation", to_json(t.valuation)},
         {"fee_cap", to_json(t.fee_cap)}, {"tip", to_json(t.tip)}};
  if (t.is_fake) j["fake"] = true;
  return j;
}

inline Json to_json(const ValuationDistribution& d) {
  switch (d.kind) {
    case ValuationDistribution::Kind::kPointMass:
      return Json{{"kind", "point-mass"}, {"value", to_json(d.lo)}};
    case ValuationDistribution::Kind::kUniform:
      return Json{{"kind", "uniform"}, {"lo", to_json(d.lo)}, {"hi", to_json(d.hi)}};
    case ValuationDistribution::Kind::kLogUniform:
      return Json{{"kind", "log-uniform"}, {"lo", to_json(d.lo)}, {"hi", to_json(d.hi)}};
  }
  return {};
}

inline Json to_json(const SizeDistribution& d) {
  if (d.kind == SizeDistribution::Kind::kPointMass) {
    return Json{{"kind", "point-mass"}, {"value", d.lo}};
  }
  return Json{{"kind", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
}

inline Json to_json(const DemandProcess& d) {
  Json spikes = Json::array();
  for (const auto& s : d.spikes) {
    spikes.push_back(Json{{"height", s.height},
                          {"rate_multiplier", s.rate_multiplier},
                          {"valuation_shift", to_json(s.valuation_shift)}});
  }
  return Json{{"arrival_rate", d.arrival_rate},
              {"valuation", to_json(d.valuation)},
              {"size", to_json(d.size)},
              {"spikes", spikes}};
}

inline Json to_json(const MempoolPolicy& p) {
  if (p.kind == MempoolPolicy::Kind::kEvictAfter) {
    return Json{{"kind", "evict-after"}, {"blocks", p.blocks}};
  }
  return Json{{"kind", "persist"}};
}

inline Json to_json(const Scenario& s) {
  return Json{{"mechanism", to_json(s.mechanism)},
              {"schedule", to_json(s.schedule)},
              {"demand", to_json(s.demand)},
              {"strategy", to_json(s.strategy)},
              {"miner_behavior", to_string(s.miner_behavior)},
              {"horizon", s.horizon},
              {"seed", std::to_string(s.seed)},
              {"mempool_policy", to_json(s.mempool_policy)}};
}

inline Json to_json(const AuditInstance& in) {
  Json txs = Json::array();
  for (const auto& t : in.transactions) txs.push_back(to_json(t));
  Json j{{"mechanism", to_json(in.mechanism)},
         {"base_fee", to_json(in.base_fee)},
         {"transactions", txs}};
  if (in.strategy) j["strategy"] = to_json(*in.strategy);
  j["forbid_overbidding"] = in.forbid_overbidding;
  return j;
}

namespace io_detail {

inline Json bids_json(const std::map<TxId, Money>& bids) {
  Json a = Json::array();
  for (const auto& [id, b] : bids) a.push_back(Json{{"id", id.value}, {"bid", to_json(b)}});
  return a;
}

inline Json ids_json(const std::vector<TxId>& ids) {
  Json a = Json::array();
  for (TxId id : ids) a.push_back(id.value);
  return a;
}

inline Json ratio_map_json(const std::map<TxId, Ratio>& m, std::string_view value_key) {
  Json a = Json::array();
  for (const auto& [id, r] : m) {
    a.push_back(Json{{"id", id.value}, {std::string(value_key), to_json(r)}});
  }
  return a;
}

}  // namespace io_detail

inline Json to_json(const Witness& w) {
  using io_detail::bids_json;
  using io_detail::ids_json;
  if (const auto* m = std::get_if<MmicWitness>(&w)) {
    Json fakes = Json::array();
    for (const auto& f : m->fakes) fakes.push_back(to_json(f));
    return Json{{"type", "mmic"},
                {"fakes", fakes},
                {"block", ids_json(m->block)},
                {"honest_utility", total_json(m->honest_utility)},
                {"deviation_utility", total_json(m->deviation_utility)},
                {"utility_delta", total_json(m->delta())}};
  }
  if (const auto* d = std::get_if<DsicWitness>(&w)) {
    return Json{{"type", "dsic"},
                {"tx", d->tx.value},
                {"competitor_bids", bids_json(d->competitor_bids)},
                {"strategy_bid", to_json(d->strategy_bid)},
                {"deviating_bid", to_json(d->deviating_bid)},
                {"strategy_utility", total_json(d->strategy_utility)},
                {"deviation_utility", total_json(d->deviation_utility)},
                {"utility_delta", total_json(d->delta())}};
  }
  const auto& o = std::get<OcaWitness>(w);
  return Json{{"type", "oca"},
              {"bids", bids_json(o.bids)},
              {"allocation", ids_json(o.allocation)},
              {"transfers", io_detail::ratio_map_json(o.transfers, "per_size")},
              {"strategy_joint", total_json(o.strategy_joint)},
              {"best_joint", total_json(o.best_joint)},
              {"user_deltas", io_detail::ratio_map_json(o.user_deltas, "delta")},
              {"miner_delta", to_json(o.miner_delta)}};
}

inline Json to_json(const AuditVerdict& v) {
  Json j{{"property", to_string(v.property)},
         {"instance", to_json(v.instance)},
         {"result", v.violated ? "violated" : "pass"},
         {"reference_value", total_json(v.reference_value)},
         {"best_value", total_json(v.best_value)}};
  j["witness"] = v.witness ? to_json(*v.witness) : Json(nullptr);
  return j;
}

inline Json to_json(const BlockRecord& b) {
  return Json{{"height", b.height},
              {"base_fee", to_json(b.base_fee)},
              {"block_size", b.block_size},
              {"burn_total", total_json(b.burn_total)},
              {"tip_revenue", total_json(b.tip_revenue)},
              {"user_utility_total", total_json(b.user_utility_total)},
              {"mempool_depth", b.mempool_depth},
              {"included_count", b.included_count},
              {"evicted_count", b.evicted_count},
              {"arrivals", b.arrivals},
              {"fake_count", b.fake_count},
              {"miner_utility", total_json(b.miner_utility)},
              {"welfare", total_json(b.welfare)}};
}

inline Json to_json(const Trace& t) {
  Json blocks = Json::array();
  for (const auto& b : t.blocks) blocks.push_back(to_json(b));
  return Json{{"blocks", blocks}};
}

// ---- decoding ------------------------------------------------------------

inline MechanismDescriptor mechanism_from_json(const io_detail::Reader& r) {
  r.object({"kind", "target_size", "max_size", "beta", "delta", "mu"});
  const std::string kind_name = r.at("kind").string();
  const auto kind = parse_mechanism_kind(kind_name);
  if (!kind) r.at("kind").fail("unknown mechanism '" + kind_name + "'");
  const std::int64_t target = r.at("target_size").integer();
  MechanismDescriptor m = MechanismDescriptor::make(*kind, target);
  if (auto x = r.opt("max_size")) m.max_size = x->integer();
  if (auto x = r.opt("beta")) m.beta = x->ratio();
  if (auto x = r.opt("delta")) m.delta = x->money();
  if (auto x = r.opt("mu")) m.mu = x->money();
  io_detail::check(r.path(), validation_error(m));
  return m;
}

inline BaseFeeSchedule schedule_from_json(const io_detail::Reader& r,
                                          std::optional<std::int64_t> default_target) {
  r.object({"genesis_fee", "adjustment_quotient", "target_size", "max_size"});
  BaseFeeSchedule s;
  s.genesis_fee = r.at("genesis_fee").money();
  if (auto x = r.opt("target_size")) {
    s.target_size = x->integer();
  } else if (default_target) {
    s.target_size = *default_target;
  } else {
    r.at("target_size");
  }
  s.max_size = 2 * s.target_size;
  if (auto x = r.opt("adjustment_quotient")) s.adjustment_quotient = x->integer();
  if (auto x = r.opt("max_size")) s.max_size = x->integer();
  io_detail::check(r.path(), validation_error(s));
  return s;
}

inline BiddingStrategy strategy_from_json(const io_detail::Reader& r) {
  r.object({"kind", "gamma"});
  BiddingStrategy s;
  const std::string name = r.at("kind").string();
  const auto kind = parse_strategy_kind(name);
  if (!kind) r.at("kind").fail("unknown strategy '" + name + "'");
  s.kind = *kind;
  if (auto x = r.opt("gamma")) s.gamma = x->ratio();
  io_detail::check(r.path(), validation_error(s));
  return s;
}

inline Transaction transaction_from_json(const io_detail::Reader& r) {
  r.object({"id", "size", "valuation", "bid", "fee_cap", "tip", "fake"});
  Transaction t;
  const std::int64_t id = r.at("id").integer();
  if (id < 0 || id > std::numeric_limits<std::uint32_t>::max()) {
    r.at("id").fail("must fit in 32 unsigned bits");
  }
  t.id = TxId{static_cast<std::uint32_t>(id)};
  t.size = r.has("size") ? r.at("size").integer() : 1;
  if (t.size < 1) r.at("size").fail("must be >= 1");
  t.valuation = r.has("valuation") ? r.at("valuation").money() : kZero;
  if (r.has("bid")) {
    if (r.has("fee_cap") || r.has("tip")) r.at("bid").fail("give either bid or fee_cap/tip");
    t.fee_cap = t.tip = r.at("bid").money();
  } else {
    t.fee_cap = r.at("fee_cap").money();
    t.tip = r.at("tip").money();
  }
  if (auto x = r.opt("fake")) t.is_fake = x->boolean();
  return t;
}

inline std::vector<Transaction> transactions_from_json(const io_detail::Reader& r) {
  std::vector<Transaction> txs;
  const std::size_t n = r.array_size();
  for (std::size_t i = 0; i < n; ++i) txs.push_back(transaction_from_json(r[i]));
  try {
    Mempool pool(txs);
    return {pool.transactions().begin(), pool.transactions().end()};
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
}

inline DemandProcess demand_from_json(const io_detail::Reader& r) {
  r.object({"arrival_rate", "valuation", "size", "spikes"});
  DemandProcess d;
  d.arrival_rate = r.at("arrival_rate").number();

  const auto v = r.at("valuation");
  const std::string vk = v.has("kind") ? v.at("kind").string() : "";
  if (vk == "point-mass") {
    v.object({"kind", "value"});
    d.valuation.kind = ValuationDistribution::Kind::kPointMass;
    d.valuation.lo = d.valuation.hi = v.at("value").money();
  } else if (vk == "uniform" || vk == "log-uniform") {
    v.object({"kind", "lo", "hi"});
    d.valuation.kind = vk == "uniform" ? ValuationDistribution::Kind::kUniform
                                       : ValuationDistribution::Kind::kLogUniform;
    d.valuation.lo = v.at("lo").money();
    d.valuation.hi = v.at("hi").money();
  } else {
    v.at("kind").fail("expected uniform, log-uniform or point-mass");
  }

  if (auto s = r.opt("size")) {
    const std::string sk = s->has("kind") ? s->at("kind").string() : "";
    if (sk == "point-mass") {
      s->object({"kind", "value"});
      d.size.kind = SizeDistribution::Kind::kPointMass;
      d.size.lo = d.size.hi = s->at("value").integer();
    } else if (sk == "uniform") {
      s->object({"kind", "lo", "hi"});
      d.size.kind = SizeDistribution::Kind::kUniform;
      d.size.lo = s->at("lo").integer();
      d.size.hi = s->at("hi").integer();
    } else {
      s->at("kind").fail("expected uniform or point-mass");
    }
  }

  if (auto sp = r.opt("spikes")) {
    const std::size_t n = sp->array_size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto e = (*sp)[i];
      e.object({"height", "rate_multiplier", "valuation_shift"});
      DemandSpike spike;
      spike.height = e.at("height").integer();
      if (auto x = e.opt("rate_multiplier")) spike.rate_multiplier = x->number();
      if (auto x = e.opt("valuation_shift")) spike.valuation_shift = x->money();
      d.spikes.push_back(spike);
    }
  }
  return d;
}

inline Scenario scenario_from_json(const Json& j) {
  const io_detail::Reader r(j, "");
  r.object({"mechanism", "schedule", "demand", "strategy", "miner_behavior", "horizon", "seed",
            "mempool_policy"});
  Scenario s;
  s.mechanism = mechanism_from_json(r.at("mechanism"));
  s.schedule = schedule_from_json(r.at("schedule"), s.mechanism.target_size);
  s.demand = demand_from_json(r.at("demand"));
  if (auto x = r.opt("strategy")) s.strategy = strategy_from_json(*x);
  if (auto x = r.opt("miner_behavior")) {
    const std::string b = x->string();
    bool found = false;
    for (auto k : {MinerBehavior::kIntendedRule, MinerBehavior::kMyopicOptimal,
                   MinerBehavior::kGreedyHeuristic}) {
      if (to_string(k) == b) {
        s.miner_behavior = k;
        found = true;
      }
    }
    if (!found) x->fail("expected intended, myopic-optimal or greedy");
  }
  s.horizon = r.at("horizon").integer();
  if (auto x = r.opt("seed")) s.seed = x->u64();
  if (auto x = r.opt("mempool_policy")) {
    x->object({"kind", "blocks"});
    const std::string k = x->at("kind").string();
    if (k == "persist") {
      if (x->has("blocks")) x->at("blocks").fail("only valid with evict-after");
    } else if (k == "evict-after") {
      s.mempool_policy = {MempoolPolicy::Kind::kEvictAfter, x->at("blocks").integer()};
    } else {
      x->at("kind").fail("expected persist or evict-after");
    }
  }
  io_detail::check("", validation_error(s));
  return s;
}

inline AuditInstance instance_from_json(const Json& j) {
  const io_detail::Reader r(j, "");
  r.object({"mechanism", "base_fee", "transactions", "strategy", "forbid_overbidding"});
  AuditInstance in;
  in.mechanism = mechanism_from_json(r.at("mechanism"));
  in.base_fee = r.has("base_fee") ? r.at("base_fee").money() : kZero;
  in.transactions = transactions_from_json(r.at("transactions"));
  if (auto x = r.opt("strategy")) in.strategy = strategy_from_json(*x);
  if (auto x = r.opt("forbid_overbidding")) in.forbid_overbidding = x->boolean();
  return in;
}

namespace io_detail {

inline std::map<TxId, Money> bids_from_json(const Reader& r) {
  std::map<TxId, Money> out;
  const std::size_t n = r.array_size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = r[i];
    e.object({"id", "bid"});
    out[TxId{static_cast<std::uint32_t>(e.at("id").integer())}] = e.at("bid").money();
  }
  return out;
}

inline std::vector<TxId> ids_from_json(const Reader& r) {
  std::vector<TxId> out;
  const std::size_t n = r.array_size();
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(TxId{static_cast<std::uint32_t>(r[i].integer())});
  }
  return out;
}

inline std::map<TxId, Ratio> ratio_map_from_json(const Reader& r, std::string_view key) {
  std::map<TxId, Ratio> out;
  const std::size_t n = r.array_size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = r[i];
    e.object({"id", key});
    out[TxId{static_cast<std::uint32_t>(e.at("id").integer())}] = e.at(key).ratio();
  }
  return out;
}

}  // namespace io_detail

inline Witness witness_from_json(const io_detail::Reader& r) {
  const std::string type = r.at("type").string();
  if (type == "mmic") {
    r.object({"type", "fakes", "block", "honest_utility", "deviation_utility", "utility_delta"});
    MmicWitness w;
    w.fakes = transactions_from_json(r.at("fakes"));
    w.block = io_detail::ids_from_json(r.at("block"));
    w.honest_utility = r.at("honest_utility").integer();
    w.deviation_utility = r.at("deviation_utility").integer();
    return w;
  }
  if (type == "dsic") {
    r.object({"type", "tx", "competitor_bids", "strategy_bid", "deviating_bid",
              "strategy_utility", "deviation_utility", "utility_delta"});
    DsicWitness w;
    w.tx = TxId{static_cast<std::uint32_t>(r.at("tx").integer())};
    w.competitor_bids = io_detail::bids_from_json(r.at("competitor_bids"));
    w.strategy_bid = r.at("strategy_bid").money();
    w.deviating_bid = r.at("deviating_bid").money();
    w.strategy_utility = r.at("strategy_utility").integer();
    w.deviation_utility = r.at("deviation_utility").integer();
    return w;
  }
  if (type == "oca") {
    r.object({"type", "bids", "allocation", "transfers", "strategy_joint", "best_joint",
              "user_deltas", "miner_delta"});
    OcaWitness w;
    w.bids = io_detail::bids_from_json(r.at("bids"));
    w.allocation = io_detail::ids_from_json(r.at("allocation"));
    w.transfers = io_detail::ratio_map_from_json(r.at("transfers"), "per_size");
    w.strategy_joint = r.at("strategy_joint").integer();
    w.best_joint = r.at("best_joint").integer();
    w.user_deltas = io_detail::ratio_map_from_json(r.at("user_deltas"), "delta");
    w.miner_delta = r.at("miner_delta").ratio();
    return w;
  }
  r.at("type").fail("expected mmic, dsic or oca");
}

inline AuditVerdict verdict_from_json(const Json& j) {
  const io_detail::Reader r(j, "");
  r.object({"property", "instance", "result", "reference_value", "best_value", "witness"});
  AuditVerdict v;
  const std::string prop = r.at("property").string();
  const auto p = parse_property(prop);
  if (!p) r.at("property").fail("unknown property '" + prop + "'");
  v.property = *p;
  v.instance = instance_from_json(r.at("instance").raw());
  const std::string result = r.at("result").string();
  if (result != "pass" && result != "violated") r.at("result").fail("expected pass or violated");
  v.violated = result == "violated";
  v.reference_value = r.at("reference_value").integer();
  v.best_value = r.at("best_value").integer();
  if (auto w = r.opt("witness"); w && !w->raw().is_null()) v.witness = witness_from_json(*w);
  return v;
}

inline Trace trace_from_json(const Json& j) {
  const io_detail::Reader r(j, "");
  r.object({"blocks"});
  const auto blocks = r.at("blocks");
  Trace t;
  const std::size_t n = blocks.array_size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = blocks[i];
    e.object({"height", "base_fee", "block_size", "burn_total", "tip_revenue",
              "user_utility_total", "mempool_depth", "included_count", "evicted_count",
              "arrivals", "fake_count", "miner_utility", "welfare"});
    BlockRecord b;
    b.height = e.at("height").integer();
    b.base_fee = e.at("base_fee").money();
    b.block_size = e.at("block_size").integer();
    b.burn_total = e.at("burn_total").integer();
    b.tip_revenue = e.at("tip_revenue").integer();
    b.user_utility_total = e.at("user_utility_total").integer();
    b.mempool_depth = e.at("mempool_depth").integer();
    b.included_count = e.at("included_count").integer();
    b.evicted_count = e.at("evicted_count").integer();
    b.arrivals = e.at("arrivals").integer();
    b.fake_count = e.at("fake_count").integer();
    b.miner_utility = e.at("miner_utility").integer();
    b.welfare = e.at("welfare").integer();
    t.blocks.push_back(b);
  }
  return t;
}

// ---- files ---------------------------------------------------------------

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
}

inline Scenario parse_scenario(const std::string& path) {
  return scenario_from_json(read_json_file(path));
}

inline AuditInstance parse_instance(const std::string& path) {
  return instance_from_json(read_json_file(path));
}

inline constexpr std::string_view kTraceCsvHeader =
    "height,base_fee,block_size,burn_total,tip_revenue,user_utility_total,mempool_depth";

inline void write_trace_csv(std::ostream& os, const Trace& t) {
  os << kTraceCsvHeader << '\n';
  for (const auto& b : t.blocks) {
    os << b.height << ',' << b.base_fee.amount() << ',' << b.block_size << ','
       << b.burn_total << ',' << b.tip_revenue << ',' << b.user_utility_total << ','
       << b.mempool_depth << '\n';
  }
}

inline std::string trace_csv(const Trace& t) {
  std::ostringstream os;
  write_trace_csv(os, t);
  return os.str();
}

enum class ExportFormat { kCsv, kJson };

// Writes `text` to `path`, or to `os` when path is empty or "-".
inline void write_output(const std::string& path, const std::string& text, std::ostream& os) {
  if (path.empty() || path == "-") {
    os << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
  if (!out.flush()) throw std::runtime_error(path + ": write failed");
}

}  // namespace tfm
