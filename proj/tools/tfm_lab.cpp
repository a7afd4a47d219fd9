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

// tfm-lab: audits, the report card, named counterexamples and simulations.
//
// Exit codes: 0 all requested checks pass, 2 at least one violation (or a
// report-card mismatch), 1 usage, configuration or runtime error.

#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tfm/audit.hpp"
#include "tfm/io.hpp"
#include "tfm/report.hpp"
#include "tfm/sim.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitViolated = 2;

struct Options {
  std::string scenario;
  std::string instance;
  std::string verdict;
  std::string mechanism;
  std::string property;
  std::optional<std::uint64_t> seed;
  int instances = 100;
  std::optional<int> max_txs;
  std::int64_t grid_step = 1;
  std::string out;
  std::string format;
  std::string name;
};

std::optional<std::uint64_t> resolve_seed(const Options& o) {
  if (o.seed) return o.seed;
  if (const char* env = std::getenv("TFM_LAB_SEED"); env && *env) {
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(env, &pos, 10);
      if (pos != std::string(env).size()) throw std::invalid_argument("trailing characters");
      return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw tfm::ConfigError(std::string("TFM_LAB_SEED: not an unsigned integer: ") + env);
    }
  }
  return std::nullopt;
}

tfm::Property require_property(const std::string& s) {
  if (s == "mmic") return tfm::Property::kMmic;
  if (s == "dsic") return tfm::Property::kDsic;
  if (s == "oca") return tfm::Property::kOcaProof;
  if (auto p = tfm::parse_property(s)) return *p;
  throw tfm::ConfigError("--property: expected mmic, dsic or oca");
}

std::string describe(const tfm::MechanismDescriptor& m) {
  std::ostringstream os;
  os << tfm::to_string(m.kind) << " (target " << m.target_size << ", max " << m.max_size
     << ", beta " << m.beta.numerator() << "/" << m.beta.denominator() << ", delta "
     << m.delta.amount() << ", mu " << m.mu.amount() << ")";
  return os.str();
}

std::string ratio_text(const tfm::Ratio& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

void print_verdict(std::ostream& os, const tfm::AuditVerdict& v) {
  using namespace tfm;
  os << "property:  " << to_string(v.property) << "\n"
     << "mechanism: " << describe(v.instance.mechanism) << "\n"
     << "base fee:  " << v.instance.base_fee.amount() << "\n"
     << "result:    " << (v.violated ? "violated" : "pass") << "\n";
  if (!v.witness) {
    os << "reference: " << v.reference_value << "\n";
    return;
  }
  if (const auto* w = std::get_if<MmicWitness>(&*v.witness)) {
    os << "honest miner utility: " << w->honest_utility << "\n"
       << "best deviation utility: " << w->deviation_utility << "\n"
       << "utility delta: " << w->delta() << "\n";
    for (const auto& f : w->fakes) {
      os << "fake: id " << f.id.value << " size " << f.size << " bid " << f.fee_cap.amount()
         << "\n";
    }
    os << "block:";
    for (TxId id : w->block) os << " " << id.value;
    os << "\n";
  } else if (const auto* w = std::get_if<DsicWitness>(&*v.witness)) {
    os << "transaction: " << w->tx.value << "\n"
       << "competitor bids:";
    for (const auto& [id, b] : w->competitor_bids) os << " " << id.value << "=" << b.amount();
    os << "\nstrategy bid " << w->strategy_bid.amount() << " -> utility "
       << w->strategy_utility << "\n"
       << "deviating bid " << w->deviating_bid.amount() << " -> utility "
       << w->deviation_utility << "\n"
       << "utility delta: " << w->delta() << "\n";
  } else if (const auto* w = std::get_if<OcaWitness>(&*v.witness)) {
    os << "strategy joint utility: " << w->strategy_joint << "\n"
       << "best joint utility: " << w->best_joint << "\n"
       << "bids:";
    for (const auto& [id, b] : w->bids) os << " " << id.value << "=" << b.amount();
    os << "\nallocation:";
    for (TxId id : w->allocation) os << " " << id.value;
    os << "\ntransfers per size:";
    for (const auto& [id, t] : w->transfers) os << " " << id.value << "=" << ratio_text(t);
    os << "\nuser deltas:";
    for (const auto& [id, d] : w->user_deltas) os << " " << id.value << "=" << ratio_text(d);
    os << "\nminer delta: " << ratio_text(w->miner_delta) << "\n";
  }
  os << "certified: " << (certify(v) ? "yes" : "no") << "\n";
}

std::string verdict_output(const tfm::AuditVerdict& v, const std::string& format) {
  if (format == "json") return tfm::to_json(v).dump(2) + "\n";
  std::ostringstream os;
  print_verdict(os, v);
  return os.str();
}

int cmd_audit(const Options& o) {
  const tfm::Property p = require_property(o.property);
  const tfm::GridOptions grid{tfm::Money(o.grid_step), false, 2};
  if (!o.instance.empty()) {
    const tfm::AuditInstance in = tfm::parse_instance(o.instance);
    const tfm::AuditVerdict v = tfm::run_audit(in, p, grid);
    tfm::write_output(o.out, verdict_output(v, o.format), std::cout);
    return v.violated ? kExitViolated : kExitPass;
  }
  if (o.mechanism.empty()) {
    throw tfm::ConfigError("audit: give --instance <path> or --mechanism <name>");
  }
  const auto kind = tfm::parse_mechanism_kind(o.mechanism);
  if (!kind) throw tfm::ConfigError("--mechanism: unknown mechanism '" + o.mechanism + "'");
  tfm::BatteryConfig cfg;
  cfg.seed = resolve_seed(o).value_or(1);
  cfg.instances = o.instances;
  cfg.max_txs = o.max_txs;
  cfg.grid_step = tfm::Money(o.grid_step);
  const tfm::MechanismParams params = tfm::default_params(*kind, p);
  std::int64_t violations = 0;
  tfm::Json verdicts = tfm::Json::array();
  std::optional<tfm::AuditVerdict> first;
  for (int i = 0; i < cfg.instances; ++i) {
    tfm::SplitMix64 rng = tfm::report_detail::cell_rng(cfg.seed, *kind, p, i);
    const tfm::AuditInstance in = tfm::random_instance(*kind, p, params, rng, cfg);
    const tfm::AuditVerdict v = tfm::run_audit(in, p, grid);
    if (v.violated) {
      ++violations;
      if (!first) first = v;
    }
    if (o.format == "json") verdicts.push_back(tfm::to_json(v));
  }
  if (o.format == "json") {
    tfm::write_output(o.out, verdicts.dump(2) + "\n", std::cout);
  } else {
    std::ostringstream os;
    os << tfm::to_string(*kind) << " " << tfm::to_string(p) << ": " << violations << "/"
       << cfg.instances << " instances violated (seed " << cfg.seed << ")\n";
    if (first) {
      os << "first violation:\n";
      print_verdict(os, *first);
    }
    tfm::write_output(o.out, os.str(), std::cout);
  }
  return violations > 0 ? kExitViolated : kExitPass;
}

tfm::Json row_json(const tfm::ReportRow& r) {
  tfm::Json named = tfm::Json::array();
  for (const auto& n : r.named) named.push_back(n);
  tfm::Json j{{"mechanism", tfm::to_string(r.mechanism)},
              {"property", tfm::to_string(r.property)},
              {"verdict", tfm::to_string(r.status)},
              {"violations", r.violations()},
              {"instances_normal", r.instances_normal},
              {"violations_normal", r.violations_normal},
              {"instances_low", r.instances_low},
              {"violations_low", r.violations_low},
              {"max_gap", tfm::total_json(r.max_gap)},
              {"regime_note", r.regime_note()},
              {"named_instances", named},
              {"expected", tfm::to_string(r.expected)},
              {"match", r.match}};
  j["first_violation"] = r.first_violation ? tfm::to_json(*r.first_violation) : tfm::Json(nullptr);
  return j;
}

int cmd_report_card(const Options& o) {
  tfm::BatteryConfig cfg;
  cfg.seed = resolve_seed(o).value_or(1);
  cfg.instances = o.instances;
  cfg.max_txs = o.max_txs;
  cfg.grid_step = tfm::Money(o.grid_step);
  const auto rows = tfm::run_report_card(cfg);
  int matched = 0;
  for (const auto& r : rows) matched += r.match ? 1 : 0;

  if (o.format == "json") {
    tfm::Json a = tfm::Json::array();
    for (const auto& r : rows) a.push_back(row_json(r));
    tfm::Json doc{{"seed", std::to_string(cfg.seed)},
                  {"instances_per_cell", cfg.instances},
                  {"rows", a},
                  {"matched", matched}};
    tfm::write_output(o.out, doc.dump(2) + "\n", std::cout);
  } else {
    std::ostringstream os;
    os << "report card (seed " << cfg.seed << ", " << cfg.instances
       << " random instances per cell)\n\n";
    os << std::left << std::setw(16) << "mechanism" << std::setw(10) << "property"
       << std::setw(13) << "verdict" << std::setw(12) << "violations" << std::setw(10)
       << "max gap" << std::setw(10) << "expected" << "match\n";
    for (const auto& r : rows) {
      std::ostringstream viol;
      viol << r.violations() << "/" << (r.instances_normal + r.instances_low);
      os << std::left << std::setw(16) << tfm::display_name(r.mechanism) << std::setw(10)
         << tfm::to_string(r.property) << std::setw(13) << tfm::to_string(r.status)
         << std::setw(12) << viol.str() << std::setw(10) << r.max_gap << std::setw(10)
         << tfm::to_string(r.expected) << (r.match ? "yes" : "NO");
      if (auto note = r.regime_note(); !note.empty()) os << "  " << note;
      os << "\n";
    }
    os << "\n" << std::left << std::setw(16) << "" << std::setw(10) << "MMIC"
       << std::setw(10) << "DSIC" << "OCAProof\n";
    for (std::size_t i = 0; i < rows.size(); i += 3) {
      os << std::setw(16) << tfm::display_name(rows[i].mechanism);
      for (std::size_t j = 0; j < 3; ++j) {
        const auto& r = rows[i + j];
        std::string cell;
        switch (r.status) {
          case tfm::CellStatus::kAllPass: cell = "yes"; break;
          case tfm::CellStatus::kConditional: cell = "usually"; break;
          case tfm::CellStatus::kViolated:
            cell = r.expected == tfm::Expected::kAlmost ? "almost" : "no";
            break;
        }
        os << std::setw(j == 2 ? 0 : 10) << cell;
      }
      os << "\n";
    }
    os << "\nmatched " << matched << "/" << rows.size() << " cells\n";
    tfm::write_output(o.out, os.str(), std::cout);
  }
  return matched == static_cast<int>(rows.size()) ? kExitPass : kExitViolated;
}

int cmd_counterexample(const Options& o) {
  const auto c = tfm::find_counterexample(o.name);
  if (!c) {
    std::string names;
    for (const auto& n : tfm::named_counterexamples()) names += " " + n.name;
    throw tfm::ConfigError("counterexample: unknown name '" + o.name + "'; one of:" + names);
  }
  const tfm::GridOptions grid{tfm::Money(o.grid_step), false, 2};
  const tfm::AuditVerdict v = tfm::run_audit(c->instance, c->property, grid);
  std::string text = verdict_output(v, o.format);
  if (o.format != "json") text = c->name + ": " + c->summary + "\n" + text;
  tfm::write_output(o.out, text, std::cout);
  return v.violated ? kExitViolated : kExitPass;
}

int cmd_simulate(const Options& o) {
  if (o.scenario.empty()) throw tfm::ConfigError("simulate: --scenario <path> is required");
  tfm::Scenario sc = tfm::parse_scenario(o.scenario);
  if (auto s = resolve_seed(o)) sc.seed = *s;
  const tfm::Trace trace = tfm::run(sc);
  const std::string text =
      o.format == "json" ? tfm::to_json(trace).dump(2) + "\n" : tfm::trace_csv(trace);
  tfm::write_output(o.out, text, std::cout);
  const tfm::Summary s = tfm::summarize(trace, sc.mechanism.target_size);
  std::cerr << "blocks " << s.blocks << ", mean base fee " << s.mean_base_fee
            << ", max base fee " << s.max_base_fee.amount() << ", total burn " << s.total_burn
            << ", tip revenue " << s.total_tip_revenue << ", user utility "
            << s.total_user_utility << ", welfare " << s.welfare << ", mean size/target "
            << s.mean_size_ratio << "\n";
  return kExitPass;
}

int cmd_certify(const Options& o) {
  const tfm::AuditVerdict v = tfm::verdict_from_json(tfm::read_json_file(o.verdict));
  const bool ok = tfm::certify(v);
  std::cout << (ok ? "certified" : "not certified") << "\n";
  return ok ? kExitPass : kExitViolated;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transaction fee mechanism audits and simulations"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Seed (falls back to TFM_LAB_SEED)");
    sub->add_option("--out", o.out, "Output path (default stdout)");
    sub->add_option("--grid-step", o.grid_step, "Bid grid step")->check(CLI::PositiveNumber);
  };

  auto* audit = app.add_subcommand("audit", "Audit one property on an instance file or a "
                                            "random battery");
  audit->add_option("--instance", o.instance, "Instance JSON file");
  audit->add_option("--mechanism", o.mechanism,
                    "Mechanism for a random battery (fpa, spa, beta-burn-fpa, 1559, "
                    "beta-burn-1559, tipless)");
  audit->add_option("--property", o.property, "mmic, dsic or oca")->required();
  audit->add_option("--instances", o.instances, "Random instances")->check(CLI::NonNegativeNumber);
  audit->add_option("--max-txs", o.max_txs, "Largest random mempool")->check(CLI::PositiveNumber);
  audit->add_option("--format", o.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  add_common(audit);

  auto* card = app.add_subcommand("report-card", "Run the 6 x 3 audit battery");
  card->add_option("--instances", o.instances, "Random instances per cell")
      ->check(CLI::NonNegativeNumber);
  card->add_option("--max-txs", o.max_txs, "Largest random mempool")->check(CLI::PositiveNumber);
  card->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  add_common(card);

  auto* cx = app.add_subcommand("counterexample", "Replay a named counterexample");
  cx->add_option("name", o.name, "spa-fake-bid, beta-burn-fpa-oca, beta-burn-1559-oca, "
                                 "tipless-low-basefee-oca, 1559-low-basefee-dsic")
      ->required();
  cx->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  add_common(cx);

  auto* sim = app.add_subcommand("simulate", "Run a scenario and export its trace");
  sim->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  sim->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  add_common(sim);

  auto* cert = app.add_subcommand("certify", "Re-check an exported verdict's witness");
  cert->add_option("verdict", o.verdict, "Verdict JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitError;
  }

  try {
    if (*audit) return cmd_audit(o);
    if (*card) return cmd_report_card(o);
    if (*cx) return cmd_counterexample(o);
    if (*sim) return cmd_simulate(o);
    if (*cert) return cmd_certify(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
