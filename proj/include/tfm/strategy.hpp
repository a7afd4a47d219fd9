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

// Canonical bidding strategies: maps from a valuation to an on-chain bid.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tfm/model.hpp"

namespace tfm {

enum class StrategyKind {
  kTruthful,             // v
  kTipless,              // min(r + delta, v)
  kStraightforward1559,  // min(r + mu, v)
  kScaledFpa,            // min(v, mu + gamma (v - mu))
  kScaled1559,           // min(v, mu + r + gamma (v - mu - r))
};

struct BiddingStrategy {
  StrategyKind kind = StrategyKind::kTruthful;
  Ratio gamma{1};
};

inline std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::kTruthful: return "truthful";
    case StrategyKind::kTipless: return "tipless";
    case StrategyKind::kStraightforward1559: return "straightforward-1559";
    case StrategyKind::kScaledFpa: return "scaled-fpa";
    case StrategyKind::kScaled1559: return "scaled-1559";
  }
  return "?";
}

inline std::optional<StrategyKind> parse_strategy_kind(std::string_view s) {
  for (auto k : {StrategyKind::kTruthful, StrategyKind::kTipless,
                 StrategyKind::kStraightforward1559, StrategyKind::kScaledFpa,
                 StrategyKind::kScaled1559}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

inline std::string validation_error(const BiddingStrategy& s) {
  if ((s.kind == StrategyKind::kScaledFpa || s.kind == StrategyKind::kScaled1559) &&
      (s.gamma <= 0 || s.gamma > 1)) {
    return "gamma: must be in (0,1]";
  }
  return {};
}

namespace detail {

// anchor + floor(gamma * (v - anchor)), or v when v <= anchor.
inline Money scaled_toward(Money v, Money anchor, const Ratio& gamma) {
  if (v <= anchor) return v;
  return min(v, anchor + scale_floor(gamma, v - anchor));
}

}  // namespace detail

// The bid a user with valuation v submits at base fee r.
inline Money eval_strategy(const BiddingStrategy& s, Money v, Money r, Money mu,
                           Money delta) {
  if (auto e = validation_error(s); !e.empty()) throw std::invalid_argument(e);
  switch (s.kind) {
    case StrategyKind::kTruthful: return v;
    case StrategyKind::kTipless: return min(r + delta, v);
    case StrategyKind::kStraightforward1559: return min(r + mu, v);
    case StrategyKind::kScaledFpa: return detail::scaled_toward(v, mu, s.gamma);
    case StrategyKind::kScaled1559: return detail::scaled_toward(v, r + mu, s.gamma);
  }
  throw std::logic_error("unknown strategy kind");
}

struct BidParams {
  Money fee_cap;
  Money tip;
};

// Fee cap and tip a user submits so that, at the current base fee r, the
// induced bid equals eval_strategy(...). Posted-price strategies put the
// valuation in the fee cap, so the cap stays meaningful if r later moves.
inline BidParams to_bid_params(const BiddingStrategy& s, Money v, Money r, Money mu,
                               Money delta) {
  const Money b = eval_strategy(s, v, r, mu, delta);
  switch (s.kind) {
    case StrategyKind::kTipless: return {v, delta};
    case StrategyKind::kStraightforward1559: return {v, mu};
    case StrategyKind::kScaled1559: return {v, b >= r ? b - r : kZero};
    default: return {b, b};
  }
}

}  // namespace tfm
