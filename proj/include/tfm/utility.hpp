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

// Utilities of transaction creators, the miner, and their coalition. All are
// size-weighted signed totals.

#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "tfm/mechanism.hpp"
#include "tfm/model.hpp"

namespace tfm {

// (v - p - q) * s if included, else 0.
inline Total user_utility(const Transaction& tx, const BlockOutcome& outcome) {
  if (!outcome.contains(tx.id)) return 0;
  return (tx.valuation.amount() - outcome.payment.at(tx.id).amount() -
          outcome.burn.at(tx.id).amount()) *
         tx.size;
}

// Net revenue of a myopic miner: payments from real transactions, minus the
// burn the miner itself pays on fake ones, minus mu per unit of block size.
inline Total miner_utility(const MechanismDescriptor& m, const BlockOutcome& outcome,
                           const std::set<TxId>& real_ids) {
  Total u = 0;
  for (TxId id : outcome.included) {
    auto p = outcome.payment.find(id);
    auto q = outcome.burn.find(id);
    auto s = outcome.size.find(id);
    if (p == outcome.payment.end() || q == outcome.burn.end() ||
        s == outcome.size.end()) {
      throw std::invalid_argument("outcome lacks payment/burn/size for transaction " +
                                  std::to_string(id.value));
    }
    if (real_ids.contains(id)) {
      u += total(p->second, s->second);
    } else {
      u -= total(q->second, s->second);
    }
  }
  return u - total(m.mu, outcome.total_size);
}

// Sum over included of (v - q - mu) * s: what the miner and the creators get
// together once their internal payments cancel.
inline Total joint_utility(const BlockOutcome& outcome,
                           const std::map<TxId, Money>& valuations, Money mu) {
  Total j = 0;
  for (TxId id : outcome.included) {
    auto v = valuations.find(id);
    if (v == valuations.end()) {
      throw std::invalid_argument("missing valuation for transaction " +
                                  std::to_string(id.value));
    }
    j += (v->second.amount() - outcome.burn.at(id).amount() - mu.amount()) *
         outcome.size.at(id);
  }
  return j;
}

}  // namespace tfm
