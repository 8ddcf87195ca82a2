// SPDX-License-Identifier: Apache-2.0
#include "qplan/load_model.hpp"

#include <algorithm>

namespace qplan {

LoadMode parse_load_mode(const std::string& name) {
  if (name == "average") return LoadMode::Average;
  if (name == "best") return LoadMode::Best;
  if (name == "worst") return LoadMode::Worst;
  fail("unknown load mode: " + name + " (expected average|best|worst)");
}

std::string to_string(LoadMode mode) {
  switch (mode) {
    case LoadMode::Average: return "average";
    case LoadMode::Best: return "best";
    case LoadMode::Worst: return "worst";
  }
  fail("corrupt load mode");
}

Ratio operator_load(int64_t n_in, int64_t n_out, int64_t b_req, int64_t b_alloc,
                    const LoadConfig& cfg) {
  if (n_in < 0 || n_out < 0 || b_req < 0 || b_alloc < 0) fail("negative load input");
  if (cfg.key_bits <= 0) fail("key_bits must be positive");
  if (b_req == 0 || b_alloc >= b_req) return Ratio(n_out);
  Ratio value;
  switch (cfg.mode) {
    case LoadMode::Average:
      // n_out*rho + n_in*(1-rho) with rho = b_alloc/b_req, one exact division.
      value = (Ratio(n_out) * b_alloc + Ratio(n_in) * (b_req - b_alloc)) / b_req;
      break;
    case LoadMode::Best:
      // Only the keys that did not fit spill, one tuple each.
      value = Ratio(n_out) + Ratio(b_req - b_alloc, cfg.key_bits);
      break;
    case LoadMode::Worst:
      // Every resident key gets evicted by a colliding one; only the keys
      // that fit are answered on the switch.
      value = Ratio(n_in) - Ratio(b_alloc, cfg.key_bits);
      break;
  }
  value = std::max(value, Ratio(0));
  value = std::min(value, Ratio(n_in));
  return value;
}

Ratio operator_load(const CostEntry& entry, int64_t b_alloc, const LoadConfig& cfg) {
  return operator_load(entry.n_in, entry.n_out, entry.bits, b_alloc, cfg);
}

std::map<OpKey, int64_t> alloc_from_assignment(const GoaInstance& inst, const Assignment& a) {
  std::map<OpKey, int64_t> alloc;
  for (const auto& op : inst.operators) alloc[op.key];  // ensure zero entries exist
  for (size_t r = 0; r < a.reg_to_op.size() && r < inst.registers.size(); ++r) {
    int op_id = a.reg_to_op[r];
    if (op_id < 0) continue;
    alloc[inst.operators.at(static_cast<size_t>(op_id)).key] += inst.registers[r].bits;
  }
  return alloc;
}

LoadEstimate assignment_load(const std::vector<DependencyChain>& chains,
                             const std::map<OpKey, int64_t>& alloc_bits,
                             const std::map<OpKey, CostEntry>& costs,
                             const LoadConfig& cfg) {
  LoadEstimate est;
  for (const auto& chain : chains) {
    bool spilled = false;
    for (size_t p = 0; p < chain.ops.size(); ++p) {
      const OpKey& key = chain.ops[p];
      auto cit = costs.find(key);
      if (cit == costs.end()) fail("missing cost entry for " + to_string(key));
      const CostEntry& e = cit->second;
      Ratio contribution = 0;
      if (!spilled) {
        auto ait = alloc_bits.find(key);
        int64_t alloc = ait == alloc_bits.end() ? 0 : ait->second;
        if (e.bits > 0 && alloc < e.bits) {
          contribution = operator_load(e, alloc, cfg);
          spilled = true;  // the rest of the chain runs off-switch
        } else if (p + 1 == chain.ops.size()) {
          contribution = Ratio(e.n_out);
        }
      }
      est.per_operator[key] = contribution;
      est.total += contribution;
    }
  }
  return est;
}

}  // namespace qplan
