// SPDX-License-Identifier: Apache-2.0
#include "qplan/bootstrap.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace qplan {

TomResult tom_of_plan(const RefinementPlan& plan, const std::vector<QueryMeta>& metas,
                      const CostHistory& history) {
  if (history.empty()) fail("tom_of_plan needs at least one window of costs");
  auto chains = build_chains(plan, metas);
  TomResult res;
  res.per_window.reserve(history.size());
  for (const auto& cm : history) {
    int64_t total = 0;
    for (const auto& chain : chains) {
      for (const auto& key : chain.ops) {
        auto it = cm.entries.find(key);
        if (it == cm.entries.end()) {
          fail("cost matrix for window " + std::to_string(cm.window) + " missing entry " +
               to_string(key));
        }
        total += it->second.bits;
      }
    }
    res.per_window.push_back(total);
  }
  double sum = 0.0;
  for (int64_t v : res.per_window) sum += static_cast<double>(v);
  res.mean = sum / static_cast<double>(res.per_window.size());
  return res;
}

std::vector<std::vector<int>> candidate_sequences(const std::vector<int>& levels, int max_len) {
  if (levels.size() < 2) fail("candidate_sequences needs at least root and finest levels");
  if (max_len < 2) fail("candidate sequence cap must allow at least one transition");
  std::vector<int> mid(levels.begin() + 1, levels.end() - 1);
  int n = static_cast<int>(mid.size());
  if (n > 20) fail("too many intermediate levels to enumerate");
  std::vector<std::vector<int>> out;
  for (uint32_t bits = 0; bits < (uint32_t{1} << n); ++bits) {
    if (std::popcount(bits) + 2 > max_len) continue;
    std::vector<int> seq{levels.front()};
    for (int i = 0; i < n; ++i) {
      if (bits & (uint32_t{1} << i)) seq.push_back(mid[static_cast<size_t>(i)]);
    }
    seq.push_back(levels.back());
    out.push_back(std::move(seq));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Mean per-window memory of one query's candidate sequence.
double sequence_mean_tom(const QueryMeta& m, const std::vector<int>& seq,
                         const CostHistory& history) {
  double sum = 0.0;
  for (const auto& cm : history) {
    for (size_t t = 1; t < seq.size(); ++t) {
      for (int k = 0; k < m.stateful_ops; ++k) {
        OpKey key{m.qid, seq[t - 1], seq[t], k};
        auto it = cm.entries.find(key);
        if (it == cm.entries.end()) {
          fail("cost matrix for window " + std::to_string(cm.window) + " missing entry " +
               to_string(key));
        }
        sum += static_cast<double>(it->second.bits);
      }
    }
  }
  return sum / static_cast<double>(history.size());
}

struct DpState {
  double tom = 0.0;
  std::vector<std::vector<int>> seqs;  // per query, in meta order
  bool valid = false;
};

}  // namespace

PlanChoice select_refinement_plan(const std::vector<QueryMeta>& metas,
                                  const CostHistory& history, const SwitchConfig& cfg,
                                  int max_seq_len) {
  validate_switch(cfg);
  if (metas.empty()) fail("select_refinement_plan needs at least one query");
  if (history.empty()) fail("select_refinement_plan needs cost history");

  const int total_regs = cfg.total_registers();
  // Per query: operator count -> (min mean TOM, lexicographically smallest
  // sequence achieving it).
  std::vector<std::map<int, std::pair<double, std::vector<int>>>> options;
  for (const auto& m : metas) {
    std::map<int, std::pair<double, std::vector<int>>> per_count;
    for (const auto& seq : candidate_sequences(m.levels, max_seq_len)) {
      int ops = static_cast<int>(seq.size() - 1) * m.stateful_ops;
      if (ops > total_regs) continue;
      double tom = sequence_mean_tom(m, seq, history);
      auto it = per_count.find(ops);
      if (it == per_count.end() || tom < it->second.first) {
        per_count[ops] = {tom, seq};
      }
    }
    if (per_count.empty()) {
      fail("query " + std::to_string(m.qid) + " has no candidate plan within the register budget");
    }
    options.push_back(std::move(per_count));
  }

  // Combine queries: minimise summed mean TOM at every total operator count.
  std::vector<DpState> dp(static_cast<size_t>(total_regs) + 1);
  dp[0].valid = true;
  for (const auto& per_count : options) {
    std::vector<DpState> next(dp.size());
    for (size_t k = 0; k < dp.size(); ++k) {
      if (!dp[k].valid) continue;
      for (const auto& [ops, choice] : per_count) {
        size_t nk = k + static_cast<size_t>(ops);
        if (nk >= next.size()) continue;
        double tom = dp[k].tom + choice.first;
        auto seqs = dp[k].seqs;
        seqs.push_back(choice.second);
        auto& slot = next[nk];
        if (!slot.valid || tom < slot.tom || (tom == slot.tom && seqs < slot.seqs)) {
          slot = DpState{tom, std::move(seqs), true};
        }
      }
    }
    dp = std::move(next);
  }

  const double total_mem = static_cast<double>(cfg.total_mem_bits());
  PlanChoice best;
  bool found = false;
  for (size_t k = 0; k < dp.size(); ++k) {
    if (!dp[k].valid) continue;
    double m = total_mem - dp[k].tom;
    double o = static_cast<double>(total_regs) - static_cast<double>(k);
    if (m <= 0.0 || o <= 0.0) continue;
    double u = m * o;
    // Ties fall to the smallest k; iteration order handles the rest.
    if (!found || u > best.utility) {
      best.operators = static_cast<int>(k);
      best.mean_tom = dp[k].tom;
      best.utility = u;
      best.plan.clear();
      for (size_t qi = 0; qi < metas.size(); ++qi) {
        best.plan[metas[qi].qid] = dp[k].seqs[qi];
      }
      found = true;
    }
  }
  if (!found) fail("no feasible refinement plan: every operator count exhausts memory or registers");
  return best;
}

SnrResult snr_sizes(const SwitchConfig& cfg) {
  validate_switch(cfg);
  const int64_t a = cfg.alus_per_stage;
  // S = min(maxRegBits / A, 2 * stageMemBits / (A * (A + 1))), kept exact.
  int64_t num1 = cfg.max_reg_bits, den1 = a;
  int64_t num2 = 2 * cfg.stage_mem_bits, den2 = a * (a + 1);
  int64_t num, den;
  if (static_cast<__int128>(num1) * den2 <= static_cast<__int128>(num2) * den1) {
    num = num1;
    den = den1;
  } else {
    num = num2;
    den = den2;
  }
  int64_t g = std::gcd(num, den);
  num /= g;
  den /= g;
  if (num / den < 1) fail("switch too small: ladder step below one bit");

  SnrResult res;
  res.step_num = num;
  res.step_den = den;
  for (int stage = 0; stage < cfg.stages; ++stage) {
    for (int k = 1; k <= cfg.alus_per_stage; ++k) {
      int64_t bits = static_cast<int64_t>(static_cast<__int128>(num) * k / den);
      res.registers.registers.push_back(
          Register{stage * cfg.alus_per_stage + (k - 1), stage, bits});
    }
  }
  validate_registers(res.registers, cfg);
  return res;
}

namespace {
using nlohmann::ordered_json;
}

std::string bootstrap_plan_to_json(const BootstrapPlan& plan) {
  ordered_json doc;
  ordered_json refinement = ordered_json::object();
  for (const auto& [qid, seq] : plan.refinement) refinement[std::to_string(qid)] = seq;
  doc["refinement"] = std::move(refinement);
  ordered_json regs = ordered_json::array();
  for (const auto& r : plan.registers.registers) {
    ordered_json jr;
    jr["id"] = r.id;
    jr["stage"] = r.stage;
    jr["bits"] = r.bits;
    regs.push_back(std::move(jr));
  }
  doc["registers"] = std::move(regs);
  return doc.dump(2) + "\n";
}

BootstrapPlan bootstrap_plan_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("plan file is not valid JSON: ") + e.what());
  }
  BootstrapPlan plan;
  try {
    for (const auto& [key, value] : doc.at("refinement").items()) {
      plan.refinement[std::stoi(key)] = value.get<std::vector<int>>();
    }
    for (const auto& jr : doc.at("registers")) {
      plan.registers.registers.push_back(Register{
          jr.at("id").get<int>(), jr.at("stage").get<int>(), jr.at("bits").get<int64_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("malformed plan document: ") + e.what());
  }
  std::sort(plan.registers.registers.begin(), plan.registers.registers.end(),
            [](const Register& x, const Register& y) { return x.id < y.id; });
  return plan;
}

void save_bootstrap_plan(const std::string& path, const BootstrapPlan& plan) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write plan file: " + path);
  out << bootstrap_plan_to_json(plan);
}

BootstrapPlan load_bootstrap_plan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open plan file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return bootstrap_plan_from_json(ss.str());
}

}  // namespace qplan
