// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "qplan/cost_matrix.hpp"
#include "qplan/query.hpp"
#include "qplan/switch_config.hpp"

namespace qplan {

struct TomResult {
  std::vector<int64_t> per_window;  // total operator memory per window, bits
  double mean = 0.0;
};

//! Total operator memory of a plan: per window, the sum of state sizes over
//! every chain operator the plan instantiates. Errors name the first missing
//! cost entry.
TomResult tom_of_plan(const RefinementPlan& plan, const std::vector<QueryMeta>& metas,
                      const CostHistory& history);

//! All strictly increasing level sequences from the root to the finest level,
//! capped at `max_len` elements. Lexicographic order.
std::vector<std::vector<int>> candidate_sequences(const std::vector<int>& levels,
                                                  int max_len = 4);

struct PlanChoice {
  RefinementPlan plan;
  int operators = 0;       // chain operators the plan instantiates
  double mean_tom = 0.0;   // mean per-window memory of the chosen plan
  double utility = 0.0;    // (free memory) * (free registers)
};

//! Memory-headroom-aware refinement selection: for each feasible operator
//! count k, finds the plan combination minimising mean total operator memory,
//! then picks k maximising (totalMem - minMeanTOM(k)) * (totalRegs - k).
//! Plans with non-positive headroom on either axis are infeasible. Ties fall
//! to the smallest k, then the lexicographically smallest plan.
PlanChoice select_refinement_plan(const std::vector<QueryMeta>& metas,
                                  const CostHistory& history, const SwitchConfig& cfg,
                                  int max_seq_len = 4);

struct SnrResult {
  RegisterConfig registers;
  // Exact ladder step S in bits: sizes are {S, 2S, ..., A*S} per stage.
  int64_t step_num = 0;
  int64_t step_den = 1;
};

//! Ladder sizing: per stage, register sizes {S, 2S, ..., A*S} with
//! S = min(maxRegBits/A, 2*stageMemBits/(A*(A+1))), computed exactly and
//! floored to whole bits per register. Independent of any cost history.
SnrResult snr_sizes(const SwitchConfig& cfg);

struct BootstrapPlan {
  RefinementPlan refinement;
  RegisterConfig registers;
};

std::string bootstrap_plan_to_json(const BootstrapPlan& plan);
BootstrapPlan bootstrap_plan_from_json(const std::string& text);
void save_bootstrap_plan(const std::string& path, const BootstrapPlan& plan);
BootstrapPlan load_bootstrap_plan(const std::string& path);

}  // namespace qplan
