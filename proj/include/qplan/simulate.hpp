// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qplan/bootstrap.hpp"
#include "qplan/cost_matrix.hpp"
#include "qplan/goa.hpp"
#include "qplan/load_model.hpp"
#include "qplan/query.hpp"
#include "qplan/switch_config.hpp"

namespace qplan {

//! Planning strategies. Static ones freeze plan, register layout and mapping
//! from the training prefix; dynamic ones remap registers every window;
//! optimal ones exhaustively search the per-window assignment (guarded).
enum class Strategy {
  MaxDp,          // finest plan, exact-fit layout, frozen mapping
  SonataStatic,   // searched plan, exact-fit layout, frozen mapping
  SonataOp,       // SonataStatic with over-provisioned register sizing
  MaxDpD,         // finest plan, balanced ladder layout, per-window mapping
  DynamiqOracle,  // utility-selected plan, ladder layout, true-cost remapping
  DynamiqPred,    // DynamiqOracle driven by forecast costs after warm-up
  DynamiqRand,    // searched plan, exact-fit layout, per-window mapping
  DynamiqSnr,     // searched plan, ladder layout, per-window mapping
  DynamiqTom,     // utility-selected plan, exact-fit layout, per-window mapping
  OptimalSonata,  // per-window best plan + layout + exhaustive mapping
  OptimalMaxDp,   // per-window exhaustive mapping on the finest plan
};

Strategy parse_strategy(const std::string& token);
std::string to_string(Strategy s);
std::vector<Strategy> all_strategies();

struct SimParams {
  Strategy strategy = Strategy::DynamiqOracle;
  SwitchConfig sw;
  LoadConfig load;
  int train_windows = 10;
  double overprovision = 0.0;  // extra sizing share for SonataOp
  uint64_t seed = 0;
  //! Externally produced plan (refinement + registers). When set, plan
  //! selection and register sizing are skipped; only mappings are computed.
  std::optional<BootstrapPlan> plan;
};

struct OpWindowReport {
  OpKey key;
  int64_t alloc_bits = 0;
  int64_t req_bits = 0;
  double rho = 1.0;   // min(alloc/req, 1)
  double load = 0.0;  // tuples this operator pushed to the stream processor
};

struct WindowReport {
  int window = 0;
  double sp_load = 0.0;
  RefinementPlan plan;  // plan in force this window
  std::vector<OpWindowReport> operators;
};

struct SimulationRun {
  std::string strategy;
  std::string mode;
  int train_windows = 0;
  uint64_t seed = 0;
  RefinementPlan plan;        // bootstrap-level plan (per-window plans may differ)
  RegisterConfig registers;   // fixed layout; empty when re-sized per window
  std::vector<WindowReport> windows;  // evaluation windows only
  double total_load = 0.0;
  double median_load = 0.0;
};

//! First-fit-decreasing register layout: operators by falling demand, each
//! chunked into registers no larger than the per-register cap and placed at
//! the lowest stage that respects ALU slots, stage memory and chain order
//! (a chain leaves room for its ancestors below and descendants above).
//! Demand that does not fit is dropped.
RegisterConfig exact_fit_registers(const std::vector<DependencyChain>& chains,
                                   const std::map<OpKey, int64_t>& demand_bits,
                                   const SwitchConfig& sw);

//! Per-operator lower median of true state bits over the training prefix.
std::map<OpKey, int64_t> median_demands(const std::vector<DependencyChain>& chains,
                                        const CostHistory& history, int train_windows);

//! Plan minimizing the frozen-mapping training load: all sequence combinations
//! when at most 4096, otherwise per-query coordinate descent from the finest
//! plan.
RefinementPlan select_static_plan(const std::vector<QueryMeta>& metas, const CostHistory& history,
                                  const SimParams& params);

//! Runs the strategy over the evaluation windows [train_windows, end).
SimulationRun simulate(const CostHistory& history, const SimParams& params);

std::string run_to_json(const SimulationRun& run);
SimulationRun run_from_json(const std::string& text);
void save_run(const SimulationRun& run, const std::string& path);
SimulationRun load_run(const std::string& path);

}  // namespace qplan
