// SPDX-License-Identifier: Apache-2.0
#include "qplan/simulate.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qplan/forecast.hpp"

namespace qplan {

namespace {

const std::vector<std::pair<Strategy, const char*>>& strategy_tokens() {
  static const std::vector<std::pair<Strategy, const char*>> tokens = {
      {Strategy::MaxDp, "MAX_DP"},
      {Strategy::SonataStatic, "SONATA_STATIC"},
      {Strategy::SonataOp, "SONATA_OP"},
      {Strategy::MaxDpD, "MAX_DP_D"},
      {Strategy::DynamiqOracle, "DYNAMIQ_ORACLE"},
      {Strategy::DynamiqPred, "DYNAMIQ_PRED"},
      {Strategy::DynamiqRand, "DYNAMIQ_RAND"},
      {Strategy::DynamiqSnr, "DYNAMIQ_SNR"},
      {Strategy::DynamiqTom, "DYNAMIQ_TOM"},
      {Strategy::OptimalSonata, "OPTIMAL_SONATA"},
      {Strategy::OptimalMaxDp, "OPTIMAL_MAX_DP"},
  };
  return tokens;
}

}  // namespace

Strategy parse_strategy(const std::string& token) {
  for (const auto& [s, name] : strategy_tokens()) {
    if (token == name) return s;
  }
  std::string all;
  for (const auto& [s, name] : strategy_tokens()) {
    if (!all.empty()) all += "|";
    all += name;
  }
  fail("unknown strategy: " + token + " (expected " + all + ")");
}

std::string to_string(Strategy s) {
  for (const auto& [st, name] : strategy_tokens()) {
    if (st == s) return name;
  }
  fail("corrupt strategy value");
}

std::vector<Strategy> all_strategies() {
  std::vector<Strategy> out;
  for (const auto& [s, name] : strategy_tokens()) out.push_back(s);
  return out;
}

// ---------------------------------------------------------------------------
// Register sizing.

RegisterConfig exact_fit_registers(const std::vector<DependencyChain>& chains,
                                   const std::map<OpKey, int64_t>& demand_bits,
                                   const SwitchConfig& sw) {
  validate_switch(sw);
  struct OpCtx {
    OpKey key;
    size_t chain;
    int pos;
    int len;
    int64_t demand;
    int lo_stage = INT_MAX, hi_stage = INT_MIN;  // placed span
  };
  std::vector<OpCtx> ops;
  for (size_t c = 0; c < chains.size(); ++c) {
    const auto& chain = chains[c];
    for (size_t p = 0; p < chain.ops.size(); ++p) {
      auto it = demand_bits.find(chain.ops[p]);
      int64_t d = it == demand_bits.end() ? 0 : std::max<int64_t>(it->second, 0);
      ops.push_back(OpCtx{chain.ops[p], c, static_cast<int>(p),
                          static_cast<int>(chain.ops.size()), d});
    }
  }
  std::vector<size_t> order(ops.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (ops[a].demand != ops[b].demand) return ops[a].demand > ops[b].demand;
    return ops[a].key < ops[b].key;
  });

  std::vector<int> alus_used(static_cast<size_t>(sw.stages), 0);
  std::vector<int64_t> mem_used(static_cast<size_t>(sw.stages), 0);
  struct Placed {
    int stage;
    int64_t bits;
  };
  std::vector<Placed> placed;

  for (size_t idx : order) {
    OpCtx& op = ops[idx];
    if (op.demand <= 0) continue;
    // Keep one stage of headroom per unplaced ancestor below and descendant
    // above; placed relatives pin the span exactly.
    int lo = op.pos;
    int hi = sw.stages - 1 - (op.len - 1 - op.pos);
    for (const OpCtx& other : ops) {
      if (other.chain != op.chain || other.lo_stage == INT_MAX) continue;
      if (other.pos < op.pos) lo = std::max(lo, other.hi_stage + 1);
      if (other.pos > op.pos) hi = std::min(hi, other.lo_stage - 1);
    }
    int64_t remaining = op.demand;
    while (remaining > 0 && lo <= hi) {
      int64_t chunk = std::min(remaining, sw.max_reg_bits);
      int stage = -1;
      for (int t = lo; t <= hi; ++t) {
        if (alus_used[static_cast<size_t>(t)] >= sw.alus_per_stage) continue;
        if (mem_used[static_cast<size_t>(t)] + chunk <= sw.stage_mem_bits) {
          stage = t;
          break;
        }
      }
      if (stage < 0) {
        // No stage takes a full chunk; place the largest piece that fits.
        int64_t best_avail = 0;
        for (int t = lo; t <= hi; ++t) {
          if (alus_used[static_cast<size_t>(t)] >= sw.alus_per_stage) continue;
          int64_t avail =
              std::min(sw.max_reg_bits, sw.stage_mem_bits - mem_used[static_cast<size_t>(t)]);
          if (avail > best_avail) {
            best_avail = avail;
            stage = t;
            break;  // lowest stage with any room
          }
        }
        if (stage < 0 || best_avail <= 0) break;  // truncate: demand dropped
        chunk = std::min(remaining, best_avail);
      }
      alus_used[static_cast<size_t>(stage)]++;
      mem_used[static_cast<size_t>(stage)] += chunk;
      placed.push_back(Placed{stage, chunk});
      op.lo_stage = std::min(op.lo_stage, stage);
      op.hi_stage = std::max(op.hi_stage, stage);
      remaining -= chunk;
    }
  }

  std::stable_sort(placed.begin(), placed.end(),
                   [](const Placed& a, const Placed& b) { return a.stage < b.stage; });
  RegisterConfig cfg;
  for (size_t i = 0; i < placed.size(); ++i) {
    cfg.registers.push_back(Register{static_cast<int>(i), placed[i].stage, placed[i].bits});
  }
  validate_registers(cfg, sw);
  return cfg;
}

// ---------------------------------------------------------------------------
// Training-side helpers.

namespace {

CostHistory training_slice(const CostHistory& history, int train_windows) {
  return CostHistory(history.begin(), history.begin() + train_windows);
}

//! Per-operator lower medians of all three cost fields over the training
//! prefix; windows missing an operator count as zero demand.
std::map<OpKey, CostEntry> median_entries(const std::vector<DependencyChain>& chains,
                                          const CostHistory& history, int train_windows) {
  std::map<OpKey, CostEntry> out;
  for (const auto& chain : chains) {
    for (const OpKey& key : chain.ops) {
      std::vector<int64_t> bits, n_in, n_out;
      for (int w = 0; w < train_windows; ++w) {
        const auto& entries = history[static_cast<size_t>(w)].entries;
        auto it = entries.find(key);
        bits.push_back(it == entries.end() ? 0 : it->second.bits);
        n_in.push_back(it == entries.end() ? 0 : it->second.n_in);
        n_out.push_back(it == entries.end() ? 0 : it->second.n_out);
      }
      CostEntry e;
      e.bits = lower_median(bits);
      e.n_in = lower_median(n_in);
      e.n_out = std::min(lower_median(n_out), e.n_in);
      out[key] = e;
    }
  }
  return out;
}

std::map<OpKey, CostEntry> scale_bits(std::map<OpKey, CostEntry> entries, double factor) {
  for (auto& [key, e] : entries) {
    e.bits = static_cast<int64_t>(std::ceil(static_cast<double>(e.bits) * factor));
  }
  return entries;
}

double to_double(const Ratio& r) { return r.convert_to<double>(); }

//! Frozen plan, layout and register mapping derived from the training prefix.
struct StaticSetup {
  RefinementPlan plan;
  std::vector<DependencyChain> chains;
  RegisterConfig registers;
  std::map<OpKey, int64_t> alloc;
};

StaticSetup build_static_setup(const RefinementPlan& plan, const std::vector<QueryMeta>& metas,
                               const CostHistory& history, const SimParams& params) {
  StaticSetup setup;
  setup.plan = plan;
  setup.chains = build_chains(plan, metas);
  auto medians = median_entries(setup.chains, history, params.train_windows);
  if (params.strategy == Strategy::SonataOp && params.overprovision > 0) {
    medians = scale_bits(std::move(medians), 1.0 + params.overprovision);
  }
  if (params.plan) {
    setup.registers = params.plan->registers;
  } else {
    std::map<OpKey, int64_t> demands;
    for (const auto& [key, e] : medians) demands[key] = e.bits;
    setup.registers = exact_fit_registers(setup.chains, demands, params.sw);
  }
  GoaInstance inst = build_goa_instance(setup.chains, setup.registers, medians);
  Assignment a = greedy_map(inst);
  setup.alloc = alloc_from_assignment(inst, a);
  return setup;
}

Ratio training_load(const StaticSetup& setup, const CostHistory& history,
                    const SimParams& params) {
  Ratio total = 0;
  for (int w = 0; w < params.train_windows; ++w) {
    total += assignment_load(setup.chains, setup.alloc, history[static_cast<size_t>(w)].entries,
                             params.load)
                 .total;
  }
  return total;
}

//! All plan combinations (one candidate level sequence per query), or empty
//! when the cross product exceeds the cap.
std::vector<RefinementPlan> enumerate_plans(const std::vector<QueryMeta>& metas, size_t cap) {
  std::vector<std::vector<std::vector<int>>> cands;
  size_t combos = 1;
  for (const auto& meta : metas) {
    cands.push_back(candidate_sequences(meta.levels));
    combos *= cands.back().size();
    if (combos > cap) return {};
  }
  std::vector<RefinementPlan> plans;
  std::vector<size_t> idx(metas.size(), 0);
  while (true) {
    RefinementPlan plan;
    for (size_t q = 0; q < metas.size(); ++q) plan[metas[q].qid] = cands[q][idx[q]];
    plans.push_back(std::move(plan));
    size_t q = 0;
    while (q < metas.size()) {
      if (++idx[q] < cands[q].size()) break;
      idx[q] = 0;
      q++;
    }
    if (q == metas.size()) break;
  }
  return plans;
}

}  // namespace

std::map<OpKey, int64_t> median_demands(const std::vector<DependencyChain>& chains,
                                        const CostHistory& history, int train_windows) {
  std::map<OpKey, int64_t> out;
  for (const auto& [key, e] : median_entries(chains, history, train_windows)) out[key] = e.bits;
  return out;
}

RefinementPlan select_static_plan(const std::vector<QueryMeta>& metas, const CostHistory& history,
                                  const SimParams& params) {
  auto evaluate = [&](const RefinementPlan& plan) {
    return training_load(build_static_setup(plan, metas, history, params), history, params);
  };

  auto plans = enumerate_plans(metas, 4096);
  if (!plans.empty()) {
    const RefinementPlan* best = nullptr;
    Ratio best_load = 0;
    for (const auto& plan : plans) {
      Ratio load = evaluate(plan);
      if (!best || load < best_load) {
        best = &plan;
        best_load = load;
      }
    }
    return *best;
  }

  // Too many combinations: per-query coordinate descent from the finest plan.
  RefinementPlan current = finest_only_plan(metas);
  Ratio current_load = evaluate(current);
  for (int pass = 0; pass < 5; ++pass) {
    bool changed = false;
    for (const auto& meta : metas) {
      for (const auto& seq : candidate_sequences(meta.levels)) {
        if (seq == current[meta.qid]) continue;
        RefinementPlan trial = current;
        trial[meta.qid] = seq;
        Ratio load = evaluate(trial);
        if (load < current_load) {
          current = std::move(trial);
          current_load = load;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return current;
}

// ---------------------------------------------------------------------------
// Window evaluation shared by every family.

namespace {

WindowReport report_window(int window, const RefinementPlan& plan,
                           const std::vector<DependencyChain>& chains,
                           const std::map<OpKey, int64_t>& alloc,
                           const std::map<OpKey, CostEntry>& truth, const LoadConfig& load_cfg) {
  LoadEstimate est = assignment_load(chains, alloc, truth, load_cfg);
  WindowReport rep;
  rep.window = window;
  rep.plan = plan;
  rep.sp_load = to_double(est.total);
  for (const auto& chain : chains) {
    for (const OpKey& key : chain.ops) {
      const CostEntry& e = truth.at(key);
      auto ait = alloc.find(key);
      OpWindowReport op;
      op.key = key;
      op.alloc_bits = ait == alloc.end() ? 0 : ait->second;
      op.req_bits = e.bits;
      op.rho = e.bits == 0 ? 1.0
                           : std::min(1.0, static_cast<double>(op.alloc_bits) /
                                               static_cast<double>(e.bits));
      op.load = to_double(est.per_operator.at(key));
      rep.operators.push_back(op);
    }
  }
  return rep;
}

void finalize_run(SimulationRun& run) {
  std::vector<double> loads;
  run.total_load = 0;
  for (const auto& w : run.windows) {
    loads.push_back(w.sp_load);
    run.total_load += w.sp_load;
  }
  run.median_load = loads.empty() ? 0.0 : median(loads);
}

SimulationRun run_static(const CostHistory& history, const std::vector<QueryMeta>& metas,
                         const SimParams& params) {
  RefinementPlan plan;
  if (params.plan) {
    plan = params.plan->refinement;
  } else if (params.strategy == Strategy::MaxDp) {
    plan = finest_only_plan(metas);
  } else {
    plan = select_static_plan(metas, history, params);
  }
  StaticSetup setup = build_static_setup(plan, metas, history, params);

  SimulationRun run;
  run.plan = setup.plan;
  run.registers = setup.registers;
  for (size_t w = static_cast<size_t>(params.train_windows); w < history.size(); ++w) {
    run.windows.push_back(report_window(history[w].window, setup.plan, setup.chains, setup.alloc,
                                        history[w].entries, params.load));
  }
  return run;
}

SimulationRun run_dynamic(const CostHistory& history, const std::vector<QueryMeta>& metas,
                          const SimParams& params) {
  const Strategy s = params.strategy;
  CostHistory train = training_slice(history, params.train_windows);

  RefinementPlan plan;
  RegisterConfig regs;
  if (params.plan) {
    plan = params.plan->refinement;
    regs = params.plan->registers;
  } else {
    if (s == Strategy::MaxDpD) {
      plan = finest_only_plan(metas);
    } else if (s == Strategy::DynamiqRand || s == Strategy::DynamiqSnr) {
      plan = select_static_plan(metas, history, params);
    } else {
      plan = select_refinement_plan(metas, train, params.sw).plan;
    }
  }
  std::vector<DependencyChain> chains = build_chains(plan, metas);
  if (!params.plan) {
    if (s == Strategy::DynamiqRand || s == Strategy::DynamiqTom) {
      regs = exact_fit_registers(chains, median_demands(chains, history, params.train_windows),
                                 params.sw);
    } else {
      regs = snr_sizes(params.sw).registers;
    }
  }

  // Forecast-driven variant: smooth over the training prefix, then group the
  // operators and fit per-group scale factors against the training windows.
  CostPredictor predictor;
  if (s == Strategy::DynamiqPred) {
    ClusterModel clusters = fit_clusters(train, params.seed);
    if (clusters.k > 0 && params.train_windows > 2) {
      auto objective = [&](const std::vector<double>& gammas) {
        CostPredictor probe;
        probe.set_scaling(clusters.cluster_of, gammas);
        double total = 0;
        for (int w = 0; w < params.train_windows; ++w) {
          if (probe.ready()) {
            GoaInstance inst = build_goa_instance(chains, regs, probe.predict());
            Assignment a = greedy_map(inst);
            LoadEstimate est =
                assignment_load(chains, alloc_from_assignment(inst, a),
                                history[static_cast<size_t>(w)].entries, params.load);
            total += std::log2(std::max(to_double(est.total), 1.0));
          }
          probe.observe(history[static_cast<size_t>(w)]);
        }
        return total;
      };
      std::vector<double> gammas = fit_scaling(clusters.k, objective);
      predictor.set_scaling(clusters.cluster_of, gammas);
    }
    for (const auto& m : train) predictor.observe(m);
  }

  SimulationRun run;
  run.plan = plan;
  run.registers = regs;
  for (size_t w = static_cast<size_t>(params.train_windows); w < history.size(); ++w) {
    const auto& truth = history[w].entries;
    const std::map<OpKey, CostEntry>* sizing = &truth;
    std::map<OpKey, CostEntry> predicted;
    if (s == Strategy::DynamiqPred && predictor.ready()) {
      predicted = predictor.predict();
      sizing = &predicted;
    }
    GoaInstance inst = build_goa_instance(chains, regs, *sizing);
    Assignment a = greedy_map(inst);
    run.windows.push_back(report_window(history[w].window, plan, chains,
                                        alloc_from_assignment(inst, a), truth, params.load));
    if (s == Strategy::DynamiqPred) predictor.observe(history[w]);
  }
  return run;
}

//! Exhaustive feasible-mapping search minimizing the window load. Shares the
//! exact_map guards; ties keep the first (lexicographically smallest) map.
struct LoadSearch {
  const GoaInstance& inst;
  const std::vector<DependencyChain>& chains;
  const std::map<OpKey, CostEntry>& truth;
  const LoadConfig& load_cfg;
  std::vector<int> parent, child;
  std::vector<int> cur;
  std::vector<int64_t> op_cap;
  std::vector<int> op_lo, op_hi;
  bool have_best = false;
  Ratio best_load = 0;
  std::vector<int> best_map;

  LoadSearch(const GoaInstance& i, const std::vector<DependencyChain>& c,
             const std::map<OpKey, CostEntry>& t, const LoadConfig& l)
      : inst(i), chains(c), truth(t), load_cfg(l) {}

  void run() {
    parent.assign(inst.operators.size(), -1);
    child.assign(inst.operators.size(), -1);
    for (const auto& ops : inst.chains()) {
      for (size_t p = 1; p < ops.size(); ++p) {
        parent[static_cast<size_t>(ops[p])] = ops[p - 1];
        child[static_cast<size_t>(ops[p - 1])] = ops[p];
      }
    }
    cur.assign(inst.registers.size(), -1);
    op_cap.assign(inst.operators.size(), 0);
    op_lo.assign(inst.operators.size(), INT_MAX);
    op_hi.assign(inst.operators.size(), INT_MIN);
    recurse(0);
  }

  void recurse(size_t reg_idx) {
    if (reg_idx == inst.registers.size()) {
      for (const auto& op : inst.operators) {
        if (op_lo[static_cast<size_t>(op.id)] == INT_MAX) continue;
        int p = parent[static_cast<size_t>(op.id)];
        if (p >= 0 && op_cap[static_cast<size_t>(p)] <
                          inst.operators[static_cast<size_t>(p)].size) {
          return;
        }
      }
      Assignment a;
      a.reg_to_op = cur;
      Ratio load =
          assignment_load(chains, alloc_from_assignment(inst, a), truth, load_cfg).total;
      if (!have_best || load < best_load) {
        have_best = true;
        best_load = load;
        best_map = cur;
      }
      return;
    }
    const auto& reg = inst.registers[reg_idx];
    recurse(reg_idx + 1);
    for (const auto& op : inst.operators) {
      int p = parent[static_cast<size_t>(op.id)];
      if (p >= 0 && op_hi[static_cast<size_t>(p)] != INT_MIN &&
          op_hi[static_cast<size_t>(p)] >= reg.stage) {
        continue;
      }
      int c = child[static_cast<size_t>(op.id)];
      if (c >= 0 && op_lo[static_cast<size_t>(c)] != INT_MAX &&
          op_lo[static_cast<size_t>(c)] <= reg.stage) {
        continue;
      }
      cur[reg_idx] = op.id;
      int64_t cap0 = op_cap[static_cast<size_t>(op.id)];
      int lo0 = op_lo[static_cast<size_t>(op.id)];
      int hi0 = op_hi[static_cast<size_t>(op.id)];
      op_cap[static_cast<size_t>(op.id)] += reg.bits;
      op_lo[static_cast<size_t>(op.id)] = std::min(lo0, reg.stage);
      op_hi[static_cast<size_t>(op.id)] = std::max(hi0, reg.stage);
      recurse(reg_idx + 1);
      cur[reg_idx] = -1;
      op_cap[static_cast<size_t>(op.id)] = cap0;
      op_lo[static_cast<size_t>(op.id)] = lo0;
      op_hi[static_cast<size_t>(op.id)] = hi0;
    }
  }
};

SimulationRun run_optimal(const CostHistory& history, const std::vector<QueryMeta>& metas,
                          const SimParams& params) {
  std::vector<RefinementPlan> plans;
  if (params.strategy == Strategy::OptimalMaxDp) {
    plans.push_back(finest_only_plan(metas));
  } else {
    plans = enumerate_plans(metas, 4096);
    if (plans.empty()) fail("optimal search: too many plan combinations (cap 4096)");
  }
  std::vector<std::vector<DependencyChain>> plan_chains;
  for (const auto& plan : plans) plan_chains.push_back(build_chains(plan, metas));

  SimulationRun run;
  run.plan = plans.front();
  for (size_t w = static_cast<size_t>(params.train_windows); w < history.size(); ++w) {
    const auto& truth = history[w].entries;
    std::optional<WindowReport> best;
    Ratio best_load = 0;
    for (size_t p = 0; p < plans.size(); ++p) {
      const auto& chains = plan_chains[p];
      std::map<OpKey, int64_t> demands;
      for (const auto& chain : chains) {
        for (const OpKey& key : chain.ops) {
          auto it = truth.find(key);
          if (it == truth.end()) fail("missing cost entry for " + to_string(key));
          demands[key] = it->second.bits;
        }
      }
      RegisterConfig regs = exact_fit_registers(chains, demands, params.sw);
      GoaInstance inst = build_goa_instance(chains, regs, truth);
      if (inst.registers.size() > static_cast<size_t>(kExactMapMaxRegisters) ||
          inst.operators.size() > static_cast<size_t>(kExactMapMaxOperators)) {
        fail("optimal search is guarded to " + std::to_string(kExactMapMaxRegisters) +
             " registers and " + std::to_string(kExactMapMaxOperators) + " operators");
      }
      LoadSearch search(inst, chains, truth, params.load);
      search.run();
      Assignment a;
      a.reg_to_op = search.best_map;
      if (!best || search.best_load < best_load) {
        best_load = search.best_load;
        best = report_window(history[w].window, plans[p], chains, alloc_from_assignment(inst, a),
                             truth, params.load);
      }
    }
    run.windows.push_back(std::move(*best));
  }
  return run;
}

}  // namespace

SimulationRun simulate(const CostHistory& history, const SimParams& params) {
  if (params.train_windows < 1) fail("train_windows must be at least 1");
  if (static_cast<size_t>(params.train_windows) >= history.size()) {
    fail("not enough windows: " + std::to_string(history.size()) + " total, " +
         std::to_string(params.train_windows) + " reserved for training");
  }
  std::vector<QueryMeta> metas = derive_meta(history);
  if (metas.empty()) fail("cost history has no operators");

  SimulationRun run;
  switch (params.strategy) {
    case Strategy::MaxDp:
    case Strategy::SonataStatic:
    case Strategy::SonataOp:
      run = run_static(history, metas, params);
      break;
    case Strategy::MaxDpD:
    case Strategy::DynamiqOracle:
    case Strategy::DynamiqPred:
    case Strategy::DynamiqRand:
    case Strategy::DynamiqSnr:
    case Strategy::DynamiqTom:
      run = run_dynamic(history, metas, params);
      break;
    case Strategy::OptimalSonata:
    case Strategy::OptimalMaxDp:
      run = run_optimal(history, metas, params);
      break;
  }
  run.strategy = to_string(params.strategy);
  run.mode = to_string(params.load.mode);
  run.train_windows = params.train_windows;
  run.seed = params.seed;
  finalize_run(run);
  return run;
}

// ---------------------------------------------------------------------------
// Serialization.

namespace {

using nlohmann::ordered_json;

ordered_json plan_to_json(const RefinementPlan& plan) {
  ordered_json obj = ordered_json::object();
  for (const auto& [qid, levels] : plan) obj[std::to_string(qid)] = levels;
  return obj;
}

RefinementPlan plan_from_json(const nlohmann::json& obj) {
  RefinementPlan plan;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    plan[std::stoi(it.key())] = it.value().get<std::vector<int>>();
  }
  return plan;
}

}  // namespace

std::string run_to_json(const SimulationRun& run) {
  ordered_json doc;
  doc["strategy"] = run.strategy;
  doc["mode"] = run.mode;
  doc["train_windows"] = run.train_windows;
  doc["seed"] = run.seed;
  doc["plan"] = plan_to_json(run.plan);
  ordered_json regs = ordered_json::array();
  for (const auto& r : run.registers.registers) {
    regs.push_back({{"id", r.id}, {"stage", r.stage}, {"bits", r.bits}});
  }
  doc["registers"] = std::move(regs);
  ordered_json windows = ordered_json::array();
  for (const auto& w : run.windows) {
    ordered_json jw;
    jw["window"] = w.window;
    jw["sp_load"] = w.sp_load;
    jw["plan"] = plan_to_json(w.plan);
    ordered_json ops = ordered_json::array();
    for (const auto& op : w.operators) {
      ops.push_back({{"qid", op.key.qid},
                     {"i", op.key.prior_level},
                     {"j", op.key.level},
                     {"k", op.key.op_index},
                     {"alloc_bits", op.alloc_bits},
                     {"req_bits", op.req_bits},
                     {"rho", op.rho},
                     {"load", op.load}});
    }
    jw["operators"] = std::move(ops);
    windows.push_back(std::move(jw));
  }
  doc["windows"] = std::move(windows);
  doc["total_load"] = run.total_load;
  doc["median_load"] = run.median_load;
  return doc.dump(2) + "\n";
}

SimulationRun run_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("run file is not valid JSON: ") + e.what());
  }
  SimulationRun run;
  try {
    run.strategy = doc.at("strategy").get<std::string>();
    run.mode = doc.at("mode").get<std::string>();
    run.train_windows = doc.at("train_windows").get<int>();
    run.seed = doc.at("seed").get<uint64_t>();
    run.plan = plan_from_json(doc.at("plan"));
    for (const auto& jr : doc.at("registers")) {
      run.registers.registers.push_back(Register{
          jr.at("id").get<int>(), jr.at("stage").get<int>(), jr.at("bits").get<int64_t>()});
    }
    for (const auto& jw : doc.at("windows")) {
      WindowReport w;
      w.window = jw.at("window").get<int>();
      w.sp_load = jw.at("sp_load").get<double>();
      w.plan = plan_from_json(jw.at("plan"));
      for (const auto& jo : jw.at("operators")) {
        OpWindowReport op;
        op.key = OpKey{jo.at("qid").get<int>(), jo.at("i").get<int>(), jo.at("j").get<int>(),
                       jo.at("k").get<int>()};
        op.alloc_bits = jo.at("alloc_bits").get<int64_t>();
        op.req_bits = jo.at("req_bits").get<int64_t>();
        op.rho = jo.at("rho").get<double>();
        op.load = jo.at("load").get<double>();
        w.operators.push_back(op);
      }
      run.windows.push_back(std::move(w));
    }
    run.total_load = doc.at("total_load").get<double>();
    run.median_load = doc.at("median_load").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("run file schema error: ") + e.what());
  }
  return run;
}

void save_run(const SimulationRun& run, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write run file: " + path);
  out << run_to_json(run);
}

SimulationRun load_run(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open run file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return run_from_json(ss.str());
}

}  // namespace qplan
