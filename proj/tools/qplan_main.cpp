// SPDX-License-Identifier: Apache-2.0
//! Command-line front end: cost-matrix generation, plan bootstrapping,
//! window-by-window simulation, run comparison, synthetic traces and
//! forecast evaluation.
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qplan/bootstrap.hpp"
#include "qplan/cost_matrix.hpp"
#include "qplan/forecast.hpp"
#include "qplan/report.hpp"
#include "qplan/simulate.hpp"
#include "qplan/synth.hpp"
#include "qplan/trace.hpp"

namespace {

using namespace qplan;

int cmd_gen_cost_matrix(const std::string& queries_path, const std::string& trace_path,
                        const std::string& out_path, double window_sec) {
  auto queries = load_queries(queries_path);
  auto records = load_trace(trace_path);
  WorkloadConfig cfg;
  cfg.window_seconds = window_sec;
  CostHistory history = generate_cost_matrices(queries, records, cfg);
  save_cost_history(out_path, history);
  std::vector<QueryMeta> metas;
  for (const auto& q : queries) metas.push_back(meta_of(q));
  std::cout << "windows: " << history.size() << "\n"
            << "entries per window: " << expected_entry_count(metas) << "\n";
  return 0;
}

int cmd_bootstrap(const std::string& cost_path, const std::string& switch_path,
                  const std::string& out_path, const std::string& refinement,
                  const std::string& sizing, double overprovision, int train_windows) {
  CostHistory history = load_cost_history(cost_path);
  SwitchConfig sw = load_switch(switch_path);
  std::vector<QueryMeta> metas = derive_meta(history);
  int train = std::min<int>(train_windows, static_cast<int>(history.size()));
  if (train < 1) fail("bootstrap needs at least one training window");
  CostHistory train_hist(history.begin(), history.begin() + train);

  BootstrapPlan plan;
  if (refinement == "tom") {
    PlanChoice choice = select_refinement_plan(metas, train_hist, sw);
    plan.refinement = choice.plan;
    std::cout << "plan operators: " << choice.operators << "\n"
              << "mean operator memory: " << format_number(choice.mean_tom) << " bits\n";
  } else if (refinement == "finest") {
    plan.refinement = finest_only_plan(metas);
  } else if (refinement == "sonata") {
    SimParams params;
    params.strategy = overprovision > 0 ? Strategy::SonataOp : Strategy::SonataStatic;
    params.sw = sw;
    params.train_windows = train;
    params.overprovision = overprovision;
    plan.refinement = select_static_plan(metas, history, params);
  } else {
    fail("unknown refinement mode: " + refinement + " (expected tom|finest|sonata)");
  }

  auto chains = build_chains(plan.refinement, metas);
  if (sizing == "snr") {
    plan.registers = snr_sizes(sw).registers;
  } else if (sizing == "exact-fit") {
    auto demands = median_demands(chains, history, train);
    if (overprovision > 0) {
      for (auto& [key, bits] : demands) {
        bits = static_cast<int64_t>(std::ceil(static_cast<double>(bits) * (1.0 + overprovision)));
      }
    }
    plan.registers = exact_fit_registers(chains, demands, sw);
  } else {
    fail("unknown sizing mode: " + sizing + " (expected snr|exact-fit)");
  }

  save_bootstrap_plan(out_path, plan);
  std::cout << "registers: " << plan.registers.registers.size() << " ("
            << plan.registers.total_bits() << " bits)\n";
  return 0;
}

int cmd_simulate(const std::string& strategy_token, const std::string& plan_path,
                 const std::string& cost_path, const std::string& switch_path,
                 const std::string& out_path, const std::string& mode, uint64_t seed,
                 double overprovision, int train_windows, const std::string& report_dir,
                 bool svg) {
  SimParams params;
  params.strategy = parse_strategy(strategy_token);
  params.sw = load_switch(switch_path);
  params.load.mode = parse_load_mode(mode);
  params.train_windows = train_windows;
  params.overprovision = overprovision;
  params.seed = seed;
  if (!plan_path.empty()) params.plan = load_bootstrap_plan(plan_path);

  CostHistory history = load_cost_history(cost_path);
  SimulationRun run = simulate(history, params);
  save_run(run, out_path);
  if (!report_dir.empty()) emit_report(run, report_dir, svg);
  std::cout << "strategy: " << run.strategy << "\n"
            << "windows: " << run.windows.size() << "\n"
            << "total load: " << format_number(run.total_load) << "\n"
            << "median load: " << format_number(run.median_load) << "\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& run_paths, const std::string& out_dir, bool svg) {
  std::vector<SimulationRun> runs;
  for (const auto& path : run_paths) runs.push_back(load_run(path));
  compare_runs(runs, out_dir, svg);
  std::cout << "compared " << runs.size() << " runs into " << out_dir << "\n";
  return 0;
}

int cmd_synth(const std::string& scenario, const std::string& out_path, uint64_t seed,
              int windows, int flip_window) {
  if (scenario != "bimodal") fail("unknown scenario: " + scenario + " (expected bimodal)");
  BimodalConfig cfg;
  cfg.seed = seed;
  if (windows > 0) cfg.windows = windows;
  if (flip_window >= 0) cfg.flip_window = flip_window;
  auto records = synth_bimodal(cfg);
  write_trace_csv(out_path, records);
  std::cout << "packets: " << records.size() << "\n";
  return 0;
}

int cmd_predict_eval(const std::string& cost_path, int train_windows,
                     const std::string& out_path) {
  CostHistory history = load_cost_history(cost_path);
  if (static_cast<size_t>(train_windows) >= history.size()) {
    fail("not enough windows to evaluate beyond the training prefix");
  }
  CostPredictor predictor;
  for (int w = 0; w < train_windows; ++w) predictor.observe(history[static_cast<size_t>(w)]);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) fail("cannot write " + out_path);
  out << "window,op,pred_bits,true_bits,pred_n_in,true_n_in,pred_n_out,true_n_out\n";
  std::vector<double> rel_errors;
  for (size_t w = static_cast<size_t>(train_windows); w < history.size(); ++w) {
    if (predictor.ready()) {
      auto predicted = predictor.predict();
      for (const auto& [key, truth] : history[w].entries) {
        auto it = predicted.find(key);
        if (it == predicted.end()) continue;
        const CostEntry& p = it->second;
        out << history[w].window << "," << op_label(key) << "," << p.bits << "," << truth.bits
            << "," << p.n_in << "," << truth.n_in << "," << p.n_out << "," << truth.n_out
            << "\n";
        if (truth.bits > 0) {
          rel_errors.push_back(std::abs(static_cast<double>(p.bits - truth.bits)) /
                               static_cast<double>(truth.bits));
        }
      }
    }
    predictor.observe(history[w]);
  }
  if (!rel_errors.empty()) {
    std::cout << "median relative state-size error: " << format_number(median(rel_errors))
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query planning and window simulation for hybrid switch/stream telemetry"};
  app.require_subcommand(1);

  std::string queries_path, trace_path, cost_path, switch_path, plan_path, out_path, out_dir;
  std::string refinement = "tom", sizing = "snr", strategy, mode = "average";
  std::string scenario = "bimodal", report_dir;
  std::vector<std::string> run_paths;
  double window_sec = 3.0, overprovision = 0.0;
  int train_windows = 10, windows = 0, flip_window = -1;
  uint64_t seed = 0;
  bool svg = false;

  auto* gen = app.add_subcommand("gen-cost-matrix",
                                 "Execute queries over a packet trace, one cost matrix per window");
  gen->add_option("--queries", queries_path, "Query set JSON")->required();
  gen->add_option("--trace", trace_path, "Packet trace CSV")->required();
  gen->add_option("--out", out_path, "Output cost-matrix JSON")->required();
  gen->add_option("--window-sec", window_sec, "Window length in seconds")->capture_default_str();

  auto* boot = app.add_subcommand("bootstrap", "Select a refinement plan and register layout");
  boot->add_option("--cost", cost_path, "Cost-matrix JSON")->required();
  boot->add_option("--switch", switch_path, "Switch config JSON")->required();
  boot->add_option("--out", out_path, "Output plan JSON")->required();
  boot->add_option("--refinement", refinement, "Plan selection: tom|finest|sonata")
      ->capture_default_str();
  boot->add_option("--sizing", sizing, "Register sizing: snr|exact-fit")->capture_default_str();
  boot->add_option("--overprovision", overprovision, "Extra sizing share, e.g. 0.25")
      ->capture_default_str();
  boot->add_option("--train-windows", train_windows, "Training prefix length")
      ->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Replay a strategy over the evaluation windows");
  sim->add_option("--strategy", strategy, "Planning strategy token")->required();
  sim->add_option("--plan", plan_path, "Bootstrap plan JSON (optional)");
  sim->add_option("--cost", cost_path, "Cost-matrix JSON")->required();
  sim->add_option("--switch", switch_path, "Switch config JSON")->required();
  sim->add_option("--out", out_path, "Output run JSON")->required();
  sim->add_option("--mode", mode, "Load model: average|best|worst")->capture_default_str();
  sim->add_option("--seed", seed, "Random seed (forecast clustering)")->capture_default_str();
  sim->add_option("--overprovision", overprovision, "Extra sizing share for SONATA_OP")
      ->capture_default_str();
  sim->add_option("--train-windows", train_windows, "Training prefix length")
      ->capture_default_str();
  sim->add_option("--report", report_dir, "Also emit report CSVs into this directory");
  sim->add_flag("--svg", svg, "Emit SVG charts with reports");

  auto* cmp = app.add_subcommand("compare", "Merge several run files into comparison tables");
  cmp->add_option("--runs", run_paths, "Run JSON files")->required()->expected(-1);
  cmp->add_option("--out", out_dir, "Output directory")->required();
  cmp->add_flag("--svg", svg, "Emit an SVG chart");

  auto* syn = app.add_subcommand("synth", "Generate a synthetic packet trace");
  syn->add_option("--scenario", scenario, "Scenario name: bimodal")->capture_default_str();
  syn->add_option("--out", out_path, "Output trace CSV")->required();
  syn->add_option("--seed", seed, "Random seed")->capture_default_str();
  syn->add_option("--windows", windows, "Override window count");
  syn->add_option("--flip-window", flip_window, "Override phase-flip window");

  auto* pred = app.add_subcommand("predict-eval", "Evaluate next-window cost forecasts");
  pred->add_option("--cost", cost_path, "Cost-matrix JSON")->required();
  pred->add_option("--train-windows", train_windows, "Training prefix length")
      ->capture_default_str();
  pred->add_option("--out", out_path, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_cost_matrix(queries_path, trace_path, out_path, window_sec);
    if (boot->parsed()) {
      return cmd_bootstrap(cost_path, switch_path, out_path, refinement, sizing, overprovision,
                           train_windows);
    }
    if (sim->parsed()) {
      return cmd_simulate(strategy, plan_path, cost_path, switch_path, out_path, mode, seed,
                          overprovision, train_windows, report_dir, svg);
    }
    if (cmp->parsed()) return cmd_compare(run_paths, out_dir, svg);
    if (syn->parsed()) return cmd_synth(scenario, out_path, seed, windows, flip_window);
    if (pred->parsed()) return cmd_predict_eval(cost_path, train_windows, out_path);
  } catch (const qplan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
