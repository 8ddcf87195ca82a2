// SPDX-License-Identifier: Apache-2.0
#include "qplan/cost_matrix.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qplan {

CostMatrixGenerator::CostMatrixGenerator(std::vector<QuerySpec> queries, WorkloadConfig cfg)
    : queries_(std::move(queries)), cfg_(std::move(cfg)) {
  if (queries_.empty()) fail("cost matrix generator needs at least one query");
  for (const auto& q : queries_) validate_query(q);
}

CostMatrix CostMatrixGenerator::step(std::span<const PacketRecord> window_records) {
  CostMatrix cm;
  cm.window = window_++;

  std::vector<Tuple> base;
  base.reserve(window_records.size());
  for (const auto& r : window_records) base.push_back(tuple_of(r));

  std::map<std::pair<int, int>, std::vector<int64_t>> next_outputs;
  for (const auto& q : queries_) {
    int last_op = static_cast<int>(stateful_operators(q).size()) - 1;
    for (size_t a = 0; a < q.levels.size(); ++a) {
      for (size_t b = a + 1; b < q.levels.size(); ++b) {
        int i = q.levels[a];
        int j = q.levels[b];
        std::optional<std::vector<int64_t>> allow;
        if (i != q.levels.front() && cm.window > 0) {
          auto it = prev_outputs_.find({q.qid, i});
          allow = it == prev_outputs_.end() ? std::vector<int64_t>{} : it->second;
        }
        QuerySpec refined = refine_query(q, i, j, last_op, allow);
        PipelineResult res = execute_pipeline(refined, base);
        if (res.stateful.size() != static_cast<size_t>(last_op) + 1) {
          fail("refined pipeline lost stateful operators");
        }
        for (int k = 0; k <= last_op; ++k) {
          const auto& sc = res.stateful[static_cast<size_t>(k)];
          int64_t entry_bits =
              sc.is_reduce ? cfg_.reduce_entry_bits : cfg_.distinct_entry_bits;
          cm.entries[OpKey{q.qid, i, j, k}] = CostEntry{sc.keys * entry_bits, sc.n_in, sc.n_out};
        }
        // Root-transition outputs are the allow-sets for the next window.
        if (i == q.levels.front()) {
          next_outputs[{q.qid, j}] = output_key_set(res, q.refinement_key);
        }
      }
    }
  }
  prev_outputs_ = std::move(next_outputs);
  return cm;
}

CostHistory generate_cost_matrices(const std::vector<QuerySpec>& queries,
                                   const std::vector<PacketRecord>& records,
                                   const WorkloadConfig& cfg) {
  CostMatrixGenerator gen(queries, cfg);
  CostHistory history;
  for (auto window : split_windows(records, cfg)) history.push_back(gen.step(window));
  return history;
}

int64_t expected_entry_count(const std::vector<QueryMeta>& metas) {
  int64_t total = 0;
  for (const auto& m : metas) {
    int64_t n = static_cast<int64_t>(m.levels.size());
    total += n * (n - 1) / 2 * m.stateful_ops;
  }
  return total;
}

std::vector<QueryMeta> derive_meta(const CostHistory& history) {
  if (history.empty()) fail("cannot derive query metadata from an empty cost history");
  std::map<int, QueryMeta> metas;
  for (const auto& cm : history) {
    for (const auto& [key, entry] : cm.entries) {
      auto& m = metas[key.qid];
      m.qid = key.qid;
      for (int l : {key.prior_level, key.level}) {
        if (std::find(m.levels.begin(), m.levels.end(), l) == m.levels.end()) {
          m.levels.push_back(l);
        }
      }
      if (key.op_index + 1 > m.stateful_ops) m.stateful_ops = key.op_index + 1;
    }
  }
  std::vector<QueryMeta> out;
  for (auto& [qid, m] : metas) {
    std::sort(m.levels.begin(), m.levels.end());
    out.push_back(std::move(m));
  }
  return out;
}

CovReport cov_report(const CostHistory& history, const std::vector<OpKey>& keys) {
  if (history.empty()) fail("cov_report needs at least one window");
  std::vector<OpKey> selected = keys;
  if (selected.empty()) {
    std::map<OpKey, bool> all;
    for (const auto& cm : history) {
      for (const auto& [key, entry] : cm.entries) all[key] = true;
    }
    for (const auto& [key, unused] : all) selected.push_back(key);
  }
  CovReport report;
  std::vector<double> totals(history.size(), 0.0);
  for (const auto& key : selected) {
    std::vector<double> series;
    series.reserve(history.size());
    for (size_t w = 0; w < history.size(); ++w) {
      auto it = history[w].entries.find(key);
      double bits = it == history[w].entries.end() ? 0.0 : static_cast<double>(it->second.bits);
      series.push_back(bits);
      totals[w] += bits;
    }
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(series.size());
    report.mean_bits[key] = mean;
    report.cov_bits[key] = coefficient_of_variation(series);
  }
  report.aggregate_cov = coefficient_of_variation(totals);
  return report;
}

namespace {
using nlohmann::ordered_json;
}

std::string cost_history_to_json(const CostHistory& history) {
  ordered_json doc = ordered_json::array();
  for (const auto& cm : history) {
    ordered_json jm;
    jm["window"] = cm.window;
    ordered_json entries = ordered_json::array();
    for (const auto& [key, e] : cm.entries) {
      ordered_json je;
      je["qid"] = key.qid;
      je["i"] = key.prior_level;
      je["j"] = key.level;
      je["k"] = key.op_index;
      je["B"] = e.bits;
      je["n_in"] = e.n_in;
      je["n_out"] = e.n_out;
      entries.push_back(std::move(je));
    }
    jm["entries"] = std::move(entries);
    doc.push_back(std::move(jm));
  }
  return doc.dump(2) + "\n";
}

CostHistory cost_history_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("cost matrix file is not valid JSON: ") + e.what());
  }
  // Accept either a single matrix object or an array of them.
  if (doc.is_object()) doc = nlohmann::json::array({doc});
  if (!doc.is_array()) fail("cost matrix file must be an object or array");
  CostHistory history;
  try {
    for (const auto& jm : doc) {
      CostMatrix cm;
      cm.window = jm.at("window").get<int>();
      for (const auto& je : jm.at("entries")) {
        OpKey key{je.at("qid").get<int>(), je.at("i").get<int>(), je.at("j").get<int>(),
                  je.at("k").get<int>()};
        CostEntry e{je.at("B").get<int64_t>(), je.at("n_in").get<int64_t>(),
                    je.at("n_out").get<int64_t>()};
        if (e.bits < 0 || e.n_in < 0 || e.n_out < 0) {
          fail("negative cost entry at " + to_string(key));
        }
        if (!cm.entries.emplace(key, e).second) fail("duplicate cost entry " + to_string(key));
      }
      history.push_back(std::move(cm));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("malformed cost matrix document: ") + e.what());
  }
  if (history.empty()) fail("cost matrix file holds no windows");
  return history;
}

void save_cost_history(const std::string& path, const CostHistory& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write cost matrix file: " + path);
  out << cost_history_to_json(history);
  if (!out) fail("failed writing cost matrix file: " + path);
}

CostHistory load_cost_history(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open cost matrix file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return cost_history_from_json(ss.str());
}

}  // namespace qplan
