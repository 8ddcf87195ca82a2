// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "qplan/pipeline.hpp"
#include "qplan/query.hpp"
#include "qplan/trace.hpp"

namespace qplan {

//! Memory and tuple counts for one stateful operator instance in one window.
struct CostEntry {
  int64_t bits = 0;   // state size: distinct keys times per-entry bits
  int64_t n_in = 0;   // tuples entering the operator
  int64_t n_out = 0;  // tuples leaving the operator
};

struct CostMatrix {
  int window = 0;
  std::map<OpKey, CostEntry> entries;
};

using CostHistory = std::vector<CostMatrix>;

//! Evaluates every (query, prior level, level, stateful op) variant per
//! window. Level-j variants in window w admit only keys whose level-i prefix
//! appeared in the level-i outputs of window w-1 (universe in the first
//! window and for the root prior).
class CostMatrixGenerator {
 public:
  CostMatrixGenerator(std::vector<QuerySpec> queries, WorkloadConfig cfg);

  CostMatrix step(std::span<const PacketRecord> window_records);

  const std::vector<QuerySpec>& queries() const { return queries_; }

 private:
  std::vector<QuerySpec> queries_;
  WorkloadConfig cfg_;
  int window_ = 0;
  // Level outputs of the previous window, per (qid, level).
  std::map<std::pair<int, int>, std::vector<int64_t>> prev_outputs_;
};

CostHistory generate_cost_matrices(const std::vector<QuerySpec>& queries,
                                   const std::vector<PacketRecord>& records,
                                   const WorkloadConfig& cfg);

//! Expected entry count: sum over queries of C(|levels|,2) * stateful_ops.
int64_t expected_entry_count(const std::vector<QueryMeta>& metas);

//! Recovers the planner-facing query shapes from a cost history.
std::vector<QueryMeta> derive_meta(const CostHistory& history);

struct CovReport {
  std::map<OpKey, double> mean_bits;
  std::map<OpKey, double> cov_bits;  // population stddev over mean, 0 if mean 0
  double aggregate_cov = 0.0;        // CoV of the per-window total bits
};

//! CoV of per-operator state size across windows. When `keys` is non-empty the
//! report is restricted to those operators.
CovReport cov_report(const CostHistory& history, const std::vector<OpKey>& keys = {});

void save_cost_history(const std::string& path, const CostHistory& history);
CostHistory load_cost_history(const std::string& path);
std::string cost_history_to_json(const CostHistory& history);
CostHistory cost_history_from_json(const std::string& text);

}  // namespace qplan
