// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <vector>

#include "qplan/cost_matrix.hpp"
#include "qplan/goa.hpp"
#include "qplan/query.hpp"

namespace qplan {

//! How a partially provisioned operator degrades: on average each key is
//! evicted proportionally to the missing share, in the best case only the
//! overflowing keys spill once, in the worst case every resident key is
//! evicted by a colliding one.
enum class LoadMode { Average, Best, Worst };

LoadMode parse_load_mode(const std::string& name);
std::string to_string(LoadMode mode);

struct LoadConfig {
  LoadMode mode = LoadMode::Average;
  int64_t key_bits = 32;  // bits of state one key occupies, for Best/Worst
};

//! Tuples an operator sends to the stream processor given its true demand
//! (n_in, n_out, required bits) and the capacity actually allocated.
//! Fully provisioned (or zero-demand) operators emit their true output.
//! All arithmetic is exact; results are clamped to [0, n_in].
Ratio operator_load(int64_t n_in, int64_t n_out, int64_t b_req, int64_t b_alloc,
                    const LoadConfig& cfg);
Ratio operator_load(const CostEntry& entry, int64_t b_alloc, const LoadConfig& cfg);

struct LoadEstimate {
  std::map<OpKey, Ratio> per_operator;
  Ratio total = 0;
};

//! Per-register allocation folded to per-operator totals.
std::map<OpKey, int64_t> alloc_from_assignment(const GoaInstance& inst, const Assignment& a);

//! Stream-processor load of a window: each chain contributes the load of its
//! first under-provisioned operator (everything behind it leaves the switch,
//! so later operators contribute nothing); fully provisioned chains
//! contribute the final operator's true output. Demands come from the true
//! cost entries; a chain operator missing from `costs` is an error.
LoadEstimate assignment_load(const std::vector<DependencyChain>& chains,
                             const std::map<OpKey, int64_t>& alloc_bits,
                             const std::map<OpKey, CostEntry>& costs,
                             const LoadConfig& cfg);

}  // namespace qplan
