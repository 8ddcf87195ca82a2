// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qplan/cost_matrix.hpp"
#include "qplan/query.hpp"
#include "qplan/switch_config.hpp"

namespace qplan {

//! Exact rational used for satisfaction ratios and costs. Score comparisons
//! inside the solvers cross-multiply in fixed-width integers instead.
using Ratio = boost::multiprecision::cpp_rational;

//! Operator in an assignment instance. Chains partition the operators; `pos`
//! is the operator's rank within its chain (the chain order). The operator at
//! pos-1 is the parent. Satisfied cost never exceeds unsatisfied cost.
struct GoaOperator {
  int id = 0;
  int chain = 0;
  int pos = 0;
  int64_t size = 0;       // bits of state the operator needs
  int64_t sat_cost = 0;   // tuples sent downstream when fully placed
  int64_t unsat_cost = 0; // tuples spilled when not placed at all
  OpKey key;              // originating plan operator, when built from costs
};

struct GoaInstance {
  std::vector<Register> registers;   // sorted by id
  std::vector<GoaOperator> operators;  // sorted by id; ids are dense from 0

  int chain_count() const;
  std::vector<std::vector<int>> chains() const;  // operator ids per chain, by pos
};

void validate_instance(const GoaInstance& inst);

//! Partial mapping register id -> operator id. Registers absent from the map
//! are unassigned.
struct Assignment {
  std::vector<int> reg_to_op;  // index = position in instance register order, -1 unassigned

  static Assignment empty(const GoaInstance& inst);
  int64_t assigned_bits(const GoaInstance& inst, int op_id) const;
  int64_t total_assigned_bits(const GoaInstance& inst) const;
};

//! min(assigned capacity / size, 1) as an exact rational.
Ratio satisfaction_ratio(const GoaInstance& inst, const Assignment& a, int op_id);

bool is_satisfied(const GoaInstance& inst, const Assignment& a, int op_id);

//! Chain cost: the first operator in chain order that is not fully satisfied
//! contributes sat*rho + unsat*(1-rho); if the whole chain is satisfied the
//! last operator contributes its satisfied cost.
Ratio chain_cost(const GoaInstance& inst, const Assignment& a, int chain);
Ratio assignment_cost(const GoaInstance& inst, const Assignment& a);

//! Feasibility: a register mapped to an operator requires the parent to be
//! fully satisfied, every parent register must sit at a strictly lower stage
//! than every child register, and a register serves at most one operator
//! (structural in the representation).
bool is_feasible(const GoaInstance& inst, const Assignment& a);

//! Ladder-based greedy: repeatedly extends the cheapest-per-bit chain at the
//! lowest eligible stage; stops when no extension lowers the cost. The
//! enhanced variant clears later stages whenever the active stage advances
//! and re-runs selection with the full picture.
Assignment greedy_map(const GoaInstance& inst, bool enhanced = true);

inline constexpr int kExactMapMaxRegisters = 12;
inline constexpr int kExactMapMaxOperators = 6;

struct ExactMapResult {
  Assignment assignment;
  Ratio cost;
};

//! Exhaustive optimum over feasible partial assignments. Guarded: at most 12
//! registers and 6 operators. Ties resolve to the lexicographically smallest
//! mapping (registers in id order, unassigned before lower operator ids).
ExactMapResult exact_map(const GoaInstance& inst);

//! Builds the assignment instance for one window: operator sizes come from
//! (possibly predicted) state sizes, the unsatisfied cost is the operator's
//! input volume (a miss spills the whole input past the switch) and the
//! satisfied cost is the chain's final output for last operators, zero for
//! intermediates (their output keeps flowing on the switch).
GoaInstance build_goa_instance(const std::vector<DependencyChain>& chains,
                               const RegisterConfig& regs,
                               const std::map<OpKey, CostEntry>& costs);

std::string instance_to_json(const GoaInstance& inst);
GoaInstance instance_from_json(const std::string& text);
GoaInstance load_instance(const std::string& path);
std::string assignment_to_json(const GoaInstance& inst, const Assignment& a);
Assignment assignment_from_json(const GoaInstance& inst, const std::string& text);

}  // namespace qplan
