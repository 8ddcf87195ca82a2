// SPDX-License-Identifier: Apache-2.0
#include "qplan/goa.hpp"

#include <algorithm>
#include <climits>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qplan {

namespace {

using Int128 = boost::multiprecision::int128_t;
using Int256 = boost::multiprecision::int256_t;

// Value ceiling keeping all cross-multiplied score comparisons inside 256 bits.
constexpr int64_t kMaxValue = int64_t{1} << 40;

}  // namespace

int GoaInstance::chain_count() const {
  int count = 0;
  for (const auto& op : operators) count = std::max(count, op.chain + 1);
  return count;
}

std::vector<std::vector<int>> GoaInstance::chains() const {
  std::vector<std::vector<int>> out(static_cast<size_t>(chain_count()));
  for (const auto& op : operators) {
    auto& chain = out[static_cast<size_t>(op.chain)];
    if (chain.size() <= static_cast<size_t>(op.pos)) chain.resize(static_cast<size_t>(op.pos) + 1, -1);
    chain[static_cast<size_t>(op.pos)] = op.id;
  }
  return out;
}

void validate_instance(const GoaInstance& inst) {
  for (size_t i = 0; i < inst.registers.size(); ++i) {
    const auto& r = inst.registers[i];
    if (i > 0 && inst.registers[i - 1].id >= r.id) fail("registers must be sorted by unique id");
    if (r.bits <= 0 || r.bits > kMaxValue) fail("register size out of range");
    if (r.stage < 0) fail("register stage must be non-negative");
  }
  for (size_t i = 0; i < inst.operators.size(); ++i) {
    const auto& op = inst.operators[i];
    if (op.id != static_cast<int>(i)) fail("operator ids must be dense and ordered");
    if (op.size <= 0 || op.size > kMaxValue) fail("operator size out of range");
    if (op.sat_cost < 0 || op.unsat_cost < 0 || op.unsat_cost > kMaxValue) {
      fail("operator costs out of range");
    }
    if (op.sat_cost > op.unsat_cost) {
      fail("operator " + std::to_string(op.id) + ": satisfied cost exceeds unsatisfied cost");
    }
  }
  for (const auto& chain : inst.chains()) {
    if (chain.empty()) fail("empty dependency chain");
    for (int op_id : chain) {
      if (op_id < 0) fail("chain positions must be dense");
    }
  }
}

Assignment Assignment::empty(const GoaInstance& inst) {
  Assignment a;
  a.reg_to_op.assign(inst.registers.size(), -1);
  return a;
}

int64_t Assignment::assigned_bits(const GoaInstance& inst, int op_id) const {
  int64_t total = 0;
  for (size_t r = 0; r < reg_to_op.size(); ++r) {
    if (reg_to_op[r] == op_id) total += inst.registers[r].bits;
  }
  return total;
}

int64_t Assignment::total_assigned_bits(const GoaInstance& inst) const {
  int64_t total = 0;
  for (size_t r = 0; r < reg_to_op.size(); ++r) {
    if (reg_to_op[r] >= 0) total += inst.registers[r].bits;
  }
  return total;
}

Ratio satisfaction_ratio(const GoaInstance& inst, const Assignment& a, int op_id) {
  const auto& op = inst.operators.at(static_cast<size_t>(op_id));
  int64_t cap = a.assigned_bits(inst, op_id);
  if (cap >= op.size) return Ratio(1);
  return Ratio(cap, op.size);
}

bool is_satisfied(const GoaInstance& inst, const Assignment& a, int op_id) {
  const auto& op = inst.operators.at(static_cast<size_t>(op_id));
  return a.assigned_bits(inst, op_id) >= op.size;
}

Ratio chain_cost(const GoaInstance& inst, const Assignment& a, int chain) {
  auto chains = inst.chains();
  const auto& ops = chains.at(static_cast<size_t>(chain));
  for (int op_id : ops) {
    const auto& op = inst.operators[static_cast<size_t>(op_id)];
    int64_t cap = std::min(a.assigned_bits(inst, op_id), op.size);
    if (cap < op.size) {
      // sat*rho + unsat*(1-rho) with rho = cap/size, as one exact fraction.
      Ratio num = Ratio(op.sat_cost) * cap + Ratio(op.unsat_cost) * (op.size - cap);
      return num / op.size;
    }
  }
  return Ratio(inst.operators[static_cast<size_t>(ops.back())].sat_cost);
}

Ratio assignment_cost(const GoaInstance& inst, const Assignment& a) {
  Ratio total = 0;
  for (int c = 0; c < inst.chain_count(); ++c) total += chain_cost(inst, a, c);
  return total;
}

bool is_feasible(const GoaInstance& inst, const Assignment& a) {
  if (a.reg_to_op.size() != inst.registers.size()) return false;
  for (size_t r = 0; r < a.reg_to_op.size(); ++r) {
    int op_id = a.reg_to_op[r];
    if (op_id < -1 || op_id >= static_cast<int>(inst.operators.size())) return false;
  }
  auto chains = inst.chains();
  for (const auto& ops : chains) {
    for (size_t p = 1; p < ops.size(); ++p) {
      int child = ops[p];
      int parent = ops[p - 1];
      bool child_has_regs = false;
      int child_lo = INT_MAX, parent_hi = INT_MIN;
      for (size_t r = 0; r < a.reg_to_op.size(); ++r) {
        if (a.reg_to_op[r] == child) {
          child_has_regs = true;
          child_lo = std::min(child_lo, inst.registers[r].stage);
        }
        if (a.reg_to_op[r] == parent) parent_hi = std::max(parent_hi, inst.registers[r].stage);
      }
      if (!child_has_regs) continue;
      if (!is_satisfied(inst, a, parent)) return false;
      if (parent_hi >= child_lo) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Greedy solver.

namespace {

struct SolverState {
  std::vector<int> reg_to_op;     // -1 unassigned
  std::vector<int64_t> op_cap;
  std::vector<int> op_lo, op_hi;  // stage span of the operator's registers
  std::vector<int> stage_free;    // unassigned registers per stage
};

struct Solver {
  const GoaInstance& inst;
  std::vector<std::vector<int>> chains;           // op ids by pos
  std::vector<std::vector<int>> stage_regs;       // reg indices per stage, (bits, id) asc
  int stage_count = 0;

  explicit Solver(const GoaInstance& i) : inst(i), chains(i.chains()) {
    for (const auto& r : inst.registers) stage_count = std::max(stage_count, r.stage + 1);
    stage_regs.resize(static_cast<size_t>(stage_count));
    for (size_t idx = 0; idx < inst.registers.size(); ++idx) {
      stage_regs[static_cast<size_t>(inst.registers[idx].stage)].push_back(static_cast<int>(idx));
    }
    for (auto& regs : stage_regs) {
      std::sort(regs.begin(), regs.end(), [&](int x, int y) {
        const auto& rx = inst.registers[static_cast<size_t>(x)];
        const auto& ry = inst.registers[static_cast<size_t>(y)];
        if (rx.bits != ry.bits) return rx.bits < ry.bits;
        return rx.id < ry.id;
      });
    }
  }

  SolverState initial() const {
    SolverState s;
    s.reg_to_op.assign(inst.registers.size(), -1);
    s.op_cap.assign(inst.operators.size(), 0);
    s.op_lo.assign(inst.operators.size(), INT_MAX);
    s.op_hi.assign(inst.operators.size(), INT_MIN);
    s.stage_free.assign(static_cast<size_t>(stage_count), 0);
    for (const auto& r : inst.registers) s.stage_free[static_cast<size_t>(r.stage)]++;
    return s;
  }

  void assign(SolverState& s, int reg_idx, int op_id) const {
    const auto& r = inst.registers[static_cast<size_t>(reg_idx)];
    s.reg_to_op[static_cast<size_t>(reg_idx)] = op_id;
    s.op_cap[static_cast<size_t>(op_id)] += r.bits;
    s.op_lo[static_cast<size_t>(op_id)] = std::min(s.op_lo[static_cast<size_t>(op_id)], r.stage);
    s.op_hi[static_cast<size_t>(op_id)] = std::max(s.op_hi[static_cast<size_t>(op_id)], r.stage);
    s.stage_free[static_cast<size_t>(r.stage)]--;
  }

  void rebuild(SolverState& s) const {
    s.op_cap.assign(inst.operators.size(), 0);
    s.op_lo.assign(inst.operators.size(), INT_MAX);
    s.op_hi.assign(inst.operators.size(), INT_MIN);
    s.stage_free.assign(static_cast<size_t>(stage_count), 0);
    for (const auto& r : inst.registers) s.stage_free[static_cast<size_t>(r.stage)]++;
    for (size_t idx = 0; idx < s.reg_to_op.size(); ++idx) {
      int op_id = s.reg_to_op[idx];
      if (op_id < 0) continue;
      const auto& r = inst.registers[idx];
      s.op_cap[static_cast<size_t>(op_id)] += r.bits;
      s.op_lo[static_cast<size_t>(op_id)] = std::min(s.op_lo[static_cast<size_t>(op_id)], r.stage);
      s.op_hi[static_cast<size_t>(op_id)] = std::max(s.op_hi[static_cast<size_t>(op_id)], r.stage);
      s.stage_free[static_cast<size_t>(r.stage)]--;
    }
  }

  int first_unsat(const SolverState& s, int chain) const {
    for (int op_id : chains[static_cast<size_t>(chain)]) {
      if (s.op_cap[static_cast<size_t>(op_id)] <
          inst.operators[static_cast<size_t>(op_id)].size) {
        return op_id;
      }
    }
    return -1;
  }

  // Lowest stage holding an unassigned register, strictly above every
  // register of the active operator's parent.
  int chain_active_stage(const SolverState& s, int chain) const {
    int op_id = first_unsat(s, chain);
    if (op_id < 0) return -1;
    const auto& op = inst.operators[static_cast<size_t>(op_id)];
    int lo = 0;
    if (op.pos > 0) {
      int parent = chains[static_cast<size_t>(chain)][static_cast<size_t>(op.pos) - 1];
      int hi = s.op_hi[static_cast<size_t>(parent)];
      lo = hi == INT_MIN ? 0 : hi + 1;
    }
    for (int t = lo; t < stage_count; ++t) {
      if (s.stage_free[static_cast<size_t>(t)] > 0) return t;
    }
    return -1;
  }

  // Assigns one register to the chain's active operator: the smallest one at
  // the active stage that completes it, else the largest available there.
  // Returns {register index, operator id} or {-1, -1} when stuck.
  std::pair<int, int> extend(SolverState& s, int chain) const {
    int op_id = first_unsat(s, chain);
    if (op_id < 0) return {-1, -1};
    int t = chain_active_stage(s, chain);
    if (t < 0) return {-1, -1};
    const auto& op = inst.operators[static_cast<size_t>(op_id)];
    int64_t need = op.size - s.op_cap[static_cast<size_t>(op_id)];
    const auto& regs = stage_regs[static_cast<size_t>(t)];
    int pick = -1;
    for (int idx : regs) {  // (bits, id) ascending: first completer is smallest
      if (s.reg_to_op[static_cast<size_t>(idx)] != -1) continue;
      if (inst.registers[static_cast<size_t>(idx)].bits >= need) {
        pick = idx;
        break;
      }
    }
    if (pick < 0) {
      for (auto it = regs.rbegin(); it != regs.rend(); ++it) {
        if (s.reg_to_op[static_cast<size_t>(*it)] == -1) {
          pick = *it;
          break;
        }
      }
    }
    if (pick < 0) return {-1, -1};
    assign(s, pick, op_id);
    return {pick, op_id};
  }

  // Chain cost as an exact fraction (numerator, denominator).
  std::pair<Int128, int64_t> cost_of(const SolverState& s, int chain) const {
    for (int op_id : chains[static_cast<size_t>(chain)]) {
      const auto& op = inst.operators[static_cast<size_t>(op_id)];
      int64_t cap = std::min(s.op_cap[static_cast<size_t>(op_id)], op.size);
      if (cap < op.size) {
        Int128 num = Int128(op.sat_cost) * cap + Int128(op.unsat_cost) * (op.size - cap);
        return {num, op.size};
      }
    }
    const auto& last = inst.operators[static_cast<size_t>(chains[static_cast<size_t>(chain)].back())];
    return {Int128(last.sat_cost), 1};
  }
};

struct Candidate {
  int chain = -1;
  std::vector<std::pair<int, int>> assigns;  // (register index, operator id), in order
  int64_t dcap = 0;
  Int128 dnum = 0;  // cost(alpha) - cost(e), exact fraction dnum/dden
  Int128 dden = 1;

  bool improves() const { return dnum > 0; }
};

// Higher bang-per-buck first; ties by larger cost drop, then chain id, then
// the register id list.
bool candidate_better(const GoaInstance& inst, const Candidate& a, const Candidate& b) {
  Int256 lhs = Int256(a.dnum) * Int256(b.dden) * b.dcap;
  Int256 rhs = Int256(b.dnum) * Int256(a.dden) * a.dcap;
  if (lhs != rhs) return lhs > rhs;
  Int256 la = Int256(a.dnum) * Int256(b.dden);
  Int256 lb = Int256(b.dnum) * Int256(a.dden);
  if (la != lb) return la > lb;
  if (a.chain != b.chain) return a.chain < b.chain;
  auto ids = [&](const Candidate& c) {
    std::vector<int> v;
    for (const auto& [idx, op] : c.assigns) {
      v.push_back(inst.registers[static_cast<size_t>(idx)].id);
    }
    return v;
  };
  return ids(a) < ids(b);
}

}  // namespace

Assignment greedy_map(const GoaInstance& inst, bool enhanced) {
  validate_instance(inst);
  Solver solver(inst);
  SolverState state = solver.initial();
  std::set<int> undone;
  const size_t max_iter = (inst.registers.size() + 2) * (static_cast<size_t>(solver.stage_count) + 2);

  for (size_t iter = 0; iter < max_iter + 1; ++iter) {
    // Group unsatisfied chains by their active stage.
    std::map<int, std::vector<int>> by_stage;
    for (size_t c = 0; c < solver.chains.size(); ++c) {
      int t = solver.chain_active_stage(state, static_cast<int>(c));
      if (t >= 0) by_stage[t].push_back(static_cast<int>(c));
    }
    if (by_stage.empty()) break;
    const int global_before = by_stage.begin()->first;

    // Lowest stage first; fall through to later stages only when nothing
    // there improves the cost.
    bool applied = false;
    for (const auto& [t, chain_ids] : by_stage) {
      std::optional<Candidate> best;
      for (int c : chain_ids) {
        auto [base_num, base_den] = solver.cost_of(state, c);
        SolverState scratch = state;
        Candidate cand;
        cand.chain = c;
        while (solver.first_unsat(scratch, c) >= 0) {
          auto [reg_idx, op_id] = solver.extend(scratch, c);
          if (reg_idx < 0) break;
          cand.assigns.emplace_back(reg_idx, op_id);
          cand.dcap += inst.registers[static_cast<size_t>(reg_idx)].bits;
          auto [num, den] = solver.cost_of(scratch, c);
          cand.dnum = base_num * den - num * base_den;
          cand.dden = Int128(base_den) * den;
          if (!best || candidate_better(inst, cand, *best)) best = cand;
        }
      }
      if (best && best->improves()) {
        for (const auto& [reg_idx, op_id] : best->assigns) {
          solver.assign(state, reg_idx, op_id);
        }
        applied = true;
        break;
      }
    }
    if (!applied) break;

    if (enhanced) {
      int global_after = INT_MAX;
      for (size_t c = 0; c < solver.chains.size(); ++c) {
        int t = solver.chain_active_stage(state, static_cast<int>(c));
        if (t >= 0) global_after = std::min(global_after, t);
      }
      if (global_after != INT_MAX && global_after > global_before &&
          !undone.contains(global_after)) {
        undone.insert(global_after);
        for (size_t idx = 0; idx < state.reg_to_op.size(); ++idx) {
          if (state.reg_to_op[idx] >= 0 && inst.registers[idx].stage >= global_after) {
            state.reg_to_op[idx] = -1;
          }
        }
        solver.rebuild(state);
      }
    }
  }

  Assignment result;
  result.reg_to_op = std::move(state.reg_to_op);
  return result;
}

// ---------------------------------------------------------------------------
// Exact solver (guarded exhaustive search).

namespace {

struct ExactContext {
  const GoaInstance& inst;
  std::vector<std::vector<int>> chains;
  std::vector<int> parent;  // per op id, -1 for chain heads
  std::vector<int> child;   // per op id, -1 for chain tails

  ExactContext(const GoaInstance& i, std::vector<std::vector<int>> c)
      : inst(i), chains(std::move(c)) {}
  // Scaled-integer cost path: valid when lcm of sizes stays small.
  int64_t lcm = 1;
  bool fast = true;

  std::vector<int> reg_to_op;
  std::vector<int64_t> op_cap;
  std::vector<int> op_lo, op_hi;

  bool have_best = false;
  std::vector<int> best_map;
  Int128 best_fast = 0;
  Ratio best_exact;
};

Int128 leaf_cost_fast(const ExactContext& ctx) {
  Int128 total = 0;
  for (const auto& ops : ctx.chains) {
    bool done = false;
    for (int op_id : ops) {
      const auto& op = ctx.inst.operators[static_cast<size_t>(op_id)];
      int64_t cap = std::min(ctx.op_cap[static_cast<size_t>(op_id)], op.size);
      if (cap < op.size) {
        Int128 num = Int128(op.sat_cost) * cap + Int128(op.unsat_cost) * (op.size - cap);
        total += num * (ctx.lcm / op.size);
        done = true;
        break;
      }
    }
    if (!done) {
      const auto& last = ctx.inst.operators[static_cast<size_t>(ops.back())];
      total += Int128(last.sat_cost) * ctx.lcm;
    }
  }
  return total;
}

Ratio leaf_cost_exact(const ExactContext& ctx) {
  Ratio total = 0;
  for (const auto& ops : ctx.chains) {
    bool done = false;
    for (int op_id : ops) {
      const auto& op = ctx.inst.operators[static_cast<size_t>(op_id)];
      int64_t cap = std::min(ctx.op_cap[static_cast<size_t>(op_id)], op.size);
      if (cap < op.size) {
        Ratio num = Ratio(op.sat_cost) * cap + Ratio(op.unsat_cost) * (op.size - cap);
        total += num / op.size;
        done = true;
        break;
      }
    }
    if (!done) total += Ratio(ctx.inst.operators[static_cast<size_t>(ops.back())].sat_cost);
  }
  return total;
}

void exact_recurse(ExactContext& ctx, size_t reg_idx) {
  if (reg_idx == ctx.inst.registers.size()) {
    // Full feasibility: any operator holding registers needs its parent
    // fully satisfied (stage order was enforced incrementally).
    for (const auto& op : ctx.inst.operators) {
      if (ctx.op_lo[static_cast<size_t>(op.id)] == INT_MAX) continue;
      int p = ctx.parent[static_cast<size_t>(op.id)];
      if (p >= 0 &&
          ctx.op_cap[static_cast<size_t>(p)] < ctx.inst.operators[static_cast<size_t>(p)].size) {
        return;
      }
    }
    if (ctx.fast) {
      Int128 cost = leaf_cost_fast(ctx);
      if (!ctx.have_best || cost < ctx.best_fast) {
        ctx.have_best = true;
        ctx.best_fast = cost;
        ctx.best_map = ctx.reg_to_op;
      }
    } else {
      Ratio cost = leaf_cost_exact(ctx);
      if (!ctx.have_best || cost < ctx.best_exact) {
        ctx.have_best = true;
        ctx.best_exact = cost;
        ctx.best_map = ctx.reg_to_op;
      }
    }
    return;
  }

  const auto& reg = ctx.inst.registers[reg_idx];
  // Unassigned first keeps the first minimum lexicographically smallest.
  exact_recurse(ctx, reg_idx + 1);
  for (const auto& op : ctx.inst.operators) {
    int p = ctx.parent[static_cast<size_t>(op.id)];
    if (p >= 0 && ctx.op_hi[static_cast<size_t>(p)] != INT_MIN &&
        ctx.op_hi[static_cast<size_t>(p)] >= reg.stage) {
      continue;  // some parent register would not sit strictly below this one
    }
    int c = ctx.child[static_cast<size_t>(op.id)];
    if (c >= 0 && ctx.op_lo[static_cast<size_t>(c)] != INT_MAX &&
        ctx.op_lo[static_cast<size_t>(c)] <= reg.stage) {
      continue;  // some child register would not sit strictly above this one
    }
    ctx.reg_to_op[reg_idx] = op.id;
    int64_t cap0 = ctx.op_cap[static_cast<size_t>(op.id)];
    int lo0 = ctx.op_lo[static_cast<size_t>(op.id)];
    int hi0 = ctx.op_hi[static_cast<size_t>(op.id)];
    ctx.op_cap[static_cast<size_t>(op.id)] += reg.bits;
    ctx.op_lo[static_cast<size_t>(op.id)] = std::min(lo0, reg.stage);
    ctx.op_hi[static_cast<size_t>(op.id)] = std::max(hi0, reg.stage);
    exact_recurse(ctx, reg_idx + 1);
    ctx.reg_to_op[reg_idx] = -1;
    ctx.op_cap[static_cast<size_t>(op.id)] = cap0;
    ctx.op_lo[static_cast<size_t>(op.id)] = lo0;
    ctx.op_hi[static_cast<size_t>(op.id)] = hi0;
  }
}

}  // namespace

ExactMapResult exact_map(const GoaInstance& inst) {
  validate_instance(inst);
  if (inst.registers.size() > static_cast<size_t>(kExactMapMaxRegisters)) {
    fail("exact_map: instance exceeds the register guard (" +
         std::to_string(kExactMapMaxRegisters) + ")");
  }
  if (inst.operators.size() > static_cast<size_t>(kExactMapMaxOperators)) {
    fail("exact_map: instance exceeds the operator guard (" +
         std::to_string(kExactMapMaxOperators) + ")");
  }
  ExactContext ctx(inst, inst.chains());
  ctx.parent.assign(inst.operators.size(), -1);
  ctx.child.assign(inst.operators.size(), -1);
  for (const auto& ops : ctx.chains) {
    for (size_t p = 1; p < ops.size(); ++p) {
      ctx.parent[static_cast<size_t>(ops[p])] = ops[p - 1];
      ctx.child[static_cast<size_t>(ops[p - 1])] = ops[p];
    }
  }
  for (const auto& op : inst.operators) {
    int64_t g = std::gcd(ctx.lcm, op.size);
    if (ctx.lcm / g > (int64_t{1} << 45) / op.size) {
      ctx.fast = false;
      break;
    }
    ctx.lcm = ctx.lcm / g * op.size;
  }
  ctx.reg_to_op.assign(inst.registers.size(), -1);
  ctx.op_cap.assign(inst.operators.size(), 0);
  ctx.op_lo.assign(inst.operators.size(), INT_MAX);
  ctx.op_hi.assign(inst.operators.size(), INT_MIN);
  exact_recurse(ctx, 0);
  if (!ctx.have_best) fail("exact_map found no feasible assignment");  // unreachable

  ExactMapResult res;
  res.assignment.reg_to_op = ctx.best_map;
  res.cost = ctx.fast ? Ratio(ctx.best_fast) / ctx.lcm : ctx.best_exact;
  return res;
}

GoaInstance build_goa_instance(const std::vector<DependencyChain>& chains,
                               const RegisterConfig& regs,
                               const std::map<OpKey, CostEntry>& costs) {
  GoaInstance inst;
  inst.registers = regs.registers;
  std::sort(inst.registers.begin(), inst.registers.end(),
            [](const Register& a, const Register& b) { return a.id < b.id; });
  int next_id = 0;
  for (size_t c = 0; c < chains.size(); ++c) {
    const auto& chain = chains[c];
    for (size_t p = 0; p < chain.ops.size(); ++p) {
      const OpKey& key = chain.ops[p];
      auto it = costs.find(key);
      if (it == costs.end()) fail("missing cost entry for " + to_string(key));
      const CostEntry& e = it->second;
      GoaOperator op;
      op.id = next_id++;
      op.chain = static_cast<int>(c);
      op.pos = static_cast<int>(p);
      op.size = std::max<int64_t>(e.bits, 1);
      op.unsat_cost = e.n_in;
      op.sat_cost = p + 1 == chain.ops.size() ? e.n_out : 0;
      op.key = key;
      inst.operators.push_back(op);
    }
  }
  validate_instance(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// Fixture serialization.

namespace {
using nlohmann::ordered_json;
}

std::string instance_to_json(const GoaInstance& inst) {
  ordered_json doc;
  ordered_json regs = ordered_json::array();
  for (const auto& r : inst.registers) {
    regs.push_back({{"id", r.id}, {"stage", r.stage}, {"bits", r.bits}});
  }
  doc["registers"] = std::move(regs);
  ordered_json ops = ordered_json::array();
  for (const auto& op : inst.operators) {
    ops.push_back({{"id", op.id},
                   {"chain", op.chain},
                   {"pos", op.pos},
                   {"size", op.size},
                   {"sat_cost", op.sat_cost},
                   {"unsat_cost", op.unsat_cost}});
  }
  doc["operators"] = std::move(ops);
  return doc.dump(2) + "\n";
}

GoaInstance instance_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("instance file is not valid JSON: ") + e.what());
  }
  GoaInstance inst;
  try {
    for (const auto& jr : doc.at("registers")) {
      inst.registers.push_back(Register{jr.at("id").get<int>(), jr.at("stage").get<int>(),
                                        jr.at("bits").get<int64_t>()});
    }
    for (const auto& jo : doc.at("operators")) {
      GoaOperator op;
      op.id = jo.at("id").get<int>();
      op.chain = jo.at("chain").get<int>();
      op.pos = jo.at("pos").get<int>();
      op.size = jo.at("size").get<int64_t>();
      op.sat_cost = jo.at("sat_cost").get<int64_t>();
      op.unsat_cost = jo.at("unsat_cost").get<int64_t>();
      inst.operators.push_back(op);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("malformed instance document: ") + e.what());
  }
  validate_instance(inst);
  return inst;
}

GoaInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open instance file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

std::string assignment_to_json(const GoaInstance& inst, const Assignment& a) {
  ordered_json doc;
  ordered_json items = ordered_json::array();
  for (size_t r = 0; r < a.reg_to_op.size(); ++r) {
    if (a.reg_to_op[r] < 0) continue;
    items.push_back({{"reg", inst.registers[r].id}, {"op", a.reg_to_op[r]}});
  }
  doc["assignment"] = std::move(items);
  return doc.dump(2) + "\n";
}

Assignment assignment_from_json(const GoaInstance& inst, const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("assignment file is not valid JSON: ") + e.what());
  }
  Assignment a = Assignment::empty(inst);
  try {
    for (const auto& item : doc.at("assignment")) {
      int reg_id = item.at("reg").get<int>();
      int op_id = item.at("op").get<int>();
      bool found = false;
      for (size_t r = 0; r < inst.registers.size(); ++r) {
        if (inst.registers[r].id == reg_id) {
          a.reg_to_op[r] = op_id;
          found = true;
          break;
        }
      }
      if (!found) fail("assignment references unknown register " + std::to_string(reg_id));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("malformed assignment document: ") + e.what());
  }
  return a;
}

}  // namespace qplan
