// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "goa_test_helpers.hpp"
#include "qplan/goa.hpp"

using namespace qplan;

namespace {

GoaInstance micro_fixture() { return load_instance(QPLAN_FIXTURES_DIR "/goa_micro.json"); }

Register reg(int id, int stage, int64_t bits) { return Register{id, stage, bits}; }

GoaOperator op(int id, int chain, int pos, int64_t size, int64_t sat, int64_t unsat) {
  GoaOperator o;
  o.id = id;
  o.chain = chain;
  o.pos = pos;
  o.size = size;
  o.sat_cost = sat;
  o.unsat_cost = unsat;
  return o;
}

}  // namespace

TEST_CASE("validate_instance rejects structural defects") {
  GoaInstance good;
  good.registers = {reg(0, 0, 8), reg(1, 1, 16)};
  good.operators = {op(0, 0, 0, 8, 2, 10), op(1, 0, 1, 16, 1, 9)};
  CHECK_NOTHROW(validate_instance(good));

  SUBCASE("duplicate register ids") {
    auto bad = good;
    bad.registers[1].id = 0;
    CHECK_THROWS_AS(validate_instance(bad), Error);
  }
  SUBCASE("operator ids must be dense from zero") {
    auto bad = good;
    bad.operators[1].id = 5;
    CHECK_THROWS_AS(validate_instance(bad), Error);
  }
  SUBCASE("zero-size operators") {
    auto bad = good;
    bad.operators[0].size = 0;
    CHECK_THROWS_AS(validate_instance(bad), Error);
  }
  SUBCASE("satisfied cost above unsatisfied cost") {
    auto bad = good;
    bad.operators[0].sat_cost = 11;
    CHECK_THROWS_AS(validate_instance(bad), Error);
  }
  SUBCASE("chain positions must be dense") {
    auto bad = good;
    bad.operators[1].pos = 2;
    CHECK_THROWS_AS(validate_instance(bad), Error);
  }
  SUBCASE("values beyond the exact-arithmetic bound") {
    auto bad = good;
    bad.registers[0].bits = int64_t{1} << 41;
    CHECK_THROWS_AS(validate_instance(bad), Error);
  }
}

TEST_CASE("satisfaction ratio and chain cost are exact rationals") {
  GoaInstance inst;
  inst.registers = {reg(0, 0, 5)};
  inst.operators = {op(0, 0, 0, 15, 3, 12)};

  auto a = Assignment::empty(inst);
  CHECK(satisfaction_ratio(inst, a, 0) == Ratio(0));
  CHECK(chain_cost(inst, a, 0) == Ratio(12));

  a.reg_to_op[0] = 0;
  CHECK(a.assigned_bits(inst, 0) == 5);
  CHECK(a.total_assigned_bits(inst) == 5);
  CHECK(satisfaction_ratio(inst, a, 0) == Ratio(1, 3));
  CHECK_FALSE(is_satisfied(inst, a, 0));
  // 3 * 1/3 + 12 * 2/3 = 9.
  CHECK(chain_cost(inst, a, 0) == Ratio(9));
  CHECK(assignment_cost(inst, a) == Ratio(9));
}

TEST_CASE("capacity beyond the operator size saturates at one") {
  GoaInstance inst;
  inst.registers = {reg(0, 0, 64)};
  inst.operators = {op(0, 0, 0, 16, 2, 8)};
  auto a = Assignment::empty(inst);
  a.reg_to_op[0] = 0;
  CHECK(satisfaction_ratio(inst, a, 0) == Ratio(1));
  CHECK(is_satisfied(inst, a, 0));
  CHECK(chain_cost(inst, a, 0) == Ratio(2));
}

TEST_CASE("a chain is costed at its first unsatisfied operator") {
  GoaInstance inst;
  inst.registers = {reg(0, 0, 8), reg(1, 1, 4)};
  inst.operators = {op(0, 0, 0, 8, 3, 10), op(1, 0, 1, 8, 1, 6)};

  // Nothing assigned: the head operator dominates.
  auto a = Assignment::empty(inst);
  CHECK(chain_cost(inst, a, 0) == Ratio(10));

  // Head satisfied, tail half-provisioned: 1 * 1/2 + 6 * 1/2.
  a.reg_to_op = {0, 1};
  CHECK(chain_cost(inst, a, 0) == Ratio(7, 2));

  // Fully satisfied chains contribute the tail's satisfied cost.
  inst.registers[1].bits = 8;
  CHECK(chain_cost(inst, a, 0) == Ratio(1));
}

TEST_CASE("feasibility enforces parent satisfaction and stage ordering") {
  GoaInstance inst;
  inst.registers = {reg(0, 0, 8), reg(1, 1, 8), reg(2, 2, 8)};
  inst.operators = {op(0, 0, 0, 8, 0, 5), op(1, 0, 1, 8, 0, 5)};

  auto a = Assignment::empty(inst);
  CHECK(is_feasible(inst, a));

  // Child provisioned while the parent is empty.
  a.reg_to_op = {-1, 1, -1};
  CHECK_FALSE(is_feasible(inst, a));

  // Parent satisfied, child strictly above it.
  a.reg_to_op = {0, 1, -1};
  CHECK(is_feasible(inst, a));

  // Parent at or above the child's stage is rejected.
  a.reg_to_op = {1, 0, -1};
  CHECK_FALSE(is_feasible(inst, a));
  a.reg_to_op = {-1, 0, 1};  // parent at stage 1, child at stage 2: fine
  CHECK(is_feasible(inst, a));
  a.reg_to_op = {-1, 1, 0};  // parent above child
  CHECK_FALSE(is_feasible(inst, a));

  // A parent only partially covered cannot have provisioned children.
  inst.operators[0].size = 16;
  a.reg_to_op = {0, 1, -1};
  CHECK_FALSE(is_feasible(inst, a));
}

TEST_CASE("pinned micro instance: greedy matches the exhaustive optimum") {
  auto inst = micro_fixture();

  auto exact = exact_map(inst);
  CHECK(exact.cost == Ratio(1));
  CHECK(exact.assignment.reg_to_op == std::vector<int>{0, 1});

  auto greedy = greedy_map(inst);
  CHECK(is_feasible(inst, greedy));
  CHECK(assignment_cost(inst, greedy) == exact.cost);
  CHECK(greedy.reg_to_op == exact.assignment.reg_to_op);
}

TEST_CASE("greedy ignores extensions that cannot lower the cost") {
  // sat == unsat: every satisfaction level costs the same, so the greedy
  // must not burn registers on it.
  GoaInstance inst;
  inst.registers = {reg(0, 0, 8)};
  inst.operators = {op(0, 0, 0, 8, 5, 5)};
  auto a = greedy_map(inst);
  CHECK(a.reg_to_op == std::vector<int>{-1});
}

TEST_CASE("greedy combines registers within a stage to satisfy a large operator") {
  GoaInstance inst;
  inst.registers = {reg(0, 0, 8), reg(1, 0, 8)};
  inst.operators = {op(0, 0, 0, 16, 2, 10)};
  auto a = greedy_map(inst);
  CHECK(is_feasible(inst, a));
  CHECK(is_satisfied(inst, a, 0));
  CHECK(assignment_cost(inst, a) == Ratio(2));
}

TEST_CASE("greedy walks chains across stages") {
  GoaInstance inst;
  inst.registers = {reg(0, 0, 8), reg(1, 1, 8), reg(2, 2, 16)};
  inst.operators = {op(0, 0, 0, 8, 0, 20), op(1, 0, 1, 16, 2, 18)};
  auto a = greedy_map(inst);
  CHECK(is_feasible(inst, a));
  // Head on stage 0, tail fully served by the stage-2 register.
  CHECK(is_satisfied(inst, a, 0));
  CHECK(is_satisfied(inst, a, 1));
  CHECK(assignment_cost(inst, a) == Ratio(2));
}

TEST_CASE("exact_map breaks ties toward the lexicographically smallest mapping") {
  GoaInstance inst;
  inst.registers = {reg(0, 0, 8), reg(1, 0, 8)};
  inst.operators = {op(0, 0, 0, 8, 1, 9)};
  auto exact = exact_map(inst);
  CHECK(exact.cost == Ratio(1));
  // Either register alone reaches cost 1; unassigned-first ordering keeps
  // register 0 free.
  CHECK(exact.assignment.reg_to_op == std::vector<int>{-1, 0});

  auto ref = test::reference_optimum(inst);
  CHECK(ref.cost == exact.cost);
  CHECK(ref.assignment.reg_to_op == exact.assignment.reg_to_op);
}

TEST_CASE("exact_map refuses oversized instances") {
  GoaInstance inst;
  for (int r = 0; r < kExactMapMaxRegisters + 1; ++r) {
    inst.registers.push_back(reg(r, 0, 8));
  }
  inst.operators = {op(0, 0, 0, 8, 0, 5)};
  CHECK_THROWS_AS(exact_map(inst), Error);
}

TEST_CASE("random micro-instances: greedy is feasible and never beats the optimum") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 500; ++trial) {
    auto inst = test::random_micro_instance(rng);
    CAPTURE(trial);

    auto empty = Assignment::empty(inst);
    Ratio empty_cost = assignment_cost(inst, empty);

    for (bool enhanced : {false, true}) {
      auto greedy = greedy_map(inst, enhanced);
      CAPTURE(enhanced);
      REQUIRE(is_feasible(inst, greedy));
      CHECK(assignment_cost(inst, greedy) <= empty_cost);
    }

    auto exact = exact_map(inst);
    CHECK(assignment_cost(inst, greedy_map(inst)) >= exact.cost);
  }
}

TEST_CASE("exact_map agrees with the brute-force reference") {
  std::mt19937_64 rng(987654321);
  for (int trial = 0; trial < 60; ++trial) {
    auto inst = test::random_micro_instance(rng);
    CAPTURE(trial);

    auto exact = exact_map(inst);
    auto ref = test::reference_optimum(inst);
    CHECK(exact.cost == ref.cost);
    CHECK(exact.assignment.reg_to_op == ref.assignment.reg_to_op);
    CHECK(assignment_cost(inst, exact.assignment) == exact.cost);
  }
}

TEST_CASE("build_goa_instance translates chains and cost entries") {
  std::vector<QueryMeta> metas{QueryMeta{1, {0, 16, 32}, 2}};
  RefinementPlan plan{{1, {0, 16, 32}}};
  auto chains = build_chains(plan, metas);
  REQUIRE(chains.size() == 2);

  RegisterConfig regs;
  regs.registers = {reg(0, 0, 64), reg(1, 1, 64)};

  std::map<OpKey, CostEntry> costs;
  costs[OpKey{1, 0, 16, 0}] = CostEntry{100, 50, 20};
  costs[OpKey{1, 0, 16, 1}] = CostEntry{0, 20, 5};
  costs[OpKey{1, 16, 32, 0}] = CostEntry{200, 30, 25};
  costs[OpKey{1, 16, 32, 1}] = CostEntry{60, 25, 8};

  auto inst = build_goa_instance(chains, regs, costs);
  CHECK(inst.registers.size() == 2);
  REQUIRE(inst.operators.size() == 4);

  // Intermediates spill nothing once satisfied; tails emit their output.
  CHECK(inst.operators[0].size == 100);
  CHECK(inst.operators[0].sat_cost == 0);
  CHECK(inst.operators[0].unsat_cost == 50);
  CHECK(inst.operators[0].key == OpKey{1, 0, 16, 0});
  // Zero-bit state still occupies a unit size so ratios stay defined.
  CHECK(inst.operators[1].size == 1);
  CHECK(inst.operators[1].sat_cost == 5);
  CHECK(inst.operators[1].chain == 0);
  CHECK(inst.operators[2].chain == 1);
  CHECK(inst.operators[3].sat_cost == 8);
  CHECK(inst.operators[3].unsat_cost == 25);

  costs.erase(OpKey{1, 16, 32, 1});
  try {
    build_goa_instance(chains, regs, costs);
    FAIL("expected a missing cost entry error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("(q1, 16->32, op 1)") != std::string::npos);
  }
}

TEST_CASE("instance and assignment JSON round-trips") {
  auto inst = micro_fixture();
  auto text = instance_to_json(inst);
  auto back = instance_from_json(text);
  CHECK(back.registers.size() == inst.registers.size());
  CHECK(back.operators.size() == inst.operators.size());
  CHECK(instance_to_json(back) == text);

  auto a = greedy_map(inst);
  auto atext = assignment_to_json(inst, a);
  auto aback = assignment_from_json(inst, atext);
  CHECK(aback.reg_to_op == a.reg_to_op);

  CHECK_THROWS_AS(instance_from_json("{"), Error);
  CHECK_THROWS_AS(assignment_from_json(inst, "{\"assignment\":[{\"reg\":7,\"op\":0}]}"), Error);
}
