// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>

#include "qplan/query.hpp"

using namespace qplan;

namespace {

// SYN-count pipeline: filter tcpFlags==2, reduce by dIP with a >=40 threshold.
QuerySpec syn_query() {
  QuerySpec q;
  q.qid = 1;
  q.refinement_key = FieldId::DIp;
  q.levels = {0, 8, 16, 24, 32};
  q.ops = {
      FilterOp{FieldId::TcpFlags, CmpOp::Eq, 2},
      ReduceOp{{FieldId::DIp}, std::nullopt, Threshold{CmpOp::Ge, 40}},
  };
  return q;
}

// Two stateful stages sharing the refinement key.
QuerySpec two_stage_query() {
  QuerySpec q;
  q.qid = 2;
  q.refinement_key = FieldId::DIp;
  q.levels = {0, 16, 32};
  q.ops = {
      DistinctOp{{FieldId::SIp, FieldId::DIp}},
      ReduceOp{{FieldId::DIp}, std::nullopt, Threshold{CmpOp::Ge, 2}},
  };
  return q;
}

}  // namespace

TEST_CASE("validate_query accepts the well-formed pipelines") {
  CHECK_NOTHROW(validate_query(syn_query()));
  CHECK_NOTHROW(validate_query(two_stage_query()));
}

TEST_CASE("validate_query rejects malformed structure") {
  SUBCASE("levels must start at the root") {
    auto q = syn_query();
    q.levels = {8, 32};
    CHECK_THROWS_AS(validate_query(q), Error);
  }
  SUBCASE("levels must be strictly ascending") {
    auto q = syn_query();
    q.levels = {0, 16, 16, 32};
    CHECK_THROWS_AS(validate_query(q), Error);
  }
  SUBCASE("levels must not exceed the key width") {
    auto q = syn_query();
    q.levels = {0, 8, 40};
    CHECK_THROWS_AS(validate_query(q), Error);
  }
  SUBCASE("refinement key must be hierarchical") {
    auto q = syn_query();
    q.refinement_key = FieldId::DPort;
    CHECK_THROWS_AS(validate_query(q), Error);
  }
  SUBCASE("stateful operators must key on the refinement key") {
    auto q = syn_query();
    std::get<ReduceOp>(q.ops[1]).keys = {FieldId::SIp};
    CHECK_THROWS_AS(validate_query(q), Error);
  }
  SUBCASE("reduce needs keys") {
    auto q = syn_query();
    std::get<ReduceOp>(q.ops[1]).keys.clear();
    CHECK_THROWS_AS(validate_query(q), Error);
  }
  SUBCASE("a query needs at least one stateful operator") {
    QuerySpec q;
    q.qid = 3;
    q.refinement_key = FieldId::DIp;
    q.levels = {0, 32};
    q.ops = {FilterOp{FieldId::Proto, CmpOp::Eq, 6}};
    CHECK_THROWS_AS(validate_query(q), Error);
  }
  SUBCASE("operators may only touch live fields") {
    QuerySpec q;
    q.qid = 4;
    q.refinement_key = FieldId::DIp;
    q.levels = {0, 32};
    q.ops = {
        ProjectOp{{FieldId::DIp}},
        FilterOp{FieldId::SPort, CmpOp::Eq, 80},  // sPort was projected away
        DistinctOp{{FieldId::DIp}},
    };
    CHECK_THROWS_AS(validate_query(q), Error);
  }
}

TEST_CASE("stateful_operators finds pipeline positions") {
  auto q = two_stage_query();
  CHECK(stateful_operators(q) == std::vector<int>{0, 1});
  auto s = syn_query();
  CHECK(stateful_operators(s) == std::vector<int>{1});
  auto m = meta_of(s);
  CHECK(m.qid == 1);
  CHECK(m.levels == s.levels);
  CHECK(m.stateful_ops == 1);
}

TEST_CASE("refine_query synthesizes the level instance") {
  auto q = syn_query();

  SUBCASE("root prior at the finest level keeps the pipeline bare") {
    auto r = refine_query(q, 0, 32, 0, std::nullopt);
    // No allow filter (root prior), no mask (level == key width), then the
    // original pipeline up to and including the reduce.
    REQUIRE(r.ops.size() == 2);
    CHECK(std::holds_alternative<FilterOp>(r.ops[0]));
    CHECK(std::holds_alternative<ReduceOp>(r.ops[1]));
    // The threshold rides along on the kept reduce.
    CHECK(std::get<ReduceOp>(r.ops[1]).threshold.has_value());
  }

  SUBCASE("intermediate level gets an allow filter and a mask") {
    std::vector<int64_t> allow{0x0A000000, 0x0B000000, 0x0A000000};
    auto r = refine_query(q, 8, 16, 0, allow);
    REQUIRE(r.ops.size() == 4);
    const auto& af = std::get<AllowFilterOp>(r.ops[0]);
    CHECK(af.field == FieldId::DIp);
    CHECK(af.mask_bits == 8);
    // Allow-set is deduplicated and sorted.
    CHECK(af.allowed == std::vector<int64_t>{0x0A000000, 0x0B000000});
    const auto& mask = std::get<MaskOp>(r.ops[1]);
    CHECK(mask.field == FieldId::DIp);
    CHECK(mask.mask_bits == 16);
    CHECK(std::holds_alternative<FilterOp>(r.ops[2]));
    CHECK(std::holds_alternative<ReduceOp>(r.ops[3]));
  }

  SUBCASE("truncation drops operators past the requested stateful op") {
    auto q2 = two_stage_query();
    auto r = refine_query(q2, 0, 16, 0, std::nullopt);
    // Mask (16 < 32) plus the distinct; the reduce is truncated away.
    REQUIRE(r.ops.size() == 2);
    CHECK(std::holds_alternative<MaskOp>(r.ops[0]));
    CHECK(std::holds_alternative<DistinctOp>(r.ops[1]));
  }

  SUBCASE("level pair and operator index are validated") {
    CHECK_THROWS_AS(refine_query(q, 16, 8, 0, std::nullopt), Error);
    CHECK_THROWS_AS(refine_query(q, 0, 12, 0, std::nullopt), Error);
    CHECK_THROWS_AS(refine_query(q, 0, 32, 1, std::nullopt), Error);
  }
}

TEST_CASE("plans validate against the query metas") {
  std::vector<QueryMeta> metas{meta_of(syn_query()), meta_of(two_stage_query())};

  auto finest = finest_only_plan(metas);
  CHECK(finest == RefinementPlan{{1, {0, 32}}, {2, {0, 32}}});
  CHECK_NOTHROW(validate_plan(finest, metas));
  CHECK_NOTHROW(validate_plan(RefinementPlan{{1, {0, 8, 32}}, {2, {0, 16, 32}}}, metas));

  // Missing query.
  CHECK_THROWS_AS(validate_plan(RefinementPlan{{1, {0, 32}}}, metas), Error);
  // Level outside the candidate set.
  CHECK_THROWS_AS(validate_plan(RefinementPlan{{1, {0, 12, 32}}, {2, {0, 32}}}, metas), Error);
  // Must start at the root and end at the finest level.
  CHECK_THROWS_AS(validate_plan(RefinementPlan{{1, {8, 32}}, {2, {0, 32}}}, metas), Error);
  CHECK_THROWS_AS(validate_plan(RefinementPlan{{1, {0, 8}}, {2, {0, 32}}}, metas), Error);
  // Not strictly ascending.
  CHECK_THROWS_AS(validate_plan(RefinementPlan{{1, {0, 16, 8, 32}}, {2, {0, 32}}}, metas), Error);
}

TEST_CASE("build_chains emits one chain per level transition") {
  std::vector<QueryMeta> metas{meta_of(syn_query()), meta_of(two_stage_query())};
  RefinementPlan plan{{1, {0, 8, 32}}, {2, {0, 32}}};

  auto chains = build_chains(plan, metas);
  REQUIRE(chains.size() == 3);

  // q1 transition 0->8: one stateful op.
  CHECK(chains[0].chain_id == 0);
  CHECK(chains[0].ops == std::vector<OpKey>{{1, 0, 8, 0}});
  // q1 transition 8->32.
  CHECK(chains[1].chain_id == 1);
  CHECK(chains[1].ops == std::vector<OpKey>{{1, 8, 32, 0}});
  // q2 transition 0->32: both stateful ops, pipeline order.
  CHECK(chains[2].chain_id == 2);
  CHECK(chains[2].ops == std::vector<OpKey>{{2, 0, 32, 0}, {2, 0, 32, 1}});

  // The QuerySpec overload agrees with the meta overload.
  auto via_specs = build_chains(plan, std::vector<QuerySpec>{syn_query(), two_stage_query()});
  REQUIRE(via_specs.size() == chains.size());
  for (size_t i = 0; i < chains.size(); ++i) {
    CHECK(via_specs[i].chain_id == chains[i].chain_id);
    CHECK(via_specs[i].ops == chains[i].ops);
  }
}

TEST_CASE("query JSON parsing") {
  SUBCASE("well-formed document") {
    const char* text = R"([
      {"qid": 7, "refinement_key": "dIP", "levels": [0, 8, 32], "ops": [
        {"kind": "filter", "field": "proto", "op": "==", "value": 17},
        {"kind": "map", "project": ["sIP", "dIP"]},
        {"kind": "distinct"},
        {"kind": "reduce", "keys": ["dIP"], "threshold": {"op": ">=", "value": 3}}
      ]}
    ])";
    auto qs = parse_queries_json(text);
    REQUIRE(qs.size() == 1);
    CHECK(qs[0].qid == 7);
    CHECK(qs[0].refinement_key == FieldId::DIp);
    CHECK(qs[0].levels == std::vector<int>{0, 8, 32});
    REQUIRE(qs[0].ops.size() == 4);
    CHECK(std::get<FilterOp>(qs[0].ops[0]).cmp == CmpOp::Eq);
    CHECK(std::get<ProjectOp>(qs[0].ops[1]).fields ==
          std::vector<FieldId>{FieldId::SIp, FieldId::DIp});
    CHECK(std::get<DistinctOp>(qs[0].ops[2]).keys.empty());
    const auto& red = std::get<ReduceOp>(qs[0].ops[3]);
    REQUIRE(red.threshold.has_value());
    CHECK(red.threshold->cmp == CmpOp::Ge);
    CHECK(red.threshold->value == 3);
  }

  SUBCASE("rejects unknown operator kinds and broken JSON") {
    CHECK_THROWS_AS(parse_queries_json("[{\"qid\":1}]"), Error);
    CHECK_THROWS_AS(parse_queries_json("{\"not\": \"an array\"}"), Error);
    CHECK_THROWS_AS(parse_queries_json("[nope"), Error);
    const char* bad_kind = R"([
      {"qid": 1, "refinement_key": "dIP", "levels": [0, 32], "ops": [
        {"kind": "join", "keys": ["dIP"]}
      ]}
    ])";
    CHECK_THROWS_AS(parse_queries_json(bad_kind), Error);
  }

  SUBCASE("duplicate qids are rejected") {
    const char* text = R"([
      {"qid": 1, "refinement_key": "dIP", "levels": [0, 32], "ops": [
        {"kind": "distinct", "keys": ["dIP"]}
      ]},
      {"qid": 1, "refinement_key": "dIP", "levels": [0, 32], "ops": [
        {"kind": "distinct", "keys": ["dIP"]}
      ]}
    ])";
    CHECK_THROWS_AS(parse_queries_json(text), Error);
  }
}

TEST_CASE("repository query set loads and validates") {
  auto qs = load_queries(QPLAN_DATA_DIR "/queries_standard.json");
  CHECK(qs.size() == 13);
  int stateful = 0;
  for (const auto& q : qs) {
    CHECK_NOTHROW(validate_query(q));
    stateful += static_cast<int>(stateful_operators(q).size());
  }
  CHECK(stateful == 17);
}
