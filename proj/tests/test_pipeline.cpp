// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "qplan/pipeline.hpp"

using namespace qplan;

namespace {

// Packet tuple with the given sIP/dIP; other fields defaulted.
Tuple pkt(int64_t sip, int64_t dip, int64_t proto = 6, int64_t flags = 0, int64_t len = 100) {
  return Tuple{sip, dip, /*sport*/ 1, /*dport*/ 80, proto, len, flags};
}

}  // namespace

TEST_CASE("distinct -> project -> reduce(count) with threshold") {
  // Pairs (a,b),(a,b),(a,c),(c,d) encoded in (sIP,dIP). Dedupe the pairs,
  // keep the first element, count it, and keep counts >= 2: only (a,2)
  // survives, while the operator accounting stays pre-threshold.
  const int64_t a = 1, b = 2, c = 3, d = 4;
  std::vector<Tuple> input{pkt(a, b), pkt(a, b), pkt(a, c), pkt(c, d)};

  QuerySpec q;
  q.qid = 1;
  q.refinement_key = FieldId::SIp;
  q.levels = {0, 32};
  q.ops = {
      DistinctOp{{FieldId::SIp, FieldId::DIp}},
      ProjectOp{{FieldId::SIp}},
      ReduceOp{{FieldId::SIp}, std::nullopt, Threshold{CmpOp::Ge, 2}},
  };

  auto res = execute_pipeline(q, input);

  REQUIRE(res.stateful.size() == 2);
  CHECK_FALSE(res.stateful[0].is_reduce);
  CHECK(res.stateful[0].n_in == 4);
  CHECK(res.stateful[0].n_out == 3);  // (a,b),(a,c),(c,d)
  CHECK(res.stateful[0].keys == 3);

  CHECK(res.stateful[1].is_reduce);
  CHECK(res.stateful[1].n_in == 3);
  CHECK(res.stateful[1].n_out == 2);  // groups a and c, pre-threshold
  CHECK(res.stateful[1].keys == 2);

  CHECK(res.schema == std::vector<FieldId>{FieldId::SIp, FieldId::Count});
  REQUIRE(res.output.size() == 1);
  CHECK(res.output[0] == Tuple{a, 2});
}

TEST_CASE("filter keeps matching tuples only") {
  std::vector<Tuple> input{pkt(1, 1, 6, 2), pkt(2, 2, 6, 16), pkt(3, 3, 17, 0)};
  QuerySpec q;
  q.ops = {FilterOp{FieldId::TcpFlags, CmpOp::Eq, 2}, DistinctOp{{FieldId::SIp}}};
  auto res = execute_pipeline(q, input);
  REQUIRE(res.output.size() == 1);
  CHECK(res.output[0] == Tuple{1});

  q.ops = {FilterOp{FieldId::Len, CmpOp::Ge, 100}, DistinctOp{{FieldId::SIp}}};
  res = execute_pipeline(q, input);
  CHECK(res.output.size() == 3);
}

TEST_CASE("allow filter admits only listed prefixes") {
  std::vector<Tuple> input{
      pkt(0x0A000001, 1),  // 10.0.0.1 -> in 10/8
      pkt(0x0A010203, 2),  // 10.1.2.3 -> in 10/8
      pkt(0x0B000001, 3),  // 11.0.0.1 -> not allowed
  };
  QuerySpec q;
  q.ops = {
      AllowFilterOp{FieldId::SIp, 8, {0x0A000000}},
      DistinctOp{{FieldId::SIp}},
  };
  auto res = execute_pipeline(q, input);
  CHECK(res.stateful[0].n_in == 2);
  CHECK(res.output.size() == 2);
}

TEST_CASE("mask coarsens in place and merges groups") {
  std::vector<Tuple> input{pkt(0x0A000001, 1), pkt(0x0A000002, 2), pkt(0x0B000001, 3)};
  QuerySpec q;
  q.ops = {MaskOp{FieldId::SIp, 8}, DistinctOp{{FieldId::SIp}}};
  auto res = execute_pipeline(q, input);
  // Two /8 prefixes remain: 10.0.0.0 and 11.0.0.0.
  CHECK(res.stateful[0].n_out == 2);
  REQUIRE(res.output.size() == 2);
  CHECK(res.output[0] == Tuple{0x0A000000});
  CHECK(res.output[1] == Tuple{0x0B000000});
}

TEST_CASE("reduce sums a value field when given one") {
  std::vector<Tuple> input{pkt(1, 1, 6, 0, 100), pkt(1, 2, 6, 0, 250), pkt(2, 3, 6, 0, 70)};
  QuerySpec q;
  q.ops = {ReduceOp{{FieldId::SIp}, FieldId::Len, std::nullopt}};
  auto res = execute_pipeline(q, input);
  REQUIRE(res.output.size() == 2);
  CHECK(res.output[0] == Tuple{1, 350});
  CHECK(res.output[1] == Tuple{2, 70});
  CHECK(res.stateful[0].keys == 2);
}

TEST_CASE("distinct without keys dedupes whole tuples") {
  std::vector<Tuple> input{pkt(1, 2), pkt(1, 2), pkt(1, 3)};
  QuerySpec q;
  q.ops = {DistinctOp{}};
  auto res = execute_pipeline(q, input);
  CHECK(res.stateful[0].n_in == 3);
  CHECK(res.stateful[0].n_out == 2);
  CHECK(res.schema == packet_schema());
}

TEST_CASE("first-seen order is preserved by stateful operators") {
  std::vector<Tuple> input{pkt(5, 0), pkt(3, 0), pkt(5, 0), pkt(9, 0), pkt(3, 0)};
  QuerySpec q;
  q.ops = {ReduceOp{{FieldId::SIp}, std::nullopt, std::nullopt}};
  auto res = execute_pipeline(q, input);
  REQUIRE(res.output.size() == 3);
  CHECK(res.output[0] == Tuple{5, 2});
  CHECK(res.output[1] == Tuple{3, 2});
  CHECK(res.output[2] == Tuple{9, 1});
}

TEST_CASE("output_key_set sorts and dedupes the projected field") {
  std::vector<Tuple> input{pkt(5, 7), pkt(3, 7), pkt(5, 8)};
  QuerySpec q;
  q.ops = {DistinctOp{{FieldId::SIp, FieldId::DIp}}};
  auto res = execute_pipeline(q, input);
  CHECK(output_key_set(res, FieldId::SIp) == std::vector<int64_t>{3, 5});
  CHECK(output_key_set(res, FieldId::DIp) == std::vector<int64_t>{7, 8});
  CHECK_THROWS_AS(output_key_set(res, FieldId::Len), Error);
}

TEST_CASE("referencing a projected-away field fails during execution") {
  std::vector<Tuple> input{pkt(1, 2)};
  QuerySpec q;
  q.ops = {ProjectOp{{FieldId::SIp}}, FilterOp{FieldId::DPort, CmpOp::Eq, 80}};
  CHECK_THROWS_AS(execute_pipeline(q, input), Error);
}

TEST_CASE("tuple_of flattens packet records in schema order") {
  PacketRecord r;
  r.sip = 10;
  r.dip = 20;
  r.sport = 30;
  r.dport = 40;
  r.proto = 6;
  r.len = 60;
  r.tcpflags = 2;
  CHECK(tuple_of(r) == Tuple{10, 20, 30, 40, 6, 60, 2});
}
