// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "qplan/trace.hpp"

using namespace qplan;

namespace {

const char* kGood =
    "ts,sip,dip,sport,dport,proto,len,tcpflags\n"
    "0.000000,10.0.0.1,10.1.0.1,1234,80,6,64,2\n"
    "0.500000,167772162,10.1.0.2,1235,443,6,1500,16\n"  // sip as a plain integer
    "2.900000,10.0.0.3,10.1.0.3,1236,53,17,128,0\n";

bool throws_with(const std::string& text, const std::string& needle) {
  try {
    parse_trace_csv(text, "t");
  } catch (const Error& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("trace CSV parses dotted and integer IPs") {
  auto recs = parse_trace_csv(kGood, "t");
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].ts == 0.0);
  CHECK(recs[0].sip == 0x0A000001u);
  CHECK(recs[0].dip == 0x0A010001u);
  CHECK(recs[0].sport == 1234);
  CHECK(recs[0].dport == 80);
  CHECK(recs[0].proto == 6);
  CHECK(recs[0].len == 64);
  CHECK(recs[0].tcpflags == 2);
  CHECK(recs[1].sip == 167772162u);  // 10.0.0.2
  CHECK(recs[2].proto == 17);
}

TEST_CASE("trace CSV rejects malformed input with the line number") {
  const std::string header = "ts,sip,dip,sport,dport,proto,len,tcpflags\n";
  CHECK(throws_with("", "empty trace"));
  CHECK(throws_with("time,stuff\nrow\n", "header"));
  CHECK(throws_with(header + "0.0,10.0.0.1,10.1.0.1,80,6,64,2\n", "t:2"));  // 7 columns
  CHECK(throws_with(header + "abc,10.0.0.1,10.1.0.1,1,80,6,64,2\n", "bad timestamp"));
  CHECK(throws_with(header + "0.0,999.0.0.1,10.1.0.1,1,80,6,64,2\n", "bad IPv4 in 'sip'"));
  CHECK(throws_with(header + "0.0,10.0.0.1,10.1.0.1,70000,80,6,64,2\n", "'sport' out of range"));
  CHECK(throws_with(header + "0.0,10.0.0.1,10.1.0.1,1,80,300,64,2\n", "'proto' out of range"));
  // Timestamps must be non-decreasing; the offending line is named.
  const std::string nonmono = header +
                              "1.0,10.0.0.1,10.1.0.1,1,80,6,64,2\n"
                              "0.5,10.0.0.1,10.1.0.1,1,80,6,64,2\n";
  CHECK(throws_with(nonmono, "t:3"));
  CHECK(throws_with(nonmono, "non-decreasing"));
}

TEST_CASE("trace CSV write/read round-trip") {
  auto recs = parse_trace_csv(kGood, "t");
  auto path = std::filesystem::temp_directory_path() / "qplan_trace_roundtrip.csv";
  write_trace_csv(path.string(), recs);
  auto back = load_trace(path.string());
  REQUIRE(back.size() == recs.size());
  for (size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].ts == doctest::Approx(recs[i].ts));
    CHECK(back[i].sip == recs[i].sip);
    CHECK(back[i].dip == recs[i].dip);
    CHECK(back[i].sport == recs[i].sport);
    CHECK(back[i].dport == recs[i].dport);
    CHECK(back[i].proto == recs[i].proto);
    CHECK(back[i].len == recs[i].len);
    CHECK(back[i].tcpflags == recs[i].tcpflags);
  }
  std::filesystem::remove(path);
}

namespace {
PacketRecord at(double ts) {
  PacketRecord r;
  r.ts = ts;
  return r;
}
}  // namespace

TEST_CASE("split_windows anchors at the first timestamp") {
  std::vector<PacketRecord> recs{at(10.0), at(11.0), at(12.9), at(13.0), at(17.0)};
  WorkloadConfig cfg;
  cfg.window_seconds = 3.0;

  auto ws = split_windows(recs, cfg);
  REQUIRE(ws.size() == 3);
  CHECK(ws[0].size() == 3);  // [10, 13)
  CHECK(ws[1].size() == 1);  // [13, 16): the 13.0 record
  CHECK(ws[2].size() == 1);  // [16, 19): the 17.0 record
  CHECK(ws[1][0].ts == 13.0);
}

TEST_CASE("split_windows emits empty windows across gaps") {
  std::vector<PacketRecord> recs{at(0.0), at(9.5)};
  WorkloadConfig cfg;
  cfg.window_seconds = 3.0;

  auto ws = split_windows(recs, cfg);
  // 9.5 lands in window 3 ([9,12)), so windows 1 and 2 exist but are empty.
  REQUIRE(ws.size() == 4);
  CHECK(ws[0].size() == 1);
  CHECK(ws[1].empty());
  CHECK(ws[2].empty());
  CHECK(ws[3].size() == 1);
}

TEST_CASE("split_windows honours trace speedup") {
  // With 2x speedup, 6 wall seconds compress to 3: one window boundary.
  std::vector<PacketRecord> recs{at(0.0), at(5.9), at(6.0)};
  WorkloadConfig cfg;
  cfg.window_seconds = 3.0;
  cfg.speedup = 2.0;

  auto ws = split_windows(recs, cfg);
  REQUIRE(ws.size() == 2);
  CHECK(ws[0].size() == 2);
  CHECK(ws[1].size() == 1);
}

TEST_CASE("split_windows edge cases") {
  WorkloadConfig cfg;
  CHECK(split_windows({}, cfg).empty());

  std::vector<PacketRecord> one{at(42.0)};
  auto ws = split_windows(one, cfg);
  REQUIRE(ws.size() == 1);
  CHECK(ws[0].size() == 1);

  WorkloadConfig bad;
  bad.window_seconds = 0.0;
  CHECK_THROWS_AS(split_windows(one, bad), Error);
  bad.window_seconds = 3.0;
  bad.speedup = -1.0;
  CHECK_THROWS_AS(split_windows(one, bad), Error);
}
