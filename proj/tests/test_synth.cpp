// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <set>

#include "qplan/cost_matrix.hpp"
#include "qplan/synth.hpp"

using namespace qplan;

TEST_CASE("bimodal trace has the configured shape") {
  BimodalConfig cfg;
  auto recs = synth_bimodal(cfg);

  // Phase one: 10 keys x 10 SYNs + 100 UDP pairs x 1 packet = 200 per window.
  // Phase two: 100 keys x 2 SYNs + 100 UDP pairs x 2 packets = 400.
  CHECK(recs.size() == 3u * 200 + 3u * 400);

  std::vector<size_t> per_window(static_cast<size_t>(cfg.windows), 0);
  double prev = -1.0;
  for (const auto& r : recs) {
    CHECK(r.ts >= prev);  // sorted
    prev = r.ts;
    auto w = static_cast<size_t>(std::floor(r.ts / cfg.window_seconds));
    REQUIRE(w < per_window.size());
    ++per_window[w];
  }
  for (int w = 0; w < cfg.windows; ++w) {
    CHECK(per_window[static_cast<size_t>(w)] == (w < cfg.flip_window ? 200u : 400u));
  }
}

TEST_CASE("bimodal trace windows are anchor-stable") {
  BimodalConfig cfg;
  auto recs = synth_bimodal(cfg);
  // The very first packet sits at t=0, so split_windows' anchor coincides
  // with the configured window grid.
  CHECK(recs.front().ts == 0.0);
  WorkloadConfig wcfg;
  wcfg.window_seconds = cfg.window_seconds;
  auto ws = split_windows(recs, wcfg);
  REQUIRE(ws.size() == static_cast<size_t>(cfg.windows));
  CHECK(ws[0].size() == 200);
  CHECK(ws[5].size() == 400);
}

TEST_CASE("the flip changes key counts, not just volume") {
  BimodalConfig cfg;
  auto recs = synth_bimodal(cfg);

  auto syn_dips = [&](int w) {
    std::set<uint32_t> dips;
    for (const auto& r : recs) {
      int rw = static_cast<int>(std::floor(r.ts / cfg.window_seconds));
      if (rw == w && r.proto == 6 && r.tcpflags == 2) dips.insert(r.dip);
    }
    return dips.size();
  };
  CHECK(syn_dips(0) == 10);
  CHECK(syn_dips(2) == 10);
  CHECK(syn_dips(3) == 100);
  CHECK(syn_dips(5) == 100);

  auto udp_pairs = [&](int w) {
    std::set<std::pair<uint32_t, uint32_t>> pairs;
    for (const auto& r : recs) {
      int rw = static_cast<int>(std::floor(r.ts / cfg.window_seconds));
      if (rw == w && r.proto == 17) pairs.insert({r.sip, r.dip});
    }
    return pairs.size();
  };
  CHECK(udp_pairs(0) == 100);
  CHECK(udp_pairs(4) == 100);
}

TEST_CASE("bimodal synthesis is deterministic per seed") {
  BimodalConfig cfg;
  auto a = synth_bimodal(cfg);
  auto b = synth_bimodal(cfg);
  REQUIRE(a.size() == b.size());
  bool equal = true;
  for (size_t i = 0; i < a.size(); ++i) {
    equal = equal && a[i].ts == b[i].ts && a[i].sip == b[i].sip && a[i].dip == b[i].dip &&
            a[i].sport == b[i].sport && a[i].len == b[i].len;
  }
  CHECK(equal);

  cfg.seed = 99;
  auto c = synth_bimodal(cfg);
  REQUIRE(c.size() == a.size());
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) {
    differs = differs || a[i].sport != c[i].sport || a[i].len != c[i].len;
  }
  CHECK(differs);
}

TEST_CASE("bimodal queries validate and cost out as designed") {
  auto queries = bimodal_queries();
  REQUIRE(queries.size() == 2);
  for (const auto& q : queries) CHECK_NOTHROW(validate_query(q));

  BimodalConfig cfg;
  WorkloadConfig wcfg;
  wcfg.window_seconds = cfg.window_seconds;
  auto history = generate_cost_matrices(queries, synth_bimodal(cfg), wcfg);
  REQUIRE(history.size() == 6);

  int q1 = queries[0].qid;
  int q2 = queries[1].qid;

  // Phase one: the SYN counter holds 10 keys x 32 bits over 100 SYN packets;
  // the UDP distinct holds 100 pairs x 1 bit and passes everything through.
  const auto& w0 = history[0].entries;
  CHECK(w0.at(OpKey{q1, 0, 32, 0}).bits == 320);
  CHECK(w0.at(OpKey{q1, 0, 32, 0}).n_in == 100);
  CHECK(w0.at(OpKey{q1, 0, 32, 0}).n_out == 10);
  CHECK(w0.at(OpKey{q2, 0, 32, 0}).bits == 100);
  CHECK(w0.at(OpKey{q2, 0, 32, 0}).n_in == 100);
  CHECK(w0.at(OpKey{q2, 0, 32, 0}).n_out == 100);

  // Phase two: ten times the SYN keys, so ten times the state.
  const auto& w3 = history[3].entries;
  CHECK(w3.at(OpKey{q1, 0, 32, 0}).bits == 3200);
  CHECK(w3.at(OpKey{q1, 0, 32, 0}).n_in == 200);
  CHECK(w3.at(OpKey{q1, 0, 32, 0}).n_out == 100);
  CHECK(w3.at(OpKey{q2, 0, 32, 0}).bits == 100);
  CHECK(w3.at(OpKey{q2, 0, 32, 0}).n_in == 200);
}
