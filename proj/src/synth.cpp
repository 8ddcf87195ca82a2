// SPDX-License-Identifier: Apache-2.0
#include "qplan/synth.hpp"

#include <random>

namespace qplan {

std::vector<PacketRecord> synth_bimodal(const BimodalConfig& cfg) {
  if (cfg.windows <= 0 || cfg.window_seconds <= 0) fail("bimodal: invalid window shape");
  if (cfg.keys_a <= 0 || cfg.keys_b <= 0 || cfg.pkts_per_key_a <= 0 || cfg.pkts_per_key_b <= 0 ||
      cfg.udp_pairs < 0 || cfg.udp_pkts_a < 0 || cfg.udp_pkts_b < 0) {
    fail("bimodal: counts must be positive");
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> sport_dist(1024, 65535);
  std::uniform_int_distribution<int> len_dist(40, 1500);

  std::vector<PacketRecord> out;
  for (int w = 0; w < cfg.windows; ++w) {
    const bool second_phase = w >= cfg.flip_window;
    const int tcp_keys = second_phase ? cfg.keys_b : cfg.keys_a;
    const int tcp_pkts = second_phase ? cfg.pkts_per_key_b : cfg.pkts_per_key_a;
    const int udp_pkts = second_phase ? cfg.udp_pkts_b : cfg.udp_pkts_a;
    const int total = tcp_keys * tcp_pkts + cfg.udp_pairs * udp_pkts;
    if (total == 0) continue;

    // Slot 0 sits exactly on the window boundary; the rest stay inside 90%
    // of the window so the split anchor never drifts.
    int slot = 0;
    auto next_ts = [&] {
      double ts = w * cfg.window_seconds +
                  slot * (cfg.window_seconds * 0.9) / static_cast<double>(total);
      slot++;
      return ts;
    };

    for (int key = 0; key < tcp_keys; ++key) {
      for (int p = 0; p < tcp_pkts; ++p) {
        PacketRecord r;
        r.ts = next_ts();
        r.sip = 0x0A000000u + static_cast<uint32_t>((key * 37 + p * 11 + w) % 4096);
        r.dip = 0x0A010000u + static_cast<uint32_t>(key);
        r.sport = static_cast<uint16_t>(sport_dist(rng));
        r.dport = 80;
        r.proto = 6;
        r.len = static_cast<uint32_t>(len_dist(rng));
        r.tcpflags = 2;
        out.push_back(r);
      }
    }
    for (int pair = 0; pair < cfg.udp_pairs; ++pair) {
      for (int p = 0; p < udp_pkts; ++p) {
        PacketRecord r;
        r.ts = next_ts();
        r.sip = 0x0B000000u + static_cast<uint32_t>(pair);
        r.dip = 0x0C000000u + static_cast<uint32_t>(pair);
        r.sport = static_cast<uint16_t>(sport_dist(rng));
        r.dport = 53;
        r.proto = 17;
        r.len = static_cast<uint32_t>(len_dist(rng));
        r.tcpflags = 0;
        out.push_back(r);
      }
    }
  }
  return out;
}

std::vector<QuerySpec> bimodal_queries() {
  QuerySpec q1;
  q1.qid = 1;
  q1.refinement_key = FieldId::DIp;
  q1.levels = {0, 32};
  q1.ops.push_back(FilterOp{FieldId::TcpFlags, CmpOp::Eq, 2});
  ReduceOp hh;
  hh.keys = {FieldId::DIp};
  hh.threshold = Threshold{CmpOp::Ge, 2};
  q1.ops.push_back(hh);

  QuerySpec q2;
  q2.qid = 2;
  q2.refinement_key = FieldId::DIp;
  q2.levels = {0, 32};
  q2.ops.push_back(FilterOp{FieldId::Proto, CmpOp::Eq, 17});
  q2.ops.push_back(ProjectOp{{FieldId::SIp, FieldId::DIp}});
  q2.ops.push_back(DistinctOp{});

  std::vector<QuerySpec> queries{q1, q2};
  for (const auto& q : queries) validate_query(q);
  return queries;
}

}  // namespace qplan
