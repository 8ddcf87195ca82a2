// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "qplan/query.hpp"
#include "qplan/trace.hpp"

namespace qplan {

//! Synthetic two-phase workload. Before `flip_window` the heavy-hitter query
//! sees few destinations with many packets each; from `flip_window` on it
//! sees many destinations with few packets each (the per-operator state
//! demand jumps while total traffic stays comparable). A steady UDP scan
//! feeds the companion distinct query in both phases.
struct BimodalConfig {
  int windows = 6;
  double window_seconds = 3.0;
  int flip_window = 3;      // first window of the second phase
  int keys_a = 10;          // TCP destinations per window, first phase
  int keys_b = 100;         // TCP destinations per window, second phase
  int pkts_per_key_a = 10;  // packets per destination, first phase
  int pkts_per_key_b = 2;   // packets per destination, second phase
  int udp_pairs = 100;      // distinct (src,dst) UDP pairs per window
  int udp_pkts_a = 1;       // packets per UDP pair, first phase
  int udp_pkts_b = 2;       // packets per UDP pair, second phase
  uint64_t seed = 1;
};

//! Packets sorted by timestamp; each window starts exactly at a multiple of
//! window_seconds so window splitting is anchor-stable.
std::vector<PacketRecord> synth_bimodal(const BimodalConfig& cfg);

//! The two-query workload the bimodal trace is shaped for: a TCP-SYN
//! heavy-hitter count over destinations and a UDP source/destination
//! distinct scan, both refined over destination prefixes.
std::vector<QuerySpec> bimodal_queries();

}  // namespace qplan
