// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qplan/common.hpp"

namespace qplan {

struct PacketRecord {
  double ts = 0.0;
  uint32_t sip = 0;
  uint32_t dip = 0;
  uint16_t sport = 0;
  uint16_t dport = 0;
  uint8_t proto = 0;
  uint32_t len = 0;
  uint8_t tcpflags = 0;
};

struct WorkloadConfig {
  double window_seconds = 3.0;
  double speedup = 1.0;  // multiplicative trace compression on timestamps
  int64_t distinct_entry_bits = 1;
  int64_t reduce_entry_bits = 32;
};

//! Parses `ts,sip,dip,sport,dport,proto,len,tcpflags` CSV. IPs may be dotted
//! quads or plain integers. Rejects malformed rows, out-of-range values and
//! non-monotone timestamps with the line number.
std::vector<PacketRecord> load_trace(const std::string& path);
std::vector<PacketRecord> parse_trace_csv(const std::string& text, const std::string& name);

void write_trace_csv(const std::string& path, const std::vector<PacketRecord>& records);

//! Splits a ts-ordered record list into fixed-length windows, anchored at the
//! first timestamp. Every record lands in exactly one window; gaps yield empty
//! windows.
std::vector<std::span<const PacketRecord>> split_windows(const std::vector<PacketRecord>& records,
                                                         const WorkloadConfig& cfg);

}  // namespace qplan
