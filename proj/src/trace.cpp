// SPDX-License-Identifier: Apache-2.0
#include "qplan/trace.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qplan {

namespace {

constexpr const char* kHeader = "ts,sip,dip,sport,dport,proto,len,tcpflags";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void row_fail(const std::string& name, size_t lineno, const std::string& what) {
  fail(name + ":" + std::to_string(lineno) + ": " + what);
}

int64_t parse_int(const std::string& name, size_t lineno, const std::string& s,
                  const char* fieldname, int64_t lo, int64_t hi) {
  int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    row_fail(name, lineno, std::string("bad integer in '") + fieldname + "': " + s);
  }
  if (v < lo || v > hi) {
    row_fail(name, lineno,
             std::string("'") + fieldname + "' out of range [" + std::to_string(lo) + "," +
                 std::to_string(hi) + "]: " + s);
  }
  return v;
}

uint32_t parse_ip_field(const std::string& name, size_t lineno, const std::string& s,
                        const char* fieldname) {
  uint32_t out = 0;
  if (!parse_ipv4(s, out)) {
    row_fail(name, lineno, std::string("bad IPv4 in '") + fieldname + "': " + s);
  }
  return out;
}

}  // namespace

std::vector<PacketRecord> parse_trace_csv(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  if (!std::getline(in, line)) fail(name + ": empty trace file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) fail(name + ": header must be '" + std::string(kHeader) + "'");

  std::vector<PacketRecord> records;
  double prev_ts = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = split_csv(line);
    if (cols.size() != 8) row_fail(name, lineno, "expected 8 columns, got " +
                                                     std::to_string(cols.size()));
    PacketRecord r;
    try {
      size_t used = 0;
      r.ts = std::stod(cols[0], &used);
      if (used != cols[0].size()) throw std::invalid_argument(cols[0]);
    } catch (const std::exception&) {
      row_fail(name, lineno, "bad timestamp: " + cols[0]);
    }
    if (!std::isfinite(r.ts)) row_fail(name, lineno, "non-finite timestamp");
    if (r.ts < prev_ts) row_fail(name, lineno, "timestamps must be non-decreasing");
    prev_ts = r.ts;
    r.sip = parse_ip_field(name, lineno, cols[1], "sip");
    r.dip = parse_ip_field(name, lineno, cols[2], "dip");
    r.sport = static_cast<uint16_t>(parse_int(name, lineno, cols[3], "sport", 0, 65535));
    r.dport = static_cast<uint16_t>(parse_int(name, lineno, cols[4], "dport", 0, 65535));
    r.proto = static_cast<uint8_t>(parse_int(name, lineno, cols[5], "proto", 0, 255));
    r.len = static_cast<uint32_t>(parse_int(name, lineno, cols[6], "len", 0, 65535));
    r.tcpflags = static_cast<uint8_t>(parse_int(name, lineno, cols[7], "tcpflags", 0, 255));
    records.push_back(r);
  }
  return records;
}

std::vector<PacketRecord> load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open trace file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace_csv(ss.str(), path);
}

void write_trace_csv(const std::string& path, const std::vector<PacketRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write trace file: " + path);
  out << kHeader << "\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%.6f,%s,%s,%u,%u,%u,%u,%u\n", r.ts,
                  ipv4_to_string(r.sip).c_str(), ipv4_to_string(r.dip).c_str(), r.sport, r.dport,
                  r.proto, r.len, r.tcpflags);
    out << buf;
  }
  if (!out) fail("failed writing trace file: " + path);
}

std::vector<std::span<const PacketRecord>> split_windows(const std::vector<PacketRecord>& records,
                                                         const WorkloadConfig& cfg) {
  if (cfg.window_seconds <= 0.0) fail("window_seconds must be positive");
  if (cfg.speedup <= 0.0) fail("speedup must be positive");
  std::vector<std::span<const PacketRecord>> windows;
  if (records.empty()) return windows;
  const double t0 = records.front().ts / cfg.speedup;
  auto window_of = [&](const PacketRecord& r) {
    return static_cast<size_t>(std::floor((r.ts / cfg.speedup - t0) / cfg.window_seconds));
  };
  size_t begin = 0;
  size_t w = 0;
  for (size_t i = 0; i <= records.size(); ++i) {
    size_t wi = i < records.size() ? window_of(records[i]) : w + 1;
    if (wi == w && i < records.size()) continue;
    windows.emplace_back(records.data() + begin, i - begin);
    // Emit empty windows across gaps so window indices stay aligned with time.
    for (size_t g = w + 1; i < records.size() && g < wi; ++g) {
      windows.emplace_back(records.data() + i, size_t{0});
    }
    begin = i;
    w = wi;
  }
  return windows;
}

}  // namespace qplan
