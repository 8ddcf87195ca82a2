// SPDX-License-Identifier: Apache-2.0
#include "qplan/common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace qplan {

void fail(const std::string& msg) { throw Error(msg); }

namespace {
constexpr std::array<const char*, 8> kFieldNames = {
    "sIP", "dIP", "sPort", "dPort", "proto", "len", "tcpFlags", "count"};
}

const char* field_name(FieldId f) { return kFieldNames[static_cast<size_t>(f)]; }

FieldId field_from_name(const std::string& name) {
  for (size_t i = 0; i < kFieldNames.size(); ++i) {
    if (name == kFieldNames[i]) return static_cast<FieldId>(i);
  }
  fail("unknown field name: " + name);
}

bool field_is_hierarchical(FieldId f) { return f == FieldId::SIp || f == FieldId::DIp; }

int field_width_bits(FieldId f) {
  switch (f) {
    case FieldId::SIp:
    case FieldId::DIp:
    case FieldId::Count:
      return 32;
    case FieldId::SPort:
    case FieldId::DPort:
    case FieldId::Len:
      return 16;
    case FieldId::Proto:
    case FieldId::TcpFlags:
      return 8;
  }
  return 32;
}

std::string to_string(const OpKey& k) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "(q%d, %d->%d, op %d)", k.qid, k.prior_level, k.level,
                k.op_index);
  return buf;
}

uint32_t mask_prefix(uint32_t value, int bits) {
  if (bits <= 0) return 0;
  if (bits >= 32) return value;
  return value & ~((uint32_t{1} << (32 - bits)) - 1);
}

std::string ipv4_to_string(uint32_t addr) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (addr >> 24) & 0xff, (addr >> 16) & 0xff,
                (addr >> 8) & 0xff, addr & 0xff);
  return buf;
}

bool parse_ipv4(const std::string& text, uint32_t& out) {
  unsigned a, b, c, d;
  char tail;
  if (std::sscanf(text.c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d, &tail) == 4) {
    if (a > 255 || b > 255 || c > 255 || d > 255) return false;
    out = (a << 24) | (b << 16) | (c << 8) | d;
    return true;
  }
  // Plain integer form.
  char* end = nullptr;
  unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || v > 0xffffffffULL) return false;
  out = static_cast<uint32_t>(v);
  return true;
}

double population_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  return std::sqrt(var);
}

double coefficient_of_variation(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (mean == 0.0) return 0.0;
  return population_stddev(xs) / mean;
}

double percentile(std::vector<double> xs, double p) {
  if (xs.empty()) fail("percentile of empty series");
  std::sort(xs.begin(), xs.end());
  double rank = std::ceil(p * static_cast<double>(xs.size()));
  size_t idx = rank <= 1.0 ? 0 : static_cast<size_t>(rank) - 1;
  if (idx >= xs.size()) idx = xs.size() - 1;
  return xs[idx];
}

int64_t lower_median(std::vector<int64_t> xs) {
  if (xs.empty()) fail("median of empty series");
  std::sort(xs.begin(), xs.end());
  return xs[(xs.size() - 1) / 2];
}

double median(std::vector<double> xs) {
  if (xs.empty()) fail("median of empty series");
  std::sort(xs.begin(), xs.end());
  size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace qplan
