// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

namespace qplan {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void fail(const std::string& msg);

//! Packet tuple fields. Count is the synthetic field emitted by reduce.
enum class FieldId : uint8_t { SIp, DIp, SPort, DPort, Proto, Len, TcpFlags, Count };

const char* field_name(FieldId f);
FieldId field_from_name(const std::string& name);
bool field_is_hierarchical(FieldId f);
int field_width_bits(FieldId f);

//! One stateful operator instance in the refinement plan space:
//! (query, prior refinement level, executed level, stateful-op index).
struct OpKey {
  int qid = 0;
  int prior_level = 0;
  int level = 0;
  int op_index = 0;
  auto operator<=>(const OpKey&) const = default;
};

std::string to_string(const OpKey& k);

//! Keep the top `bits` bits of an IPv4 address; bits==0 wipes the value.
uint32_t mask_prefix(uint32_t value, int bits);

std::string ipv4_to_string(uint32_t addr);
bool parse_ipv4(const std::string& text, uint32_t& out);

// Small stats helpers shared by the workload and forecasting code.
double population_stddev(const std::vector<double>& xs);
// Population stddev over mean; defined as 0 when the mean is 0.
double coefficient_of_variation(const std::vector<double>& xs);
// Nearest-rank percentile: sorted[ceil(p*n)-1].
double percentile(std::vector<double> xs, double p);
// Lower median: sorted[(n-1)/2].
int64_t lower_median(std::vector<int64_t> xs);
double median(std::vector<double> xs);

}  // namespace qplan
