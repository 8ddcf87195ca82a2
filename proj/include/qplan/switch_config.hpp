// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qplan/common.hpp"

namespace qplan {

//! Pipeline model of the target: `stages` sequential stages, each with
//! `alus_per_stage` register slots and `stage_mem_bits` of memory; a single
//! register is capped at `max_reg_bits`.
struct SwitchConfig {
  int stages = 12;
  int alus_per_stage = 8;
  int64_t stage_mem_bits = 1'500'000;
  int64_t max_reg_bits = 750'000;

  int total_registers() const { return stages * alus_per_stage; }
  int64_t total_mem_bits() const { return stage_mem_bits * stages; }
};

void validate_switch(const SwitchConfig& cfg);

struct Register {
  int id = 0;
  int stage = 0;  // zero-based
  int64_t bits = 0;
};

struct RegisterConfig {
  std::vector<Register> registers;  // sorted by id

  int64_t total_bits() const;
  const Register& by_id(int id) const;
};

//! Checks stage bounds, per-stage ALU and memory budgets, register caps and
//! id uniqueness.
void validate_registers(const RegisterConfig& regs, const SwitchConfig& cfg);

SwitchConfig load_switch(const std::string& path);
SwitchConfig switch_from_json(const std::string& text);
std::string switch_to_json(const SwitchConfig& cfg);
void save_switch(const std::string& path, const SwitchConfig& cfg);

}  // namespace qplan
