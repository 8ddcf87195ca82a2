// SPDX-License-Identifier: Apache-2.0
#include "qplan/switch_config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace qplan {

void validate_switch(const SwitchConfig& cfg) {
  if (cfg.stages <= 0) fail("switch needs at least one stage");
  if (cfg.alus_per_stage <= 0) fail("switch needs at least one ALU per stage");
  if (cfg.stage_mem_bits <= 0) fail("stage memory must be positive");
  if (cfg.max_reg_bits <= 0) fail("register cap must be positive");
  if (cfg.max_reg_bits > cfg.stage_mem_bits) {
    fail("register cap cannot exceed stage memory");
  }
}

int64_t RegisterConfig::total_bits() const {
  int64_t total = 0;
  for (const auto& r : registers) total += r.bits;
  return total;
}

const Register& RegisterConfig::by_id(int id) const {
  for (const auto& r : registers) {
    if (r.id == id) return r;
  }
  fail("no register with id " + std::to_string(id));
}

void validate_registers(const RegisterConfig& regs, const SwitchConfig& cfg) {
  validate_switch(cfg);
  std::map<int, std::pair<int, int64_t>> per_stage;  // stage -> (count, bits)
  std::map<int, bool> ids;
  for (const auto& r : regs.registers) {
    if (!ids.emplace(r.id, true).second) fail("duplicate register id " + std::to_string(r.id));
    if (r.stage < 0 || r.stage >= cfg.stages) {
      fail("register " + std::to_string(r.id) + " stage out of range");
    }
    if (r.bits <= 0) fail("register " + std::to_string(r.id) + " must have positive size");
    if (r.bits > cfg.max_reg_bits) {
      fail("register " + std::to_string(r.id) + " exceeds the per-register cap");
    }
    auto& [count, bits] = per_stage[r.stage];
    ++count;
    bits += r.bits;
    if (count > cfg.alus_per_stage) {
      fail("stage " + std::to_string(r.stage) + " exceeds its ALU budget");
    }
    if (bits > cfg.stage_mem_bits) {
      fail("stage " + std::to_string(r.stage) + " exceeds its memory budget");
    }
  }
}

SwitchConfig switch_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("switch file is not valid JSON: ") + e.what());
  }
  SwitchConfig cfg;
  try {
    cfg.stages = doc.at("stages").get<int>();
    cfg.alus_per_stage = doc.at("alus_per_stage").get<int>();
    cfg.stage_mem_bits = doc.at("stage_mem_bits").get<int64_t>();
    cfg.max_reg_bits = doc.at("max_reg_bits").get<int64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("malformed switch document: ") + e.what());
  }
  validate_switch(cfg);
  return cfg;
}

std::string switch_to_json(const SwitchConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["stages"] = cfg.stages;
  doc["alus_per_stage"] = cfg.alus_per_stage;
  doc["stage_mem_bits"] = cfg.stage_mem_bits;
  doc["max_reg_bits"] = cfg.max_reg_bits;
  return doc.dump(2) + "\n";
}

SwitchConfig load_switch(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open switch file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return switch_from_json(ss.str());
}

void save_switch(const std::string& path, const SwitchConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write switch file: " + path);
  out << switch_to_json(cfg);
}

}  // namespace qplan
