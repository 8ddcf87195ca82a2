// SPDX-License-Identifier: Apache-2.0
#include "qplan/query.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qplan {

namespace {
constexpr const char* kCmpNames[] = {"==", "!=", "<", "<=", ">", ">="};
}

const char* cmp_name(CmpOp op) { return kCmpNames[static_cast<int>(op)]; }

CmpOp cmp_from_name(const std::string& name) {
  for (int i = 0; i < 6; ++i) {
    if (name == kCmpNames[i]) return static_cast<CmpOp>(i);
  }
  fail("unknown comparison operator: " + name);
}

bool cmp_eval(CmpOp op, int64_t lhs, int64_t rhs) {
  switch (op) {
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ne: return lhs != rhs;
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Gt: return lhs > rhs;
    case CmpOp::Ge: return lhs >= rhs;
  }
  return false;
}

bool is_stateful(const DataflowOp& op) {
  return std::holds_alternative<DistinctOp>(op) || std::holds_alternative<ReduceOp>(op);
}

const std::vector<FieldId>& packet_schema() {
  static const std::vector<FieldId> schema = {FieldId::SIp,   FieldId::DIp,  FieldId::SPort,
                                              FieldId::DPort, FieldId::Proto, FieldId::Len,
                                              FieldId::TcpFlags};
  return schema;
}

namespace {

bool contains(const std::vector<FieldId>& schema, FieldId f) {
  return std::find(schema.begin(), schema.end(), f) != schema.end();
}

void require_field(const std::vector<FieldId>& schema, FieldId f, const char* where) {
  if (!contains(schema, f)) {
    fail(std::string(where) + " references field '" + field_name(f) +
         "' absent from the live schema");
  }
}

}  // namespace

std::vector<FieldId> schema_after(const std::vector<FieldId>& schema, const DataflowOp& op) {
  if (const auto* f = std::get_if<FilterOp>(&op)) {
    require_field(schema, f->field, "filter");
    return schema;
  }
  if (const auto* a = std::get_if<AllowFilterOp>(&op)) {
    require_field(schema, a->field, "allow filter");
    return schema;
  }
  if (const auto* p = std::get_if<ProjectOp>(&op)) {
    if (p->fields.empty()) fail("map projection with empty field list");
    for (FieldId f : p->fields) require_field(schema, f, "map");
    return p->fields;
  }
  if (const auto* m = std::get_if<MaskOp>(&op)) {
    require_field(schema, m->field, "mask");
    if (!field_is_hierarchical(m->field)) {
      fail(std::string("mask on non-hierarchical field '") + field_name(m->field) + "'");
    }
    return schema;
  }
  if (const auto* d = std::get_if<DistinctOp>(&op)) {
    if (d->keys.empty()) return schema;
    for (FieldId f : d->keys) require_field(schema, f, "distinct");
    return d->keys;
  }
  const auto& r = std::get<ReduceOp>(op);
  if (r.keys.empty()) fail("reduce with empty key set");
  for (FieldId f : r.keys) require_field(schema, f, "reduce");
  if (r.value_field) require_field(schema, *r.value_field, "reduce value");
  auto out = r.keys;
  out.push_back(FieldId::Count);
  return out;
}

std::vector<int> stateful_operators(const QuerySpec& q) {
  std::vector<int> idx;
  for (size_t i = 0; i < q.ops.size(); ++i) {
    if (is_stateful(q.ops[i])) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

void validate_query(const QuerySpec& q) {
  if (q.levels.size() < 2) fail("query " + std::to_string(q.qid) + ": needs >= 2 levels");
  if (q.levels.front() != 0) {
    fail("query " + std::to_string(q.qid) + ": level set must start at the root (0)");
  }
  for (size_t i = 1; i < q.levels.size(); ++i) {
    if (q.levels[i] <= q.levels[i - 1]) {
      fail("query " + std::to_string(q.qid) + ": levels must be strictly increasing");
    }
  }
  if (q.levels.back() > field_width_bits(q.refinement_key)) {
    fail("query " + std::to_string(q.qid) + ": level exceeds key width");
  }
  if (!field_is_hierarchical(q.refinement_key)) {
    fail("query " + std::to_string(q.qid) + ": refinement key must be hierarchical (sIP/dIP)");
  }
  if (stateful_operators(q).empty()) {
    fail("query " + std::to_string(q.qid) + ": needs at least one stateful operator");
  }
  auto schema = packet_schema();
  for (const auto& op : q.ops) {
    // The refinement key must be part of every stateful operator's key set.
    if (is_stateful(op)) {
      std::vector<FieldId> keys;
      if (const auto* d = std::get_if<DistinctOp>(&op)) {
        keys = d->keys.empty() ? schema : d->keys;
      } else {
        keys = std::get<ReduceOp>(op).keys;
      }
      if (std::find(keys.begin(), keys.end(), q.refinement_key) == keys.end()) {
        fail("query " + std::to_string(q.qid) +
             ": refinement key missing from a stateful operator's keys");
      }
    }
    schema = schema_after(schema, op);
  }
}

QueryMeta meta_of(const QuerySpec& q) {
  return QueryMeta{q.qid, q.levels, static_cast<int>(stateful_operators(q).size())};
}

RefinementPlan finest_only_plan(const std::vector<QueryMeta>& metas) {
  RefinementPlan plan;
  for (const auto& m : metas) plan[m.qid] = {m.levels.front(), m.levels.back()};
  return plan;
}

void validate_plan(const RefinementPlan& plan, const std::vector<QueryMeta>& metas) {
  for (const auto& m : metas) {
    auto it = plan.find(m.qid);
    if (it == plan.end()) fail("plan missing query " + std::to_string(m.qid));
    const auto& seq = it->second;
    if (seq.size() < 2) fail("plan for query " + std::to_string(m.qid) + " too short");
    if (seq.front() != m.levels.front() || seq.back() != m.levels.back()) {
      fail("plan for query " + std::to_string(m.qid) +
           " must run from the root to the finest level");
    }
    for (size_t i = 0; i < seq.size(); ++i) {
      if (std::find(m.levels.begin(), m.levels.end(), seq[i]) == m.levels.end()) {
        fail("plan level " + std::to_string(seq[i]) + " not a candidate of query " +
             std::to_string(m.qid));
      }
      if (i > 0 && seq[i] <= seq[i - 1]) {
        fail("plan for query " + std::to_string(m.qid) + " not strictly increasing");
      }
    }
  }
}

QuerySpec refine_query(const QuerySpec& q, int prior_level, int level, int upto_op,
                       const std::optional<std::vector<int64_t>>& allow) {
  if (prior_level >= level) fail("refine_query: prior_level must be below level");
  auto in_levels = [&](int l) {
    return std::find(q.levels.begin(), q.levels.end(), l) != q.levels.end();
  };
  if (!in_levels(prior_level) || !in_levels(level)) {
    fail("refine_query: level pair not in the query's candidate set");
  }
  auto stateful = stateful_operators(q);
  if (upto_op < 0 || upto_op >= static_cast<int>(stateful.size())) {
    fail("refine_query: upto_op outside the stateful operator range");
  }

  QuerySpec out;
  out.qid = q.qid;
  out.refinement_key = q.refinement_key;
  out.levels = q.levels;
  if (prior_level != q.levels.front() && allow) {
    AllowFilterOp af;
    af.field = q.refinement_key;
    af.mask_bits = prior_level;
    af.allowed = *allow;
    std::sort(af.allowed.begin(), af.allowed.end());
    af.allowed.erase(std::unique(af.allowed.begin(), af.allowed.end()), af.allowed.end());
    out.ops.emplace_back(std::move(af));
  }
  if (level < field_width_bits(q.refinement_key)) {
    out.ops.emplace_back(MaskOp{q.refinement_key, level});
  }
  int last_kept = stateful[upto_op];
  for (int i = 0; i <= last_kept; ++i) out.ops.push_back(q.ops[i]);
  return out;
}

namespace {

std::vector<DependencyChain> build_chains_impl(const RefinementPlan& plan,
                                               const std::vector<QueryMeta>& metas) {
  validate_plan(plan, metas);
  std::vector<DependencyChain> chains;
  for (const auto& m : metas) {
    const auto& seq = plan.at(m.qid);
    for (size_t t = 1; t < seq.size(); ++t) {
      DependencyChain chain;
      chain.chain_id = static_cast<int>(chains.size());
      for (int k = 0; k < m.stateful_ops; ++k) {
        chain.ops.push_back(OpKey{m.qid, seq[t - 1], seq[t], k});
      }
      chains.push_back(std::move(chain));
    }
  }
  return chains;
}

}  // namespace

std::vector<DependencyChain> build_chains(const RefinementPlan& plan,
                                          const std::vector<QueryMeta>& metas) {
  return build_chains_impl(plan, metas);
}

std::vector<DependencyChain> build_chains(const RefinementPlan& plan,
                                          const std::vector<QuerySpec>& queries) {
  std::vector<QueryMeta> metas;
  metas.reserve(queries.size());
  for (const auto& q : queries) metas.push_back(meta_of(q));
  return build_chains_impl(plan, metas);
}

namespace {

using nlohmann::json;

FieldId field_arg(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) fail(std::string("op missing '") + key + "'");
  return field_from_name(j[key].get<std::string>());
}

std::vector<FieldId> field_list(const json& j) {
  std::vector<FieldId> out;
  for (const auto& e : j) out.push_back(field_from_name(e.get<std::string>()));
  return out;
}

DataflowOp parse_op(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "filter") {
    return FilterOp{field_arg(j, "field"), cmp_from_name(j.at("op").get<std::string>()),
                    j.at("value").get<int64_t>()};
  }
  if (kind == "map") {
    if (j.contains("project")) return ProjectOp{field_list(j.at("project"))};
    if (j.contains("mask")) return MaskOp{field_arg(j, "field"), j.at("mask").get<int>()};
    fail("map op needs 'project' or 'field'+'mask'");
  }
  if (kind == "distinct") {
    DistinctOp d;
    if (j.contains("keys")) d.keys = field_list(j.at("keys"));
    return d;
  }
  if (kind == "reduce") {
    ReduceOp r;
    r.keys = field_list(j.at("keys"));
    if (j.contains("agg") && j.at("agg").get<std::string>() != "sum") {
      fail("reduce aggregate must be 'sum'");
    }
    if (j.contains("value")) r.value_field = field_arg(j, "value");
    if (j.contains("threshold")) {
      const auto& t = j.at("threshold");
      r.threshold = Threshold{cmp_from_name(t.at("op").get<std::string>()),
                              t.at("value").get<int64_t>()};
    }
    return r;
  }
  fail("unknown op kind: " + kind);
}

}  // namespace

std::vector<QuerySpec> parse_queries_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("query file is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) fail("query file must be a JSON array");
  std::vector<QuerySpec> out;
  std::set<int> seen;
  try {
    for (const auto& jq : doc) {
      QuerySpec q;
      q.qid = jq.at("qid").get<int>();
      if (!seen.insert(q.qid).second) fail("duplicate qid " + std::to_string(q.qid));
      q.refinement_key = field_from_name(jq.at("refinement_key").get<std::string>());
      q.levels = jq.at("levels").get<std::vector<int>>();
      for (const auto& jop : jq.at("ops")) q.ops.push_back(parse_op(jop));
      validate_query(q);
      out.push_back(std::move(q));
    }
  } catch (const json::exception& e) {
    fail(std::string("malformed query document: ") + e.what());
  }
  if (out.empty()) fail("query file holds no queries");
  return out;
}

std::vector<QuerySpec> load_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open query file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_queries_json(ss.str());
}

}  // namespace qplan
