// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qplan/common.hpp"

namespace qplan {

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* cmp_name(CmpOp op);
CmpOp cmp_from_name(const std::string& name);
bool cmp_eval(CmpOp op, int64_t lhs, int64_t rhs);

//! Dataflow operators. Filter/map are stateless; distinct/reduce are stateful
//! and are the units the planner sizes and maps onto switch registers.
struct FilterOp {
  FieldId field;
  CmpOp cmp;
  int64_t value;
};

//! Refinement filter: admit tuples whose `field` prefix at `mask_bits` is in
//! `allowed` (sorted). Synthesized by refine_query, not part of user queries.
struct AllowFilterOp {
  FieldId field;
  int mask_bits;
  std::vector<int64_t> allowed;
};

struct ProjectOp {
  std::vector<FieldId> fields;
};

struct MaskOp {
  FieldId field;
  int mask_bits;
};

struct DistinctOp {
  std::vector<FieldId> keys;  // empty: dedupe on the full current tuple
};

struct Threshold {
  CmpOp cmp;
  int64_t value;
};

struct ReduceOp {
  std::vector<FieldId> keys;
  std::optional<FieldId> value_field;   // nullopt: count (sum of 1)
  std::optional<Threshold> threshold;   // applied to the aggregate output
};

using DataflowOp = std::variant<FilterOp, AllowFilterOp, ProjectOp, MaskOp, DistinctOp, ReduceOp>;

bool is_stateful(const DataflowOp& op);

//! Raw packet tuple schema: sIP, dIP, sPort, dPort, proto, len, tcpFlags.
const std::vector<FieldId>& packet_schema();

//! Tuple schema after applying `op` to `schema`. Throws if a referenced field
//! is missing (filter predicates must be total over the live schema).
std::vector<FieldId> schema_after(const std::vector<FieldId>& schema, const DataflowOp& op);

//! One dataflow pipeline. Queries with joins are expressed as multiple
//! QuerySpecs (one per sub-pipeline), each with its own qid.
struct QuerySpec {
  int qid = 0;
  FieldId refinement_key = FieldId::DIp;
  std::vector<int> levels;  // ascending mask widths; front()==0 is the root
  std::vector<DataflowOp> ops;
};

//! Pipeline indices of the stateful operators, in order.
std::vector<int> stateful_operators(const QuerySpec& q);

//! Validates structure: level set well formed, reduce keys non-empty, the
//! refinement key present in every stateful operator's key set, fields defined
//! at their use sites. Throws Error with the offending detail.
void validate_query(const QuerySpec& q);

//! Shape of a query as seen by the planner: its candidate levels and how many
//! stateful operators one refined instance carries.
struct QueryMeta {
  int qid = 0;
  std::vector<int> levels;
  int stateful_ops = 0;
};

QueryMeta meta_of(const QuerySpec& q);

//! Per-query ordered level sequences; each starts at the root level and ends
//! at the query's finest level.
using RefinementPlan = std::map<int, std::vector<int>>;

RefinementPlan finest_only_plan(const std::vector<QueryMeta>& metas);
void validate_plan(const RefinementPlan& plan, const std::vector<QueryMeta>& metas);

//! Synthesizes the (prior_level -> level) instance of q: an allow filter on
//! the key's prior_level prefix, the key masked to `level`, and the pipeline
//! truncated after the stateful operator with index upto_op (its threshold,
//! if any, rides along). allow == nullopt means the universe.
QuerySpec refine_query(const QuerySpec& q, int prior_level, int level, int upto_op,
                       const std::optional<std::vector<int64_t>>& allow);

struct DependencyChain {
  int chain_id = 0;
  std::vector<OpKey> ops;  // pipeline order; position is the chain order
};

//! One chain per (query, consecutive level transition) of the plan.
//! Deterministic: qid ascending, transitions in plan order.
std::vector<DependencyChain> build_chains(const RefinementPlan& plan,
                                          const std::vector<QueryMeta>& metas);
std::vector<DependencyChain> build_chains(const RefinementPlan& plan,
                                          const std::vector<QuerySpec>& queries);

std::vector<QuerySpec> load_queries(const std::string& path);
std::vector<QuerySpec> parse_queries_json(const std::string& text);

}  // namespace qplan
