// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "qplan/query.hpp"
#include "qplan/trace.hpp"

namespace qplan {

//! Values parallel to a schema vector. Int-valued throughout; IPv4 fields are
//! stored zero-extended.
using Tuple = std::vector<int64_t>;

Tuple tuple_of(const PacketRecord& r);

//! Per stateful operator accounting for one window.
struct StatefulCost {
  bool is_reduce = false;
  int64_t n_in = 0;
  int64_t n_out = 0;
  int64_t keys = 0;  // distinct keys / groups held by the operator
};

struct PipelineResult {
  std::vector<Tuple> output;
  std::vector<FieldId> schema;
  std::vector<StatefulCost> stateful;  // in stateful-operator order
};

//! Runs the pipeline over one window of tuples (schema = packet_schema()).
//! Reduce emits (keys..., count) with any threshold applied after aggregation;
//! the threshold does not alter the reduce's own n_out/keys accounting.
PipelineResult execute_pipeline(const QuerySpec& q, std::vector<Tuple> input);

//! Distinct values of `field` across `tuples`, sorted.
std::vector<int64_t> output_key_set(const PipelineResult& result, FieldId field);

}  // namespace qplan
