// SPDX-License-Identifier: Apache-2.0
#include "qplan/pipeline.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace qplan {

namespace {

struct TupleHash {
  size_t operator()(const Tuple& t) const {
    uint64_t h = 1469598103934665603ull;
    for (int64_t v : t) {
      h ^= static_cast<uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

size_t field_pos(const std::vector<FieldId>& schema, FieldId f) {
  auto it = std::find(schema.begin(), schema.end(), f);
  if (it == schema.end()) {
    fail(std::string("pipeline references field '") + field_name(f) +
         "' absent from the live schema");
  }
  return static_cast<size_t>(it - schema.begin());
}

Tuple project_tuple(const Tuple& t, const std::vector<size_t>& idx) {
  Tuple out;
  out.reserve(idx.size());
  for (size_t i : idx) out.push_back(t[i]);
  return out;
}

}  // namespace

Tuple tuple_of(const PacketRecord& r) {
  return Tuple{static_cast<int64_t>(r.sip),   static_cast<int64_t>(r.dip),
               static_cast<int64_t>(r.sport), static_cast<int64_t>(r.dport),
               static_cast<int64_t>(r.proto), static_cast<int64_t>(r.len),
               static_cast<int64_t>(r.tcpflags)};
}

PipelineResult execute_pipeline(const QuerySpec& q, std::vector<Tuple> input) {
  PipelineResult res;
  res.schema = packet_schema();
  std::vector<Tuple> tuples = std::move(input);

  for (const auto& op : q.ops) {
    if (const auto* f = std::get_if<FilterOp>(&op)) {
      size_t pos = field_pos(res.schema, f->field);
      std::vector<Tuple> kept;
      kept.reserve(tuples.size());
      for (auto& t : tuples) {
        if (cmp_eval(f->cmp, t[pos], f->value)) kept.push_back(std::move(t));
      }
      tuples = std::move(kept);
    } else if (const auto* a = std::get_if<AllowFilterOp>(&op)) {
      size_t pos = field_pos(res.schema, a->field);
      std::vector<Tuple> kept;
      kept.reserve(tuples.size());
      for (auto& t : tuples) {
        int64_t prefix = static_cast<int64_t>(
            mask_prefix(static_cast<uint32_t>(t[pos]), a->mask_bits));
        if (std::binary_search(a->allowed.begin(), a->allowed.end(), prefix)) {
          kept.push_back(std::move(t));
        }
      }
      tuples = std::move(kept);
    } else if (const auto* p = std::get_if<ProjectOp>(&op)) {
      std::vector<size_t> idx;
      for (FieldId f2 : p->fields) idx.push_back(field_pos(res.schema, f2));
      for (auto& t : tuples) t = project_tuple(t, idx);
      res.schema = p->fields;
    } else if (const auto* m = std::get_if<MaskOp>(&op)) {
      size_t pos = field_pos(res.schema, m->field);
      for (auto& t : tuples) {
        t[pos] = static_cast<int64_t>(mask_prefix(static_cast<uint32_t>(t[pos]), m->mask_bits));
      }
    } else if (const auto* d = std::get_if<DistinctOp>(&op)) {
      StatefulCost cost;
      cost.n_in = static_cast<int64_t>(tuples.size());
      if (!d->keys.empty()) {
        std::vector<size_t> idx;
        for (FieldId f2 : d->keys) idx.push_back(field_pos(res.schema, f2));
        for (auto& t : tuples) t = project_tuple(t, idx);
        res.schema = d->keys;
      }
      std::unordered_set<Tuple, TupleHash> seen;
      std::vector<Tuple> unique;
      for (auto& t : tuples) {
        if (seen.insert(t).second) unique.push_back(std::move(t));
      }
      tuples = std::move(unique);
      cost.n_out = static_cast<int64_t>(tuples.size());
      cost.keys = cost.n_out;
      res.stateful.push_back(cost);
    } else {
      const auto& r = std::get<ReduceOp>(op);
      StatefulCost cost;
      cost.is_reduce = true;
      cost.n_in = static_cast<int64_t>(tuples.size());
      std::vector<size_t> idx;
      for (FieldId f2 : r.keys) idx.push_back(field_pos(res.schema, f2));
      std::optional<size_t> vpos;
      if (r.value_field) vpos = field_pos(res.schema, *r.value_field);
      std::unordered_map<Tuple, int64_t, TupleHash> groups;
      std::vector<Tuple> order;
      for (const auto& t : tuples) {
        Tuple key = project_tuple(t, idx);
        auto [it, inserted] = groups.try_emplace(key, 0);
        if (inserted) order.push_back(key);
        it->second += vpos ? t[*vpos] : 1;
      }
      cost.keys = static_cast<int64_t>(groups.size());
      cost.n_out = cost.keys;
      res.stateful.push_back(cost);
      res.schema = r.keys;
      res.schema.push_back(FieldId::Count);
      std::vector<Tuple> out;
      out.reserve(order.size());
      for (auto& key : order) {
        int64_t agg = groups[key];
        if (r.threshold && !cmp_eval(r.threshold->cmp, agg, r.threshold->value)) continue;
        Tuple t = std::move(key);
        t.push_back(agg);
        out.push_back(std::move(t));
      }
      tuples = std::move(out);
    }
  }
  res.output = std::move(tuples);
  return res;
}

std::vector<int64_t> output_key_set(const PipelineResult& result, FieldId field) {
  size_t pos = field_pos(result.schema, field);
  std::vector<int64_t> keys;
  keys.reserve(result.output.size());
  for (const auto& t : result.output) keys.push_back(t[pos]);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

}  // namespace qplan
