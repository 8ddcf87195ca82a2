// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "qplan/cost_matrix.hpp"

namespace qplan {

//! Holt double exponential smoothing (level + trend).
struct DespParams {
  double alpha = 0.5;  // level smoothing
  double beta = 0.3;   // trend smoothing
};

struct DespState {
  double level = 0.0;
  double trend = 0.0;
  int64_t observations = 0;

  double forecast() const { return level + trend; }
};

//! One observation. The first sample seeds the level, the second seeds the
//! trend from the first difference before the regular update; afterwards the
//! standard level/trend recurrences apply. Exact on linear series.
void desp_update(DespState& s, double y, const DespParams& p);

//! Per-operator next-window cost forecaster: one smoother per tracked series
//! (state bits, input tuples, output tuples) per operator. Optional cluster
//! scale factors multiply the predicted state bits.
class CostPredictor {
 public:
  explicit CostPredictor(DespParams params = {}) : params_(params) {}

  void observe(const CostMatrix& m);
  int64_t windows_observed() const { return windows_; }
  //! Two windows give the smoother a level and a trend to extrapolate from.
  bool ready() const { return windows_ >= 2; }

  void set_scaling(std::map<OpKey, int> cluster_of, std::vector<double> gammas);

  //! Forecast for the next window: rounded to integers, clamped non-negative,
  //! outputs clamped to inputs.
  std::map<OpKey, CostEntry> predict() const;

 private:
  struct Series {
    DespState bits, n_in, n_out;
  };
  DespParams params_;
  std::map<OpKey, Series> series_;
  int64_t windows_ = 0;
  std::map<OpKey, int> cluster_of_;
  std::vector<double> gammas_;
};

//! Operators grouped by demand shape: features are the 95th percentile of
//! input tuples, the 95th percentile of state bits and the coefficient of
//! variation of state bits over the training windows, z-scored per dimension.
struct ClusterModel {
  std::map<OpKey, int> cluster_of;
  int k = 0;
};

//! k-means (k-means++ seeding, at most 100 iterations) with k capped at
//! min(max_k, #operators). Empty clusters are dropped and ids compacted.
ClusterModel fit_clusters(const CostHistory& training, uint64_t seed, int max_k = 10);

//! Cyclic coordinate descent over per-cluster scale factors: clusters in
//! ascending id order scan the grid 0.1, 0.2, ..., 3.0 and keep a value only
//! when the objective strictly improves; stops after a pass with no change
//! or max_passes passes. Starts from all ones.
std::vector<double> fit_scaling(int k,
                                const std::function<double(const std::vector<double>&)>& objective,
                                int max_passes = 5);

}  // namespace qplan
