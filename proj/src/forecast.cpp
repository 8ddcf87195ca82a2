// SPDX-License-Identifier: Apache-2.0
#include "qplan/forecast.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "qplan/common.hpp"

namespace qplan {

void desp_update(DespState& s, double y, const DespParams& p) {
  if (s.observations == 0) {
    s.level = y;
    s.trend = 0.0;
    s.observations = 1;
    return;
  }
  if (s.observations == 1) s.trend = y - s.level;
  double prev_level = s.level;
  s.level = p.alpha * y + (1.0 - p.alpha) * (s.level + s.trend);
  s.trend = p.beta * (s.level - prev_level) + (1.0 - p.beta) * s.trend;
  s.observations++;
}

void CostPredictor::observe(const CostMatrix& m) {
  for (const auto& [key, entry] : m.entries) {
    Series& s = series_[key];
    desp_update(s.bits, static_cast<double>(entry.bits), params_);
    desp_update(s.n_in, static_cast<double>(entry.n_in), params_);
    desp_update(s.n_out, static_cast<double>(entry.n_out), params_);
  }
  windows_++;
}

void CostPredictor::set_scaling(std::map<OpKey, int> cluster_of, std::vector<double> gammas) {
  cluster_of_ = std::move(cluster_of);
  gammas_ = std::move(gammas);
}

namespace {
int64_t clamp_round(double v) {
  if (!(v > 0.0)) return 0;
  return llround(v);
}
}  // namespace

std::map<OpKey, CostEntry> CostPredictor::predict() const {
  std::map<OpKey, CostEntry> out;
  for (const auto& [key, s] : series_) {
    double bits = s.bits.forecast();
    if (!gammas_.empty()) {
      auto it = cluster_of_.find(key);
      if (it != cluster_of_.end() && it->second >= 0 &&
          it->second < static_cast<int>(gammas_.size())) {
        bits *= gammas_[static_cast<size_t>(it->second)];
      }
    }
    CostEntry e;
    e.bits = clamp_round(bits);
    e.n_in = clamp_round(s.n_in.forecast());
    e.n_out = std::min(clamp_round(s.n_out.forecast()), e.n_in);
    out[key] = e;
  }
  return out;
}

ClusterModel fit_clusters(const CostHistory& training, uint64_t seed, int max_k) {
  // Collect per-operator series over the training windows.
  std::map<OpKey, std::vector<double>> bits_series, nin_series;
  for (const auto& m : training) {
    for (const auto& [key, e] : m.entries) {
      bits_series[key].push_back(static_cast<double>(e.bits));
      nin_series[key].push_back(static_cast<double>(e.n_in));
    }
  }
  ClusterModel model;
  if (bits_series.empty()) return model;

  std::vector<OpKey> keys;
  std::vector<std::array<double, 3>> features;
  for (auto& [key, bits] : bits_series) {
    keys.push_back(key);
    features.push_back({percentile(nin_series[key], 0.95), percentile(bits, 0.95),
                        coefficient_of_variation(bits)});
  }
  // z-score each dimension; constant dimensions collapse to zero.
  for (int d = 0; d < 3; ++d) {
    std::vector<double> column;
    for (const auto& f : features) column.push_back(f[static_cast<size_t>(d)]);
    double mean = 0;
    for (double v : column) mean += v;
    mean /= static_cast<double>(column.size());
    double sd = population_stddev(column);
    for (auto& f : features) {
      f[static_cast<size_t>(d)] = sd > 0 ? (f[static_cast<size_t>(d)] - mean) / sd : 0.0;
    }
  }

  const int n = static_cast<int>(keys.size());
  const int k = std::min(max_k, n);
  auto dist2 = [&](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    double s = 0;
    for (int d = 0; d < 3; ++d) {
      double diff = a[static_cast<size_t>(d)] - b[static_cast<size_t>(d)];
      s += diff * diff;
    }
    return s;
  };

  std::mt19937_64 rng(seed);
  std::vector<std::array<double, 3>> centers;
  centers.push_back(features[std::uniform_int_distribution<size_t>(
      0, static_cast<size_t>(n) - 1)(rng)]);
  while (static_cast<int>(centers.size()) < k) {
    std::vector<double> weights(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, dist2(features[static_cast<size_t>(i)], c));
      weights[static_cast<size_t>(i)] = best;
    }
    double total = 0;
    for (double w : weights) total += w;
    if (total <= 0) {
      // All points coincide with a center; spread deterministically.
      centers.push_back(features[centers.size() % static_cast<size_t>(n)]);
      continue;
    }
    std::discrete_distribution<size_t> pick(weights.begin(), weights.end());
    centers.push_back(features[pick(rng)]);
  }

  std::vector<int> assign(static_cast<size_t>(n), 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best_c = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (size_t c = 0; c < centers.size(); ++c) {
        double d = dist2(features[static_cast<size_t>(i)], centers[c]);
        if (d < best_d) {
          best_d = d;
          best_c = static_cast<int>(c);
        }
      }
      if (assign[static_cast<size_t>(i)] != best_c) {
        assign[static_cast<size_t>(i)] = best_c;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    std::vector<std::array<double, 3>> sums(centers.size(), {0, 0, 0});
    std::vector<int> counts(centers.size(), 0);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < 3; ++d) {
        sums[static_cast<size_t>(assign[static_cast<size_t>(i)])][static_cast<size_t>(d)] +=
            features[static_cast<size_t>(i)][static_cast<size_t>(d)];
      }
      counts[static_cast<size_t>(assign[static_cast<size_t>(i)])]++;
    }
    for (size_t c = 0; c < centers.size(); ++c) {
      if (counts[c] == 0) continue;  // keep the old center; dropped later if still empty
      for (int d = 0; d < 3; ++d) {
        centers[c][static_cast<size_t>(d)] = sums[c][static_cast<size_t>(d)] / counts[c];
      }
    }
  }

  // Compact away empty clusters.
  std::vector<int> remap(centers.size(), -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    int c = assign[static_cast<size_t>(i)];
    if (remap[static_cast<size_t>(c)] < 0) remap[static_cast<size_t>(c)] = next++;
  }
  for (int i = 0; i < n; ++i) {
    model.cluster_of[keys[static_cast<size_t>(i)]] =
        remap[static_cast<size_t>(assign[static_cast<size_t>(i)])];
  }
  model.k = next;
  return model;
}

std::vector<double> fit_scaling(int k,
                                const std::function<double(const std::vector<double>&)>& objective,
                                int max_passes) {
  std::vector<double> gammas(static_cast<size_t>(std::max(k, 0)), 1.0);
  if (k <= 0) return gammas;
  double best = objective(gammas);
  for (int pass = 0; pass < max_passes; ++pass) {
    bool changed = false;
    for (int c = 0; c < k; ++c) {
      double keep = gammas[static_cast<size_t>(c)];
      double best_g = keep;
      for (int step = 1; step <= 30; ++step) {
        double g = step / 10.0;
        gammas[static_cast<size_t>(c)] = g;
        double obj = objective(gammas);
        if (obj < best) {
          best = obj;
          best_g = g;
        }
      }
      gammas[static_cast<size_t>(c)] = best_g;
      if (best_g != keep) changed = true;
    }
    if (!changed) break;
  }
  return gammas;
}

}  // namespace qplan
