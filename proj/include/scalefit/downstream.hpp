// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Fused downstream scaling law: a generalized sigmoid over the loss
// surface, fitted jointly (all ten parameters at once), with optimal
// metric extrapolation against real-data baselines.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scalefit/fitting.hpp"
#include "scalefit/lawcore.hpp"
#include "scalefit/records.hpp"

namespace scalefit::downstream {

// M(L) = lo + (hi - lo) / (1 + exp(-k (L - L0))). The sign of k is free,
// so one form covers lower-better and higher-better metrics.
struct SigmoidParams {
    double lo = 0.0;         // lower metric limit
    double hi = 1.0;         // higher metric limit
    double sharpness = 0.0;  // k
    double midpoint = 0.0;   // L0
    lawcore::ScalingLawParams law;

    void validate() const;
};

struct ReachabilityVerdict {
    std::string metric;
    std::string cfg_label;
    double metric_limit = 0.0;  // asymptotic optimal metric as C -> inf
    records::BaselineStats baseline;
    bool reachable = false;
    std::vector<std::pair<double, double>> trace;  // (C, M*(C))
};

struct FusedFitResult {
    SigmoidParams params;
    double objective_value = 0.0;
    double train_mre = 0.0;
    double test_mre = 0.0;
    std::vector<bool> at_bound;  // order: lo, hi, k, L0, E, A, B, alpha, beta, gamma
    std::vector<std::pair<int, double>> hop_trace;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

// Overflow-safe evaluation of the sigmoid at loss L.
double sigmoid_map(const SigmoidParams& sp, double loss);

// sigmoid_map composed with the loss surface at (N, D).
double eval_metric(const SigmoidParams& sp, double model_size, double dataset_size);

// Default box for the four sigmoid parameters given the observed metric
// range: lo/hi within one range-width beyond the data, k in [-1e4, 1e4],
// L0 in [0, loss_upper_hint].
fitting::Bounds default_sigmoid_bounds(double metric_min, double metric_max,
                                       double loss_upper_hint = 10.0);

// Joint 10-parameter Huber fit of metric observations. sigmoid_bounds
// covers (lo, hi, k, L0); the law box comes from config.bounds. Needs
// at least 11 observations. extra_starts (full 10-vectors) join the
// start candidates, e.g. a sequential two-step solution.
FusedFitResult fused_fit(const std::vector<records::Observation>& observations,
                         const fitting::FitConfig& config,
                         const fitting::Bounds& sigmoid_bounds,
                         const std::vector<std::vector<double>>& extra_starts = {});

// M*(C) along the compute-optimal frontier of sp.law; the sigmoid is
// monotone in L, so the loss-optimal allocation is also metric-optimal.
std::vector<std::pair<double, double>> optimal_metric_curve(
    const SigmoidParams& sp, const std::vector<double>& compute_grid);

// M_limit = sigmoid_map(sp, E); reachable iff M_limit lies within one
// baseline std of the baseline mean or beyond it on the favorable side.
ReachabilityVerdict reachability(const SigmoidParams& sp,
                                 const records::BaselineStats& baseline,
                                 const std::vector<double>& compute_grid,
                                 const std::string& cfg_label = "");

// (lo, hi, k, L0, E, A, B, alpha, beta, gamma) <-> optimization vector.
std::vector<double> sigmoid_to_vector(const SigmoidParams& sp);
SigmoidParams sigmoid_from_vector(const std::vector<double>& v);

}  // namespace scalefit::downstream
