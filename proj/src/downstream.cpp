// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "scalefit/downstream.hpp"

#include <algorithm>
#include <cmath>

#include "scalefit/errors.hpp"

namespace scalefit::downstream {

namespace {

constexpr std::size_t kSigmoidParamCount = 4;
constexpr std::size_t kFusedParamCount = 10;

std::vector<bool> fused_log_mask() {
    // lo, hi, k, L0 uniform; law axes A and B log-spaced.
    return {false, false, false, false, false, true, true, false, false, false};
}

double metric_mre(const SigmoidParams& sp, const std::vector<records::Observation>& obs) {
    if (obs.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& o : obs) {
        if (o.mean == 0.0) throw Error("mre: zero observed mean");
        const double predicted = eval_metric(sp, o.model_size, o.dataset_size);
        sum += std::abs(predicted - o.mean) / std::abs(o.mean);
    }
    return sum / static_cast<double>(obs.size());
}

}  // namespace

void SigmoidParams::validate() const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(sharpness) ||
        !std::isfinite(midpoint))
        throw Error("sigmoid params must be finite");
    if (lo == hi) throw Error("sigmoid limits must differ");
    law.validate();
}

double sigmoid_map(const SigmoidParams& sp, double loss) {
    const double t = sp.sharpness * (loss - sp.midpoint);
    // logistic in a form that never overflows
    double sigma;
    if (t >= 0.0) {
        sigma = 1.0 / (1.0 + std::exp(-t));
    } else {
        const double e = std::exp(t);
        sigma = e / (1.0 + e);
    }
    return sp.lo + (sp.hi - sp.lo) * sigma;
}

double eval_metric(const SigmoidParams& sp, double model_size, double dataset_size) {
    return sigmoid_map(sp, lawcore::eval_loss(sp.law, model_size, dataset_size));
}

fitting::Bounds default_sigmoid_bounds(double metric_min, double metric_max,
                                       double loss_upper_hint) {
    if (!(loss_upper_hint > 0.0)) throw Error("loss upper hint must be positive");
    if (metric_min > metric_max) std::swap(metric_min, metric_max);
    double range = metric_max - metric_min;
    if (range <= 0.0) range = std::max(1.0, std::abs(metric_max));
    fitting::Bounds b;
    b.lower = {metric_min - range, metric_min - range, -1e4, 0.0};
    b.upper = {metric_max + range, metric_max + range, 1e4, loss_upper_hint};
    return b;
}

std::vector<double> sigmoid_to_vector(const SigmoidParams& sp) {
    return {sp.lo,           sp.hi,           sp.sharpness,  sp.midpoint,
            sp.law.irreducible, sp.law.coeff_n, sp.law.coeff_d, sp.law.exp_n,
            sp.law.exp_d,    sp.law.exp_outer};
}

SigmoidParams sigmoid_from_vector(const std::vector<double>& v) {
    if (v.size() != kFusedParamCount) throw Error("fused vector must have 10 entries");
    SigmoidParams sp;
    sp.lo = v[0];
    sp.hi = v[1];
    sp.sharpness = v[2];
    sp.midpoint = v[3];
    sp.law = {v[4], v[5], v[6], v[7], v[8], v[9]};
    return sp;
}

FusedFitResult fused_fit(const std::vector<records::Observation>& observations,
                         const fitting::FitConfig& config,
                         const fitting::Bounds& sigmoid_bounds,
                         const std::vector<std::vector<double>>& extra_starts) {
    if (observations.size() < kFusedParamCount + 1)
        throw Error("under-determined fused fit: need at least " +
                    std::to_string(kFusedParamCount + 1) + " observations, have " +
                    std::to_string(observations.size()));
    if (sigmoid_bounds.size() != kSigmoidParamCount)
        throw Error("fused fit expects 4-parameter sigmoid bounds");

    const fitting::Bounds law_bounds =
        config.bounds.size() == 0 ? fitting::default_law_bounds() : config.bounds;
    fitting::Bounds bounds;
    bounds.lower = sigmoid_bounds.lower;
    bounds.upper = sigmoid_bounds.upper;
    bounds.lower.insert(bounds.lower.end(), law_bounds.lower.begin(), law_bounds.lower.end());
    bounds.upper.insert(bounds.upper.end(), law_bounds.upper.begin(), law_bounds.upper.end());

    std::vector<std::size_t> train_idx, test_idx;
    fitting::resolve_split(config.split, observations, train_idx, test_idx);
    if (train_idx.size() < kFusedParamCount + 1)
        throw Error("under-determined fused fit: train split keeps " +
                    std::to_string(train_idx.size()) + " observations, need " +
                    std::to_string(kFusedParamCount + 1));

    std::vector<records::Observation> train, test;
    for (const auto i : train_idx) train.push_back(observations[i]);
    for (const auto i : test_idx) test.push_back(observations[i]);

    // Metric residuals are always taken in linear space; metrics may be
    // zero or negative where a log transform has no meaning.
    const fitting::Objective f = [&](const std::vector<double>& v) {
        const SigmoidParams sp = sigmoid_from_vector(v);
        double sum = 0.0;
        for (const auto& o : train) {
            const double predicted = eval_metric(sp, o.model_size, o.dataset_size);
            sum += fitting::huber(predicted - o.mean, config.huber_delta);
        }
        return sum;
    };

    const fitting::ResidualFn residuals = [&](const std::vector<double>& v) {
        const SigmoidParams sp = sigmoid_from_vector(v);
        std::vector<double> r;
        r.reserve(train.size());
        for (const auto& o : train)
            r.push_back(eval_metric(sp, o.model_size, o.dataset_size) - o.mean);
        return r;
    };

    fitting::BasinHopOptions options;
    options.hop_count = config.hop_count;
    options.hop_step = config.hop_step;
    options.rng_seed = config.rng_seed;
    options.grid_per_axis = 2;
    options.log_axes = fused_log_mask();
    options.extra_starts = extra_starts;
    options.residuals = residuals;

    const fitting::BasinHopResult hop = fitting::minimize_basin_hopping(f, bounds, options);

    FusedFitResult result;
    result.params = sigmoid_from_vector(hop.x);
    result.objective_value = hop.value;
    result.train_mre = metric_mre(result.params, train);
    result.test_mre = test.empty() ? 0.0 : metric_mre(result.params, test);
    result.at_bound = hop.at_bound;
    result.hop_trace = hop.trace;
    result.train_indices = train_idx;
    result.test_indices = test_idx;
    return result;
}

std::vector<std::pair<double, double>> optimal_metric_curve(
    const SigmoidParams& sp, const std::vector<double>& compute_grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(compute_grid.size());
    for (const double c : compute_grid) {
        const auto pt = lawcore::optimal_allocation(sp.law, c);
        out.emplace_back(c, eval_metric(sp, pt.n_star, pt.d_star));
    }
    return out;
}

ReachabilityVerdict reachability(const SigmoidParams& sp,
                                 const records::BaselineStats& baseline,
                                 const std::vector<double>& compute_grid,
                                 const std::string& cfg_label) {
    if (baseline.stddev < 0.0) throw Error("baseline std must be >= 0");
    ReachabilityVerdict verdict;
    verdict.metric = baseline.metric;
    verdict.cfg_label = cfg_label;
    verdict.baseline = baseline;
    verdict.metric_limit = sigmoid_map(sp, sp.law.irreducible);
    if (baseline.direction == records::Direction::kHigherBetter)
        verdict.reachable = verdict.metric_limit >= baseline.mean - baseline.stddev;
    else
        verdict.reachable = verdict.metric_limit <= baseline.mean + baseline.stddev;
    verdict.trace = optimal_metric_curve(sp, compute_grid);
    return verdict;
}

}  // namespace scalefit::downstream
