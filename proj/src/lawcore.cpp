// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "scalefit/lawcore.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "scalefit/errors.hpp"

namespace scalefit::lawcore {

namespace {

// Loss along the isoFLOP constraint D = C / (6N).
double constrained_loss(const ScalingLawParams& p, double model_size, double compute) {
    return eval_loss(p, model_size, compute / (6.0 * model_size));
}

// Same curve without the constant E term. The stencil in
// isoflop_curvature differences this instead of the full loss: E cancels
// there anyway, and keeping it would drown the curvature signal in
// rounding noise whenever E dominates the power term.
double constrained_excess(const ScalingLawParams& p, double model_size, double compute) {
    const double dataset_size = compute / (6.0 * model_size);
    const double term_n = std::exp(std::log(p.coeff_n) - p.exp_n * std::log(model_size));
    const double term_d = std::exp(std::log(p.coeff_d) - p.exp_d * std::log(dataset_size));
    return std::exp(p.exp_outer * std::log(term_n + term_d));
}

}  // namespace

void ScalingLawParams::validate() const {
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(irreducible) || !finite(coeff_n) || !finite(coeff_d) || !finite(exp_n) ||
        !finite(exp_d) || !finite(exp_outer))
        throw Error("scaling law params must be finite");
    if (irreducible < 0.0) throw Error("irreducible loss E must be >= 0");
    if (!(coeff_n > 0.0) || !(coeff_d > 0.0)) throw Error("coefficients A, B must be > 0");
    if (!(exp_n > 0.0) || !(exp_d > 0.0) || !(exp_outer > 0.0))
        throw Error("exponents alpha, beta, gamma must be > 0");
}

double eval_loss(const ScalingLawParams& params, double model_size, double dataset_size) {
    params.validate();
    if (!(model_size > 0.0) || !std::isfinite(model_size))
        throw Error("eval_loss: nonpositive model size");
    if (!(dataset_size > 0.0) || !std::isfinite(dataset_size))
        throw Error("eval_loss: nonpositive dataset size");
    // exp/log form keeps N^alpha well-behaved at extreme sizes
    const double term_n = std::exp(std::log(params.coeff_n) - params.exp_n * std::log(model_size));
    const double term_d =
        std::exp(std::log(params.coeff_d) - params.exp_d * std::log(dataset_size));
    return params.irreducible + std::exp(params.exp_outer * std::log(term_n + term_d));
}

ComputeOptimalPoint optimal_allocation(const ScalingLawParams& params, double compute) {
    params.validate();
    if (!(compute > 0.0) || !std::isfinite(compute))
        throw Error("optimal_allocation: compute must be positive");
    const double a = params.exp_n, b = params.exp_d;
    // log N* = log(aA / bB) / (a+b) + (b / (a+b)) * log(C/6)
    const double log_k = (std::log(a) + std::log(params.coeff_n) - std::log(b) -
                          std::log(params.coeff_d)) /
                         (a + b);
    const double log_n = log_k + (b / (a + b)) * std::log(compute / 6.0);

    ComputeOptimalPoint pt;
    pt.compute = compute;
    pt.n_star = std::exp(log_n);
    pt.d_star = compute / (6.0 * pt.n_star);
    pt.r_star = pt.d_star / pt.n_star;
    pt.loss_star = eval_loss(params, pt.n_star, pt.d_star);
    return pt;
}

double ratio_at(const ScalingLawParams& params, double compute) {
    params.validate();
    if (!(compute > 0.0)) throw Error("ratio_at: compute must be positive");
    const double a = params.exp_n, b = params.exp_d;
    const double log_k =
        std::log(a) + std::log(params.coeff_n) - std::log(b) - std::log(params.coeff_d);
    const double log_r =
        ((a - b) / (a + b)) * std::log(compute / 6.0) - 2.0 * log_k / (a + b);
    return std::exp(log_r);
}

std::vector<std::pair<double, double>> ratio_curve(const ScalingLawParams& params,
                                                   const std::vector<double>& compute_grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(compute_grid.size());
    for (const double c : compute_grid) out.emplace_back(c, ratio_at(params, c));
    return out;
}

ComputeOptimalPoint solve_compute_for_ratio(const ScalingLawParams& params,
                                            double target_ratio) {
    params.validate();
    if (!(target_ratio > 0.0)) throw Error("target ratio must be positive");
    const double a = params.exp_n, b = params.exp_d;
    if (a == b) throw Error("ratio is compute-invariant (alpha == beta)");
    const double log_k =
        std::log(a) + std::log(params.coeff_n) - std::log(b) - std::log(params.coeff_d);
    // invert log r = ((a-b)/(a+b)) log(C/6) - 2 log_k/(a+b)
    const double log_c =
        std::log(6.0) + (std::log(target_ratio) + 2.0 * log_k / (a + b)) * (a + b) / (a - b);
    const double compute = std::exp(log_c);
    if (!std::isfinite(compute) || compute <= 0.0)
        throw Error("ratio target " + std::to_string(target_ratio) +
                    " is out of representable compute range");
    return optimal_allocation(params, compute);
}

double isoflop_curvature(const ScalingLawParams& params, double compute) {
    const ComputeOptimalPoint pt = optimal_allocation(params, compute);
    const double h = 1e-4 * pt.n_star;
    const double f_plus = constrained_excess(params, pt.n_star + h, compute);
    const double f_mid = constrained_excess(params, pt.n_star, compute);
    const double f_minus = constrained_excess(params, pt.n_star - h, compute);
    return (f_plus - 2.0 * f_mid + f_minus) / (h * h);
}

FlatnessReport flatness_range(const ScalingLawParams& params, double compute, double epsilon) {
    if (!(epsilon > 0.0)) throw Error("flatness_range: epsilon must be positive");
    const ComputeOptimalPoint pt = optimal_allocation(params, compute);

    FlatnessReport rep;
    rep.compute = compute;
    rep.loss_star = pt.loss_star;
    rep.epsilon = epsilon;
    rep.kappa = isoflop_curvature(params, compute);

    const double target = pt.loss_star + epsilon;
    const double n_lo = 1.0;
    const double n_hi = compute / 6.0;  // D >= 1 on the other side

    // Bisection on log N between a bracket endpoint (loss above target)
    // and N* (loss below target), to relative tolerance 1e-10.
    const auto bisect = [&](double outer, double inner) {
        double lo = std::log(outer);  // g > 0 side
        double hi = std::log(inner);  // g < 0 side (the optimum)
        for (int iter = 0; iter < 200 && std::abs(hi - lo) > 1e-10; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const double g = constrained_loss(params, std::exp(mid), compute) - target;
            if (g > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        return std::exp(0.5 * (lo + hi));
    };

    if (constrained_loss(params, n_lo, compute) - target < 0.0) {
        rep.n1 = n_lo;
        rep.truncated = true;
    } else {
        rep.n1 = bisect(n_lo, pt.n_star);
    }
    if (constrained_loss(params, n_hi, compute) - target < 0.0) {
        rep.n2 = n_hi;
        rep.truncated = true;
    } else {
        rep.n2 = bisect(n_hi, pt.n_star);
    }

    rep.delta_n = rep.n2 - rep.n1;
    rep.d1 = compute / (6.0 * rep.n1);
    rep.d2 = compute / (6.0 * rep.n2);
    rep.delta_d = std::abs(rep.d1 - rep.d2);
    return rep;
}

}  // namespace scalefit::lawcore
