// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// The parametric loss surface L(N, D) = E + (A/N^a + B/D^b)^g and its
// closed-form compute-optimal frontier, ratio extrapolation, isoFLOP
// curvature and flatness geometry. All heavy evaluation runs in log
// space so budgets up to ~1e30 FLOPs stay well-conditioned.

#pragma once

#include <vector>

namespace scalefit::lawcore {

struct ScalingLawParams {
    double irreducible = 0.0;  // E >= 0
    double coeff_n = 0.0;      // A > 0
    double coeff_d = 0.0;      // B > 0
    double exp_n = 0.0;        // alpha > 0
    double exp_d = 0.0;        // beta > 0
    double exp_outer = 1.0;    // gamma > 0; 1 recovers the additive form

    // Throws scalefit::Error unless all six are finite and positive as
    // required (E may be zero).
    void validate() const;
};

// One point on the compute-optimal frontier.
struct ComputeOptimalPoint {
    double compute = 0.0;   // C
    double n_star = 0.0;    // argmin model size
    double d_star = 0.0;    // C / (6 n*)
    double r_star = 0.0;    // d* / n*
    double loss_star = 0.0; // L(n*, d*)
};

// Width of the near-optimal basin of one isoFLOP at loss tolerance eps.
// D1 pairs with the small-N root N1 (so D1 > D2), matching the canonical
// table layout.
struct FlatnessReport {
    double compute = 0.0;
    double loss_star = 0.0;
    double epsilon = 0.0;
    double n1 = 0.0;       // small-N root, N1 < N* < N2
    double n2 = 0.0;
    double delta_n = 0.0;  // N2 - N1
    double d1 = 0.0;       // C / (6 N1)
    double d2 = 0.0;       // C / (6 N2)
    double delta_d = 0.0;  // |D1 - D2|
    double kappa = 0.0;    // isoFLOP curvature at the optimum
    bool truncated = false;  // a root hit the [1, C/6] search bound
};

// E + (A N^-a + B D^-b)^g. Strictly decreasing in N and D, > E.
double eval_loss(const ScalingLawParams& params, double model_size, double dataset_size);

// Closed-form frontier point for budget C:
//   N* = (aA / bB)^(1/(a+b)) * (C/6)^(b/(a+b)),  D* = C / (6 N*).
ComputeOptimalPoint optimal_allocation(const ScalingLawParams& params, double compute);

// r*(C) = (C/6)^((a-b)/(a+b)) * (aA/bB)^(-2/(a+b)) along a C grid.
// Decreasing in C iff a < b; constant iff a == b.
std::vector<std::pair<double, double>> ratio_curve(const ScalingLawParams& params,
                                                   const std::vector<double>& compute_grid);
double ratio_at(const ScalingLawParams& params, double compute);

// Inverts the r*(C) power law: the budget where r* equals target_ratio,
// plus the frontier point there. Throws when alpha == beta (the ratio is
// then compute-invariant).
ComputeOptimalPoint solve_compute_for_ratio(const ScalingLawParams& params, double target_ratio);

// d^2/dN^2 [ L(N, C/(6N)) ] at N*, central three-point stencil with
// relative step 1e-4.
double isoflop_curvature(const ScalingLawParams& params, double compute);

// Bisection roots of L(N, C/(6N)) = L* + eps on both sides of N*, over
// N in [1, C/6]; roots beyond a bound are clamped and flagged.
FlatnessReport flatness_range(const ScalingLawParams& params, double compute,
                              double epsilon = 1e-3);

}  // namespace scalefit::lawcore
