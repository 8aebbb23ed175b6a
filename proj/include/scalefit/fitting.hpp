// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Huber-objective fitting of the scaling surface: a basin-hopping global
// search wrapped around a bounded quasi-Newton local optimizer with
// numerical gradients. The engine is generic over (objective, bounds) so
// the fused downstream fit reuses it over a longer parameter vector.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "scalefit/lawcore.hpp"
#include "scalefit/records.hpp"

namespace scalefit::fitting {

using Objective = std::function<double(const std::vector<double>&)>;

// Optional residual structure of an objective: the fit objectives here
// are Huber sums whose small-residual regime is plain least squares, and
// a Gauss-Newton step on the residual vector tracks sloppy valleys that
// defeat line-search methods.
using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;

// Closed per-parameter intervals, lower < upper.
struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t size() const { return lower.size(); }
    double range(std::size_t i) const { return upper[i] - lower[i]; }
    void clamp(std::vector<double>& x) const;
    bool contains(const std::vector<double>& x) const;
    void validate() const;
};

enum class LossSpace { kLinear, kLog };

struct TrainTestSplit {
    enum class Mode { kLargestComputeBudget, kFraction, kExplicitIndices };
    Mode mode = Mode::kLargestComputeBudget;
    double fraction = 0.0;
    std::vector<std::size_t> test_indices;

    static TrainTestSplit largest_budget() { return {}; }
    static TrainTestSplit of_fraction(double f);
    static TrainTestSplit explicit_indices(std::vector<std::size_t> idx);
};

struct FitConfig {
    double huber_delta = 1e-3;
    Bounds bounds;                 // empty -> default_law_bounds()
    int hop_count = 2000;
    std::vector<double> hop_step;  // empty -> 10% of each bound range
    std::uint64_t rng_seed = 0;
    LossSpace loss_space = LossSpace::kLinear;
    TrainTestSplit split;
};

struct FitResult {
    lawcore::ScalingLawParams params;
    double objective_value = 0.0;  // Huber objective over the train subset
    double train_mre = 0.0;
    double test_mre = 0.0;
    std::vector<bool> at_bound;    // order: E, A, B, alpha, beta, gamma
    std::vector<std::pair<int, double>> hop_trace;  // (hop, best-ever objective)
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

// r^2/2 inside |r| <= delta, delta*(|r| - delta/2) outside; C1 at the knee.
double huber(double residual, double delta);

// Sum of huber(predicted - observed mean) over observations, with
// residuals taken in linear or log space per config.loss_space.
double objective(const lawcore::ScalingLawParams& params,
                 const std::vector<records::Observation>& observations,
                 const FitConfig& config);

// Mean of |predicted - observed| / |observed| over observations.
double mre(const lawcore::ScalingLawParams& params,
           const std::vector<records::Observation>& observations);

// Bound-respecting central-difference gradient (relative step `rel_step`;
// falls back to one-sided at a bound).
std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x,
                                     const Bounds& bounds, double rel_step = 1e-7);

struct LocalMinimum {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;  // projected-gradient inf-norm <= 1e-8
};

// Projected L-BFGS with Armijo backtracking. Stops at projected-gradient
// inf-norm <= 1e-8 or 500 iterations; the result is always within bounds.
// Axes flagged in log_axes are optimized in log coordinates (bounds and
// results stay in natural units); parameters spanning many decades are
// hopeless for a quasi-Newton method in linear coordinates.
LocalMinimum local_minimize(const Objective& f, std::vector<double> start,
                            const Bounds& bounds, const std::vector<bool>& log_axes = {});

// Derivative-free direction-set refinement (Powell-style with golden
// section line minimization). Quasi-Newton descent stalls in the razor
// valleys these fits produce: near the floor the gradient is dominated
// by stiff directions whose resolvable steps are microscopic, while the
// sloppy valley direction is invisible to it. The sweep-learned
// directions track that valley. Deterministic.
LocalMinimum polish_minimum(const Objective& f, std::vector<double> start,
                            const Bounds& bounds, const std::vector<bool>& log_axes = {});

// Damped least-squares (Levenberg-Marquardt) steps on the residual
// vector; proposals are only accepted when the true objective drops, so
// Huber tails stay honest. No-op when `residuals` is empty.
LocalMinimum least_squares_polish(const Objective& f, const ResidualFn& residuals,
                                  std::vector<double> start, const Bounds& bounds,
                                  const std::vector<bool>& log_axes = {});

// Full finalization used on a search's best point: alternates the
// direction-set polish, a fresh quasi-Newton restart, and (when residual
// structure is available) least-squares steps until none of them improve.
LocalMinimum refine_minimum(const Objective& f, std::vector<double> start, const Bounds& bounds,
                            const std::vector<bool>& log_axes = {},
                            const ResidualFn& residuals = nullptr);

// Deterministic start lattice strictly inside bounds: k points per axis,
// log-spaced where log_axes is set. k=1 yields the (geometric) midpoint.
std::vector<std::vector<double>> multi_start_grid(const Bounds& bounds, int k_per_axis,
                                                  const std::vector<bool>& log_axes);
// Law-parameter wrapper: log-uniform lattice over A and B, uniform over
// E, alpha, beta, gamma.
std::vector<std::vector<double>> multi_start_grid(const Bounds& bounds, int k_per_axis);

struct BasinHopOptions {
    int hop_count = 2000;
    // Per-parameter perturbation scale; empty -> 10% of each bound range.
    // On log axes both the default and explicit values are measured in
    // log units (decades times ln 10), matching the hop geometry.
    std::vector<double> hop_step;
    std::uint64_t rng_seed = 0;
    int grid_per_axis = 2;       // start-lattice resolution
    std::vector<bool> log_axes;  // empty -> all uniform
    std::vector<std::vector<double>> extra_starts;  // candidate incumbents, also locally minimized
    ResidualFn residuals;        // optional least-squares structure for the refinement
};

struct BasinHopResult {
    std::vector<double> x;
    double value = 0.0;
    std::vector<std::pair<int, double>> trace;  // (hop, best-ever objective)
    std::vector<bool> at_bound;
    int local_minimizations = 0;
};

// Basin hopping: perturb the incumbent by per-parameter uniform steps,
// locally minimize, accept by the Metropolis rule at temperature 1.0.
// hop_count = 0 degenerates to a single local_minimize from the best
// start. Deterministic given rng_seed.
BasinHopResult minimize_basin_hopping(const Objective& f, const Bounds& bounds,
                                      const BasinHopOptions& options);

// Fits ScalingLawParams to observations (needs more observations than
// parameters, i.e. >= 7). extra_starts join the start candidates.
FitResult basin_hop_fit(const std::vector<records::Observation>& observations,
                        const FitConfig& config,
                        const std::vector<std::vector<double>>& extra_starts = {});

// Default search box: brackets reported coefficient sets with at least a
// decade of slack on each side.
Bounds default_law_bounds();

// Axes of the law vector optimized in log coordinates (A and B).
std::vector<bool> law_log_axes();

// (E, A, B, alpha, beta, gamma) <-> optimization vector.
std::vector<double> law_to_vector(const lawcore::ScalingLawParams& p);
lawcore::ScalingLawParams law_from_vector(const std::vector<double>& v);

// Resolves a split against a concrete observation list.
void resolve_split(const TrainTestSplit& split,
                   const std::vector<records::Observation>& observations,
                   std::vector<std::size_t>& train_out, std::vector<std::size_t>& test_out);

}  // namespace scalefit::fitting
