// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "scalefit/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "scalefit/errors.hpp"
#include "scalefit/rng.hpp"

namespace scalefit::fitting {

namespace {

constexpr double kProjGradTol = 1e-8;
constexpr int kMaxInnerIterations = 500;
constexpr int kLbfgsMemory = 10;
constexpr double kArmijoSlope = 1e-4;
constexpr double kMetropolisTemperature = 1.0;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Components pointing out of the box at an active bound carry no descent.
double projected_gradient_norm(const std::vector<double>& x, const std::vector<double>& g,
                               const Bounds& bounds) {
    double norm = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double pg = g[i];
        if (x[i] <= bounds.lower[i] && g[i] > 0.0) pg = 0.0;
        if (x[i] >= bounds.upper[i] && g[i] < 0.0) pg = 0.0;
        norm = std::max(norm, std::abs(pg));
    }
    return norm;
}

// Natural <-> optimization coordinates: log axes are optimized on their
// logarithm so quasi-Newton steps act multiplicatively there.
struct AxisTransform {
    std::vector<bool> log_axes;  // empty means identity

    bool is_log(std::size_t i) const { return !log_axes.empty() && log_axes[i]; }

    Bounds to_opt(const Bounds& bounds) const {
        Bounds out = bounds;
        for (std::size_t i = 0; i < bounds.size(); ++i) {
            if (!is_log(i)) continue;
            if (!(bounds.lower[i] > 0.0))
                throw Error("log axis requires a positive lower bound (axis " +
                            std::to_string(i) + ")");
            out.lower[i] = std::log(bounds.lower[i]);
            out.upper[i] = std::log(bounds.upper[i]);
        }
        return out;
    }

    std::vector<double> to_opt(std::vector<double> x) const {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (is_log(i)) x[i] = std::log(x[i]);
        return x;
    }

    std::vector<double> to_natural(std::vector<double> u, const Bounds& bounds) const {
        for (std::size_t i = 0; i < u.size(); ++i)
            if (is_log(i)) u[i] = std::exp(u[i]);
        bounds.clamp(u);  // exp/log round trips can drift past a bound
        return u;
    }
};

}  // namespace

void Bounds::clamp(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::min(std::max(x[i], lower[i]), upper[i]);
}

bool Bounds::contains(const std::vector<double>& x) const {
    if (x.size() != size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < lower[i] || x[i] > upper[i]) return false;
    return true;
}

void Bounds::validate() const {
    if (lower.size() != upper.size() || lower.empty())
        throw Error("bounds: lower/upper size mismatch");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw Error("bounds must be finite");
        if (!(lower[i] < upper[i]))
            throw Error("bounds: lower must be strictly below upper (axis " +
                        std::to_string(i) + ")");
    }
}

TrainTestSplit TrainTestSplit::of_fraction(double f) {
    if (!(f >= 0.0) || !(f < 1.0)) throw Error("split fraction must lie in [0, 1)");
    TrainTestSplit s;
    s.mode = Mode::kFraction;
    s.fraction = f;
    return s;
}

TrainTestSplit TrainTestSplit::explicit_indices(std::vector<std::size_t> idx) {
    TrainTestSplit s;
    s.mode = Mode::kExplicitIndices;
    s.test_indices = std::move(idx);
    return s;
}

double huber(double residual, double delta) {
    if (!(delta > 0.0)) throw Error("huber: delta must be positive");
    const double a = std::abs(residual);
    return a <= delta ? 0.5 * residual * residual : delta * (a - 0.5 * delta);
}

double objective(const lawcore::ScalingLawParams& params,
                 const std::vector<records::Observation>& observations,
                 const FitConfig& config) {
    if (observations.empty()) throw Error("objective: no observations");
    double sum = 0.0;
    for (const auto& o : observations) {
        const double predicted = lawcore::eval_loss(params, o.model_size, o.dataset_size);
        double residual;
        if (config.loss_space == LossSpace::kLinear) {
            residual = predicted - o.mean;
        } else {
            if (!(o.mean > 0.0))
                throw Error("objective: nonpositive observed value in log space");
            residual = std::log(predicted) - std::log(o.mean);
        }
        sum += huber(residual, config.huber_delta);
    }
    return sum;
}

double mre(const lawcore::ScalingLawParams& params,
           const std::vector<records::Observation>& observations) {
    if (observations.empty()) throw Error("mre: no observations");
    double sum = 0.0;
    for (const auto& o : observations) {
        if (o.mean == 0.0) throw Error("mre: zero observed mean");
        const double predicted = lawcore::eval_loss(params, o.model_size, o.dataset_size);
        sum += std::abs(predicted - o.mean) / std::abs(o.mean);
    }
    return sum / static_cast<double>(observations.size());
}

std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x,
                                     const Bounds& bounds, double rel_step) {
    std::vector<double> g(x.size(), 0.0);
    std::vector<double> probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = rel_step * std::max(1.0, std::abs(x[i]));
        const double hi = std::min(x[i] + h, bounds.upper[i]);
        const double lo = std::max(x[i] - h, bounds.lower[i]);
        if (hi == lo) continue;
        probe[i] = hi;
        const double f_hi = f(probe);
        probe[i] = lo;
        const double f_lo = f(probe);
        probe[i] = x[i];
        g[i] = (f_hi - f_lo) / (hi - lo);
    }
    return g;
}

// Core projected L-BFGS; runs in whatever coordinates the caller set up.
static LocalMinimum minimize_in_coords(const Objective& f, std::vector<double> start,
                                       const Bounds& bounds) {
    bounds.validate();
    if (start.size() != bounds.size()) throw Error("local_minimize: start size mismatch");
    bounds.clamp(start);

    std::vector<double> x = start;
    double fx = f(x);
    if (!std::isfinite(fx)) throw Error("local_minimize: non-finite objective at start");

    std::deque<std::vector<double>> mem_s, mem_y;
    std::deque<double> mem_rho;
    std::vector<double> g = numeric_gradient(f, x, bounds);

    LocalMinimum result;
    int iter = 0;
    double last_improvement = std::numeric_limits<double>::infinity();
    for (; iter < kMaxInnerIterations; ++iter) {
        // The 1e-8 projected-gradient tolerance alone is reached while the
        // objective can still fall by orders of magnitude (near-noiseless
        // data has razor-thin valleys); stop only once progress stalls too.
        const double pg = projected_gradient_norm(x, g, bounds);
        if (pg <= 1e-14 ||
            (pg <= kProjGradTol && last_improvement <= 1e-12 * (std::abs(fx) + 1e-300))) {
            result.converged = true;
            break;
        }

        // Two-loop recursion over the stored curvature pairs.
        const auto lbfgs_direction = [&]() {
            std::vector<double> q = g;
            std::vector<double> alpha(mem_s.size(), 0.0);
            for (std::size_t j = mem_s.size(); j-- > 0;) {
                alpha[j] = mem_rho[j] * dot(mem_s[j], q);
                for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[j] * mem_y[j][i];
            }
            if (!mem_s.empty()) {
                const double gamma =
                    dot(mem_s.back(), mem_y.back()) / dot(mem_y.back(), mem_y.back());
                for (double& qi : q) qi *= gamma;
            }
            for (std::size_t j = 0; j < mem_s.size(); ++j) {
                const double beta = mem_rho[j] * dot(mem_y[j], q);
                for (std::size_t i = 0; i < q.size(); ++i)
                    q[i] += (alpha[j] - beta) * mem_s[j][i];
            }
            for (double& qi : q) qi = -qi;
            return q;
        };

        // Projected line search with Armijo acceptance. A single trial at
        // step t: returns the clamped point, its value, and whether the
        // sufficient-decrease test passed.
        const auto trial = [&](const std::vector<double>& d, double t, std::vector<double>& x_new,
                               double& f_new) {
            x_new = x;
            for (std::size_t i = 0; i < x.size(); ++i) x_new[i] += t * d[i];
            bounds.clamp(x_new);
            double step_dot = 0.0;
            bool moved = false;
            for (std::size_t i = 0; i < x.size(); ++i) {
                step_dot += g[i] * (x_new[i] - x[i]);
                moved = moved || x_new[i] != x[i];
            }
            if (!moved || step_dot >= 0.0) return false;
            f_new = f(x_new);
            return std::isfinite(f_new) && f_new <= fx + kArmijoSlope * step_dot;
        };

        const auto try_direction = [&](const std::vector<double>& d, std::vector<double>& x_out,
                                       double& f_out) {
            std::vector<double> x_new;
            double f_new = 0.0;
            if (trial(d, 1.0, x_new, f_new)) {
                // A full step passed on the first try: the quasi-Newton
                // scale may have collapsed, so expand while Armijo holds.
                x_out = std::move(x_new);
                f_out = f_new;
                for (double t = 2.0; t <= 1073741824.0; t *= 2.0) {
                    if (!trial(d, t, x_new, f_new) || f_new >= f_out) break;
                    x_out = std::move(x_new);
                    f_out = f_new;
                }
                return true;
            }
            double t = 0.5;
            for (int back = 0; back < 60; ++back, t *= 0.5)
                if (trial(d, t, x_new, f_new)) {
                    x_out = std::move(x_new);
                    f_out = f_new;
                    return true;
                }
            return false;
        };

        std::vector<double> x_next;
        double f_next = 0.0;
        bool ok = try_direction(lbfgs_direction(), x_next, f_next);
        if (!ok) {
            // Unit-length steepest descent: backtracking then sweeps every
            // scale, including ones where a raw -g step would change the
            // objective by less than its own evaluation noise.
            const double g_norm = std::sqrt(dot(g, g));
            if (g_norm > 0.0) {
                std::vector<double> steepest(g.size());
                for (std::size_t i = 0; i < g.size(); ++i) steepest[i] = -g[i] / g_norm;
                ok = try_direction(steepest, x_next, f_next);
            }
            if (ok) {  // restart the curvature history from here
                mem_s.clear();
                mem_y.clear();
                mem_rho.clear();
            }
        }
        if (!ok) {  // no acceptable step at any scale
            result.converged = pg <= kProjGradTol;
            break;
        }

        std::vector<double> g_next = numeric_gradient(f, x_next, bounds);
        std::vector<double> s(x.size()), y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            s[i] = x_next[i] - x[i];
            y[i] = g_next[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-10 * std::sqrt(dot(s, s)) * std::sqrt(dot(y, y))) {
            mem_s.push_back(std::move(s));
            mem_y.push_back(std::move(y));
            mem_rho.push_back(1.0 / sy);
            if (mem_s.size() > kLbfgsMemory) {
                mem_s.pop_front();
                mem_y.pop_front();
                mem_rho.pop_front();
            }
        }
        last_improvement = fx - f_next;
        x = std::move(x_next);
        fx = f_next;
        g = std::move(g_next);
    }

    result.x = std::move(x);
    result.value = fx;
    result.iterations = iter;
    return result;
}

LocalMinimum local_minimize(const Objective& f, std::vector<double> start,
                            const Bounds& bounds, const std::vector<bool>& log_axes) {
    bounds.validate();
    if (start.size() != bounds.size()) throw Error("local_minimize: start size mismatch");
    if (!log_axes.empty() && log_axes.size() != bounds.size())
        throw Error("local_minimize: log axis mask size mismatch");
    bounds.clamp(start);
    if (log_axes.empty()) return minimize_in_coords(f, std::move(start), bounds);

    const AxisTransform transform{log_axes};
    const Bounds opt_bounds = transform.to_opt(bounds);
    const Objective wrapped = [&](const std::vector<double>& u) {
        return f(transform.to_natural(u, bounds));
    };
    LocalMinimum m = minimize_in_coords(wrapped, transform.to_opt(std::move(start)), opt_bounds);
    m.x = transform.to_natural(std::move(m.x), bounds);
    return m;
}

namespace {

// Line minimization of f along direction d from x, clamped to the box:
// geometric bracketing from 1e-12 outward in both signs, then golden
// section refinement around the best probe.
double line_minimum(const Objective& f, const std::vector<double>& x,
                    const std::vector<double>& d, const Bounds& bounds,
                    std::vector<double>& x_out, double f0) {
    double t_min = -1e300, t_max = 1e300;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (d[i] == 0.0) continue;
        double a = (bounds.lower[i] - x[i]) / d[i];
        double b = (bounds.upper[i] - x[i]) / d[i];
        if (a > b) std::swap(a, b);
        t_min = std::max(t_min, a);
        t_max = std::min(t_max, b);
    }
    x_out = x;
    if (!(t_min < t_max)) return f0;

    const auto at = [&](double t) {
        std::vector<double> p(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            p[i] = std::min(std::max(x[i] + t * d[i], bounds.lower[i]), bounds.upper[i]);
        return p;
    };

    double best_t = 0.0, best_f = f0;
    for (const double sign : {1.0, -1.0}) {
        const double limit = sign > 0.0 ? t_max : -t_min;
        for (double m = 1e-12; m <= limit; m *= 4.0) {
            const double v = f(at(sign * m));
            if (v < best_f) {
                best_f = v;
                best_t = sign * m;
            }
        }
    }
    if (best_t == 0.0) return f0;

    double a = best_t / 4.0, b = best_t * 4.0;
    if (a > b) std::swap(a, b);
    a = std::max(a, t_min);
    b = std::min(b, t_max);
    constexpr double kGolden = 0.6180339887498949;
    double c = b - kGolden * (b - a), e = a + kGolden * (b - a);
    double fc = f(at(c)), fe = f(at(e));
    for (int iter = 0; iter < 120; ++iter) {
        if (fc < fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - kGolden * (b - a);
            fc = f(at(c));
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + kGolden * (b - a);
            fe = f(at(e));
        }
        if (std::abs(b - a) <= 1e-14 * (std::abs(a) + std::abs(b) + 1e-300)) break;
    }
    const double t = fc < fe ? c : fe < fc ? e : c;
    const double ft = std::min(fc, fe);
    if (ft < best_f) {
        best_f = ft;
        best_t = t;
    }
    x_out = at(best_t);
    return best_f;
}

}  // namespace

LocalMinimum polish_minimum(const Objective& f, std::vector<double> start,
                            const Bounds& bounds, const std::vector<bool>& log_axes) {
    bounds.validate();
    if (start.size() != bounds.size()) throw Error("polish_minimum: start size mismatch");
    bounds.clamp(start);

    const AxisTransform transform{log_axes};
    const Bounds opt_bounds = log_axes.empty() ? bounds : transform.to_opt(bounds);
    const Objective wrapped = log_axes.empty()
                                  ? f
                                  : Objective([&transform, &f, &bounds](
                                        const std::vector<double>& u) {
                                        return f(transform.to_natural(u, bounds));
                                    });

    std::vector<double> x =
        log_axes.empty() ? std::move(start) : transform.to_opt(std::move(start));
    double fx = wrapped(x);
    if (!std::isfinite(fx)) throw Error("polish_minimum: non-finite objective at start");

    const std::size_t dims = x.size();
    std::vector<std::vector<double>> directions(dims, std::vector<double>(dims, 0.0));
    for (std::size_t i = 0; i < dims; ++i) directions[i][i] = 1.0;

    LocalMinimum result;
    for (int sweep = 0; sweep < 60; ++sweep) {
        const std::vector<double> sweep_start = x;
        const double f_start = fx;
        std::size_t most_productive = 0;
        double biggest_drop = 0.0;
        for (std::size_t k = 0; k < directions.size(); ++k) {
            std::vector<double> x_next;
            const double f_next = line_minimum(wrapped, x, directions[k], opt_bounds, x_next, fx);
            if (fx - f_next > biggest_drop) {
                biggest_drop = fx - f_next;
                most_productive = k;
            }
            x = std::move(x_next);
            fx = f_next;
        }
        // Replace the most productive direction with the net sweep move,
        // which is what learns the valley orientation.
        std::vector<double> net(dims);
        double norm = 0.0;
        for (std::size_t i = 0; i < dims; ++i) {
            net[i] = x[i] - sweep_start[i];
            norm += net[i] * net[i];
        }
        if (norm > 0.0) {
            directions.erase(directions.begin() + most_productive);
            directions.push_back(std::move(net));
        }
        result.iterations = sweep + 1;
        if (f_start - fx <= 1e-14 * (std::abs(fx) + 1e-300)) break;
    }

    result.x = log_axes.empty() ? std::move(x) : transform.to_natural(std::move(x), bounds);
    result.value = fx;
    result.converged = true;
    return result;
}

namespace {

// Solves A x = b in place by Gaussian elimination with partial pivoting.
// Returns false for a (numerically) singular system.
bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b,
                  std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double factor = a[row][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t row = n; row-- > 0;) {
        double acc = b[row];
        for (std::size_t k = row + 1; k < n; ++k) acc -= a[row][k] * x[k];
        x[row] = acc / a[row][row];
    }
    return true;
}

}  // namespace

LocalMinimum least_squares_polish(const Objective& f, const ResidualFn& residuals,
                                  std::vector<double> start, const Bounds& bounds,
                                  const std::vector<bool>& log_axes) {
    bounds.validate();
    bounds.clamp(start);
    LocalMinimum result;
    result.x = start;
    result.value = f(start);
    result.converged = true;
    if (!residuals) return result;

    const AxisTransform transform{log_axes};
    const Bounds opt_bounds = log_axes.empty() ? bounds : transform.to_opt(bounds);
    const auto natural = [&](std::vector<double> u) {
        if (!log_axes.empty()) u = transform.to_natural(std::move(u), bounds);
        bounds.clamp(u);
        return u;
    };

    std::vector<double> u = log_axes.empty() ? start : transform.to_opt(std::move(start));
    const std::size_t dims = u.size();
    double lambda = 1e-3;

    for (int iter = 0; iter < 60; ++iter) {
        const std::vector<double> r = residuals(natural(u));
        const std::size_t m = r.size();
        if (m < dims) break;

        // Jacobian of the residual vector by central differences in u.
        std::vector<std::vector<double>> jac(m, std::vector<double>(dims, 0.0));
        std::vector<double> probe = u;
        for (std::size_t j = 0; j < dims; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(u[j]));
            const double hi = std::min(u[j] + h, opt_bounds.upper[j]);
            const double lo = std::max(u[j] - h, opt_bounds.lower[j]);
            if (hi == lo) continue;
            probe[j] = hi;
            const std::vector<double> r_hi = residuals(natural(probe));
            probe[j] = lo;
            const std::vector<double> r_lo = residuals(natural(probe));
            probe[j] = u[j];
            for (std::size_t i = 0; i < m; ++i) jac[i][j] = (r_hi[i] - r_lo[i]) / (hi - lo);
        }

        std::vector<std::vector<double>> normal(dims, std::vector<double>(dims, 0.0));
        std::vector<double> rhs(dims, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < dims; ++j) {
                rhs[j] -= jac[i][j] * r[i];
                for (std::size_t k = j; k < dims; ++k) normal[j][k] += jac[i][j] * jac[i][k];
            }
        for (std::size_t j = 0; j < dims; ++j)
            for (std::size_t k = 0; k < j; ++k) normal[j][k] = normal[k][j];

        bool stepped = false;
        for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
            auto damped = normal;
            for (std::size_t j = 0; j < dims; ++j)
                damped[j][j] += lambda * std::max(normal[j][j], 1e-300);
            auto b = rhs;
            std::vector<double> delta;
            if (solve_linear(damped, b, delta)) {
                std::vector<double> u_next = u;
                for (std::size_t j = 0; j < dims; ++j) u_next[j] += delta[j];
                opt_bounds.clamp(u_next);
                const double f_next = f(natural(u_next));
                if (std::isfinite(f_next) && f_next < result.value) {
                    u = std::move(u_next);
                    result.value = f_next;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    stepped = true;
                }
            }
            if (!stepped) lambda *= 10.0;
        }
        result.iterations = iter + 1;
        if (!stepped) break;  // no damping level improves the objective
    }

    result.x = natural(u);
    return result;
}

LocalMinimum refine_minimum(const Objective& f, std::vector<double> start, const Bounds& bounds,
                            const std::vector<bool>& log_axes, const ResidualFn& residuals) {
    bounds.validate();
    bounds.clamp(start);
    LocalMinimum best;
    best.x = std::move(start);
    best.value = f(best.x);
    best.converged = true;

    const auto adopt = [&](const LocalMinimum& candidate) {
        if (candidate.value < best.value) {
            best.x = candidate.x;
            best.value = candidate.value;
        }
    };
    for (int round = 0; round < 8; ++round) {
        const double before = best.value;
        adopt(polish_minimum(f, best.x, bounds, log_axes));
        adopt(local_minimize(f, best.x, bounds, log_axes));
        if (residuals) adopt(least_squares_polish(f, residuals, best.x, bounds, log_axes));
        if (before - best.value <= 1e-12 * (std::abs(best.value) + 1e-300)) break;
    }
    return best;
}

std::vector<std::vector<double>> multi_start_grid(const Bounds& bounds, int k_per_axis,
                                                  const std::vector<bool>& log_axes) {
    bounds.validate();
    if (k_per_axis < 1) throw Error("multi_start_grid: k_per_axis must be >= 1");
    if (!log_axes.empty() && log_axes.size() != bounds.size())
        throw Error("multi_start_grid: log axis mask size mismatch");

    const std::size_t dims = bounds.size();
    std::vector<std::vector<double>> axis_values(dims);
    for (std::size_t i = 0; i < dims; ++i) {
        const bool log_axis = !log_axes.empty() && log_axes[i];
        if (log_axis && !(bounds.lower[i] > 0.0))
            throw Error("multi_start_grid: log axis requires positive lower bound");
        for (int k = 1; k <= k_per_axis; ++k) {
            const double frac = static_cast<double>(k) / (k_per_axis + 1);
            if (log_axis)
                axis_values[i].push_back(std::exp(
                    std::log(bounds.lower[i]) +
                    frac * (std::log(bounds.upper[i]) - std::log(bounds.lower[i]))));
            else
                axis_values[i].push_back(bounds.lower[i] +
                                         frac * (bounds.upper[i] - bounds.lower[i]));
        }
    }

    std::vector<std::vector<double>> grid;
    std::vector<std::size_t> index(dims, 0);
    for (;;) {
        std::vector<double> point(dims);
        for (std::size_t i = 0; i < dims; ++i) point[i] = axis_values[i][index[i]];
        grid.push_back(std::move(point));
        bool rolled_over = true;
        for (std::size_t axis = dims; axis-- > 0;) {
            if (++index[axis] < static_cast<std::size_t>(k_per_axis)) {
                rolled_over = false;
                break;
            }
            index[axis] = 0;
        }
        if (rolled_over) return grid;
    }
}

std::vector<std::vector<double>> multi_start_grid(const Bounds& bounds, int k_per_axis) {
    return multi_start_grid(bounds, k_per_axis, law_log_axes());
}

BasinHopResult minimize_basin_hopping(const Objective& f, const Bounds& bounds,
                                      const BasinHopOptions& options) {
    bounds.validate();
    const AxisTransform transform{options.log_axes};
    const Bounds opt_bounds = transform.to_opt(bounds);

    std::vector<double> step = options.hop_step;
    if (step.empty()) {
        step.resize(bounds.size());
        for (std::size_t i = 0; i < bounds.size(); ++i) step[i] = 0.1 * opt_bounds.range(i);
    }
    if (step.size() != bounds.size()) throw Error("basin hopping: hop_step size mismatch");
    if (options.hop_count < 0) throw Error("basin hopping: hop_count must be >= 0");

    // Locally minimize every lattice start and every extra start; the
    // landscape has wide first-order plateaus, so cheap raw-value
    // screening picks hopeless incumbents. The winner seeds the hops.
    const auto grid = multi_start_grid(bounds, options.grid_per_axis, options.log_axes);
    BasinHopResult result;
    LocalMinimum incumbent;
    incumbent.value = std::numeric_limits<double>::infinity();
    const auto consider_start = [&](const std::vector<double>& start) {
        if (start.size() != bounds.size())
            throw Error("basin hopping: start size mismatch");
        const LocalMinimum lm = local_minimize(f, start, bounds, options.log_axes);
        ++result.local_minimizations;
        if (lm.value < incumbent.value) incumbent = lm;
    };
    for (const auto& candidate : grid) consider_start(candidate);
    for (const auto& extra : options.extra_starts) consider_start(extra);

    std::vector<double> best_x = incumbent.x;
    double best_val = incumbent.value;
    result.trace.emplace_back(0, best_val);

    Rng rng(options.rng_seed);
    for (int hop = 1; hop <= options.hop_count; ++hop) {
        // Perturb in optimization coordinates: log axes hop in decades.
        std::vector<double> proposal = transform.to_opt(incumbent.x);
        for (std::size_t i = 0; i < proposal.size(); ++i)
            proposal[i] += step[i] * (2.0 * rng.uniform() - 1.0);
        opt_bounds.clamp(proposal);
        proposal = transform.to_natural(std::move(proposal), bounds);

        const LocalMinimum lm = local_minimize(f, proposal, bounds, options.log_axes);
        ++result.local_minimizations;
        if (lm.value < best_val) {
            best_val = lm.value;
            best_x = lm.x;
        }
        if (lm.value <= incumbent.value ||
            rng.uniform() < std::exp(-(lm.value - incumbent.value) / kMetropolisTemperature)) {
            incumbent = lm;
        }
        result.trace.emplace_back(hop, best_val);
    }

    // Final valley-tracking refinement of the best-ever point; the trace
    // tail is updated so it still ends at the returned objective.
    const LocalMinimum refined = refine_minimum(f, best_x, bounds, options.log_axes,
                                                options.residuals);
    ++result.local_minimizations;
    if (refined.value < best_val) {
        best_val = refined.value;
        best_x = refined.x;
    }
    result.trace.back().second = best_val;

    result.x = best_x;
    result.value = best_val;
    result.at_bound.resize(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const double tol = 1e-9 * bounds.range(i);
        result.at_bound[i] =
            std::abs(best_x[i] - bounds.lower[i]) <= tol ||
            std::abs(best_x[i] - bounds.upper[i]) <= tol;
    }
    return result;
}

void resolve_split(const TrainTestSplit& split,
                   const std::vector<records::Observation>& observations,
                   std::vector<std::size_t>& train_out, std::vector<std::size_t>& test_out) {
    const std::size_t n = observations.size();
    train_out.clear();
    test_out.clear();

    switch (split.mode) {
        case TrainTestSplit::Mode::kLargestComputeBudget: {
            double c_max = 0.0;
            for (const auto& o : observations) c_max = std::max(c_max, o.compute);
            for (std::size_t i = 0; i < n; ++i) {
                if (std::abs(observations[i].compute - c_max) / c_max <= 0.05)
                    test_out.push_back(i);
                else
                    train_out.push_back(i);
            }
            break;
        }
        case TrainTestSplit::Mode::kFraction: {
            const auto k = static_cast<std::size_t>(std::llround(split.fraction * n));
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (observations[a].compute != observations[b].compute)
                    return observations[a].compute > observations[b].compute;
                return a < b;
            });
            test_out.assign(order.begin(), order.begin() + k);
            train_out.assign(order.begin() + k, order.end());
            std::sort(test_out.begin(), test_out.end());
            std::sort(train_out.begin(), train_out.end());
            break;
        }
        case TrainTestSplit::Mode::kExplicitIndices: {
            std::vector<std::size_t> test = split.test_indices;
            std::sort(test.begin(), test.end());
            test.erase(std::unique(test.begin(), test.end()), test.end());
            for (const std::size_t idx : test)
                if (idx >= n)
                    throw Error("split: test index " + std::to_string(idx) + " out of range");
            std::vector<bool> held(n, false);
            for (const std::size_t idx : test) held[idx] = true;
            for (std::size_t i = 0; i < n; ++i)
                (held[i] ? test_out : train_out).push_back(i);
            break;
        }
    }
}

Bounds default_law_bounds() {
    Bounds b;
    b.lower = {0.0, 1e-6, 1e-6, 0.05, 0.05, 0.1};
    b.upper = {1.0, 1e4, 1e6, 2.0, 2.0, 2.0};
    return b;
}

std::vector<bool> law_log_axes() { return {false, true, true, false, false, false}; }

std::vector<double> law_to_vector(const lawcore::ScalingLawParams& p) {
    return {p.irreducible, p.coeff_n, p.coeff_d, p.exp_n, p.exp_d, p.exp_outer};
}

lawcore::ScalingLawParams law_from_vector(const std::vector<double>& v) {
    if (v.size() != 6) throw Error("law vector must have 6 entries");
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

FitResult basin_hop_fit(const std::vector<records::Observation>& observations,
                        const FitConfig& config,
                        const std::vector<std::vector<double>>& extra_starts) {
    constexpr std::size_t kParamCount = 6;
    if (observations.size() < kParamCount + 1)
        throw Error("under-determined fit: need at least " +
                    std::to_string(kParamCount + 1) + " observations, have " +
                    std::to_string(observations.size()));

    Bounds bounds = config.bounds.size() == 0 ? default_law_bounds() : config.bounds;
    if (bounds.size() != kParamCount) throw Error("law fit expects 6-parameter bounds");

    std::vector<std::size_t> train_idx, test_idx;
    resolve_split(config.split, observations, train_idx, test_idx);
    if (train_idx.size() < kParamCount + 1)
        throw Error("under-determined fit: train split keeps " +
                    std::to_string(train_idx.size()) + " observations, need " +
                    std::to_string(kParamCount + 1));

    std::vector<records::Observation> train, test;
    for (const auto i : train_idx) train.push_back(observations[i]);
    for (const auto i : test_idx) test.push_back(observations[i]);

    const Objective f = [&](const std::vector<double>& v) {
        return objective(law_from_vector(v), train, config);
    };
    // Residuals matching the objective's space feed the least-squares
    // refinement of the final point.
    const ResidualFn residuals = [&](const std::vector<double>& v) {
        const lawcore::ScalingLawParams p = law_from_vector(v);
        std::vector<double> r;
        r.reserve(train.size());
        for (const auto& o : train) {
            const double predicted = lawcore::eval_loss(p, o.model_size, o.dataset_size);
            r.push_back(config.loss_space == LossSpace::kLinear
                            ? predicted - o.mean
                            : std::log(predicted) - std::log(o.mean));
        }
        return r;
    };

    BasinHopOptions options;
    options.hop_count = config.hop_count;
    options.hop_step = config.hop_step;
    options.rng_seed = config.rng_seed;
    options.grid_per_axis = 2;
    options.log_axes = law_log_axes();
    options.extra_starts = extra_starts;
    options.residuals = residuals;

    const BasinHopResult hop = minimize_basin_hopping(f, bounds, options);

    FitResult result;
    result.params = law_from_vector(hop.x);
    result.objective_value = hop.value;
    result.train_mre = mre(result.params, train);
    result.test_mre = test.empty() ? 0.0 : mre(result.params, test);
    result.at_bound = hop.at_bound;
    result.hop_trace = hop.trace;
    result.train_indices = train_idx;
    result.test_indices = test_idx;
    return result;
}

}  // namespace scalefit::fitting
