// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "scalefit/isoflop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scalefit/errors.hpp"
#include "scalefit/serde.hpp"

namespace scalefit::isoflop {

namespace {

// Means oriented so that lower is always better.
std::vector<double> oriented_means(const IsoFlopCurve& curve) {
    std::vector<double> m;
    m.reserve(curve.points.size());
    const double sign = curve.direction == records::Direction::kLowerBetter ? 1.0 : -1.0;
    for (const auto& p : curve.points) m.push_back(sign * p.mean);
    return m;
}

double best_mean(const IsoFlopCurve& curve) {
    double best = curve.points.front().mean;
    for (const auto& p : curve.points)
        best = curve.direction == records::Direction::kLowerBetter ? std::min(best, p.mean)
                                                                   : std::max(best, p.mean);
    return best;
}

IsoFlopCurve sorted_by_dataset(const IsoFlopCurve& curve) {
    IsoFlopCurve c = curve;
    std::sort(c.points.begin(), c.points.end(), [](const CurvePoint& a, const CurvePoint& b) {
        return a.dataset_size < b.dataset_size;
    });
    return c;
}

}  // namespace

const char* shape_name(Shape s) {
    switch (s) {
        case Shape::kInteriorOptimum: return "interior-optimum";
        case Shape::kMonotone: return "monotone";
        case Shape::kFlat: return "flat";
        case Shape::kInsufficientPoints: return "insufficient-points";
        case Shape::kIrregular: return "irregular";
    }
    return "unknown";
}

std::vector<IsoFlopCurve> build_curves(const records::BucketResult& buckets,
                                       const std::string& metric,
                                       records::Direction direction,
                                       std::vector<std::string>* warnings) {
    std::vector<IsoFlopCurve> curves;
    for (const auto& [budget, members] : buckets.buckets) {
        if (members.empty()) {
            if (warnings)
                warnings->push_back("empty bucket at C=" + serde::format_sig4(budget) +
                                    ", curve omitted");
            continue;
        }
        IsoFlopCurve curve;
        curve.compute = budget;
        curve.metric = metric;
        curve.direction = direction;
        for (const auto& o : members)
            curve.points.push_back({o.model_size, o.dataset_size, o.mean, o.stddev});
        curve = sorted_by_dataset(curve);
        for (std::size_t i = 1; i < curve.points.size(); ++i)
            if (curve.points[i].dataset_size == curve.points[i - 1].dataset_size)
                throw Error("ambiguous isoFLOP point: duplicate D=" +
                            serde::format_sig4(curve.points[i].dataset_size) + " in bucket C=" +
                            serde::format_sig4(budget));
        curves.push_back(std::move(curve));
    }
    return curves;  // std::map iteration already gave ascending budgets
}

Shape classify_shape(const IsoFlopCurve& curve, double abs_tol) {
    const IsoFlopCurve c = sorted_by_dataset(curve);
    const std::size_t n = c.points.size();
    if (n < 3) return Shape::kInsufficientPoints;

    const auto means = oriented_means(c);
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (means[i] < means[best]) best = i;

    if (best > 0 && best + 1 < n) {
        const double lead = means.front() - means[best];
        const double tail = means.back() - means[best];
        const bool lead_clear = lead > std::max(c.points.front().stddev, abs_tol);
        const bool tail_clear = tail > std::max(c.points.back().stddev, abs_tol);
        if (lead_clear && tail_clear) return Shape::kInteriorOptimum;
    }

    double variation = 0.0;
    for (std::size_t i = 1; i < n; ++i) variation += std::abs(means[i] - means[i - 1]);
    if (variation <= abs_tol) return Shape::kFlat;

    bool non_increasing = true, non_decreasing = true;
    for (std::size_t i = 1; i < n; ++i) {
        if (means[i] > means[i - 1]) non_increasing = false;
        if (means[i] < means[i - 1]) non_decreasing = false;
    }
    if (non_increasing || non_decreasing) return Shape::kMonotone;

    return Shape::kIrregular;
}

BehaviorVerdict classify_behavior(const std::vector<IsoFlopCurve>& curves, double abs_tol) {
    BehaviorVerdict verdict;
    std::vector<IsoFlopCurve> ordered = curves;
    std::sort(ordered.begin(), ordered.end(),
              [](const IsoFlopCurve& a, const IsoFlopCurve& b) { return a.compute < b.compute; });

    bool all_interior = true;
    for (const auto& curve : ordered) {
        const Shape shape = classify_shape(curve, abs_tol);
        verdict.shapes.emplace_back(curve.compute, shape);
        if (shape != Shape::kInteriorOptimum) {
            all_interior = false;
            verdict.reasons.push_back("curve at C=" + serde::format_sig4(curve.compute) +
                                      " is " + shape_name(shape));
        }
    }

    verdict.cross_budget_monotone = true;
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i].points.empty() || ordered[i - 1].points.empty()) continue;
        const double prev = best_mean(ordered[i - 1]);
        const double curr = best_mean(ordered[i]);
        const bool improved = ordered[i].direction == records::Direction::kLowerBetter
                                  ? curr < prev
                                  : curr > prev;
        if (!improved) {
            verdict.cross_budget_monotone = false;
            verdict.reasons.push_back(
                "optimum at C=" + serde::format_sig4(ordered[i].compute) +
                " does not improve on C=" + serde::format_sig4(ordered[i - 1].compute));
        }
    }

    verdict.expected_behavior =
        all_interior && verdict.cross_budget_monotone && !ordered.empty();
    return verdict;
}

std::map<double, bool> saturation(const std::vector<IsoFlopCurve>& curves,
                                  const records::BaselineStats& baseline) {
    if (baseline.stddev < 0.0) throw Error("baseline std must be >= 0");
    std::map<double, bool> flags;
    for (const auto& curve : curves) {
        if (curve.points.empty()) continue;
        flags[curve.compute] =
            std::abs(best_mean(curve) - baseline.mean) <= baseline.stddev;
    }
    return flags;
}

}  // namespace scalefit::isoflop
