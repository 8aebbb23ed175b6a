// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// IsoFLOP curve construction from bucketed observations, shape and
// cross-budget behavior classification, and baseline saturation checks.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "scalefit/records.hpp"

namespace scalefit::isoflop {

struct CurvePoint {
    double model_size = 0.0;
    double dataset_size = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};

// Points share the bucket budget and are sorted strictly ascending by D.
struct IsoFlopCurve {
    double compute = 0.0;
    std::string metric;
    records::Direction direction = records::Direction::kLowerBetter;
    std::vector<CurvePoint> points;
};

// kIrregular covers curves matching none of the other categories (noisy,
// non-monotone, best value at an endpoint).
enum class Shape { kInteriorOptimum, kMonotone, kFlat, kInsufficientPoints, kIrregular };

const char* shape_name(Shape s);

struct BehaviorVerdict {
    std::vector<std::pair<double, Shape>> shapes;  // per budget, ascending C
    bool cross_budget_monotone = false;
    bool expected_behavior = false;
    std::vector<std::string> reasons;  // populated when expected_behavior is false
    // The cross-budget comparison uses means only; per-point stddev is not
    // consulted. Surfaced so downstream consumers see the caveat.
    bool stddev_ignored_in_cross_budget = true;
};

// One curve per nonempty bucket, budgets ascending, points sorted by D.
// Duplicate D within a bucket throws ("ambiguous isoFLOP point"); empty
// buckets are dropped with a warning appended to `warnings`.
std::vector<IsoFlopCurve> build_curves(const records::BucketResult& buckets,
                                       const std::string& metric,
                                       records::Direction direction,
                                       std::vector<std::string>* warnings = nullptr);

// Direction-aware classification; abs_tol is the noise floor when a
// point's stddev is smaller.
Shape classify_shape(const IsoFlopCurve& curve, double abs_tol = 1e-6);

// expected_behavior: every curve has an interior optimum and per-budget
// best values improve strictly with C.
BehaviorVerdict classify_behavior(const std::vector<IsoFlopCurve>& curves,
                                  double abs_tol = 1e-6);

// Per budget: |best mean - baseline mean| <= baseline std.
std::map<double, bool> saturation(const std::vector<IsoFlopCurve>& curves,
                                  const records::BaselineStats& baseline);

}  // namespace scalefit::isoflop
