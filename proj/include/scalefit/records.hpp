// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Ingestion and aggregation of experiment run records: one row per
// training run, aggregated into per-(N, D) observations with seed
// statistics and assigned to compute budgets.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace scalefit::records {

// One training run: model size N (non-embedding trainable parameters),
// dataset size D (training tokens), seed, and named metric values.
struct RunRecord {
    double model_size = 0.0;    // N >= 1
    double dataset_size = 0.0;  // D >= 1
    std::int64_t seed = 0;
    std::map<std::string, double> metrics;  // every value finite
};

// Per-(N, D) aggregate of one metric across seeds. C = 6*N*D.
struct Observation {
    double model_size = 0.0;
    double dataset_size = 0.0;
    double compute = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  // population std; 0 when seed_count == 1
    int seed_count = 0;
};

enum class Direction { kLowerBetter, kHigherBetter };

// Real-data reference value for a metric. Direction is always explicit.
struct BaselineStats {
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;  // >= 0
    Direction direction = Direction::kLowerBetter;
};

// FLOPs from the standard approximation C = 6*N*D.
double compute_flops(double model_size, double dataset_size);

// Parses a tabular stream into records, one per row, order preserved.
// `format` is "csv" (header N,D,seed,<metric...>) or "json" (array of
// objects). Row-level problems throw ParseError naming the row.
std::vector<RunRecord> ingest_runs(std::istream& source, const std::string& format = "csv");
std::vector<RunRecord> ingest_runs_file(const std::string& path);

// Aggregates records into one Observation per distinct (N, D) for the
// named metric. Mean and population std are over seeds; output is sorted
// by (C, N). Throws on a missing metric or duplicate (N, D, seed) rows.
std::vector<Observation> aggregate(const std::vector<RunRecord>& runs, const std::string& metric);

struct BucketResult {
    std::map<double, std::vector<Observation>> buckets;  // budget -> members
    std::vector<Observation> unassigned;
};

// Assigns each observation to the budget minimizing |C - C_b| / C_b when
// that distance is <= rel_tol; otherwise it lands in `unassigned`.
// Budgets must be sorted ascending and rel_tol in (0, 0.5).
BucketResult bucket_by_compute(const std::vector<Observation>& observations,
                               const std::vector<double>& budgets, double rel_tol = 0.05);

}  // namespace scalefit::records
