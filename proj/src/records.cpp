// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "scalefit/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "scalefit/errors.hpp"

namespace scalefit::records {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_number(const std::string& text, const std::string& what, std::size_t row) {
    const std::string t = trim(text);
    if (t.empty()) throw ParseError("empty " + what + ", row " + std::to_string(row));
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ParseError("unparseable " + what + " '" + t + "', row " + std::to_string(row));
    return v;
}

void validate_record(RunRecord& r, std::size_t row) {
    if (!(r.model_size >= 1.0) || !std::isfinite(r.model_size))
        throw ParseError("nonpositive model size, row " + std::to_string(row));
    if (!(r.dataset_size >= 1.0) || !std::isfinite(r.dataset_size))
        throw ParseError("nonpositive dataset size, row " + std::to_string(row));
    if (r.metrics.empty())
        throw ParseError("row " + std::to_string(row) + " carries no metric columns");
    for (const auto& [name, value] : r.metrics)
        if (!std::isfinite(value))
            throw ParseError("non-finite metric '" + name + "', row " + std::to_string(row));
}

std::vector<RunRecord> ingest_csv(std::istream& source) {
    std::string header;
    if (!std::getline(source, header)) throw ParseError("missing CSV header");
    const auto columns = split_csv_line(header);
    long n_col = -1, d_col = -1, seed_col = -1;
    std::vector<std::pair<std::size_t, std::string>> metric_cols;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == "N")
            n_col = static_cast<long>(i);
        else if (columns[i] == "D")
            d_col = static_cast<long>(i);
        else if (columns[i] == "seed")
            seed_col = static_cast<long>(i);
        else if (!columns[i].empty())
            metric_cols.emplace_back(i, columns[i]);
    }
    if (n_col < 0 || d_col < 0 || seed_col < 0)
        throw ParseError("CSV header must contain N, D and seed columns");
    if (metric_cols.empty()) throw ParseError("CSV header carries no metric columns");

    std::vector<RunRecord> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(source, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto fields = split_csv_line(line);
        if (fields.size() != columns.size())
            throw ParseError("row " + std::to_string(row) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(columns.size()));
        RunRecord r;
        r.model_size = parse_number(fields[n_col], "model size", row);
        r.dataset_size = parse_number(fields[d_col], "dataset size", row);
        r.seed = static_cast<std::int64_t>(parse_number(fields[seed_col], "seed", row));
        for (const auto& [idx, name] : metric_cols)
            r.metrics[name] = parse_number(fields[idx], "metric '" + name + "'", row);
        validate_record(r, row);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RunRecord> ingest_json(std::istream& source) {
    nlohmann::json root;
    try {
        source >> root;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad JSON records: ") + e.what());
    }
    if (!root.is_array()) throw ParseError("JSON records must be an array of objects");
    std::vector<RunRecord> out;
    std::size_t row = 0;
    for (const auto& item : root) {
        ++row;
        if (!item.is_object())
            throw ParseError("JSON record at row " + std::to_string(row) + " is not an object");
        RunRecord r;
        for (const auto& [key, value] : item.items()) {
            if (!value.is_number())
                throw ParseError("non-numeric field '" + key + "', row " + std::to_string(row));
            if (key == "N")
                r.model_size = value.get<double>();
            else if (key == "D")
                r.dataset_size = value.get<double>();
            else if (key == "seed")
                r.seed = static_cast<std::int64_t>(value.get<double>());
            else
                r.metrics[key] = value.get<double>();
        }
        validate_record(r, row);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

double compute_flops(double model_size, double dataset_size) {
    return 6.0 * model_size * dataset_size;
}

std::vector<RunRecord> ingest_runs(std::istream& source, const std::string& format) {
    if (format == "csv") return ingest_csv(source);
    if (format == "json") return ingest_json(source);
    throw ParseError("unknown record format: " + format);
}

std::vector<RunRecord> ingest_runs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open records file: " + path);
    const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    return ingest_runs(in, json ? "json" : "csv");
}

std::vector<Observation> aggregate(const std::vector<RunRecord>& runs,
                                   const std::string& metric) {
    if (runs.empty()) throw Error("aggregate: no records");

    std::map<std::pair<double, double>, std::vector<std::pair<std::int64_t, double>>> groups;
    for (const auto& r : runs) {
        const auto it = r.metrics.find(metric);
        if (it == r.metrics.end())
            throw Error("metric '" + metric + "' absent from record (N=" +
                        std::to_string(r.model_size) + ", D=" + std::to_string(r.dataset_size) +
                        ", seed=" + std::to_string(r.seed) + ")");
        groups[{r.model_size, r.dataset_size}].emplace_back(r.seed, it->second);
    }

    std::vector<Observation> out;
    for (auto& [key, samples] : groups) {
        // Canonical per-seed order makes the summation order, and thus the
        // result, independent of input permutation.
        std::sort(samples.begin(), samples.end());
        for (std::size_t i = 1; i < samples.size(); ++i)
            if (samples[i].first == samples[i - 1].first)
                throw Error("duplicate (N, D, seed) row: N=" + std::to_string(key.first) +
                            ", D=" + std::to_string(key.second) +
                            ", seed=" + std::to_string(samples[i].first));
        Observation o;
        o.model_size = key.first;
        o.dataset_size = key.second;
        o.compute = compute_flops(o.model_size, o.dataset_size);
        o.seed_count = static_cast<int>(samples.size());
        double sum = 0.0;
        for (const auto& [seed, v] : samples) sum += v;
        o.mean = sum / static_cast<double>(samples.size());
        double sq = 0.0;
        for (const auto& [seed, v] : samples) sq += (v - o.mean) * (v - o.mean);
        o.stddev = samples.size() == 1 ? 0.0 : std::sqrt(sq / static_cast<double>(samples.size()));
        out.push_back(o);
    }
    std::sort(out.begin(), out.end(), [](const Observation& a, const Observation& b) {
        if (a.compute != b.compute) return a.compute < b.compute;
        return a.model_size < b.model_size;
    });
    return out;
}

BucketResult bucket_by_compute(const std::vector<Observation>& observations,
                               const std::vector<double>& budgets, double rel_tol) {
    if (budgets.empty()) throw Error("bucket_by_compute: no budgets");
    for (std::size_t i = 1; i < budgets.size(); ++i)
        if (!(budgets[i] > budgets[i - 1]))
            throw Error("bucket_by_compute: budgets must be sorted ascending");
    for (const double b : budgets)
        if (!(b > 0.0)) throw Error("bucket_by_compute: budgets must be positive");
    if (!(rel_tol > 0.0) || !(rel_tol < 0.5))
        throw Error("bucket_by_compute: rel_tol must lie in (0, 0.5)");

    BucketResult result;
    for (const auto& o : observations) {
        double best_dist = std::numeric_limits<double>::infinity();
        double best_budget = 0.0;
        for (const double b : budgets) {
            const double dist = std::abs(o.compute - b) / b;
            if (dist < best_dist) {
                best_dist = dist;
                best_budget = b;
            }
        }
        if (best_dist <= rel_tol)
            result.buckets[best_budget].push_back(o);
        else
            result.unassigned.push_back(o);
    }
    return result;
}

}  // namespace scalefit::records
