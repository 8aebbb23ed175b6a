// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// JSON and CSV serialization for the toolkit's types, plus atomic file
// writes and deterministic number formatting.

#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "scalefit/downstream.hpp"
#include "scalefit/fitting.hpp"
#include "scalefit/isoflop.hpp"
#include "scalefit/lawcore.hpp"
#include "scalefit/pjsd.hpp"
#include "scalefit/records.hpp"

namespace scalefit::serde {

using json = nlohmann::json;

// Shortest representation that round-trips the exact double.
std::string format_double(double v);
// Four significant digits, for human-facing tables.
std::string format_sig4(double v);

// Writes via a temp file in the same directory plus rename, so a failed
// run never leaves a partial file behind.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// ScalingLawParams <-> {"E":..,"A":..,"B":..,"alpha":..,"beta":..,"gamma":..}
json law_to_json(const lawcore::ScalingLawParams& p);
lawcore::ScalingLawParams law_from_json(const json& j);
lawcore::ScalingLawParams law_from_file(const std::string& path);

// SigmoidParams <-> {"lo":..,"hi":..,"k":..,"L0":..,"law":{...}}
json sigmoid_to_json(const downstream::SigmoidParams& sp);
downstream::SigmoidParams sigmoid_from_json(const json& j);

// Baselines file: {metric: {"mean":..,"std":..,"direction":"lower-better"}}
std::map<std::string, records::BaselineStats> baselines_from_json(const json& j);
std::map<std::string, records::BaselineStats> baselines_from_file(const std::string& path);

fitting::FitConfig fit_config_from_json(const json& j);

json fit_result_to_json(const fitting::FitResult& r);
json fused_result_to_json(const downstream::FusedFitResult& r);
json behavior_verdict_to_json(const isoflop::BehaviorVerdict& v);
json reachability_to_json(const downstream::ReachabilityVerdict& v);
json pjsd_report_to_json(const pjsd::PjsdReport& r);

// CSV emitters; column orders follow the canonical report tables.
std::string frontier_csv(const std::vector<lawcore::ComputeOptimalPoint>& points);
std::string flatness_csv(const std::vector<lawcore::FlatnessReport>& rows);
std::string curves_csv(const std::vector<isoflop::IsoFlopCurve>& curves);
std::string ratio_trace_csv(const std::vector<std::pair<double, double>>& trace);
std::string metric_trace_csv(const std::vector<std::pair<double, double>>& trace);
std::string residuals_csv(const lawcore::ScalingLawParams& params,
                          const std::vector<records::Observation>& observations);

}  // namespace scalefit::serde
