// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "scalefit/serde.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scalefit/errors.hpp"

namespace scalefit::serde {

namespace {

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ParseError("missing numeric field '" + key + "'");
    return j.at(key).get<double>();
}

records::Direction parse_direction(const json& j) {
    if (!j.contains("direction") || !j.at("direction").is_string())
        throw ParseError("baseline entry needs an explicit 'direction'");
    const std::string d = j.at("direction").get<std::string>();
    if (d == "lower-better" || d == "lower") return records::Direction::kLowerBetter;
    if (d == "higher-better" || d == "higher") return records::Direction::kHigherBetter;
    throw ParseError("unknown direction '" + d + "'");
}

const char* direction_name(records::Direction d) {
    return d == records::Direction::kLowerBetter ? "lower-better" : "higher-better";
}

json trace_to_json(const std::vector<std::pair<int, double>>& trace) {
    json arr = json::array();
    for (const auto& [i, v] : trace) arr.push_back(json::array({i, v}));
    return arr;
}

}  // namespace

std::string format_double(double v) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
    if (ec != std::errc()) throw Error("format_double failed");
    return std::string(buffer, ptr);
}

std::string format_sig4(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.4g", v);
    return buffer;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write file: " + tmp);
        out << content;
        out.flush();
        if (!out) throw Error("short write: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot rename " + tmp + " to " + path + ": " + ec.message());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json law_to_json(const lawcore::ScalingLawParams& p) {
    return json{{"E", p.irreducible}, {"A", p.coeff_n},   {"B", p.coeff_d},
                {"alpha", p.exp_n},   {"beta", p.exp_d},  {"gamma", p.exp_outer}};
}

lawcore::ScalingLawParams law_from_json(const json& j) {
    lawcore::ScalingLawParams p;
    p.irreducible = require_number(j, "E");
    p.coeff_n = require_number(j, "A");
    p.coeff_d = require_number(j, "B");
    p.exp_n = require_number(j, "alpha");
    p.exp_d = require_number(j, "beta");
    p.exp_outer = require_number(j, "gamma");
    p.validate();
    return p;
}

lawcore::ScalingLawParams law_from_file(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError("bad params file " + path + ": " + e.what());
    }
    return law_from_json(j);
}

json sigmoid_to_json(const downstream::SigmoidParams& sp) {
    return json{{"lo", sp.lo},
                {"hi", sp.hi},
                {"k", sp.sharpness},
                {"L0", sp.midpoint},
                {"law", law_to_json(sp.law)}};
}

downstream::SigmoidParams sigmoid_from_json(const json& j) {
    downstream::SigmoidParams sp;
    sp.lo = require_number(j, "lo");
    sp.hi = require_number(j, "hi");
    sp.sharpness = require_number(j, "k");
    sp.midpoint = require_number(j, "L0");
    if (!j.contains("law")) throw ParseError("sigmoid params need a 'law' object");
    sp.law = law_from_json(j.at("law"));
    return sp;
}

std::map<std::string, records::BaselineStats> baselines_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("baselines must be a JSON object");
    std::map<std::string, records::BaselineStats> out;
    for (const auto& [metric, entry] : j.items()) {
        records::BaselineStats b;
        b.metric = metric;
        b.mean = require_number(entry, "mean");
        b.stddev = require_number(entry, "std");
        if (b.stddev < 0.0) throw ParseError("baseline std must be >= 0 for " + metric);
        b.direction = parse_direction(entry);
        out[metric] = b;
    }
    return out;
}

std::map<std::string, records::BaselineStats> baselines_from_file(const std::string& path) {
    try {
        return baselines_from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
        throw ParseError("bad baselines file " + path + ": " + e.what());
    }
}

fitting::FitConfig fit_config_from_json(const json& j) {
    fitting::FitConfig cfg;
    if (j.contains("huber_delta")) cfg.huber_delta = j.at("huber_delta").get<double>();
    if (j.contains("hop_count")) cfg.hop_count = j.at("hop_count").get<int>();
    if (j.contains("rng_seed")) cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    if (j.contains("hop_step")) cfg.hop_step = j.at("hop_step").get<std::vector<double>>();
    if (j.contains("loss_space")) {
        const std::string space = j.at("loss_space").get<std::string>();
        if (space == "linear")
            cfg.loss_space = fitting::LossSpace::kLinear;
        else if (space == "log")
            cfg.loss_space = fitting::LossSpace::kLog;
        else
            throw ParseError("loss_space must be 'linear' or 'log'");
    }
    if (j.contains("bounds")) {
        cfg.bounds.lower = j.at("bounds").at("lower").get<std::vector<double>>();
        cfg.bounds.upper = j.at("bounds").at("upper").get<std::vector<double>>();
        cfg.bounds.validate();
    }
    if (j.contains("train_test_split")) {
        const auto& split = j.at("train_test_split");
        const std::string mode = split.at("mode").get<std::string>();
        if (mode == "largest_budget")
            cfg.split = fitting::TrainTestSplit::largest_budget();
        else if (mode == "fraction")
            cfg.split = fitting::TrainTestSplit::of_fraction(split.at("fraction").get<double>());
        else if (mode == "explicit")
            cfg.split = fitting::TrainTestSplit::explicit_indices(
                split.at("test_indices").get<std::vector<std::size_t>>());
        else
            throw ParseError("unknown split mode '" + mode + "'");
    }
    return cfg;
}

json fit_result_to_json(const fitting::FitResult& r) {
    return json{{"params", law_to_json(r.params)},
                {"objective", r.objective_value},
                {"train_mre", r.train_mre},
                {"test_mre", r.test_mre},
                {"at_bound", r.at_bound},
                {"hop_trace", trace_to_json(r.hop_trace)},
                {"train_indices", r.train_indices},
                {"test_indices", r.test_indices}};
}

json fused_result_to_json(const downstream::FusedFitResult& r) {
    return json{{"params", sigmoid_to_json(r.params)},
                {"objective", r.objective_value},
                {"train_mre", r.train_mre},
                {"test_mre", r.test_mre},
                {"at_bound", r.at_bound},
                {"hop_trace", trace_to_json(r.hop_trace)},
                {"train_indices", r.train_indices},
                {"test_indices", r.test_indices}};
}

json behavior_verdict_to_json(const isoflop::BehaviorVerdict& v) {
    json shapes = json::array();
    for (const auto& [c, shape] : v.shapes)
        shapes.push_back(json{{"C", c}, {"shape", isoflop::shape_name(shape)}});
    return json{{"shapes", shapes},
                {"cross_budget_monotone", v.cross_budget_monotone},
                {"expected_behavior", v.expected_behavior},
                {"reasons", v.reasons},
                {"stddev_ignored_in_cross_budget", v.stddev_ignored_in_cross_budget}};
}

json reachability_to_json(const downstream::ReachabilityVerdict& v) {
    json trace = json::array();
    for (const auto& [c, m] : v.trace) trace.push_back(json::array({c, m}));
    return json{{"metric", v.metric},
                {"cfg_label", v.cfg_label},
                {"M_limit", v.metric_limit},
                {"baseline",
                 json{{"mean", v.baseline.mean},
                      {"std", v.baseline.stddev},
                      {"direction", direction_name(v.baseline.direction)}}},
                {"reachable", v.reachable},
                {"trace", trace}};
}

json pjsd_report_to_json(const pjsd::PjsdReport& r) {
    json out = json::object();
    for (const auto& [n, v] : r.divergence) out[std::to_string(n)] = v;
    json sizes = json::object();
    for (const auto& [n, s] : r.support_sizes) sizes[std::to_string(n)] = s;
    out["support_sizes"] = sizes;
    out["corpus_sizes"] = json{{"generated_sequences", r.generated_sequences},
                               {"real_sequences", r.real_sequences},
                               {"generated_tokens", r.generated_tokens},
                               {"real_tokens", r.real_tokens}};
    return out;
}

std::string frontier_csv(const std::vector<lawcore::ComputeOptimalPoint>& points) {
    std::string out = "C,N_star,D_star,r_star\n";
    for (const auto& p : points)
        out += format_double(p.compute) + "," + format_double(p.n_star) + "," +
               format_double(p.d_star) + "," + format_double(p.r_star) + "\n";
    return out;
}

std::string flatness_csv(const std::vector<lawcore::FlatnessReport>& rows) {
    std::string out = "C,L_star,N1,N2,delta_N,D1,D2,delta_D,kappa,truncated\n";
    for (const auto& r : rows)
        out += format_double(r.compute) + "," + format_double(r.loss_star) + "," +
               format_double(r.n1) + "," + format_double(r.n2) + "," +
               format_double(r.delta_n) + "," + format_double(r.d1) + "," +
               format_double(r.d2) + "," + format_double(r.delta_d) + "," +
               format_double(r.kappa) + "," + (r.truncated ? "1" : "0") + "\n";
    return out;
}

std::string curves_csv(const std::vector<isoflop::IsoFlopCurve>& curves) {
    std::string out = "C,N,D,mean,std\n";
    for (const auto& curve : curves)
        for (const auto& p : curve.points)
            out += format_double(curve.compute) + "," + format_double(p.model_size) + "," +
                   format_double(p.dataset_size) + "," + format_double(p.mean) + "," +
                   format_double(p.stddev) + "\n";
    return out;
}

std::string ratio_trace_csv(const std::vector<std::pair<double, double>>& trace) {
    std::string out = "C,r_star\n";
    for (const auto& [c, r] : trace) out += format_double(c) + "," + format_double(r) + "\n";
    return out;
}

std::string metric_trace_csv(const std::vector<std::pair<double, double>>& trace) {
    std::string out = "C,M_star\n";
    for (const auto& [c, m] : trace) out += format_double(c) + "," + format_double(m) + "\n";
    return out;
}

std::string residuals_csv(const lawcore::ScalingLawParams& params,
                          const std::vector<records::Observation>& observations) {
    std::string out = "N,D,C,observed,predicted,residual,rel_error\n";
    for (const auto& o : observations) {
        const double predicted = lawcore::eval_loss(params, o.model_size, o.dataset_size);
        const double residual = predicted - o.mean;
        out += format_double(o.model_size) + "," + format_double(o.dataset_size) + "," +
               format_double(o.compute) + "," + format_double(o.mean) + "," +
               format_double(predicted) + "," + format_double(residual) + "," +
               format_double(o.mean != 0.0 ? residual / o.mean : 0.0) + "\n";
    }
    return out;
}

}  // namespace scalefit::serde
