// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// scalefit: batch CLI for scaling-law analysis. Subcommands cover the
// pipeline from run records to fitted surfaces, compute-optimal tables,
// isoFLOP geometry, downstream sigmoid fits, and the pJSD corpus metric.
// Exit codes: 0 success, 1 input/parse error, 2 analysis error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scalefit/downstream.hpp"
#include "scalefit/errors.hpp"
#include "scalefit/fitting.hpp"
#include "scalefit/isoflop.hpp"
#include "scalefit/lawcore.hpp"
#include "scalefit/log.hpp"
#include "scalefit/pjsd.hpp"
#include "scalefit/records.hpp"
#include "scalefit/serde.hpp"
#include "scalefit/svg.hpp"

namespace fs = std::filesystem;
using namespace scalefit;

namespace {

struct GlobalOptions {
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string config_path;
};

fitting::FitConfig load_config(const GlobalOptions& global) {
    fitting::FitConfig cfg;
    if (!global.config_path.empty()) {
        serde::json j;
        try {
            j = serde::json::parse(serde::read_file(global.config_path));
        } catch (const serde::json::exception& e) {
            throw ParseError("bad config file " + global.config_path + ": " + e.what());
        }
        cfg = serde::fit_config_from_json(j);
    }
    if (global.seed_given) cfg.rng_seed = global.seed;
    return cfg;
}

std::string out_path(const GlobalOptions& global, const std::string& name) {
    fs::create_directories(global.out_dir);
    return (fs::path(global.out_dir) / name).string();
}

std::vector<records::Observation> load_observations(const std::string& records_path,
                                                    const std::string& metric) {
    const auto runs = records::ingest_runs_file(records_path);
    if (runs.empty()) throw ParseError("no records in file: " + records_path);
    return records::aggregate(runs, metric);
}

std::vector<double> log_grid(double from, double to, int points) {
    if (!(from > 0.0) || !(to > from) || points < 2)
        throw Error("trace grid needs 0 < from < to and at least 2 points");
    std::vector<double> grid;
    grid.reserve(points);
    const double l0 = std::log10(from), l1 = std::log10(to);
    for (int i = 0; i < points; ++i)
        grid.push_back(std::pow(10.0, l0 + (l1 - l0) * i / (points - 1)));
    return grid;
}

void warn_bound_flags(const std::vector<bool>& flags, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < flags.size(); ++i)
        if (flags[i])
            logging::warn("fitted parameter '" + names[i] +
                          "' sits on an optimization bound; treat the fit with suspicion");
}

const std::vector<std::string> kLawNames = {"E", "A", "B", "alpha", "beta", "gamma"};
const std::vector<std::string> kFusedNames = {"lo", "hi", "k",     "L0",   "E",
                                              "A",  "B",  "alpha", "beta", "gamma"};

// --- subcommand bodies -------------------------------------------------

void cmd_optimal(const GlobalOptions& global, const std::string& params_path,
                 const std::vector<double>& budgets) {
    const auto law = serde::law_from_file(params_path);
    std::vector<lawcore::ComputeOptimalPoint> points;
    for (const double c : budgets) points.push_back(lawcore::optimal_allocation(law, c));

    serde::write_file_atomic(out_path(global, "frontier.csv"), serde::frontier_csv(points));
    serde::json arr = serde::json::array();
    for (const auto& p : points)
        arr.push_back(serde::json{{"C", p.compute},
                                  {"N_star", p.n_star},
                                  {"D_star", p.d_star},
                                  {"r_star", p.r_star},
                                  {"L_star", p.loss_star}});
    serde::write_file_atomic(out_path(global, "frontier.json"), arr.dump(2) + "\n");

    std::cout << "C          N*         D*         r*\n";
    for (const auto& p : points)
        std::cout << serde::format_sig4(p.compute) << "      " << serde::format_sig4(p.n_star)
                  << "  " << serde::format_sig4(p.d_star) << "  "
                  << serde::format_sig4(p.r_star) << "\n";
}

void cmd_flatness(const GlobalOptions& global, const std::string& params_path,
                  const std::vector<double>& budgets, double epsilon) {
    const auto law = serde::law_from_file(params_path);
    std::vector<lawcore::FlatnessReport> rows;
    for (const double c : budgets) {
        rows.push_back(lawcore::flatness_range(law, c, epsilon));
        if (rows.back().truncated)
            logging::warn("flatness range truncated at C=" + serde::format_sig4(c));
    }
    serde::write_file_atomic(out_path(global, "flatness.csv"), serde::flatness_csv(rows));
    std::cout << "C          L*         N1         N2         kappa\n";
    for (const auto& r : rows)
        std::cout << serde::format_sig4(r.compute) << "      " << serde::format_sig4(r.loss_star)
                  << "   " << serde::format_sig4(r.n1) << "  " << serde::format_sig4(r.n2)
                  << "  " << serde::format_sig4(r.kappa) << (r.truncated ? "  [truncated]" : "")
                  << "\n";
}

void cmd_extrapolate(const GlobalOptions& global, const std::string& params_path, double target,
                     double trace_from, double trace_to, int trace_points) {
    const auto law = serde::law_from_file(params_path);
    const auto pt = lawcore::solve_compute_for_ratio(law, target);

    const double from = trace_from > 0.0 ? trace_from : std::min(1e18, pt.compute / 1e3);
    const double to = trace_to > 0.0 ? trace_to : std::max(1e21, pt.compute * 10.0);
    const auto trace = lawcore::ratio_curve(law, log_grid(from, to, trace_points));
    serde::write_file_atomic(out_path(global, "ratio_trace.csv"), serde::ratio_trace_csv(trace));

    const serde::json report{{"target_ratio", target},
                             {"C_dagger", pt.compute},
                             {"N_dagger", pt.n_star},
                             {"D_dagger", pt.d_star},
                             {"L_at_crossing", pt.loss_star}};
    serde::write_file_atomic(out_path(global, "extrapolation.json"), report.dump(2) + "\n");

    std::cout << "r* = " << serde::format_sig4(target)
              << " at C = " << serde::format_sig4(pt.compute)
              << " (N = " << serde::format_sig4(pt.n_star)
              << ", D = " << serde::format_sig4(pt.d_star) << ")\n";
}

void cmd_pjsd(const GlobalOptions& global, const std::string& generated_path,
              const std::string& real_path, const std::vector<int>& n_values) {
    const auto generated = pjsd::read_corpus_file(generated_path);
    const auto real_corpus = pjsd::read_corpus_file(real_path);
    const auto report = pjsd::pjsd_report(generated, real_corpus, n_values);
    serde::write_file_atomic(out_path(global, "pjsd.json"),
                             serde::pjsd_report_to_json(report).dump(2) + "\n");
    for (const auto& [n, v] : report.divergence)
        std::cout << "pJSD[n=" << n << "] = " << serde::format_double(v) << "  (support "
                  << report.support_sizes.at(n) << ")\n";
}

void cmd_isoflop(const GlobalOptions& global, const std::string& records_path,
                 const std::string& metric, std::vector<double> budgets, double rel_tol,
                 const std::string& baselines_path, const std::string& direction_str,
                 bool saturation, double abs_tol) {
    const auto observations = load_observations(records_path, metric);

    std::map<std::string, records::BaselineStats> baselines;
    if (!baselines_path.empty()) baselines = serde::baselines_from_file(baselines_path);

    records::Direction direction;
    if (direction_str == "lower")
        direction = records::Direction::kLowerBetter;
    else if (direction_str == "higher")
        direction = records::Direction::kHigherBetter;
    else if (direction_str.empty()) {
        const auto it = baselines.find(metric);
        if (it == baselines.end())
            throw ParseError("metric direction is never inferred: pass --direction or a "
                             "baselines file covering '" + metric + "'");
        direction = it->second.direction;
    } else {
        throw ParseError("--direction must be 'lower' or 'higher'");
    }

    std::sort(budgets.begin(), budgets.end());
    budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
    const auto buckets = records::bucket_by_compute(observations, budgets, rel_tol);
    if (!buckets.unassigned.empty())
        logging::warn(std::to_string(buckets.unassigned.size()) +
                      " observations fall outside every budget");

    std::vector<std::string> warnings;
    const auto curves = isoflop::build_curves(buckets, metric, direction, &warnings);
    for (const auto& w : warnings) logging::warn(w);
    const auto verdict = isoflop::classify_behavior(curves, abs_tol);

    serde::json verdict_json = serde::behavior_verdict_to_json(verdict);
    verdict_json["unassigned"] = buckets.unassigned.size();
    verdict_json["warnings"] = warnings;

    const records::BaselineStats* baseline = nullptr;
    if (const auto it = baselines.find(metric); it != baselines.end()) baseline = &it->second;
    if (saturation) {
        if (baseline == nullptr)
            throw Error("saturation check requested but no baseline covers '" + metric + "'");
        serde::json sat = serde::json::object();
        for (const auto& [c, flag] : isoflop::saturation(curves, *baseline))
            sat[serde::format_double(c)] = flag;
        verdict_json["saturation"] = sat;
    }

    serde::write_file_atomic(out_path(global, "curves.csv"), serde::curves_csv(curves));
    serde::write_file_atomic(out_path(global, "verdict.json"), verdict_json.dump(2) + "\n");

    std::vector<svg::Series> series;
    for (const auto& curve : curves) {
        svg::Series s;
        s.label = "C=" + serde::format_sig4(curve.compute);
        for (const auto& p : curve.points) s.points.emplace_back(p.dataset_size, p.mean);
        series.push_back(std::move(s));
    }
    std::optional<svg::BaselineBand> band;
    if (baseline != nullptr)
        band = svg::BaselineBand{baseline->mean, baseline->stddev, "baseline"};
    serde::write_file_atomic(
        out_path(global, "isoflop.svg"),
        svg::line_plot_logx(series, metric + " isoFLOPs", "D (tokens)", metric, band));

    std::cout << (verdict.expected_behavior ? "expected isoFLOP behavior: yes"
                                            : "expected isoFLOP behavior: no")
              << "\n";
    for (const auto& reason : verdict.reasons) std::cout << "  - " << reason << "\n";
}

void cmd_fit_loss(const GlobalOptions& global, const std::string& records_path,
                  const std::string& metric, const std::string& params_path,
                  const std::vector<double>& budgets) {
    const auto observations = load_observations(records_path, metric);

    lawcore::ScalingLawParams law;
    if (!params_path.empty()) {
        law = serde::law_from_file(params_path);  // skip fitting
        serde::write_file_atomic(out_path(global, "params.json"),
                                 serde::law_to_json(law).dump(2) + "\n");
    } else {
        const auto config = load_config(global);
        const auto fit = fitting::basin_hop_fit(observations, config);
        law = fit.params;
        warn_bound_flags(fit.at_bound, kLawNames);
        serde::write_file_atomic(out_path(global, "params.json"),
                                 serde::law_to_json(law).dump(2) + "\n");
        serde::write_file_atomic(out_path(global, "fit.json"),
                                 serde::fit_result_to_json(fit).dump(2) + "\n");
        std::cout << "objective " << serde::format_sig4(fit.objective_value) << ", train MRE "
                  << serde::format_sig4(fit.train_mre) << ", test MRE "
                  << serde::format_sig4(fit.test_mre) << "\n";
    }

    if (!budgets.empty()) {
        std::vector<lawcore::ComputeOptimalPoint> points;
        for (const double c : budgets) points.push_back(lawcore::optimal_allocation(law, c));
        serde::write_file_atomic(out_path(global, "frontier.csv"),
                                 serde::frontier_csv(points));
    }
    serde::write_file_atomic(out_path(global, "residuals.csv"),
                             serde::residuals_csv(law, observations));
}

void cmd_fit_downstream(const GlobalOptions& global, const std::string& records_path,
                        const std::string& metric, const std::string& baselines_path,
                        const std::string& loss_metric, double l0_max, double trace_from,
                        double trace_to, int trace_points) {
    const auto observations = load_observations(records_path, metric);
    const auto config = load_config(global);

    double metric_min = observations.front().mean, metric_max = observations.front().mean;
    for (const auto& o : observations) {
        metric_min = std::min(metric_min, o.mean);
        metric_max = std::max(metric_max, o.mean);
    }
    double loss_hint = l0_max;
    if (!loss_metric.empty()) {
        const auto loss_obs = load_observations(records_path, loss_metric);
        double max_loss = 0.0;
        for (const auto& o : loss_obs) max_loss = std::max(max_loss, o.mean);
        if (max_loss > 0.0) loss_hint = 10.0 * max_loss;
    }

    const auto bounds = downstream::default_sigmoid_bounds(metric_min, metric_max, loss_hint);
    const auto fit = downstream::fused_fit(observations, config, bounds);
    warn_bound_flags(fit.at_bound, kFusedNames);

    serde::write_file_atomic(out_path(global, "sigmoid.json"),
                             serde::sigmoid_to_json(fit.params).dump(2) + "\n");
    serde::write_file_atomic(out_path(global, "fused_fit.json"),
                             serde::fused_result_to_json(fit).dump(2) + "\n");

    const auto grid = log_grid(trace_from, trace_to, trace_points);
    serde::write_file_atomic(
        out_path(global, "metric_trace.csv"),
        serde::metric_trace_csv(downstream::optimal_metric_curve(fit.params, grid)));

    std::cout << "fused fit: objective " << serde::format_sig4(fit.objective_value)
              << ", train MRE " << serde::format_sig4(fit.train_mre) << ", test MRE "
              << serde::format_sig4(fit.test_mre) << "\n";

    if (!baselines_path.empty()) {
        const auto baselines = serde::baselines_from_file(baselines_path);
        const auto it = baselines.find(metric);
        if (it == baselines.end()) {
            logging::warn("reachability skipped: baselines file has no entry for '" + metric +
                          "'");
            return;
        }
        const auto verdict = downstream::reachability(fit.params, it->second, grid);
        serde::write_file_atomic(out_path(global, "reachability.json"),
                                 serde::reachability_to_json(verdict).dump(2) + "\n");
        std::cout << "asymptotic metric " << serde::format_sig4(verdict.metric_limit) << ": "
                  << (verdict.reachable ? "baseline reachable" : "baseline NOT reachable")
                  << "\n";
    } else {
        logging::info("reachability skipped: no baselines file");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scaling-law analysis toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--out", global.out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", global.seed, "rng seed override");
    app.add_option("--config", global.config_path, "fit config JSON");

    // optimal
    std::string opt_params;
    std::vector<double> opt_budgets;
    auto* optimal = app.add_subcommand("optimal", "compute-optimal allocation table");
    optimal->add_option("--params", opt_params, "scaling-law params JSON")->required();
    optimal->add_option("--budgets", opt_budgets, "compute budgets (FLOPs)")
        ->required()
        ->delimiter(',');

    // flatness
    std::string flat_params;
    std::vector<double> flat_budgets;
    double flat_epsilon = 1e-3;
    auto* flatness = app.add_subcommand("flatness", "isoFLOP flatness and curvature table");
    flatness->add_option("--params", flat_params, "scaling-law params JSON")->required();
    flatness->add_option("--budgets", flat_budgets, "compute budgets (FLOPs)")
        ->required()
        ->delimiter(',');
    flatness->add_option("--epsilon", flat_epsilon, "loss tolerance");

    // extrapolate
    std::string ext_params;
    double ext_target = 0.0;
    double ext_from = 0.0, ext_to = 0.0;
    int ext_points = 200;
    auto* extrapolate = app.add_subcommand("extrapolate", "solve compute for a ratio target");
    extrapolate->add_option("--params", ext_params, "scaling-law params JSON")->required();
    extrapolate->add_option("--target", ext_target, "tokens-per-parameter ratio")->required();
    extrapolate->add_option("--trace-from", ext_from, "trace grid start");
    extrapolate->add_option("--trace-to", ext_to, "trace grid end");
    extrapolate->add_option("--trace-points", ext_points, "trace grid size");

    // pjsd
    std::string pjsd_generated, pjsd_real;
    std::vector<int> pjsd_n = {1, 2, 3, 4, 5};
    auto* pjsd_cmd = app.add_subcommand("pjsd", "phoneme n-gram Jensen-Shannon divergence");
    pjsd_cmd->add_option("--generated", pjsd_generated, "generated corpus")->required();
    pjsd_cmd->add_option("--real", pjsd_real, "real corpus")->required();
    pjsd_cmd->add_option("--n", pjsd_n, "n-gram orders")->delimiter(',');

    // isoflop
    std::string iso_records, iso_metric, iso_baselines, iso_direction;
    std::vector<double> iso_budgets;
    double iso_rel_tol = 0.05, iso_abs_tol = 1e-6;
    bool iso_saturation = false;
    auto* iso = app.add_subcommand("isoflop", "isoFLOP curves and behavior verdict");
    iso->add_option("--records", iso_records, "run records CSV/JSON")->required();
    iso->add_option("--metric", iso_metric, "metric column")->required();
    iso->add_option("--budgets", iso_budgets, "compute budgets")->required()->delimiter(',');
    iso->add_option("--rel-tol", iso_rel_tol, "bucket relative tolerance");
    iso->add_option("--baselines", iso_baselines, "baselines JSON");
    iso->add_option("--direction", iso_direction, "lower|higher");
    iso->add_flag("--saturation", iso_saturation, "check baseline saturation");
    iso->add_option("--abs-tol", iso_abs_tol, "shape noise floor");

    // fit-loss
    std::string fl_records, fl_metric = "loss", fl_params;
    std::vector<double> fl_budgets;
    auto* fit_loss = app.add_subcommand("fit-loss", "fit the loss scaling law");
    fit_loss->add_option("--records", fl_records, "run records CSV/JSON")->required();
    fit_loss->add_option("--metric", fl_metric, "loss metric column");
    fit_loss->add_option("--params", fl_params, "params JSON (skip fitting)");
    fit_loss->add_option("--budgets", fl_budgets, "frontier budgets")->delimiter(',');

    // fit-downstream
    std::string fd_records, fd_metric, fd_baselines, fd_loss_metric;
    double fd_l0_max = 10.0, fd_from = 1e18, fd_to = 1e24;
    int fd_points = 50;
    auto* fit_down = app.add_subcommand("fit-downstream", "fused sigmoid-of-loss metric fit");
    fit_down->add_option("--records", fd_records, "run records CSV/JSON")->required();
    fit_down->add_option("--metric", fd_metric, "metric column")->required();
    fit_down->add_option("--baselines", fd_baselines, "baselines JSON");
    fit_down->add_option("--loss-metric", fd_loss_metric, "loss column for the L0 bound hint");
    fit_down->add_option("--l0-max", fd_l0_max, "upper bound for the sigmoid midpoint");
    fit_down->add_option("--trace-from", fd_from, "M* trace grid start");
    fit_down->add_option("--trace-to", fd_to, "M* trace grid end");
    fit_down->add_option("--trace-points", fd_points, "M* trace grid size");

    try {
        app.parse(argc, argv);
        global.seed_given = seed_opt->count() > 0;

        if (optimal->parsed()) cmd_optimal(global, opt_params, opt_budgets);
        if (flatness->parsed()) cmd_flatness(global, flat_params, flat_budgets, flat_epsilon);
        if (extrapolate->parsed())
            cmd_extrapolate(global, ext_params, ext_target, ext_from, ext_to, ext_points);
        if (pjsd_cmd->parsed()) cmd_pjsd(global, pjsd_generated, pjsd_real, pjsd_n);
        if (iso->parsed())
            cmd_isoflop(global, iso_records, iso_metric, iso_budgets, iso_rel_tol, iso_baselines,
                        iso_direction, iso_saturation, iso_abs_tol);
        if (fit_loss->parsed()) cmd_fit_loss(global, fl_records, fl_metric, fl_params, fl_budgets);
        if (fit_down->parsed())
            cmd_fit_downstream(global, fd_records, fd_metric, fd_baselines, fd_loss_metric,
                               fd_l0_max, fd_from, fd_to, fd_points);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
