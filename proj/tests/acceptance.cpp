// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Reference values come from the coefficient tables
// this toolkit is built to reproduce; tolerances are pinned here in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scalefit/downstream.hpp"
#include "scalefit/errors.hpp"
#include "scalefit/fitting.hpp"
#include "scalefit/lawcore.hpp"
#include "scalefit/pjsd.hpp"
#include "scalefit/records.hpp"
#include "scalefit/rng.hpp"
#include "scalefit/serde.hpp"

namespace fs = std::filesystem;
using namespace scalefit;

namespace {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// --- CLI plumbing -------------------------------------------------------

fs::path work_dir;

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SCALEFIT_BIN) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> parse_numeric_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(std::strtod(field.c_str(), nullptr));
        rows.push_back(std::move(fields));
    }
    return rows;
}

// Reference coefficient sets (4-decimal published precision).
const char* kPrimaryParamsJson =
    R"({"E":0.0055,"A":0.0612,"B":16.2179,"alpha":0.4226,"beta":0.5531,"gamma":0.6745})";
const char* kAltParamsJson =
    R"({"E":0.0055,"A":0.0638,"B":29.7667,"alpha":0.3995,"beta":0.5644,"gamma":0.7051})";

lawcore::ScalingLawParams primary_params() {
    return {0.0055, 0.0612, 16.2179, 0.4226, 0.5531, 0.6745};
}

// --- synthetic data helpers ---------------------------------------------

std::vector<records::Observation> law_grid_observations(const lawcore::ScalingLawParams& truth,
                                                        double noise_frac, Rng* rng) {
    std::vector<records::Observation> obs;
    for (int i = 0; i < 8; ++i) {
        const double n = std::pow(10.0, 6.0 + 4.0 * i / 7.0);
        for (int j = 0; j < 5; ++j) {
            const double d = std::pow(10.0, 8.0 + 4.0 * j / 4.0);
            records::Observation o;
            o.model_size = n;
            o.dataset_size = d;
            o.compute = records::compute_flops(n, d);
            o.mean = lawcore::eval_loss(truth, n, d);
            if (noise_frac > 0.0) o.mean *= 1.0 + noise_frac * rng->normal();
            o.seed_count = 1;
            obs.push_back(o);
        }
    }
    return obs;
}

std::vector<records::Observation> metric_grid_observations(
    const downstream::SigmoidParams& truth, double noise_frac, Rng* rng) {
    std::vector<records::Observation> obs;
    for (int i = 0; i < 8; ++i) {
        const double n = std::pow(10.0, 6.0 + 4.0 * i / 7.0);
        for (int j = 0; j < 5; ++j) {
            const double d = std::pow(10.0, 8.0 + 4.0 * j / 4.0);
            records::Observation o;
            o.model_size = n;
            o.dataset_size = d;
            o.compute = records::compute_flops(n, d);
            o.mean = downstream::eval_metric(truth, n, d);
            if (noise_frac > 0.0) o.mean *= 1.0 + noise_frac * rng->normal();
            o.seed_count = 1;
            obs.push_back(o);
        }
    }
    return obs;
}

// --- criteria ------------------------------------------------------------

CriterionResult criterion1_optimal_table() {
    Timer timer;
    CriterionResult r{1, "compute-optimal table reproduction (10 rows, 1% per cell)", false, "",
                      0};

    write_file(work_dir / "params.json", kPrimaryParamsJson);
    const int rc = run_cli("optimal --params " + (work_dir / "params.json").string() +
                           " --budgets 1e18,3e18,6e18,1e19,3e19,6e19,1e20,3e20,6e20,1e21 --out " +
                           work_dir.string());
    if (rc != 0) {
        r.detail = "CLI exit code " + std::to_string(rc);
        r.seconds = timer.seconds();
        return r;
    }
    const auto rows = parse_numeric_csv(slurp(work_dir / "frontier.csv"));
    const struct Row {
        double c, n, d, ratio;
    } expected[] = {
        {1e18, 1.44e7, 1.16e10, 801}, {3e18, 2.69e7, 1.86e10, 692},
        {6e18, 3.98e7, 2.51e10, 631}, {1e19, 5.32e7, 3.13e10, 589},
        {3e19, 9.92e7, 5.04e10, 509}, {6e19, 1.47e8, 6.81e10, 464},
        {1e20, 1.96e8, 8.49e10, 433}, {3e20, 3.66e8, 1.37e11, 374},
        {6e20, 5.42e8, 1.85e11, 341}, {1e21, 7.24e8, 2.30e11, 319},
    };
    double worst = 0.0;
    bool ok = rows.size() == 10;
    for (std::size_t i = 0; ok && i < 10; ++i) {
        worst =
            std::max({worst, rel_err(rows[i][1], expected[i].n), rel_err(rows[i][2], expected[i].d),
                      rel_err(rows[i][3], expected[i].ratio)});
    }
    r.seconds = timer.seconds();
    ok = ok && worst <= 0.01 && r.seconds < 1.0;
    r.pass = ok;
    r.detail = "worst cell error " + fmt(worst * 100) + "% (limit 1%), " + fmt(r.seconds) + " s";
    return r;
}

CriterionResult criterion2_extrapolation() {
    Timer timer;
    CriterionResult r{2, "extrapolation reproduction (r*=20 and r*=400 crossings)", false, "", 0};

    write_file(work_dir / "params.json", kPrimaryParamsJson);
    write_file(work_dir / "alt_params.json", kAltParamsJson);

    int rc = run_cli("extrapolate --params " + (work_dir / "params.json").string() +
                     " --target 20 --out " + work_dir.string());
    if (rc != 0) {
        r.detail = "CLI exit code " + std::to_string(rc);
        r.seconds = timer.seconds();
        return r;
    }
    const auto rep20 = serde::json::parse(slurp(work_dir / "extrapolation.json"));
    const double c20 = rep20.at("C_dagger").get<double>();
    const double n20 = rep20.at("N_dagger").get<double>();
    const double d20 = rep20.at("D_dagger").get<double>();

    rc = run_cli("extrapolate --params " + (work_dir / "alt_params.json").string() +
                 " --target 400 --out " + work_dir.string());
    if (rc != 0) {
        r.detail = "CLI exit code " + std::to_string(rc);
        r.seconds = timer.seconds();
        return r;
    }
    const auto rep400 = serde::json::parse(slurp(work_dir / "extrapolation.json"));
    const double c400 = rep400.at("C_dagger").get<double>();

    // Rounding-free self-consistency of the inversion.
    const double round_trip = rel_err(lawcore::ratio_at(primary_params(), c20), 20.0);

    const double ec = rel_err(c20, 9.6794e29);
    const double en = rel_err(n20, 8.9812e13);
    const double ed = rel_err(d20, 1.7962e15);
    const double e400 = rel_err(c400, 5.64e19);
    r.seconds = timer.seconds();

    const bool c20_ok = ec <= 0.01;
    const bool rest_ok =
        en <= 0.01 && ed <= 0.01 && e400 <= 0.02 && round_trip <= 1e-9 && r.seconds < 1.0;
    r.pass = c20_ok && rest_ok;
    r.detail = "C+ err " + fmt(ec * 100) + "% (limit 1%), N+ err " + fmt(en * 100) + "%, D+ err " +
               fmt(ed * 100) + "%, C(400) err " + fmt(e400 * 100) +
               "% (limit 2%), inversion round trip " + fmt(round_trip) + ", " + fmt(r.seconds) +
               " s";
    if (!c20_ok && rest_ok) {
        r.detail +=
            " | note: the three r*=20 reference values are mutually consistent (6*N*D=C, D/N=20)"
            " and N+/D+ each land ~0.7% off from the 4-decimal coefficient inputs; C+ = 6*N+*D+"
            " compounds both roundings to ~1.4%, so the 1% bound on C+ is unreachable from"
            " 4-decimal inputs even though the inversion itself is exact to 1e-12";
    }
    return r;
}

CriterionResult criterion3_flatness_table() {
    Timer timer;
    CriterionResult r{3, "flatness/curvature table reproduction (10 rows, 5% per cell)", false,
                      "", 0};

    write_file(work_dir / "params.json", kPrimaryParamsJson);
    const int rc = run_cli("flatness --params " + (work_dir / "params.json").string() +
                           " --budgets 1e18,3e18,6e18,1e19,3e19,6e19,1e20,3e20,6e20,1e21"
                           " --epsilon 1e-3 --out " +
                           work_dir.string());
    if (rc != 0) {
        r.detail = "CLI exit code " + std::to_string(rc);
        r.seconds = timer.seconds();
        return r;
    }
    // columns: C, L*, N1, N2, dN, D1, D2, dD, kappa, truncated
    const auto rows = parse_numeric_csv(slurp(work_dir / "flatness.csv"));
    const double expected[10][9] = {
        {1e18, 0.007486, 1.06e6, 1.54e8, 1.53e8, 1.57e11, 1.08e9, 1.56e11, 1.54e-18},
        {3e18, 0.007156, 1.54e6, 3.52e8, 3.50e8, 3.24e11, 1.42e9, 3.23e11, 3.70e-19},
        {6e18, 0.006976, 1.93e6, 5.97e8, 5.95e8, 5.17e11, 1.67e9, 5.15e11, 1.51e-19},
        {1e19, 0.006856, 2.27e6, 8.86e8, 8.84e8, 7.34e11, 1.88e9, 7.32e11, 7.79e-20},
        {3e19, 0.006628, 3.16e6, 2.10e9, 2.09e9, 1.58e12, 2.39e9, 1.58e12, 1.88e-20},
        {6e19, 0.006504, 3.84e6, 3.64e9, 3.64e9, 2.60e12, 2.75e9, 2.60e12, 7.65e-21},
        {1e20, 0.006421, 4.41e6, 5.49e9, 5.48e9, 3.78e12, 3.04e9, 3.78e12, 3.95e-21},
        {3e20, 0.006264, 5.83e6, 1.34e10, 1.34e10, 8.57e12, 3.72e9, 8.57e12, 9.51e-22},
        {6e20, 0.006179, 6.87e6, 2.39e10, 2.39e10, 1.46e13, 4.19e9, 1.46e13, 3.87e-22},
        {1e21, 0.006122, 7.70e6, 3.66e10, 3.66e10, 2.16e13, 4.55e9, 2.16e13, 2.00e-22},
    };
    bool ok = rows.size() == 10;
    double worst = 0.0;
    bool kappa_decreasing = true;
    for (std::size_t i = 0; ok && i < 10; ++i) {
        for (int col = 1; col < 9; ++col)
            worst = std::max(worst, rel_err(rows[i][col], expected[i][col]));
        if (i > 0 && !(rows[i][8] < rows[i - 1][8])) kappa_decreasing = false;
        if (rows[i][9] != 0.0) ok = false;  // no truncated rows expected
    }
    r.seconds = timer.seconds();
    ok = ok && worst <= 0.05 && kappa_decreasing && r.seconds < 5.0;
    r.pass = ok;
    r.detail = "worst cell error " + fmt(worst * 100) +
               "% (limit 5%), kappa strictly decreasing: " + (kappa_decreasing ? "yes" : "NO") +
               ", " + fmt(r.seconds) + " s";
    return r;
}

CriterionResult criterion4_parameter_recovery() {
    Timer timer;
    CriterionResult r{4, "synthetic parameter recovery (20 trials, 200 hops)", false, "", 0};

    struct TrialOutcome {
        bool noiseless_ok = false;
        bool noisy_ok = false;
        double worst_param_err = 0.0;
        double noisy_test_mre = 0.0;
    };

    const auto run_trial = [](int trial) {
        Rng rng(777000 + 13 * trial);
        lawcore::ScalingLawParams truth;
        truth.irreducible = rng.log_uniform(1e-3, 0.1);
        truth.coeff_n = rng.log_uniform(0.01, 10.0);
        truth.coeff_d = rng.log_uniform(0.1, 100.0);
        truth.exp_n = rng.uniform(0.3, 0.7);
        truth.exp_d = rng.uniform(0.3, 0.7);
        truth.exp_outer = rng.uniform(0.5, 1.2);

        const auto clean = law_grid_observations(truth, 0.0, nullptr);
        auto noisy = clean;
        for (auto& o : noisy) o.mean *= 1.0 + 0.01 * rng.normal();

        fitting::FitConfig config;
        config.hop_count = 200;
        config.rng_seed = 1000 + trial;
        config.split = fitting::TrainTestSplit::explicit_indices({6, 13, 20, 27, 34});

        TrialOutcome out;
        const auto fit = fitting::basin_hop_fit(clean, config);
        out.worst_param_err =
            std::max({rel_err(fit.params.irreducible, truth.irreducible),
                      rel_err(fit.params.coeff_n, truth.coeff_n),
                      rel_err(fit.params.coeff_d, truth.coeff_d),
                      rel_err(fit.params.exp_n, truth.exp_n),
                      rel_err(fit.params.exp_d, truth.exp_d),
                      rel_err(fit.params.exp_outer, truth.exp_outer)});
        out.noiseless_ok = out.worst_param_err <= 0.02 && fit.test_mre <= 0.001;

        const auto noisy_fit = fitting::basin_hop_fit(noisy, config);
        out.noisy_test_mre = noisy_fit.test_mre;
        out.noisy_ok = noisy_fit.test_mre <= 0.05;
        return out;
    };

    std::vector<std::future<TrialOutcome>> futures;
    for (int trial = 0; trial < 20; ++trial)
        futures.push_back(std::async(std::launch::async, run_trial, trial));

    int noiseless_pass = 0, noisy_pass = 0;
    double worst_param = 0.0, worst_noisy_mre = 0.0;
    for (auto& f : futures) {
        const TrialOutcome out = f.get();
        noiseless_pass += out.noiseless_ok;
        noisy_pass += out.noisy_ok;
        worst_param = std::max(worst_param, out.worst_param_err);
        worst_noisy_mre = std::max(worst_noisy_mre, out.noisy_test_mre);
    }
    r.seconds = timer.seconds();
    r.pass = noiseless_pass == 20 && noisy_pass >= 18 && r.seconds < 60.0;
    r.detail = "noiseless " + std::to_string(noiseless_pass) +
               "/20 (every parameter within 2%, test MRE <= 0.1%; worst parameter error " +
               fmt(worst_param * 100) + "%), noisy test MRE <= 5% in " +
               std::to_string(noisy_pass) + "/20 (need >= 18; worst " +
               fmt(worst_noisy_mre * 100) + "%), 200-hop branch, " + fmt(r.seconds) +
               " s (limit 60 s)";
    return r;
}

CriterionResult criterion5_frontier_oracle() {
    Timer timer;
    CriterionResult r{5, "frontier closed form vs 1e5-point grid oracle (50 cases, 0.1%)", false,
                      "", 0};
    Rng rng(424242);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        lawcore::ScalingLawParams p;
        p.irreducible = rng.uniform(0.0, 0.5);
        p.coeff_n = rng.log_uniform(1e-3, 1e3);
        p.coeff_d = rng.log_uniform(1e-3, 1e3);
        p.exp_n = rng.uniform(0.2, 1.0);
        p.exp_d = rng.uniform(0.2, 1.0);
        p.exp_outer = rng.uniform(0.4, 1.5);
        const double compute = rng.log_uniform(1e14, 1e24);

        const double lo = std::log(1.0), hi = std::log(compute / 6.0);
        double best_n = 1.0, best_l = std::numeric_limits<double>::infinity();
        constexpr int kPoints = 100000;
        for (int i = 0; i < kPoints; ++i) {
            const double n = std::exp(lo + (hi - lo) * i / (kPoints - 1));
            const double l = lawcore::eval_loss(p, n, compute / (6.0 * n));
            if (l < best_l) {
                best_l = l;
                best_n = n;
            }
        }
        worst = std::max(worst, rel_err(lawcore::optimal_allocation(p, compute).n_star, best_n));
    }
    r.seconds = timer.seconds();
    r.pass = worst <= 1e-3 && r.seconds < 30.0;
    r.detail =
        "worst N* disagreement " + fmt(worst * 100) + "% (limit 0.1%), " + fmt(r.seconds) + " s";
    return r;
}

CriterionResult criterion6_fused_downstream() {
    Timer timer;
    CriterionResult r{6, "fused downstream recovery and fused-vs-sequential dominance", false, "",
                      0};

    downstream::SigmoidParams truth;
    truth.lo = 0.1;
    truth.hi = 0.9;
    truth.sharpness = 500.0;
    truth.midpoint = 0.0125;
    truth.law = {0.01, 0.5, 8.0, 0.45, 0.55, 0.8};

    const std::vector<std::size_t> test_idx = {6, 13, 20, 27, 34};
    fitting::FitConfig law_config;
    law_config.hop_count = 60;
    law_config.rng_seed = 5;
    law_config.split = fitting::TrainTestSplit::explicit_indices(test_idx);

    // Sequential two-step fit: loss law first, then the four sigmoid
    // parameters with the law frozen; both stages see train points only.
    const auto sequential_fit = [&](const std::vector<records::Observation>& loss_obs,
                                    const std::vector<records::Observation>& metric_obs,
                                    double delta) {
        const auto law_fit = fitting::basin_hop_fit(loss_obs, law_config);
        std::vector<records::Observation> train;
        for (std::size_t i = 0; i < metric_obs.size(); ++i)
            if (std::find(test_idx.begin(), test_idx.end(), i) == test_idx.end())
                train.push_back(metric_obs[i]);
        double metric_min = train.front().mean, metric_max = train.front().mean;
        for (const auto& o : train) {
            metric_min = std::min(metric_min, o.mean);
            metric_max = std::max(metric_max, o.mean);
        }
        const auto sig_bounds = downstream::default_sigmoid_bounds(metric_min, metric_max, 1.0);
        const fitting::Objective sigmoid_objective = [&](const std::vector<double>& v) {
            downstream::SigmoidParams sp;
            sp.lo = v[0];
            sp.hi = v[1];
            sp.sharpness = v[2];
            sp.midpoint = v[3];
            sp.law = law_fit.params;
            double sum = 0.0;
            for (const auto& o : train)
                sum += fitting::huber(
                    downstream::eval_metric(sp, o.model_size, o.dataset_size) - o.mean, delta);
            return sum;
        };
        fitting::BasinHopOptions options;
        options.hop_count = 60;
        options.rng_seed = 6;
        const auto sig = fitting::minimize_basin_hopping(sigmoid_objective, sig_bounds, options);
        downstream::SigmoidParams sp;
        sp.lo = sig.x[0];
        sp.hi = sig.x[1];
        sp.sharpness = sig.x[2];
        sp.midpoint = sig.x[3];
        sp.law = law_fit.params;
        return std::make_pair(sp, sig.value);
    };

    fitting::FitConfig fused_config;
    fused_config.hop_count = 100;
    fused_config.rng_seed = 7;
    fused_config.split = fitting::TrainTestSplit::explicit_indices(test_idx);

    // Noiseless: held-out metric MRE of the fused fit.
    const auto clean_loss = law_grid_observations(truth.law, 0.0, nullptr);
    const auto clean_metric = metric_grid_observations(truth, 0.0, nullptr);
    const auto [seq_params, seq_obj] =
        sequential_fit(clean_loss, clean_metric, fused_config.huber_delta);
    const auto bounds = downstream::default_sigmoid_bounds(0.1, 0.9, 1.0);
    const auto fused = downstream::fused_fit(clean_metric, fused_config, bounds,
                                             {downstream::sigmoid_to_vector(seq_params)});
    const bool noiseless_ok = fused.test_mre <= 0.005;
    const bool noiseless_match = fused.objective_value <= seq_obj + 1e-6;

    // Ten noisy trials: the fused objective must not lose to sequential.
    int dominance = 0;
    for (int trial = 0; trial < 10; ++trial) {
        Rng rng(9100 + trial);
        const auto noisy_loss = law_grid_observations(truth.law, 0.01, &rng);
        const auto noisy_metric = metric_grid_observations(truth, 0.01, &rng);
        const auto [sp, obj] = sequential_fit(noisy_loss, noisy_metric, fused_config.huber_delta);
        const auto noisy_fused = downstream::fused_fit(noisy_metric, fused_config, bounds,
                                                       {downstream::sigmoid_to_vector(sp)});
        if (noisy_fused.objective_value <= obj * (1.0 + 1e-9) + 1e-300) ++dominance;
    }

    r.seconds = timer.seconds();
    r.pass = noiseless_ok && noiseless_match && dominance == 10;
    r.detail = "noiseless held-out metric MRE " + fmt(fused.test_mre * 100) +
               "% (limit 0.5%), fused-vs-sequential objective dominance " +
               std::to_string(dominance) +
               "/10 noisy trials, fused matches sequential on clean data within 1e-6: " +
               (noiseless_match ? "yes" : "NO") + ", " + fmt(r.seconds) + " s";
    return r;
}

// Brute-force pJSD oracle, independent of the library implementation.
double brute_pjsd(const std::vector<pjsd::PhonemeSequence>& gen,
                  const std::vector<pjsd::PhonemeSequence>& real_corpus, int n) {
    using Gram = std::vector<std::string>;
    const auto counts = [n](const std::vector<pjsd::PhonemeSequence>& corpus) {
        std::map<Gram, long> c;
        for (const auto& seq : corpus)
            for (std::size_t i = 0; i + n <= seq.tokens.size(); ++i)
                c[Gram(seq.tokens.begin() + i, seq.tokens.begin() + i + n)]++;
        return c;
    };
    const auto cg = counts(gen);
    const auto cr = counts(real_corpus);
    std::set<Gram> support;
    for (const auto& [g, c] : cg) support.insert(g);
    for (const auto& [g, c] : cr) support.insert(g);
    double zg = 0, zr = 0;
    for (const auto& [g, c] : cg) zg += c;
    for (const auto& [g, c] : cr) zr += c;
    double acc = 0.0;
    for (const auto& g : support) {
        const double p = cg.count(g) ? cg.at(g) / zg : 0.0;
        const double q = cr.count(g) ? cr.at(g) / zr : 0.0;
        const double m = 0.5 * (p + q);
        if (p > 0) acc += 0.5 * p * std::log2(p / m);
        if (q > 0) acc += 0.5 * q * std::log2(q / m);
    }
    return acc;
}

CriterionResult criterion7_pjsd_oracle() {
    Timer timer;
    CriterionResult r{7, "pJSD fixtures vs brute-force oracle (n=1..5, 1e-12)", false, "", 0};

    const auto gen =
        pjsd::read_corpus_file(std::string(SCALEFIT_FIXTURE_DIR) + "/pjsd_generated.txt");
    const auto real_corpus =
        pjsd::read_corpus_file(std::string(SCALEFIT_FIXTURE_DIR) + "/pjsd_real.txt");

    const auto report = pjsd::pjsd_report(gen, real_corpus, {1, 2, 3, 4, 5});
    double worst = 0.0;
    for (const int n : {1, 2, 3, 4, 5})
        worst =
            std::max(worst, std::abs(report.divergence.at(n) - brute_pjsd(gen, real_corpus, n)));

    const auto identity = pjsd::pjsd_report(gen, gen, {1, 2, 3, 4, 5});
    double identity_worst = 0.0;
    for (const auto& [n, v] : identity.divergence) identity_worst = std::max(identity_worst, v);

    std::vector<pjsd::PhonemeSequence> left(1), right(1);
    for (int i = 0; i < 8; ++i) {
        left[0].tokens.push_back("aa");
        right[0].tokens.push_back("bb");
    }
    const auto disjoint = pjsd::pjsd_report(left, right, {1, 2, 3, 4, 5});
    double disjoint_worst = 0.0;
    for (const auto& [n, v] : disjoint.divergence)
        disjoint_worst = std::max(disjoint_worst, std::abs(v - 1.0));

    r.seconds = timer.seconds();
    r.pass = worst <= 1e-12 && identity_worst <= 1e-12 && disjoint_worst <= 1e-12 &&
             r.seconds < 1.0;
    r.detail = "worst |report - oracle| " + fmt(worst) + ", identity worst " + fmt(identity_worst) +
               ", disjoint worst |v-1| " + fmt(disjoint_worst) + ", " + fmt(r.seconds) + " s";
    return r;
}

CriterionResult criterion8_property_suites() {
    Timer timer;
    CriterionResult r{8, "invariant property suites (>= 1000 cases per property)", false, "", 0};
    std::vector<std::string> failures;
    constexpr int kCases = 1000;

    const auto random_law = [](Rng& rng) {
        lawcore::ScalingLawParams p;
        p.irreducible = rng.uniform(0.0, 0.5);
        p.coeff_n = rng.log_uniform(1e-3, 1e3);
        p.coeff_d = rng.log_uniform(1e-3, 1e3);
        p.exp_n = rng.uniform(0.2, 1.0);
        p.exp_d = rng.uniform(0.2, 1.0);
        p.exp_outer = rng.uniform(0.4, 1.5);
        return p;
    };

    {  // eval_loss strictly decreasing in N and in D
        Rng rng(81);
        int bad = 0;
        for (int i = 0; i < kCases; ++i) {
            const auto p = random_law(rng);
            const double n = rng.log_uniform(1e3, 1e9);
            const double d = rng.log_uniform(1e3, 1e9);
            const double factor = rng.uniform(1.1, 10.0);
            if (!(lawcore::eval_loss(p, n * factor, d) < lawcore::eval_loss(p, n, d))) ++bad;
            if (!(lawcore::eval_loss(p, n, d * factor) < lawcore::eval_loss(p, n, d))) ++bad;
        }
        if (bad) failures.push_back("eval_loss monotonicity (" + std::to_string(bad) + ")");
    }
    {  // outer-exponent invariance of the argmin
        Rng rng(82);
        int bad = 0;
        for (int i = 0; i < kCases; ++i) {
            auto p = random_law(rng);
            auto q = p;
            q.exp_outer = 1.0;
            const double c = rng.log_uniform(1e12, 1e24);
            const auto a = lawcore::optimal_allocation(p, c);
            const auto b = lawcore::optimal_allocation(q, c);
            if (a.n_star != b.n_star || a.d_star != b.d_star) ++bad;
        }
        if (bad) failures.push_back("gamma-argmin invariance (" + std::to_string(bad) + ")");
    }
    {  // ratio inversion round trip
        Rng rng(83);
        int bad = 0;
        for (int i = 0; i < kCases; ++i) {
            auto p = random_law(rng);
            if (p.exp_n == p.exp_d) continue;
            const double c = rng.log_uniform(1e14, 1e22);
            const double target = lawcore::ratio_at(p, c);
            if (!(target > 0.0) || !std::isfinite(target)) continue;
            const auto pt = lawcore::solve_compute_for_ratio(p, target);
            if (rel_err(pt.compute, c) > 1e-9) ++bad;
        }
        if (bad) failures.push_back("ratio round trip (" + std::to_string(bad) + ")");
    }
    {  // finite-difference curvature vs analytic second derivative
        Rng rng(84);
        int bad = 0;
        for (int i = 0; i < kCases; ++i) {
            const auto p = random_law(rng);
            const double c = rng.log_uniform(1e14, 1e22);
            const double n = lawcore::optimal_allocation(p, c).n_star;
            const double k = p.coeff_d * std::pow(6.0 / c, p.exp_d);
            const double s = p.coeff_n * std::pow(n, -p.exp_n) + k * std::pow(n, p.exp_d);
            const double s2 = p.exp_n * (p.exp_n + 1.0) * p.coeff_n * std::pow(n, -p.exp_n - 2.0) +
                              p.exp_d * (p.exp_d - 1.0) * k * std::pow(n, p.exp_d - 2.0);
            const double analytic = p.exp_outer * std::pow(s, p.exp_outer - 1.0) * s2;
            if (rel_err(lawcore::isoflop_curvature(p, c), analytic) > 1e-4) ++bad;
        }
        if (bad) failures.push_back("curvature vs analytic (" + std::to_string(bad) + ")");
    }
    {  // jsd symmetry and range
        Rng rng(85);
        int bad = 0;
        const char* alphabet[] = {"p", "t", "k", "s", "m"};
        for (int i = 0; i < kCases; ++i) {
            std::vector<pjsd::PhonemeSequence> a(2), b(2);
            for (auto* corpus : {&a, &b})
                for (auto& seq : *corpus) {
                    const int len = 2 + static_cast<int>(rng.uniform() * 8);
                    for (int t = 0; t < len; ++t)
                        seq.tokens.push_back(alphabet[rng.next_u64() % 5]);
                }
            const auto support = pjsd::union_support(a, b, 2);
            if (support.empty()) continue;
            const auto da = pjsd::build_distribution(a, 2, support);
            const auto db = pjsd::build_distribution(b, 2, support);
            const double fwd = pjsd::jsd(da, db);
            if (fwd != pjsd::jsd(db, da) || fwd < 0.0 || fwd > 1.0) ++bad;
        }
        if (bad) failures.push_back("jsd symmetry/range (" + std::to_string(bad) + ")");
    }
    {  // bucket assignment partitions the observations
        Rng rng(86);
        int bad = 0;
        const std::vector<double> budgets = {1e18, 3e18, 6e18, 1e19};
        for (int i = 0; i < kCases; ++i) {
            std::vector<records::Observation> obs;
            const int count = 1 + static_cast<int>(rng.uniform() * 20);
            for (int j = 0; j < count; ++j) {
                records::Observation o;
                o.compute = rng.log_uniform(1e17, 1e20);
                obs.push_back(o);
            }
            const auto res = records::bucket_by_compute(obs, budgets, 0.05);
            std::size_t assigned = 0;
            for (const auto& [c, members] : res.buckets) assigned += members.size();
            if (assigned + res.unassigned.size() != obs.size()) ++bad;
        }
        if (bad) failures.push_back("bucket partition (" + std::to_string(bad) + ")");
    }
    {  // huber branch agreement at the knee and evenness
        Rng rng(87);
        int bad = 0;
        for (int i = 0; i < kCases; ++i) {
            const double delta = rng.log_uniform(1e-6, 10.0);
            const double knee = std::abs(fitting::huber(delta, delta) - 0.5 * delta * delta);
            if (knee > 1e-18 * std::max(1.0, delta * delta)) ++bad;
            const double x = rng.uniform(-3.0, 3.0) * delta;
            if (fitting::huber(x, delta) != fitting::huber(-x, delta)) ++bad;
        }
        if (bad) failures.push_back("huber knee/symmetry (" + std::to_string(bad) + ")");
    }
    {  // engine determinism given seed + non-increasing best-ever trace
        Rng rng(88);
        int bad = 0;
        for (int i = 0; i < kCases; ++i) {
            const double cx = rng.uniform(-4.0, 4.0), cy = rng.uniform(-4.0, 4.0);
            const double wx = rng.uniform(0.5, 5.0), wy = rng.uniform(0.5, 5.0);
            const fitting::Objective f = [&](const std::vector<double>& v) {
                const double a = v[0] - cx, b = v[1] - cy;
                return wx * a * a + wy * b * b + 0.3 * std::sin(3.0 * a) * std::sin(2.0 * b);
            };
            fitting::Bounds box{{-6.0, -6.0}, {6.0, 6.0}};
            fitting::BasinHopOptions options;
            options.hop_count = 2;
            options.rng_seed = rng.next_u64();
            options.grid_per_axis = 2;
            const auto first = fitting::minimize_basin_hopping(f, box, options);
            const auto second = fitting::minimize_basin_hopping(f, box, options);
            if (first.x != second.x || first.value != second.value || first.trace != second.trace)
                ++bad;
            for (std::size_t t = 1; t < first.trace.size(); ++t)
                if (first.trace[t].second > first.trace[t - 1].second) ++bad;
        }
        if (bad) failures.push_back("engine determinism/trace (" + std::to_string(bad) + ")");
    }
    {  // law-fit determinism given seed (fewer, but full fit path)
        Rng rng(89);
        int bad = 0;
        for (int i = 0; i < 10; ++i) {
            const auto truth = random_law(rng);
            Rng noise(500 + i);
            const auto obs = law_grid_observations(truth, 0.01, &noise);
            fitting::FitConfig config;
            config.hop_count = 3;
            config.rng_seed = rng.next_u64();
            const auto a = fitting::basin_hop_fit(obs, config);
            const auto b = fitting::basin_hop_fit(obs, config);
            if (fitting::law_to_vector(a.params) != fitting::law_to_vector(b.params) ||
                a.objective_value != b.objective_value || a.hop_trace != b.hop_trace)
                ++bad;
        }
        if (bad) failures.push_back("law-fit determinism (" + std::to_string(bad) + ")");
    }

    r.seconds = timer.seconds();
    r.pass = failures.empty();
    if (failures.empty()) {
        r.detail = "9 properties, 1000 cases each (10 full-path determinism fits), " +
                   fmt(r.seconds) + " s";
    } else {
        r.detail = "failing:";
        for (const auto& f : failures) r.detail += " " + f;
    }
    return r;
}

}  // namespace

int main() {
    work_dir = fs::temp_directory_path() / "scalefit_acceptance";
    fs::remove_all(work_dir);
    fs::create_directories(work_dir);

    std::vector<CriterionResult> results;
    results.push_back(criterion1_optimal_table());
    results.push_back(criterion2_extrapolation());
    results.push_back(criterion3_flatness_table());
    results.push_back(criterion4_parameter_recovery());
    results.push_back(criterion5_frontier_oracle());
    results.push_back(criterion6_fused_downstream());
    results.push_back(criterion7_pjsd_oracle());
    results.push_back(criterion8_property_suites());

    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("[%s] criterion %d: %s -- %s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    const auto passed = std::count_if(results.begin(), results.end(),
                                      [](const CriterionResult& c) { return c.pass; });
    std::printf("%d/%zu criteria passed\n", static_cast<int>(passed), results.size());
    return all_pass ? 0 : 1;
}
