// Copyright 2026 The Scalefit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end runs of the installed CLI binary. SCALEFIT_BIN is injected
// by the build.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scalefit/downstream.hpp"
#include "scalefit/lawcore.hpp"
#include "scalefit/serde.hpp"

using namespace scalefit;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SCALEFIT_BIN) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("scalefit_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
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

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        rows.push_back(fields);
    }
    return rows;
}

std::string reference_params_json() {
    return R"({"E":0.0055,"A":0.0612,"B":16.2179,"alpha":0.4226,"beta":0.5531,"gamma":0.6745})";
}

// 8x5 grid of exact loss rows for the reference coefficients.
std::string synthetic_records_csv() {
    const lawcore::ScalingLawParams p{0.0055, 0.0612, 16.2179, 0.4226, 0.5531, 0.6745};
    std::ostringstream csv;
    csv << "N,D,seed,loss\n";
    for (int i = 0; i < 8; ++i) {
        const double n = std::pow(10.0, 6.0 + 4.0 * i / 7.0);
        for (int j = 0; j < 5; ++j) {
            const double d = std::pow(10.0, 8.0 + 4.0 * j / 4.0);
            csv << serde::format_double(n) << ',' << serde::format_double(d) << ",0,"
                << serde::format_double(lawcore::eval_loss(p, n, d)) << "\n";
        }
    }
    return csv.str();
}

}  // namespace

TEST_CASE("cli optimal reproduces the reference rows") {
    const auto dir = fresh_dir("optimal");
    write_file(dir / "params.json", reference_params_json());
    const std::string args = "optimal --params " + (dir / "params.json").string() +
                             " --budgets 1e18,1e21 --out " + dir.string();
    REQUIRE(run_cli(args) == 0);
    const auto rows = parse_csv(slurp(dir / "frontier.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"C", "N_star", "D_star", "r_star"});
    const double n18 = std::stod(rows[1][1]);
    const double r21 = std::stod(rows[2][3]);
    CHECK(std::abs(n18 - 1.44e7) / 1.44e7 < 0.01);
    CHECK(std::abs(r21 - 319.0) / 319.0 < 0.01);

    // byte-identical on a second run
    const auto first = slurp(dir / "frontier.csv");
    REQUIRE(run_cli(args) == 0);
    CHECK(slurp(dir / "frontier.csv") == first);
}

TEST_CASE("cli flatness emits one row per budget") {
    const auto dir = fresh_dir("flatness");
    write_file(dir / "params.json", reference_params_json());
    REQUIRE(run_cli("flatness --params " + (dir / "params.json").string() +
                    " --budgets 1e18 --out " + dir.string()) == 0);
    const auto rows = parse_csv(slurp(dir / "flatness.csv"));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "C");
    CHECK(std::abs(std::stod(rows[1][2]) - 1.06e6) / 1.06e6 < 0.05);  // N1
}

TEST_CASE("cli extrapolate round trips and rejects matched exponents") {
    const auto dir = fresh_dir("extrapolate");
    write_file(dir / "params.json", reference_params_json());

    const lawcore::ScalingLawParams p{0.0055, 0.0612, 16.2179, 0.4226, 0.5531, 0.6745};
    const double r18 = lawcore::ratio_at(p, 1e18);
    REQUIRE(run_cli("extrapolate --params " + (dir / "params.json").string() + " --target " +
                    serde::format_double(r18) + " --out " + dir.string()) == 0);
    const auto report = serde::json::parse(slurp(dir / "extrapolation.json"));
    CHECK(std::abs(report.at("C_dagger").get<double>() - 1e18) / 1e18 < 1e-9);
    CHECK(fs::exists(dir / "ratio_trace.csv"));

    write_file(dir / "flat.json", R"({"E":0.1,"A":1,"B":2,"alpha":0.5,"beta":0.5,"gamma":1})");
    CHECK(run_cli("extrapolate --params " + (dir / "flat.json").string() + " --target 20 --out " +
                  dir.string()) == 2);
}

TEST_CASE("cli pjsd on identical files is all zeros") {
    const auto dir = fresh_dir("pjsd");
    write_file(dir / "corpus.txt", "ah b k ah s\nb ah k\ns ah ah b\nk s\n");
    REQUIRE(run_cli("pjsd --generated " + (dir / "corpus.txt").string() + " --real " +
                    (dir / "corpus.txt").string() + " --out " + dir.string()) == 0);
    const auto report = serde::json::parse(slurp(dir / "pjsd.json"));
    for (const int n : {1, 2, 3, 4, 5}) {  // default n list
        CHECK(report.at(std::to_string(n)).get<double>() == doctest::Approx(0.0));
    }

    // An empty generated corpus is an analysis error naming corpus and n.
    write_file(dir / "empty.txt", "\n\n");
    CHECK(run_cli("pjsd --generated " + (dir / "empty.txt").string() + " --real " +
                  (dir / "corpus.txt").string() + " --out " + dir.string()) == 2);
}

TEST_CASE("cli isoflop classifies synthetic curves and draws the svg") {
    const auto dir = fresh_dir("isoflop");
    write_file(dir / "records.csv", synthetic_records_csv());
    write_file(dir / "baselines.json",
               R"({"loss": {"mean": 0.004, "std": 0.0005, "direction": "lower-better"}})");
    const std::string args = "isoflop --records " + (dir / "records.csv").string() +
                             " --metric loss --budgets 6e18,6e19,6e20 --rel-tol 0.45" +
                             " --baselines " + (dir / "baselines.json").string() +
                             " --saturation --out " + dir.string();
    REQUIRE(run_cli(args) == 0);
    CHECK(fs::exists(dir / "curves.csv"));
    const auto verdict = serde::json::parse(slurp(dir / "verdict.json"));
    CHECK(verdict.contains("expected_behavior"));
    CHECK(verdict.contains("saturation"));

    const auto svg_once = slurp(dir / "isoflop.svg");
    CHECK(svg_once.find("<svg") != std::string::npos);
    CHECK(svg_once.find("polyline") != std::string::npos);
    REQUIRE(run_cli(args) == 0);
    CHECK(slurp(dir / "isoflop.svg") == svg_once);  // identical bytes

    // saturation without baselines is an analysis error
    CHECK(run_cli("isoflop --records " + (dir / "records.csv").string() +
                  " --metric loss --budgets 6e18 --rel-tol 0.45 --direction lower" +
                  " --saturation --out " + dir.string()) == 2);
}

TEST_CASE("cli fit-loss with params bypass writes the frontier") {
    const auto dir = fresh_dir("fitloss_bypass");
    write_file(dir / "records.csv", synthetic_records_csv());
    write_file(dir / "params.json", reference_params_json());
    REQUIRE(run_cli("fit-loss --records " + (dir / "records.csv").string() +
                    " --metric loss --params " + (dir / "params.json").string() +
                    " --budgets 1e18,1e19,1e20 --out " + dir.string()) == 0);
    const auto rows = parse_csv(slurp(dir / "frontier.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(std::abs(std::stod(rows[1][3]) - 801.0) / 801.0 < 0.01);
    CHECK(fs::exists(dir / "params.json"));
    CHECK(fs::exists(dir / "residuals.csv"));
}

TEST_CASE("cli fit-loss fits records deterministically") {
    const auto dir = fresh_dir("fitloss_fit");
    write_file(dir / "records.csv", synthetic_records_csv());
    write_file(dir / "config.json", R"({"hop_count": 3})");
    const std::string args = "fit-loss --records " + (dir / "records.csv").string() +
                             " --metric loss --config " + (dir / "config.json").string() +
                             " --seed 7 --budgets 1e18 --out " + dir.string();
    REQUIRE(run_cli(args) == 0);
    const auto params_once = slurp(dir / "params.json");
    const auto fit_once = slurp(dir / "fit.json");
    REQUIRE(run_cli(args) == 0);
    CHECK(slurp(dir / "params.json") == params_once);
    CHECK(slurp(dir / "fit.json") == fit_once);

    // the fitted surface should be close to the generator
    const auto fitted = serde::law_from_json(serde::json::parse(params_once));
    CHECK(std::abs(fitted.exp_n - 0.4226) < 0.05);

    // empty records file: parse error, exit 1
    write_file(dir / "empty.csv", "N,D,seed,loss\n");
    CHECK(run_cli("fit-loss --records " + (dir / "empty.csv").string() + " --metric loss --out " +
                  dir.string()) == 1);
}

TEST_CASE("cli fit-downstream produces the fused artifacts") {
    const auto dir = fresh_dir("fitdown");
    downstream::SigmoidParams truth;
    truth.lo = 0.1;
    truth.hi = 0.9;
    truth.sharpness = 500.0;
    truth.midpoint = 0.0125;
    truth.law = {0.01, 0.5, 8.0, 0.45, 0.55, 0.8};
    std::ostringstream csv;
    csv << "N,D,seed,cu\n";
    for (int i = 0; i < 8; ++i) {
        const double n = std::pow(10.0, 6.0 + 4.0 * i / 7.0);
        for (int j = 0; j < 5; ++j) {
            const double d = std::pow(10.0, 8.0 + 4.0 * j / 4.0);
            csv << serde::format_double(n) << ',' << serde::format_double(d) << ",0,"
                << serde::format_double(downstream::eval_metric(truth, n, d)) << "\n";
        }
    }
    write_file(dir / "records.csv", csv.str());
    write_file(dir / "baselines.json",
               R"({"cu": {"mean": 0.05, "std": 0.01, "direction": "lower-better"}})");
    write_file(dir / "config.json", R"({"hop_count": 5})");
    REQUIRE(run_cli("fit-downstream --records " + (dir / "records.csv").string() +
                    " --metric cu --baselines " + (dir / "baselines.json").string() +
                    " --config " + (dir / "config.json").string() + " --seed 3 --out " +
                    dir.string()) == 0);
    CHECK(fs::exists(dir / "sigmoid.json"));
    CHECK(fs::exists(dir / "fused_fit.json"));
    CHECK(fs::exists(dir / "metric_trace.csv"));
    const auto verdict = serde::json::parse(slurp(dir / "reachability.json"));
    CHECK(verdict.contains("reachable"));

    // without baselines, reachability is skipped but the fit succeeds
    REQUIRE(run_cli("fit-downstream --records " + (dir / "records.csv").string() +
                    " --metric cu --config " + (dir / "config.json").string() +
                    " --seed 3 --out " + dir.string()) == 0);
}

TEST_CASE("cli rejects unknown input files with exit 1") {
    const auto dir = fresh_dir("badfile");
    CHECK(run_cli("optimal --params " + (dir / "nope.json").string() + " --budgets 1e18 --out " +
                  dir.string()) == 1);
}
