#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prevbound/pipeline.hpp"

namespace {

using prevbound::Errc;
using prevbound::Error;
using prevbound::ErrorBand;
using prevbound::RegimeKind;

std::vector<RegimeKind> parse_regime_list(const std::string& csv) {
    std::vector<RegimeKind> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t pos = csv.find(',', start);
        std::string tok = csv.substr(start, pos == std::string::npos ? csv.size() - start
                                                                     : pos - start);
        if (!tok.empty()) {
            auto kind = prevbound::parse_regime(tok);
            if (!kind)
                throw Error(Errc::config_error,
                            "unknown regime '" + tok +
                                "' (expected worst, monotone, hosp-monotone, hosp-independent)");
            out.push_back(*kind);
        }
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (out.empty()) throw Error(Errc::config_error, "empty regime list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partial-identification bounds on infection prevalence from linked test and "
                 "hospital records"};
    app.require_subcommand(1);

    prevbound::pipeline::RunConfig run;
    std::string regimes = "worst,monotone,hosp-monotone,hosp-independent";
    double lambda_l = 0.0, lambda_u = 0.0;
    bool have_lambda_l = false, have_lambda_u = false;

    CLI::App* cmd_bounds = app.add_subcommand("bounds", "Weekly prevalence bounds per cohort");
    cmd_bounds->add_option("--persons", run.persons_path)->required();
    cmd_bounds->add_option("--tests", run.tests_path)->required();
    cmd_bounds->add_option("--admissions", run.admissions_path)->required();
    cmd_bounds->add_option("--codes", run.codes_path)->required();
    cmd_bounds->add_option("--regimes", regimes, "Comma list: worst,monotone,hosp-monotone,hosp-independent");
    cmd_bounds->add_option("--lambda-l", lambda_l)->check(CLI::Range(0.0, 1.0))
        ->each([&](const std::string&) { have_lambda_l = true; });
    cmd_bounds->add_option("--lambda-u", lambda_u)->check(CLI::Range(0.0, 1.0))
        ->each([&](const std::string&) { have_lambda_u = true; });
    cmd_bounds->add_option("--out", run.out_dir)->required();
    cmd_bounds->add_option("--seed", run.seed);
    cmd_bounds->add_flag("--age-weights", run.age_weights);
    cmd_bounds->add_flag("--json", run.json_mirror);

    std::string npv_tests, npv_out;
    bool npv_json = false;
    CLI::App* cmd_npv = app.add_subcommand("npv", "Test-retest error-rate estimates");
    cmd_npv->add_option("--tests", npv_tests)->required();
    cmd_npv->add_option("--out", npv_out)->required();
    cmd_npv->add_flag("--json", npv_json);

    std::string scenario_path, sim_out;
    CLI::App* cmd_sim = app.add_subcommand("simulate", "Generate synthetic inputs + ground truth");
    cmd_sim->add_option("--scenario", scenario_path)->required();
    cmd_sim->add_option("--out", sim_out)->required();

    prevbound::pipeline::RunConfig val;
    CLI::App* cmd_val = app.add_subcommand("validate", "Prior-test and community-test proxies");
    cmd_val->add_option("--persons", val.persons_path)->required();
    cmd_val->add_option("--tests", val.tests_path)->required();
    cmd_val->add_option("--admissions", val.admissions_path)->required();
    cmd_val->add_option("--codes", val.codes_path)->required();
    cmd_val->add_option("--out", val.out_dir)->required();
    cmd_val->add_option("--seed", val.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cmd_bounds->parsed()) {
            run.regimes = parse_regime_list(regimes);
            if (have_lambda_l || have_lambda_u)
                run.band = prevbound::validate_band(ErrorBand{lambda_l, lambda_u});
            prevbound::pipeline::run_bounds(run);
        } else if (cmd_npv->parsed()) {
            prevbound::pipeline::run_npv(npv_tests, npv_out, npv_json);
        } else if (cmd_sim->parsed()) {
            prevbound::pipeline::run_simulate(scenario_path, sim_out);
        } else if (cmd_val->parsed()) {
            prevbound::pipeline::run_validate(val);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(prevbound::category_of(e.code()));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 4;
    }
    return 0;
}
