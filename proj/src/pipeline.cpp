#include "prevbound/pipeline.hpp"

#include <cstdio>

#include <json.hpp>

#include "prevbound/csv.hpp"
#include "prevbound/retest.hpp"
#include "prevbound/simulate.hpp"

namespace prevbound {
namespace pipeline {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

struct CohortCells {
    std::string name;
    cohort::AgeCells cells;
    bool is_hospital = false;
};

// One regime evaluation against prepared cells: crude or age-standardized.
std::optional<BoundsResult> evaluate(const codes::AnalysisConfig& cfg, const RunConfig& run,
                                     const AssumptionRegime& regime, const cohort::AgeCells& pop,
                                     const cohort::AgeCells* hosp, RunSummary& summary) {
    auto one = [&](CellCounts pop_cell,
                   std::optional<CellCounts> hosp_cell) -> std::optional<BoundsResult> {
        bounds::LadderResult ladder = bounds::bound_ladder(pop_cell, hosp_cell, regime);
        if (ladder.refuted) {
            ++summary.skipped_refuted;
            return std::nullopt;
        }
        return inference::finalize(regime, ladder, pop_cell, hosp_cell, cfg.z_critical);
    };

    if (!run.age_weights) {
        std::optional<CellCounts> hosp_cell;
        if (hosp) hosp_cell = hosp->crude;
        try {
            return one(pop.crude, hosp_cell);
        } catch (const Error& e) {
            if (e.code() == Errc::no_tests) {
                ++summary.skipped_no_tests;
                return std::nullopt;
            }
            if (e.code() == Errc::empty_population) {
                ++summary.skipped_empty_cell;
                return std::nullopt;
            }
            throw;
        }
    }

    inference::StratifiedBounds strata;
    strata.weights = cfg.age_weights();
    bool any_refuted = false;
    for (int a = 0; a < kNumAgeGroups; ++a) {
        CellCounts pop_cell = pop.by_age[a];
        std::optional<CellCounts> hosp_cell;
        if (hosp) hosp_cell = hosp->by_age[a];
        try {
            auto r = one(pop_cell, hosp_cell);
            if (!r) {
                any_refuted = true;
                break;
            }
            strata.by_age[a] = *r;
        } catch (const Error& e) {
            // Strata without the required denominators drop out and the
            // weights renormalize; anything else is a real failure.
            if (e.code() != Errc::no_tests && e.code() != Errc::empty_population) throw;
        }
    }
    if (any_refuted) return std::nullopt;  // already counted
    try {
        inference::AgeStdOptions opt;
        opt.z = cfg.z_critical;
        return inference::age_standardize(strata, opt).result;
    } catch (const Error& e) {
        if (e.code() == Errc::all_strata_empty) {
            ++summary.skipped_no_strata;
            return std::nullopt;
        }
        throw;
    }
}

}  // namespace

BoundsOutput compute_bounds(const ingest::LinkedStore& store, const codes::AnalysisConfig& cfg,
                            const std::vector<cohort::CodeFlags>& flags, const RunConfig& run) {
    BoundsOutput out;
    const int weeks = cfg.num_weeks();

    for (int w = 0; w < weeks; ++w) {
        cohort::AgeCells pop = cohort::weekly_population_cells(store, cfg, w);
        std::vector<CohortCells> cohorts;
        cohorts.push_back({"population", pop, false});
        cohorts.push_back(
            {"icli", cohort::weekly_hospital_cells(store, cfg, flags, w,
                                                   cohort::HospitalCohort::icli()),
             true});
        cohorts.push_back(
            {"non_icli", cohort::weekly_hospital_cells(store, cfg, flags, w,
                                                       cohort::HospitalCohort::non_icli()),
             true});
        cohorts.push_back(
            {"clear_cause", cohort::weekly_hospital_cells(store, cfg, flags, w,
                                                          cohort::HospitalCohort::clear_cause()),
             true});

        for (RegimeKind kind : run.regimes) {
            AssumptionRegime regime{kind, run.band};
            if (!regime_needs_hospital(kind)) {
                // Within-cohort bounds for every sample.
                for (const CohortCells& c : cohorts) {
                    if (c.is_hospital && c.cells.crude.n_pop == 0) {
                        ++out.summary.skipped_empty_cell;
                        continue;
                    }
                    auto r = evaluate(cfg, run, regime, c.cells, nullptr, out.summary);
                    if (!r) continue;
                    out.rows.push_back({w, c.name, regime, *r, c.cells.crude});
                    ++out.summary.rows;
                }
            } else {
                // Population bounds through a hospital instrument cohort.
                for (const CohortCells& c : cohorts) {
                    if (!c.is_hospital || c.name == "icli") continue;
                    if (c.cells.crude.n_pop == 0) {
                        ++out.summary.skipped_empty_cell;
                        continue;
                    }
                    auto r = evaluate(cfg, run, regime, pop, &c.cells, out.summary);
                    if (!r) continue;
                    out.rows.push_back({w, c.name, regime, *r, c.cells.crude});
                    ++out.summary.rows;
                }
            }
        }
    }

    // Time-pooled per-cause bounds (within-cohort regimes only, unweighted).
    auto cause_cells = cohort::pooled_cause_cells(store, cfg, flags);
    for (int c = 0; c < codes::kNumCauses; ++c) {
        CellCounts cell = cause_cells[c];
        if (cell.n_pop == 0) continue;
        for (RegimeKind kind : run.regimes) {
            if (regime_needs_hospital(kind)) continue;
            AssumptionRegime regime{kind, run.band};
            try {
                bounds::LadderResult ladder = bounds::bound_ladder(cell, std::nullopt, regime);
                BoundsResult r =
                    inference::finalize(regime, ladder, cell, std::nullopt, cfg.z_critical);
                out.cause_rows.push_back(
                    {codes::cause_name(static_cast<codes::Cause>(c)), regime, r, cell});
            } catch (const Error& e) {
                if (e.code() == Errc::no_tests) {
                    ++out.summary.skipped_no_tests;
                    continue;
                }
                throw;
            }
        }
    }
    return out;
}

namespace {

void append_result_columns(std::string& s, const BoundsResult& r, CellCounts cell) {
    s += format_double(r.lower) + ',' + format_double(r.upper) + ',' +
         format_double(r.se_lower) + ',' + format_double(r.se_upper) + ',' +
         format_double(r.ci_lower) + ',' + format_double(r.ci_upper) + ',';
    s += std::to_string(cell.n_pop) + ',' + std::to_string(cell.n_tested) + ',' +
         std::to_string(cell.n_positive) + '\n';
}

}  // namespace

std::string bounds_csv(const BoundsOutput& out, const codes::AnalysisConfig& cfg) {
    std::string s =
        "week_id,cohort,regime,lower,upper,se_lower,se_upper,ci_lower,ci_upper,n_pop,n_tested,"
        "n_positive\n";
    for (const BoundsRow& row : out.rows) {
        s += format_date(cfg.week_start(row.week));
        s += ',';
        s += row.cohort;
        s += ',';
        s += regime_name(row.regime.kind);
        s += ',';
        append_result_columns(s, row.result, row.cell);
    }
    return s;
}

std::string cause_csv(const BoundsOutput& out) {
    std::string s =
        "cause,regime,lower,upper,se_lower,se_upper,ci_lower,ci_upper,n_pop,n_tested,"
        "n_positive\n";
    for (const CauseRow& row : out.cause_rows) {
        s += row.cause;
        s += ',';
        s += regime_name(row.regime.kind);
        s += ',';
        append_result_columns(s, row.result, row.cell);
    }
    return s;
}

namespace {

nlohmann::json result_json(const BoundsResult& r, CellCounts cell) {
    return {{"lower", r.lower},         {"upper", r.upper},
            {"se_lower", r.se_lower},   {"se_upper", r.se_upper},
            {"ci_lower", r.ci_lower},   {"ci_upper", r.ci_upper},
            {"n_pop", cell.n_pop},      {"n_tested", cell.n_tested},
            {"n_positive", cell.n_positive}};
}

}  // namespace

std::string bounds_json(const BoundsOutput& out, const codes::AnalysisConfig& cfg) {
    nlohmann::json rows = nlohmann::json::array();
    for (const BoundsRow& row : out.rows) {
        nlohmann::json j = result_json(row.result, row.cell);
        j["week_id"] = format_date(cfg.week_start(row.week));
        j["cohort"] = row.cohort;
        j["regime"] = regime_name(row.regime.kind);
        rows.push_back(std::move(j));
    }
    nlohmann::json causes = nlohmann::json::array();
    for (const CauseRow& row : out.cause_rows) {
        nlohmann::json j = result_json(row.result, row.cell);
        j["cause"] = row.cause;
        j["regime"] = regime_name(row.regime.kind);
        causes.push_back(std::move(j));
    }
    nlohmann::json doc{{"weekly", std::move(rows)}, {"by_cause", std::move(causes)}};
    return doc.dump(2) + "\n";
}

namespace {

std::string run_info(const RunConfig& run) {
    std::string s;
    s += "persons = " + run.persons_path + "\n";
    s += "tests = " + run.tests_path + "\n";
    s += "admissions = " + run.admissions_path + "\n";
    s += "codes = " + run.codes_path + "\n";
    s += "regimes =";
    for (RegimeKind k : run.regimes) s += std::string(" ") + regime_name(k);
    s += "\n";
    if (run.band) {
        s += "lambda_l = " + format_double(run.band->lambda_lower) + "\n";
        s += "lambda_u = " + format_double(run.band->lambda_upper) + "\n";
    }
    s += "seed = " + std::to_string(run.seed) + "\n";
    s += std::string("age_weights = ") + (run.age_weights ? "on" : "off") + "\n";
    return s;
}

void print_summary(const RunSummary& s) {
    std::fprintf(stderr,
                 "rows=%llu skipped: empty_cell=%llu no_tests=%llu refuted=%llu "
                 "no_strata=%llu\n",
                 static_cast<unsigned long long>(s.rows),
                 static_cast<unsigned long long>(s.skipped_empty_cell),
                 static_cast<unsigned long long>(s.skipped_no_tests),
                 static_cast<unsigned long long>(s.skipped_refuted),
                 static_cast<unsigned long long>(s.skipped_no_strata));
}

ingest::LinkedStore load_store(const RunConfig& run) {
    ingest::LoadOptions opt;
    opt.seed = run.seed;
    return ingest::load_files(run.persons_path, run.tests_path, run.admissions_path, opt);
}

}  // namespace

void run_bounds(const RunConfig& run) {
    if (run.regimes.empty()) throw Error(Errc::config_error, "no regimes requested");
    codes::AnalysisConfig cfg = codes::load_analysis_config(run.codes_path);
    ingest::LinkedStore store = load_store(run);
    auto flags = cohort::build_code_flags(store.tables.dx_codes, cfg.codes);
    BoundsOutput out = compute_bounds(store, cfg, flags, run);
    write_file(run.out_dir + "/bounds.csv", bounds_csv(out, cfg));
    write_file(run.out_dir + "/cause_bounds.csv", cause_csv(out));
    write_file(run.out_dir + "/run_info.txt", run_info(run));
    if (run.json_mirror) write_file(run.out_dir + "/bounds.json", bounds_json(out, cfg));
    print_summary(out.summary);
}

void run_npv(const std::string& tests_path, const std::string& out_dir, bool json_mirror) {
    ingest::StoreTables tables;
    std::string buf = read_file(tests_path);
    auto parsed = ingest::parse_tests(buf, tables);
    if (!parsed.rejects.empty()) {
        const RowIssue& first = parsed.rejects.front();
        throw Error(Errc::row_error,
                    tests_path + ": " + std::to_string(parsed.rejects.size()) +
                        " bad row(s), first: " + first.message,
                    first.line);
    }
    ingest::LinkedStore store =
        ingest::build_store({}, std::move(parsed.records), {}, std::move(tables));

    auto extracted = retest::extract_retest_events(store);
    retest::RetestSummary summary = retest::summarize(extracted.events);

    std::string s;
    s += "n_events = " + std::to_string(summary.n_events()) + "\n";
    s += "dropped_inconclusive = " + std::to_string(extracted.dropped_inconclusive) + "\n";
    s += "n11 = " + std::to_string(summary.n11) + "\n";
    s += "n10 = " + std::to_string(summary.n10) + "\n";
    s += "n01 = " + std::to_string(summary.n01) + "\n";
    s += "n00 = " + std::to_string(summary.n00) + "\n";
    s += "p11 = " + format_double(summary.p11()) + "\n";
    s += "p10 = " + format_double(summary.p10()) + "\n";
    s += "p01 = " + format_double(summary.p01()) + "\n";
    s += "p00 = " + format_double(summary.p00()) + "\n";
    nlohmann::json j{{"n_events", summary.n_events()},
                     {"dropped_inconclusive", extracted.dropped_inconclusive},
                     {"n11", summary.n11},
                     {"n10", summary.n10},
                     {"n01", summary.n01},
                     {"n00", summary.n00}};
    try {
        retest::FnEstimate fn = retest::estimate_fn_bound(summary);
        s += "fn_rate = " + format_double(fn.fn_rate) + "\n";
        s += "one_minus_npv = " + format_double(fn.one_minus_npv) + "\n";
        s += "implied_prevalence = " + format_double(fn.implied_prevalence) + "\n";
        j["fn_rate"] = fn.fn_rate;
        j["one_minus_npv"] = fn.one_minus_npv;
        j["implied_prevalence"] = fn.implied_prevalence;
    } catch (const Error& e) {
        if (e.code() != Errc::degenerate_summary) throw;
        s += std::string("fn_rate = na (") + e.what() + ")\n";
        j["fn_rate"] = nullptr;
    }
    try {
        retest::SymmetryResult sym = retest::symmetry_diagnostic(summary);
        s += "symmetry_p_value = " + format_double(sym.p_value) + "\n";
        s += std::string("symmetry_verdict = ") +
             (sym.verdict == retest::RetestVerdict::non_random_retesting
                  ? "non_random_retesting"
                  : "random_retesting_consistent") +
             "\n";
        s += "n_discordant = " + std::to_string(sym.n_discordant) + "\n";
        if (!sym.direction.empty()) s += "direction = " + sym.direction + "\n";
        j["symmetry_p_value"] = sym.p_value;
        j["n_discordant"] = sym.n_discordant;
        j["non_random_retesting"] =
            sym.verdict == retest::RetestVerdict::non_random_retesting;
    } catch (const Error& e) {
        if (e.code() != Errc::no_discordant_pairs) throw;
        s += std::string("symmetry_p_value = na (") + e.what() + ")\n";
        j["symmetry_p_value"] = nullptr;
    }
    write_file(out_dir + "/npv.txt", s);
    if (json_mirror) write_file(out_dir + "/npv.json", j.dump(2) + "\n");
}

void run_simulate(const std::string& scenario_path, const std::string& out_dir) {
    simulate::ScenarioConfig sc = simulate::parse_scenario(IniDoc::load(scenario_path));
    simulate::SimOutput out = simulate::generate(sc);
    simulate::write_files(out, sc, out_dir);
    std::fprintf(stderr, "simulated %lld people over %d weeks: %zu tests, %zu admissions\n",
                 static_cast<long long>(sc.population), sc.weeks, out.tests.size(),
                 out.admissions.size());
}

void run_validate(const RunConfig& run) {
    codes::AnalysisConfig cfg = codes::load_analysis_config(run.codes_path);
    ingest::LinkedStore store = load_store(run);
    auto flags = cohort::build_code_flags(store.tables.dx_codes, cfg.codes);

    std::string prior = "week_id,cohort,n,n_prior_tested,rate\n";
    auto emit_series = [&](const std::string& name,
                           const std::vector<cohort::PriorRatePoint>& series) {
        for (const cohort::PriorRatePoint& p : series) {
            if (p.n_admissions == 0) continue;
            prior += format_date(cfg.week_start(p.week)) + ',' + name + ',' +
                     std::to_string(p.n_admissions) + ',' + std::to_string(p.n_with_prior_test) +
                     ',' +
                     format_double(static_cast<double>(p.n_with_prior_test) /
                                   static_cast<double>(p.n_admissions)) +
                     '\n';
        }
    };
    emit_series("population", cohort::prior_test_rate_population(store, cfg));
    emit_series("icli", cohort::prior_test_rate_series(store, cfg, flags,
                                                       cohort::HospitalCohort::icli()));
    emit_series("non_icli", cohort::prior_test_rate_series(store, cfg, flags,
                                                           cohort::HospitalCohort::non_icli()));
    emit_series("clear_cause",
                cohort::prior_test_rate_series(store, cfg, flags,
                                               cohort::HospitalCohort::clear_cause()));
    write_file(run.out_dir + "/prior_test_rates.csv", prior);

    cohort::CommunityComparison cc = cohort::community_comparison(store, cfg, flags);
    std::string county = "county,population,ever_tested,rate\n";
    for (const cohort::CommunityRow& row : cc.counties)
        county += row.county + ',' + std::to_string(row.population) + ',' +
                  std::to_string(row.ever_tested) + ',' + format_double(row.rate) + '\n';
    write_file(run.out_dir + "/community_county_rates.csv", county);

    std::string coh = "cohort,avg_county_test_rate\n";
    coh += "population," + format_double(cc.population_average) + '\n';
    for (const auto& [name, rate] : cc.cohort_averages)
        coh += name + ',' + format_double(rate) + '\n';
    write_file(run.out_dir + "/community_cohort_rates.csv", coh);
    std::fprintf(stderr, "validation proxies written (%zu counties, %llu admissions lacked a county)\n",
                 cc.counties.size(),
                 static_cast<unsigned long long>(cc.admissions_without_county));
}

}  // namespace pipeline
}  // namespace prevbound
