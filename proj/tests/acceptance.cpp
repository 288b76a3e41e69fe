// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. argv[1] is the CLI binary path (used by the determinism
// and exit-code checks).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "prevbound/bounds.hpp"
#include "prevbound/cohort.hpp"
#include "prevbound/csv.hpp"
#include "prevbound/enumerate.hpp"
#include "prevbound/inference.hpp"
#include "prevbound/pipeline.hpp"
#include "prevbound/retest.hpp"
#include "prevbound/rng.hpp"
#include "prevbound/simulate.hpp"

using namespace prevbound;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path;

struct Check {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
    void require(bool cond, const std::string& why) {
        if (!cond) fail(why);
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------
// Shared scenarios

simulate::ScenarioConfig statewide_scenario() {
    simulate::ScenarioConfig sc;
    sc.population = 100000;
    sc.weeks = 12;
    sc.prevalence.assign(12, 0.02);
    sc.community_test_rate = 0.01;
    sc.rho = 5.0;
    sc.admission_rate = 0.03;
    sc.hospital_infection_corr = 0.0;
    sc.inpatient_test_rate = 0.13;
    sc.icli_admission_fraction = 0.2;
    sc.duplicate_admission_rate = 0.02;
    sc.seed = 20200612;
    return sc;
}

simulate::ScenarioConfig coverage_scenario(std::uint64_t seed) {
    simulate::ScenarioConfig sc;
    sc.population = 100000;
    sc.weeks = 6;
    sc.prevalence.assign(6, 0.02);
    sc.community_test_rate = 0.01;
    sc.rho = 5.0;
    sc.admission_rate = 0.06;
    sc.hospital_infection_corr = 0.0;
    sc.inpatient_test_rate = 0.18;
    sc.icli_admission_fraction = 0.2;
    sc.seed = seed;
    return sc;
}

struct WeeklyCells {
    cohort::AgeCells population;
    cohort::AgeCells icli;
    cohort::AgeCells non_icli;
    cohort::AgeCells clear_cause;
};

std::vector<WeeklyCells> weekly_cells(const ingest::LinkedStore& store,
                                      const codes::AnalysisConfig& cfg,
                                      const std::vector<cohort::CodeFlags>& flags) {
    std::vector<WeeklyCells> out;
    for (int w = 0; w < cfg.num_weeks(); ++w) {
        WeeklyCells cells;
        cells.population = cohort::weekly_population_cells(store, cfg, w);
        cells.icli = cohort::weekly_hospital_cells(store, cfg, flags, w,
                                                   cohort::HospitalCohort::icli());
        cells.non_icli = cohort::weekly_hospital_cells(store, cfg, flags, w,
                                                       cohort::HospitalCohort::non_icli());
        cells.clear_cause = cohort::weekly_hospital_cells(
            store, cfg, flags, w, cohort::HospitalCohort::clear_cause());
        out.push_back(cells);
    }
    return out;
}

// ---------------------------------------------------------------------------
// 1. Oracle equivalence

oracle::SmallInstance random_instance(Rng& rng, bool need_hospital) {
    oracle::SmallInstance inst;
    int n = 1 + static_cast<int>(rng.below(oracle::kMaxEnumerable));
    bool pop_has_test = false, hosp_has_test = false;
    for (int i = 0; i < n; ++i) {
        oracle::SmallPerson p;
        p.tested = rng.bernoulli(0.6);
        p.positive = p.tested && rng.bernoulli(0.4);
        p.hospital = need_hospital && rng.bernoulli(0.45);
        pop_has_test |= p.tested;
        hosp_has_test |= p.hospital && p.tested;
        inst.persons.push_back(p);
    }
    if (!pop_has_test) {
        inst.persons[0].tested = true;
        inst.persons[0].positive = rng.bernoulli(0.5);
    }
    if (need_hospital && !hosp_has_test) {
        inst.persons[0].tested = true;
        inst.persons[0].hospital = true;
    }
    return inst;
}

Check criterion_oracle_equivalence() {
    Check c;
    auto start = std::chrono::steady_clock::now();
    const oracle::RationalBand bands[] = {
        {0, 1, 0, 1}, {0, 1, 1, 200}, {1, 10, 2, 5}};  // (0,0), (0,0.005), (0.1,0.4)
    const RegimeKind regimes[] = {RegimeKind::worst_case, RegimeKind::test_monotone,
                                  RegimeKind::test_monotone_hosp_monotone,
                                  RegimeKind::test_monotone_hosp_independent};
    Rng rng(424242);
    std::int64_t instances = 0, comparisons = 0;
    for (int trial = 0; trial < 1500; ++trial) {
        for (RegimeKind regime : regimes) {
            bool hosp = regime_needs_hospital(regime);
            oracle::SmallInstance inst = random_instance(rng, hosp);
            ++instances;
            CellCounts pop = oracle::population_cell(inst);
            std::optional<CellCounts> hosp_cell;
            if (hosp) hosp_cell = oracle::hospital_cell(inst);
            for (const oracle::RationalBand& band : bands) {
                auto enumerated = oracle::enumerate_bounds(inst, regime, band);
                auto closed = oracle::finite_closed_form(pop, hosp_cell, regime, band);
                if (enumerated.has_value() != closed.has_value()) {
                    c.fail("feasibility mismatch between enumeration and closed form");
                    continue;
                }
                if (!enumerated) continue;
                ++comparisons;
                if (!oracle::rat_equal(enumerated->lower, closed->lower) ||
                    !oracle::rat_equal(enumerated->upper, closed->upper))
                    c.fail("closed form != enumeration on an instance");
                // production double-precision bounds must contain the region
                AssumptionRegime rg{regime, band.to_double()};
                bounds::LadderResult prod = bounds::bound_ladder(pop, hosp_cell, rg);
                if (prod.bounds.lower > oracle::rat_double(enumerated->lower) + 1e-12 ||
                    prod.bounds.upper < oracle::rat_double(enumerated->upper) - 1e-12)
                    c.fail("production bounds do not contain the enumerated region");
            }
        }
    }
    double elapsed = seconds_since(start);
    c.require(instances >= 1000, "fewer than 1000 instances");
    c.require(comparisons >= 1000, "fewer than 1000 exact comparisons");
    c.require(elapsed < 60.0, "oracle run exceeded 60 s");
    char buf[160];
    std::snprintf(buf, sizeof buf, " (%lld instances, %lld comparisons, %.1f s)",
                  static_cast<long long>(instances), static_cast<long long>(comparisons),
                  elapsed);
    c.detail += buf;
    return c;
}

// ---------------------------------------------------------------------------
// 2. Nesting suite

Check criterion_nesting() {
    Check c;
    simulate::ScenarioConfig sc = statewide_scenario();
    simulate::SimOutput out = simulate::generate(sc);
    codes::AnalysisConfig cfg = simulate::analysis_config_for(out, sc);
    ingest::LinkedStore store = simulate::to_store(std::move(out), sc.seed);
    auto flags = cohort::build_code_flags(store.tables.dx_codes, cfg.codes);
    auto cells = weekly_cells(store, cfg, flags);

    std::int64_t checked = 0;
    for (const WeeklyCells& wc : cells) {
        const CellCounts all[] = {wc.population.crude, wc.icli.crude, wc.non_icli.crude,
                                  wc.clear_cause.crude};
        for (const CellCounts& cell : all) {
            if (cell.n_pop == 0 || cell.n_tested == 0) continue;
            bounds::Interval w = bounds::worst_case(cell);
            bounds::Interval m = bounds::test_monotone(cell);
            if (!(m.lower >= w.lower && m.upper <= w.upper))
                c.fail("[L_m,U_m] not nested in [L_w,U_w]");
            ++checked;
        }
        const CellCounts hosps[] = {wc.non_icli.crude, wc.clear_cause.crude};
        for (const CellCounts& hosp : hosps) {
            if (hosp.n_pop == 0 || hosp.n_tested == 0 ||
                wc.population.crude.n_tested == 0)
                continue;
            bounds::Interval m = bounds::test_monotone(wc.population.crude);
            bounds::Interval mh = bounds::hospital_monotone(wc.population.crude, hosp);
            bounds::Interval ind = bounds::hospital_independent(wc.population.crude, hosp);
            if (!(ind.lower >= m.lower)) c.fail("L_ind < L_m");
            if (ind.upper != mh.upper) c.fail("U_ind != U_mh (must be exact)");
            if (!(mh.upper <= m.upper)) c.fail("U_mh > U_m");
            ++checked;
        }
    }
    c.require(checked > 50, "too few cells checked");
    c.detail += " (" + std::to_string(checked) + " cells, zero violations required)";
    return c;
}

// ---------------------------------------------------------------------------
// 3. Coverage under valid assumptions

Check criterion_coverage() {
    Check c;
    auto start = std::chrono::steady_clock::now();
    const int kSeeds = 200;
    const double subsample = 0.20;
    int contained_runs = 0, ci_covered_runs = 0;
    int informative_cis = 0;  // CI strictly inside [0,1]: the check is not vacuous
    for (int s = 0; s < kSeeds; ++s) {
        simulate::ScenarioConfig sc = coverage_scenario(1000 + s);
        simulate::SimOutput out = simulate::generate(sc);
        codes::AnalysisConfig cfg = simulate::analysis_config_for(out, sc);
        std::vector<double> truth = out.truth.population;
        ingest::LinkedStore store = simulate::to_store(std::move(out), sc.seed);
        auto flags = cohort::build_code_flags(store.tables.dx_codes, cfg.codes);

        bool contained = true, ci_covered = true;
        Rng sub_rng(mix(9000, s));
        for (int w = 0; w < cfg.num_weeks(); ++w) {
            cohort::AgeCells pop = cohort::weekly_population_cells(store, cfg, w);
            cohort::AgeCells hosp = cohort::weekly_hospital_cells(
                store, cfg, flags, w, cohort::HospitalCohort::non_icli());
            bounds::Interval ind =
                bounds::hospital_independent(pop.crude, hosp.crude);
            if (!(truth[w] >= ind.lower && truth[w] <= ind.upper)) contained = false;

            // Subsample persons and admissions, then ask whether the region
            // CI from the subsampled cells covers the true prevalence.
            CellCounts sub_pop{0, 0, 0};
            Day from = cfg.week_start(w), to = from + 6;
            for (PersonId p = 0; p < store.num_people(); ++p) {
                if (!sub_rng.bernoulli(subsample)) continue;
                sub_pop.n_pop += 1;
                if (store.tested_in(p, from, to, true)) {
                    sub_pop.n_tested += 1;
                    if (store.positive_in(p, from, to)) sub_pop.n_positive += 1;
                }
            }
            CellCounts sub_hosp{0, 0, 0};
            for (const AdmissionRecord& adm : store.admissions) {
                Day d = adm.admit_date();
                if (d < from || d > to || adm.diagnoses.empty()) continue;
                if (!cohort::HospitalCohort::non_icli().contains(
                        cohort::classify_admission(adm, flags)))
                    continue;
                if (!sub_rng.bernoulli(subsample)) continue;
                sub_hosp.n_pop += 1;
                cohort::TestOutcome o =
                    cohort::in_hospital_test_outcome(adm, store, cfg.inconclusive);
                sub_hosp.n_tested += o != cohort::TestOutcome::not_tested;
                sub_hosp.n_positive += o == cohort::TestOutcome::tested_positive;
            }
            if (sub_pop.n_tested == 0 || sub_hosp.n_tested == 0) {
                ci_covered = false;
                continue;
            }
            AssumptionRegime regime{RegimeKind::test_monotone_hosp_independent, std::nullopt};
            try {
                bounds::LadderResult ladder =
                    bounds::bound_ladder(sub_pop, sub_hosp, regime);
                BoundsResult r = inference::finalize(regime, ladder, sub_pop, sub_hosp);
                if (!(truth[w] >= r.ci_lower && truth[w] <= r.ci_upper)) ci_covered = false;
                if (r.ci_lower > 0.0 && r.ci_upper < 1.0) ++informative_cis;
            } catch (const Error&) {
                ci_covered = false;  // refuted subsample counts against coverage
            }
        }
        contained_runs += contained;
        ci_covered_runs += ci_covered;
    }
    double elapsed = seconds_since(start);
    c.require(contained_runs == kSeeds,
              "population bounds missed the truth in " +
                  std::to_string(kSeeds - contained_runs) + " runs");
    double ci_rate = static_cast<double>(ci_covered_runs) / kSeeds;
    c.require(ci_rate >= 0.94, "subsampled CI coverage " + std::to_string(ci_rate) + " < 0.94");
    c.require(informative_cis > kSeeds, "subsampled CIs were degenerate");
    c.require(elapsed < 600.0, "coverage run exceeded 10 min");
    char buf[160];
    std::snprintf(buf, sizeof buf, " (%d/%d contained, CI coverage %.3f, %.1f s)",
                  contained_runs, kSeeds, ci_rate, elapsed);
    c.detail += buf;
    return c;
}

// ---------------------------------------------------------------------------
// 4. Violation detection

Check criterion_violation_detection() {
    Check c;
    // Worried well: infected people test at half the base propensity.
    {
        simulate::ScenarioConfig sc = coverage_scenario(77001);
        sc.rho = 0.5;
        simulate::SimOutput out = simulate::generate(sc);
        codes::AnalysisConfig cfg = simulate::analysis_config_for(out, sc);
        std::vector<double> truth = out.truth.population;
        ingest::LinkedStore store = simulate::to_store(std::move(out), sc.seed);
        int weeks_detected = 0;
        for (int w = 0; w < cfg.num_weeks(); ++w) {
            cohort::AgeCells pop = cohort::weekly_population_cells(store, cfg, w);
            if (pop.crude.n_tested == 0) continue;
            bounds::Interval m = bounds::test_monotone(pop.crude);
            if (truth[w] > m.upper) ++weeks_detected;
        }
        c.require(weeks_detected >= 1, "worried-well violation not detected (truth <= U_m)");
        c.detail += " (worried-well weeks flagged: " + std::to_string(weeks_detected);
    }
    // Negative hospital selection: infected people are admitted less often.
    {
        simulate::ScenarioConfig sc = coverage_scenario(77002);
        sc.hospital_infection_corr = -0.85;
        simulate::SimOutput out = simulate::generate(sc);
        codes::AnalysisConfig cfg = simulate::analysis_config_for(out, sc);
        std::vector<double> truth = out.truth.population;
        ingest::LinkedStore store = simulate::to_store(std::move(out), sc.seed);
        auto flags = cohort::build_code_flags(store.tables.dx_codes, cfg.codes);
        int weeks_detected = 0;
        for (int w = 0; w < cfg.num_weeks(); ++w) {
            cohort::AgeCells pop = cohort::weekly_population_cells(store, cfg, w);
            cohort::AgeCells hosp = cohort::weekly_hospital_cells(
                store, cfg, flags, w, cohort::HospitalCohort::non_icli());
            if (pop.crude.n_tested == 0 || hosp.crude.n_tested == 0) continue;
            bounds::Interval mh = bounds::hospital_monotone(pop.crude, hosp.crude);
            if (truth[w] > mh.upper) ++weeks_detected;
        }
        c.require(weeks_detected >= 1,
                  "negative hospital selection not detected (truth <= U_mh)");
        c.detail += ", hospital-selection weeks flagged: " + std::to_string(weeks_detected) + ")";
    }
    return c;
}

// ---------------------------------------------------------------------------
// 5. Error-adjustment arithmetic

Check criterion_error_adjustment() {
    Check c;
    // Worst case (100, 20, 5) with lambda_u = 0.4: upper exactly 0.91.
    bounds::Interval base = bounds::worst_case({100, 20, 5});
    bounds::Interval banded =
        bounds::error_adjusted(base, {100, 20, 5}, {0.0, 0.4}, bounds::DenomRole::population);
    c.require(std::abs(banded.upper - 0.91) < 1e-12,
              "worst-case (100,20,5) with lambda_u=0.4 must give upper 0.91");
    c.require(banded.lower == base.lower, "lambda_l=0 must not move the lower bound");

    // The preferred narrow band (0, 0.005) moves no worst-case bound by 0.001 or
    // more anywhere in the statewide-scale run.
    simulate::ScenarioConfig sc = statewide_scenario();
    simulate::SimOutput out = simulate::generate(sc);
    codes::AnalysisConfig cfg = simulate::analysis_config_for(out, sc);
    ingest::LinkedStore store = simulate::to_store(std::move(out), sc.seed);
    auto flags = cohort::build_code_flags(store.tables.dx_codes, cfg.codes);
    auto cells = weekly_cells(store, cfg, flags);
    double max_change = 0.0;
    std::int64_t checked = 0;
    for (const WeeklyCells& wc : cells) {
        const CellCounts all[] = {wc.population.crude, wc.icli.crude, wc.non_icli.crude,
                                  wc.clear_cause.crude};
        for (const CellCounts& cell : all) {
            if (cell.n_pop == 0) continue;
            bounds::Interval plain = bounds::worst_case(cell);
            bounds::Interval shifted = bounds::error_adjusted(
                plain, cell, {0.0, 0.005}, bounds::DenomRole::population);
            max_change = std::max(max_change, std::abs(shifted.lower - plain.lower));
            max_change = std::max(max_change, std::abs(shifted.upper - plain.upper));
            ++checked;
        }
    }
    c.require(checked > 40, "too few cells");
    c.require(max_change < 0.001,
              "band (0,0.005) moved a worst-case bound by " + std::to_string(max_change));
    char buf[96];
    std::snprintf(buf, sizeof buf, " (max change %.2e over %lld cells)", max_change,
                  static_cast<long long>(checked));
    c.detail += buf;
    return c;
}

// ---------------------------------------------------------------------------
// 6. SE / CI arithmetic

Check criterion_se_ci() {
    Check c;
    c.require(std::abs(inference::proportion_se(0.05, 100) -
                       std::sqrt(0.05 * 0.95 / 100.0)) < 1e-12 &&
                  std::abs(inference::proportion_se(0.05, 100) - 0.021794494717703367) < 1e-12,
              "SE(0.05, 100) mismatch");
    c.require(std::abs(inference::proportion_se(0.25, 20) - std::sqrt(0.25 * 0.75 / 20.0)) <
                  1e-12,
              "SE(0.25, 20) mismatch");

    double se_l = inference::proportion_se(0.05, 100);
    double se_u = inference::proportion_se(0.25, 20);
    bounds::Interval ci = inference::region_ci({0.05, 0.25}, se_l, se_u);
    c.require(std::abs(ci.lower - (0.05 - 1.96 * se_l)) < 1e-12, "CI lower mismatch");
    c.require(std::abs(ci.upper - (0.25 + 1.96 * se_u)) < 1e-12, "CI upper mismatch");

    bounds::Interval clamped = inference::region_ci({0.001, 0.999}, 0.01, 0.01);
    c.require(clamped.lower == 0.0 && clamped.upper == 1.0, "CI clamping mismatch");

    Rng rng(31415);
    for (int i = 0; i < 5000; ++i) {
        double lo = rng.uniform() * 0.5;
        double hi = lo + rng.uniform() * 0.5;
        double sl = rng.uniform() * 0.1, su = rng.uniform() * 0.1;
        bounds::Interval r = inference::region_ci({lo, hi}, sl, su);
        double want_lo = std::max(0.0, lo - 1.96 * sl);
        double want_hi = std::min(1.0, hi + 1.96 * su);
        if (r.lower != want_lo || r.upper != want_hi) {
            c.fail("region CI formula mismatch on randomized inputs");
            break;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 7. Retest estimator

Check criterion_retest() {
    Check c;
    // fn = 0.05 injected, one million retest events, random retesting.
    simulate::ScenarioConfig sc;
    sc.population = 0;
    sc.weeks = 20;
    sc.prevalence.assign(20, 0.0);
    sc.false_negative_rate = 0.05;
    sc.retest_events = 1000000;
    sc.retest_prevalence = 0.12;
    sc.seed = 1234;
    simulate::SimOutput out = simulate::generate(sc);
    ingest::LinkedStore store = simulate::to_store(std::move(out), sc.seed);
    auto extracted = retest::extract_retest_events(store);
    c.require(extracted.events.size() == 1000000, "expected exactly 1e6 events");
    retest::RetestSummary summary = retest::summarize(extracted.events);
    retest::FnEstimate est = retest::estimate_fn_bound(summary);
    c.require(std::abs(est.fn_rate - 0.05) <= 0.005,
              "fn estimate " + std::to_string(est.fn_rate) + " not within 0.005 of 0.05");
    const double th = 0.12, fn = 0.05;
    double truth_1mnpv = th * fn / (th * fn * (1 - fn) + th * fn * fn + (1 - th));
    c.require(std::abs(est.one_minus_npv - truth_1mnpv) <= 0.003,
              "1-NPV estimate " + std::to_string(est.one_minus_npv) + " not within 0.003 of " +
                  std::to_string(truth_1mnpv));
    retest::SymmetryResult sym = retest::symmetry_diagnostic(summary);
    c.require(sym.verdict == retest::RetestVerdict::random_retesting_consistent,
              "random retesting flagged as selective");

    // Selective retesting (retest probability doubled after a negative among
    // true positives) must be flagged at the 5% level in >= 95 of 100 seeds.
    int flagged = 0;
    for (int s = 0; s < 100; ++s) {
        simulate::ScenarioConfig sel = sc;
        sel.retest_events = 20000;
        sel.retest_selective_boost = 2.0;
        sel.seed = 5000 + s;
        simulate::SimOutput sout = simulate::generate(sel);
        ingest::LinkedStore sstore = simulate::to_store(std::move(sout), sel.seed);
        auto sev = retest::extract_retest_events(sstore);
        retest::SymmetryResult sres =
            retest::symmetry_diagnostic(retest::summarize(sev.events));
        flagged += sres.verdict == retest::RetestVerdict::non_random_retesting;
    }
    c.require(flagged >= 95,
              "selective retesting flagged in only " + std::to_string(flagged) + "/100 seeds");
    char buf[128];
    std::snprintf(buf, sizeof buf, " (fn %.4f, 1-NPV %.4f vs %.4f, flagged %d/100)",
                  est.fn_rate, est.one_minus_npv, truth_1mnpv, flagged);
    c.detail += buf;
    return c;
}

// ---------------------------------------------------------------------------
// 8. Determinism through the CLI

int run_cli(const std::string& args) {
    std::string cmd = g_cli_path + " " + args + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    return read_file(a.string()) == read_file(b.string());
}

Check criterion_determinism() {
    Check c;
    fs::path dir = fresh_dir("pb_accept_det");
    std::string scenario =
        "[scenario]\n"
        "population = 20000\nweeks = 6\nprevalence = 0.03\n"
        "community_test_rate = 0.02\nrho = 4\nadmission_rate = 0.03\n"
        "inpatient_test_rate = 0.3\nduplicate_admission_rate = 0.1\n"
        "inconclusive_rate = 0.01\ndemographic_coverage = 0.97\nseed = 31\n"
        "[retest]\nevents = 5000\nprevalence = 0.1\n";
    write_file((dir / "scenario.cfg").string(), scenario);

    for (const char* run : {"r1", "r2"}) {
        fs::create_directories(dir / run / "sim");
        fs::create_directories(dir / run / "out");
        int rc = run_cli("simulate --scenario " + (dir / "scenario.cfg").string() + " --out " +
                         (dir / run / "sim").string());
        c.require(rc == 0, "simulate exited " + std::to_string(rc));
        std::string inputs = " --persons " + (dir / run / "sim/persons.csv").string() +
                             " --tests " + (dir / run / "sim/tests.csv").string() +
                             " --admissions " + (dir / run / "sim/admissions.csv").string() +
                             " --codes " + (dir / run / "sim/codes.cfg").string();
        rc = run_cli("bounds" + inputs +
                     " --regimes worst,monotone,hosp-monotone,hosp-independent"
                     " --lambda-l 0 --lambda-u 0.005 --seed 31 --age-weights --json --out " +
                     (dir / run / "out").string());
        c.require(rc == 0, "bounds exited " + std::to_string(rc));
        rc = run_cli("npv --tests " + (dir / run / "sim/tests.csv").string() + " --out " +
                     (dir / run / "out").string());
        c.require(rc == 0, "npv exited " + std::to_string(rc));
        rc = run_cli("validate" + inputs + " --out " + (dir / run / "out").string());
        c.require(rc == 0, "validate exited " + std::to_string(rc));
    }
    for (const char* f : {"sim/persons.csv", "sim/tests.csv", "sim/admissions.csv",
                          "sim/ground_truth.csv", "sim/codes.cfg", "out/bounds.csv",
                          "out/cause_bounds.csv", "out/bounds.json", "out/npv.txt",
                          "out/prior_test_rates.csv", "out/community_county_rates.csv",
                          "out/community_cohort_rates.csv"}) {
        if (!same_bytes(dir / "r1" / f, dir / "r2" / f))
            c.fail(std::string("output differs across identical runs: ") + f);
    }

    // Exit-code contract: missing admissions file is a data error (3) and the
    // diagnostic names the path.
    std::string missing = (dir / "nope" / "admissions.csv").string();
    std::string cmd = g_cli_path + " bounds --persons " +
                      (dir / "r1/sim/persons.csv").string() + " --tests " +
                      (dir / "r1/sim/tests.csv").string() + " --admissions " + missing +
                      " --codes " + (dir / "r1/sim/codes.cfg").string() + " --out " +
                      (dir / "r1/out").string() + " 2>" + (dir / "stderr.txt").string();
    int rc = std::system(cmd.c_str());
    rc = rc < 0 ? rc : WEXITSTATUS(rc);
    c.require(rc == 3, "missing input should exit 3, got " + std::to_string(rc));
    c.require(read_file((dir / "stderr.txt").string()).find(missing) != std::string::npos,
              "diagnostic does not name the missing path");

    // Config errors exit 2.
    rc = run_cli("bounds --persons " + (dir / "r1/sim/persons.csv").string() + " --tests " +
                 (dir / "r1/sim/tests.csv").string() + " --admissions " +
                 (dir / "r1/sim/admissions.csv").string() + " --codes " +
                 (dir / "r1/sim/codes.cfg").string() + " --regimes bogus --out " +
                 (dir / "r1/out").string());
    c.require(rc == 2, "unknown regime should exit 2, got " + std::to_string(rc));
    return c;
}

// ---------------------------------------------------------------------------
// 9. Throughput

Check criterion_throughput() {
    Check c;
    fs::path dir = fresh_dir("pb_accept_throughput");
    simulate::ScenarioConfig sc;
    sc.population = 1000000;
    sc.weeks = 25;
    sc.prevalence.assign(25, 0.02);
    sc.community_test_rate = 0.2;
    sc.rho = 2.0;
    sc.admission_rate = 0.042;
    sc.inpatient_test_rate = 0.3;
    sc.duplicate_admission_rate = 0.01;
    sc.seed = 8;
    {
        simulate::SimOutput out = simulate::generate(sc);
        std::size_t tests = out.tests.size(), adms = out.admissions.size();
        c.require(tests >= 5000000, "scenario produced only " + std::to_string(tests) + " tests");
        c.require(adms >= 1000000,
                  "scenario produced only " + std::to_string(adms) + " admissions");
        simulate::write_files(out, sc, dir.string());
    }

    auto start = std::chrono::steady_clock::now();
    ingest::LoadOptions opt;
    opt.seed = sc.seed;
    ingest::LinkedStore store =
        ingest::load_files((dir / "persons.csv").string(), (dir / "tests.csv").string(),
                           (dir / "admissions.csv").string(), opt);
    codes::AnalysisConfig cfg = codes::load_analysis_config((dir / "codes.cfg").string());
    auto flags = cohort::build_code_flags(store.tables.dx_codes, cfg.codes);
    pipeline::RunConfig run;
    run.regimes = {RegimeKind::worst_case, RegimeKind::test_monotone,
                   RegimeKind::test_monotone_hosp_monotone,
                   RegimeKind::test_monotone_hosp_independent};
    pipeline::BoundsOutput bounds_out = pipeline::compute_bounds(store, cfg, flags, run);
    double elapsed = seconds_since(start);

    c.require(bounds_out.rows.size() > 100, "too few output rows");
    c.require(store.diag.admissions_total >= 1000000,
              "store holds only " + std::to_string(store.diag.admissions_total) +
                  " deduped admissions");
    c.require(elapsed < 120.0,
              "ingest+cohort+bounds took " + std::to_string(elapsed) + " s (>= 120)");
    char buf[160];
    std::snprintf(buf, sizeof buf, " (%.1f s for %llu tests / %llu admissions, %zu rows)",
                  elapsed, static_cast<unsigned long long>(store.diag.tests_total),
                  static_cast<unsigned long long>(store.diag.admissions_total),
                  bounds_out.rows.size());
    c.detail += buf;
    fs::remove_all(dir);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-cli>\n");
        return 2;
    }
    g_cli_path = argv[1];

    struct Criterion {
        const char* name;
        std::function<Check()> fn;
    };
    const Criterion criteria[] = {
        {"oracle equivalence (closed form == enumeration, 4 regimes x 3 bands)",
         criterion_oracle_equivalence},
        {"nesting suite (monotone within worst case, U_ind == U_mh)", criterion_nesting},
        {"coverage under valid assumptions (200 seeds)", criterion_coverage},
        {"violation detection (worried well, negative hospital selection)",
         criterion_violation_detection},
        {"error-adjustment arithmetic (0.91 exact, band (0,0.005) < 0.001)",
         criterion_error_adjustment},
        {"SE/CI arithmetic (1e-12)", criterion_se_ci},
        {"retest estimator (fn recovery, symmetry power)", criterion_retest},
        {"determinism (byte-identical CLI reruns, exit codes)", criterion_determinism},
        {"throughput (5M tests + 1M admissions < 2 min)", criterion_throughput},
    };

    int failures = 0;
    for (const Criterion& cr : criteria) {
        Check result;
        try {
            result = cr.fn();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %s%s\n", result.ok ? "PASS" : "FAIL", cr.name,
                    result.detail.empty() ? "" : (" - " + result.detail).c_str());
        std::fflush(stdout);
        failures += !result.ok;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all acceptance criteria passed\n");
    return failures == 0 ? 0 : 1;
}
