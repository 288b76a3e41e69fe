#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prevbound/codes.hpp"
#include "prevbound/domain.hpp"
#include "prevbound/ingest.hpp"
#include "prevbound/ini.hpp"

namespace prevbound {
namespace simulate {

// Seeded synthetic-population generator with known ground truth. The
// generative knobs map onto the assumption ladder: rho >= 1 makes infected
// people test more (test monotonicity holds), rho < 1 builds a worried-well
// violation; hospital_infection_corr = 0 makes admission independent of
// infection (hospital independence holds), negative values build negative
// hospital selection. Identical seeds produce byte-identical output files.

struct ScenarioConfig {
    std::int64_t population = 10000;
    int weeks = 8;
    std::vector<double> prevalence;  // per week; constant values get expanded

    double community_test_rate = 0.01;
    double rho = 1.0;  // testing propensity: infected rate = 1 - (1-rate)^rho
    double admission_rate = 0.01;
    double hospital_infection_corr = 0.0;  // infected admission rate = rate*(1+corr)
    double inpatient_test_rate = 0.25;
    double icli_admission_fraction = 0.2;  // infection-independent ICLI coding
    double false_negative_rate = 0.0;
    double inconclusive_rate = 0.0;
    double duplicate_admission_rate = 0.0;  // raw duplicate rows, exercises dedup
    double demographic_coverage = 1.0;
    double persistence = 0.0;  // P(carry last week's status forward)

    Day start_date = days_from_civil(2020, 3, 6);  // week 0 anchor
    std::uint64_t seed = 1;

    // Dedicated test-retest block: synthetic people tested on consecutive
    // days, separate from the weekly population.
    std::int64_t retest_events = 0;
    double retest_prevalence = 0.12;
    // Inclusion multiplier for (infected, first test negative) events; 1 =
    // random retesting, >1 = selective retesting after a suspect negative.
    double retest_selective_boost = 1.0;
};

void validate_scenario(const ScenarioConfig& sc);
ScenarioConfig parse_scenario(const IniDoc& doc);

struct CohortTruth {
    std::int64_t admissions = 0;
    std::int64_t infected = 0;

    std::optional<double> prevalence() const {
        if (admissions == 0) return std::nullopt;
        return static_cast<double>(infected) / static_cast<double>(admissions);
    }
};

struct GroundTruth {
    // Realized per-week prevalence: exact means of the infection indicators.
    std::vector<double> population;
    std::vector<CohortTruth> icli;
    std::vector<CohortTruth> non_icli;
    std::vector<CohortTruth> clear_cause;
};

struct SimOutput {
    ingest::StoreTables tables;
    std::vector<PersonRecord> persons;
    std::vector<TestRecord> tests;
    std::vector<AdmissionRecord> admissions;  // raw; may contain duplicates
    GroundTruth truth;
    std::array<std::int64_t, kNumAgeGroups> realized_age_totals{};
    std::vector<std::pair<std::string, std::int64_t>> realized_county_totals;
};

SimOutput generate(const ScenarioConfig& sc);

// Analysis config matching the generated world: default code sets plus the
// realized population totals and the scenario's calendar.
codes::AnalysisConfig analysis_config_for(const SimOutput& out, const ScenarioConfig& sc);

// Dedups the raw admissions and links everything, as the pipeline would.
ingest::LinkedStore to_store(SimOutput out, std::uint64_t seed);

// Writes persons.csv, tests.csv, admissions.csv, ground_truth.csv and
// codes.cfg into dir (which must exist).
void write_files(const SimOutput& out, const ScenarioConfig& sc, const std::string& dir);

// The default code-set sections shipped with the project; scenario configs
// and config/default_codes.cfg share this text.
extern const char* const kDefaultCodeSections;

}  // namespace simulate
}  // namespace prevbound
