#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace prevbound {

enum class Errc {
    // domain
    ordering_violation,
    negative_count,
    invalid_probability,
    bad_age_weights,
    // ingest
    schema_error,
    row_error,
    duplicate_admission_key,
    // cohort
    empty_diagnoses,
    missing_population_totals,
    missing_county_totals,
    // bounds
    empty_population,
    no_tests,
    missing_hospital_cell,
    region_refuted,
    // inference
    zero_denominator,
    all_strata_empty,
    // retest
    degenerate_summary,
    no_discordant_pairs,
    // simulate
    invalid_scenario,
    too_large,
    // plumbing
    config_error,
    io_error,
    internal,
};

// Exit-code categories for the CLI: 2 config, 3 data, 4 internal.
enum class ErrorCategory { config = 2, data = 3, internal = 4 };

inline ErrorCategory category_of(Errc c) {
    switch (c) {
        case Errc::config_error:
        case Errc::invalid_scenario:
        case Errc::bad_age_weights:
        case Errc::invalid_probability:
            return ErrorCategory::config;
        case Errc::internal:
        case Errc::too_large:
            return ErrorCategory::internal;
        default:
            return ErrorCategory::data;
    }
}

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::ordering_violation: return "OrderingViolation";
        case Errc::negative_count: return "NegativeCount";
        case Errc::invalid_probability: return "InvalidProbability";
        case Errc::bad_age_weights: return "BadAgeWeights";
        case Errc::schema_error: return "SchemaError";
        case Errc::row_error: return "RowError";
        case Errc::duplicate_admission_key: return "DuplicateAdmissionKey";
        case Errc::empty_diagnoses: return "EmptyDiagnoses";
        case Errc::missing_population_totals: return "MissingPopulationTotals";
        case Errc::missing_county_totals: return "MissingCountyTotals";
        case Errc::empty_population: return "EmptyPopulation";
        case Errc::no_tests: return "NoTests";
        case Errc::missing_hospital_cell: return "MissingHospitalCell";
        case Errc::region_refuted: return "RegionRefuted";
        case Errc::zero_denominator: return "ZeroDenominator";
        case Errc::all_strata_empty: return "AllStrataEmpty";
        case Errc::degenerate_summary: return "DegenerateSummary";
        case Errc::no_discordant_pairs: return "NoDiscordantPairs";
        case Errc::invalid_scenario: return "InvalidScenario";
        case Errc::too_large: return "TooLarge";
        case Errc::config_error: return "ConfigError";
        case Errc::io_error: return "IoError";
        case Errc::internal: return "InternalError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Error(Errc code, std::string message, std::uint64_t line)
        : std::runtime_error(std::string(errc_name(code)) + " at line " + std::to_string(line) +
                             ": " + message),
          code_(code),
          line_(line) {}

    Errc code() const { return code_; }
    std::uint64_t line() const { return line_; }  // 0 when not applicable

private:
    Errc code_;
    std::uint64_t line_ = 0;
};

}  // namespace prevbound
