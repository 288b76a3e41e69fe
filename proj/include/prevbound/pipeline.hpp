#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prevbound/cohort.hpp"
#include "prevbound/codes.hpp"
#include "prevbound/inference.hpp"
#include "prevbound/ingest.hpp"

namespace prevbound {
namespace pipeline {

// Batch drivers behind the CLI subcommands. Output rows are fully sorted and
// floats formatted through one helper, so identical inputs + seed give
// byte-identical files.

struct RunConfig {
    std::string persons_path;
    std::string tests_path;
    std::string admissions_path;
    std::string codes_path;
    std::string out_dir;
    std::vector<RegimeKind> regimes;
    std::optional<ErrorBand> band;
    std::uint64_t seed = 0;
    bool age_weights = false;
    bool json_mirror = false;
};

struct BoundsRow {
    int week = 0;
    std::string cohort;
    AssumptionRegime regime;
    BoundsResult result;
    CellCounts cell;  // the cohort cell the row reports (crude counts)
};

struct CauseRow {
    std::string cause;
    AssumptionRegime regime;
    BoundsResult result;
    CellCounts cell;
};

struct RunSummary {
    std::uint64_t rows = 0;
    std::uint64_t skipped_empty_cell = 0;
    std::uint64_t skipped_no_tests = 0;
    std::uint64_t skipped_refuted = 0;
    std::uint64_t skipped_no_strata = 0;
};

struct BoundsOutput {
    std::vector<BoundsRow> rows;
    std::vector<CauseRow> cause_rows;
    RunSummary summary;
};

// Computes every (week x cohort x regime) row. Within-cohort bounds for
// worst/monotone over {population, icli, non_icli, clear_cause}; composed
// population bounds for the hospital regimes with {non_icli, clear_cause} as
// the instrument cohort (the row's cohort column names the instrument).
BoundsOutput compute_bounds(const ingest::LinkedStore& store, const codes::AnalysisConfig& cfg,
                            const std::vector<cohort::CodeFlags>& flags, const RunConfig& run);

std::string format_double(double v);

std::string bounds_csv(const BoundsOutput& out, const codes::AnalysisConfig& cfg);
std::string cause_csv(const BoundsOutput& out);
std::string bounds_json(const BoundsOutput& out, const codes::AnalysisConfig& cfg);

// Full subcommand drivers; they load inputs, write outputs into out_dir and
// print a short run summary to stderr.
void run_bounds(const RunConfig& run);
void run_npv(const std::string& tests_path, const std::string& out_dir, bool json_mirror);
void run_simulate(const std::string& scenario_path, const std::string& out_dir);
void run_validate(const RunConfig& run);

}  // namespace pipeline
}  // namespace prevbound
