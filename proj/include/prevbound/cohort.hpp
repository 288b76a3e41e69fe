#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prevbound/codes.hpp"
#include "prevbound/domain.hpp"
#include "prevbound/ingest.hpp"

namespace prevbound {
namespace cohort {

// Admission classification from ICD-10 code sets, the in-hospital testing
// window, weekly (week x cohort x age group) cells, and the prior-test /
// community-test validation proxies.

struct Classification {
    bool icli = false;
    std::uint16_t cause_mask = 0;  // bit i = Cause i

    bool non_icli() const { return !icli; }
    bool has(codes::Cause c) const { return cause_mask & (1u << static_cast<int>(c)); }
    bool any_clear_cause() const { return cause_mask != 0; }
};

// Per-interned-code match flags, precomputed so bulk classification is a
// table lookup per diagnosis entry.
struct CodeFlags {
    bool icli = false;
    bool chemo = false;
    std::uint16_t cause_mask = 0;
    bool cancer_code = false;
};

std::vector<CodeFlags> build_code_flags(const IdTable& dx_codes,
                                        const codes::CodeSetConfig& cfg);

// Throws EmptyDiagnoses when the admission has no diagnosis entries.
// Cancer counts only via admitting/primary-final position or a chemotherapy
// code; every other cause matches at any priority.
Classification classify_admission(const AdmissionRecord& adm,
                                  const std::vector<CodeFlags>& flags);

// Convenience for tests: classify from raw code strings.
Classification classify_admission(const AdmissionRecord& adm, const codes::CodeSetConfig& cfg,
                                  const IdTable& dx_codes);

enum class TestOutcome : std::uint8_t { not_tested, tested_negative, tested_positive };

// In-hospital testing window: any test dated within [admit-5, admit+1]
// (closed on both ends); positive if any test in the window is positive.
TestOutcome in_hospital_test_outcome(const AdmissionRecord& adm, const ingest::LinkedStore& store,
                                     codes::InconclusivePolicy policy);

constexpr Day kWindowBefore = 5;
constexpr Day kWindowAfter = 1;

struct AgeCells {
    std::array<CellCounts, kNumAgeGroups> by_age{};
    CellCounts crude;  // includes persons/admissions with unknown age
};

// Which hospital sample a cell describes.
struct HospitalCohort {
    enum class Kind : std::uint8_t { icli, non_icli, clear_cause, single_cause } kind;
    codes::Cause cause = codes::Cause::labor_delivery;  // used when kind == single_cause

    static HospitalCohort icli() { return {Kind::icli}; }
    static HospitalCohort non_icli() { return {Kind::non_icli}; }
    static HospitalCohort clear_cause() { return {Kind::clear_cause}; }
    static HospitalCohort single(codes::Cause c) { return {Kind::single_cause, c}; }

    bool contains(const Classification& cls) const;
    std::string name() const;
};

// Population cell for one week: n_tested / n_positive are distinct persons
// with at least one (positive) test that week; denominators come from the
// configured population totals.
AgeCells weekly_population_cells(const ingest::LinkedStore& store,
                                 const codes::AnalysisConfig& cfg, int week);

// Hospital cell for one week: the admission is the unit of analysis.
// Admissions without diagnosis information are excluded.
AgeCells weekly_hospital_cells(const ingest::LinkedStore& store,
                               const codes::AnalysisConfig& cfg,
                               const std::vector<CodeFlags>& flags, int week,
                               const HospitalCohort& cohort);

// Time-pooled cell per clear cause (crude; the cause-level analysis is not
// age-weighted).
std::array<CellCounts, codes::kNumCauses> pooled_cause_cells(
    const ingest::LinkedStore& store, const codes::AnalysisConfig& cfg,
    const std::vector<CodeFlags>& flags);

// Fraction of cohort admissions dated t whose person had at least one test
// in [t-15, t-9], restricted to each person's first admission on or after
// the study start. nullopt when no qualifying admissions exist that day.
std::optional<double> prior_test_rate(const ingest::LinkedStore& store,
                                      const codes::AnalysisConfig& cfg,
                                      const std::vector<CodeFlags>& flags,
                                      const HospitalCohort& cohort, Day t);

struct PriorRatePoint {
    int week = 0;
    std::int64_t n_admissions = 0;
    std::int64_t n_with_prior_test = 0;
};

// Weekly aggregation of the same proxy (each admission uses its own window).
std::vector<PriorRatePoint> prior_test_rate_series(const ingest::LinkedStore& store,
                                                   const codes::AnalysisConfig& cfg,
                                                   const std::vector<CodeFlags>& flags,
                                                   const HospitalCohort& cohort);

// Population reference series: fraction of the configured population tested
// in [t0-15, t0-9] where t0 is the week start.
std::vector<PriorRatePoint> prior_test_rate_population(const ingest::LinkedStore& store,
                                                       const codes::AnalysisConfig& cfg);

// Ever-tested share of one county's configured population, as of study end.
double community_test_rate(const ingest::LinkedStore& store, const codes::AnalysisConfig& cfg,
                           const std::string& county);

struct CommunityRow {
    std::string county;
    std::int64_t population = 0;
    std::int64_t ever_tested = 0;
    double rate = 0.0;
};

struct CommunityComparison {
    std::vector<CommunityRow> counties;
    double population_average = 0.0;  // county-population-weighted
    // Admission-weighted average of the county rate over cohort admissions
    // whose person has a known county.
    std::vector<std::pair<std::string, double>> cohort_averages;
    std::uint64_t admissions_without_county = 0;
};

CommunityComparison community_comparison(const ingest::LinkedStore& store,
                                         const codes::AnalysisConfig& cfg,
                                         const std::vector<CodeFlags>& flags);

}  // namespace cohort
}  // namespace prevbound
