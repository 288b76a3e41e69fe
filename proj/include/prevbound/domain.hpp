#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prevbound/dates.hpp"
#include "prevbound/errors.hpp"

namespace prevbound {

// Core value types shared by every module. All of these are immutable once
// built and safe to share across threads.

using PersonId = std::uint32_t;
using CountyId = std::uint32_t;
using CodeId = std::uint32_t;

constexpr std::uint32_t kNoId = 0xffffffffu;

enum class TestResult : std::uint8_t { negative = 0, inconclusive = 1, positive = 2 };

// Priority used when collapsing same-day repeat tests: positive > negative > inconclusive.
inline int result_priority(TestResult r) {
    switch (r) {
        case TestResult::positive: return 2;
        case TestResult::negative: return 1;
        case TestResult::inconclusive: return 0;
    }
    return 0;
}

std::optional<TestResult> parse_test_result(std::string_view s);  // case-insensitive
const char* test_result_name(TestResult r);

enum class AgeGroup : std::uint8_t {
    a0_17 = 0,
    a18_30 = 1,
    a30_50 = 2,
    a50_64 = 3,
    a65_74 = 4,
    a75_plus = 5,
    unknown = 6,
};

constexpr int kNumAgeGroups = 6;

std::optional<AgeGroup> parse_age_group(std::string_view s);
const char* age_group_name(AgeGroup g);

enum class Sex : std::uint8_t { female, male, other };

std::optional<Sex> parse_sex(std::string_view s);

struct TestRecord {
    PersonId person = kNoId;
    Day date = 0;
    TestResult result = TestResult::negative;
};

struct DiagnosisEntry {
    CodeId code = kNoId;          // interned, normalized (uppercased, dot stripped)
    bool is_admitting = false;
    bool is_primary_final = false;
    std::uint16_t position = 0;   // 0-based priority order within the admission
};

struct AdmissionRecord {
    PersonId person = kNoId;
    Seconds admit_time = 0;
    std::optional<Seconds> discharge_time;
    std::vector<DiagnosisEntry> diagnoses;

    Day admit_date() const { return day_of(admit_time); }
};

struct PersonRecord {
    PersonId person = kNoId;
    AgeGroup age_group = AgeGroup::unknown;
    std::optional<Sex> sex;
    CountyId county = kNoId;  // kNoId when missing
};

// Sufficient statistics for one (week x cohort x age group) cell.
struct CellCounts {
    std::int64_t n_pop = 0;
    std::int64_t n_tested = 0;
    std::int64_t n_positive = 0;
};

// Returns counts unchanged if 0 <= n_positive <= n_tested <= n_pop holds.
CellCounts validate_cell(CellCounts c);

// Bound on the false-omission rate Pr(infected | tested, negative result).
struct ErrorBand {
    double lambda_lower = 0.0;
    double lambda_upper = 0.0;
};

ErrorBand validate_band(ErrorBand b);

enum class RegimeKind : std::uint8_t {
    worst_case,
    test_monotone,
    test_monotone_hosp_monotone,
    test_monotone_hosp_independent,
};

inline bool regime_needs_hospital(RegimeKind k) {
    return k == RegimeKind::test_monotone_hosp_monotone ||
           k == RegimeKind::test_monotone_hosp_independent;
}

const char* regime_name(RegimeKind k);
std::optional<RegimeKind> parse_regime(std::string_view s);

struct AssumptionRegime {
    RegimeKind kind = RegimeKind::worst_case;
    std::optional<ErrorBand> error_band;
};

struct BoundsResult {
    AssumptionRegime regime;
    double lower = 0.0;
    double upper = 1.0;
    double se_lower = 0.0;
    double se_upper = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 1.0;
};

// Population age shares pi(a); must be nonnegative and sum to 1 within 1e-12.
struct AgeWeights {
    std::array<double, kNumAgeGroups> share{};
};

AgeWeights validate_weights(AgeWeights w);

// Interning table mapping opaque string identifiers to dense indices.
// Ids are assigned in first-appearance order; the original strings stay
// available for output and for order-independent hashing.
class IdTable {
public:
    std::uint32_t intern(std::string_view s);
    std::optional<std::uint32_t> find(std::string_view s) const;
    const std::string& name(std::uint32_t id) const { return names_[id]; }
    std::size_t size() const { return names_.size(); }

private:
    struct Slot {
        std::uint64_t hash;
        std::uint32_t id;
    };
    std::vector<Slot> slots_;  // open addressing, power-of-two capacity
    std::vector<std::string> names_;
    std::size_t mask_ = 0;

    void grow();
};

}  // namespace prevbound
