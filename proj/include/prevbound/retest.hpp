#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prevbound/domain.hpp"
#include "prevbound/ingest.hpp"

namespace prevbound {
namespace retest {

// Test-retest selection and the false-negative-rate estimator. An event is a
// person tested on day t and t+1 with no test on day t-1. Under no false
// positives, status constant across the two days, and retesting independent
// of true status, the discordant cells identify the false-negative rate.

struct RetestEvent {
    PersonId person = kNoId;
    Day t = 0;
    bool r1_positive = false;
    bool r2_positive = false;
};

struct ExtractOptions {
    // Events where either day's collapsed result is inconclusive are dropped.
    bool drop_inconclusive = true;
};

struct ExtractResult {
    std::vector<RetestEvent> events;
    std::uint64_t dropped_inconclusive = 0;
};

ExtractResult extract_retest_events(const ingest::LinkedStore& store,
                                    const ExtractOptions& opt = {});

struct RetestSummary {
    std::int64_t n11 = 0;  // positive then positive
    std::int64_t n10 = 0;  // positive then negative
    std::int64_t n01 = 0;  // negative then positive
    std::int64_t n00 = 0;  // negative then negative

    std::int64_t n_events() const { return n11 + n10 + n01 + n00; }
    double p11() const { return frac(n11); }
    double p10() const { return frac(n10); }
    double p01() const { return frac(n01); }
    double p00() const { return frac(n00); }

private:
    double frac(std::int64_t n) const {
        std::int64_t total = n_events();
        return total == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(total);
    }
};

RetestSummary summarize(const std::vector<RetestEvent>& events);

struct FnEstimate {
    double fn_rate = 0.0;            // Pr(negative result | infected)
    double one_minus_npv = 0.0;      // Pr(infected | first test negative)
    double implied_prevalence = 0.0; // prevalence among the retested sample
    bool prevalence_clamped = false;
};

// Method of moments with the discordant cells symmetrized:
//   p10s = (p10 + p01)/2
//   fn   = p10s / (p11 + p10s)
//   prev = (p11 + p10s)^2 / p11
//   1-NPV = prev * fn / (p10s + p00)
// Requires p11 > 0 (DegenerateSummary otherwise).
FnEstimate estimate_fn_bound(const RetestSummary& summary);

enum class RetestVerdict : std::uint8_t {
    random_retesting_consistent,
    non_random_retesting,
};

struct SymmetryResult {
    double p_value = 1.0;
    RetestVerdict verdict = RetestVerdict::random_retesting_consistent;
    std::int64_t n_discordant = 0;
    // Which discordant sequence is more common, when rejected.
    std::string direction;
};

// Two-sided exact binomial test of n10 vs n01 among discordant pairs.
SymmetryResult symmetry_diagnostic(const RetestSummary& summary, double alpha = 0.05);

// Exact binomial tail helper (central two-sided p-value at p = 1/2),
// exposed for tests.
double exact_binomial_two_sided_half(std::int64_t k, std::int64_t n);

}  // namespace retest
}  // namespace prevbound
