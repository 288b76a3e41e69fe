#pragma once

#include <optional>
#include <vector>

#include "prevbound/bounds.hpp"
#include "prevbound/domain.hpp"

namespace prevbound {
namespace inference {

constexpr double kDefaultZ = 1.96;

// Standard error of a sample proportion, sqrt(p(1-p)/n).
double proportion_se(double p, std::int64_t n);

// Confidence interval on the identification region:
// [lower - z*se_lower, upper + z*se_upper], clamped to [0,1].
bounds::Interval region_ci(bounds::Interval b, double se_lower, double se_upper,
                           double z = kDefaultZ);

// Attaches SEs and the region CI to a ladder result. Each endpoint's SE uses
// the denominator of the cell that produced it (binding side for composed
// regimes). Refuses refuted (empty) regions.
BoundsResult finalize(const AssumptionRegime& regime, const bounds::LadderResult& ladder,
                      CellCounts pop, const std::optional<CellCounts>& hosp,
                      double z = kDefaultZ);

struct StratifiedBounds {
    // One slot per age group; nullopt marks strata with no valid bounds
    // (zero denominator). Weights are population shares pi(a).
    std::array<std::optional<BoundsResult>, kNumAgeGroups> by_age;
    AgeWeights weights;
};

struct AgeStdOptions {
    // The printed age-standardized SE is sqrt(sum sigma_a^2 * pi(a)); the
    // alternative treats strata as independent: sqrt(sum pi(a)^2 sigma_a^2).
    bool weighted_variance_of_mean = false;
    double z = kDefaultZ;
};

struct AgeStdResult {
    BoundsResult result;
    int strata_used = 0;
    int strata_dropped = 0;
    double weight_retained = 1.0;  // share of pi mass on surviving strata
};

// Weighted average of stratum bounds; empty strata are dropped and the
// weights renormalized over survivors.
AgeStdResult age_standardize(const StratifiedBounds& strata, const AgeStdOptions& opt = {});

}  // namespace inference
}  // namespace prevbound
