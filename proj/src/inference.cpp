#include "prevbound/inference.hpp"

#include <algorithm>
#include <cmath>

namespace prevbound {
namespace inference {

double proportion_se(double p, std::int64_t n) {
    if (n <= 0) throw Error(Errc::zero_denominator, "proportion SE needs n > 0");
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(Errc::invalid_probability, "proportion outside [0,1]");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

bounds::Interval region_ci(bounds::Interval b, double se_lower, double se_upper, double z) {
    double lo = std::max(0.0, b.lower - z * se_lower);
    double hi = std::min(1.0, b.upper + z * se_upper);
    return {lo, hi};
}

namespace {

std::int64_t endpoint_denominator(const bounds::Endpoint& ep, CellCounts pop,
                                  const std::optional<CellCounts>& hosp) {
    const CellCounts& cell = ep.side == bounds::CellSide::hospital ? *hosp : pop;
    return ep.role == bounds::DenomRole::tested ? cell.n_tested : cell.n_pop;
}

}  // namespace

BoundsResult finalize(const AssumptionRegime& regime, const bounds::LadderResult& ladder,
                      CellCounts pop, const std::optional<CellCounts>& hosp, double z) {
    if (ladder.refuted)
        throw Error(Errc::region_refuted,
                    "identification region is empty; data refute the regime's assumptions");
    BoundsResult out;
    out.regime = regime;
    out.lower = ladder.bounds.lower;
    out.upper = ladder.bounds.upper;
    out.se_lower = proportion_se(out.lower, endpoint_denominator(ladder.lower, pop, hosp));
    out.se_upper = proportion_se(out.upper, endpoint_denominator(ladder.upper, pop, hosp));
    bounds::Interval ci = region_ci(ladder.bounds, out.se_lower, out.se_upper, z);
    out.ci_lower = ci.lower;
    out.ci_upper = ci.upper;
    return out;
}

AgeStdResult age_standardize(const StratifiedBounds& strata, const AgeStdOptions& opt) {
    AgeWeights w = validate_weights(strata.weights);

    double retained = 0.0;
    int used = 0, dropped = 0;
    for (int a = 0; a < kNumAgeGroups; ++a) {
        if (strata.by_age[a]) {
            retained += w.share[a];
            ++used;
        } else if (w.share[a] > 0.0) {
            ++dropped;
        }
    }
    if (used == 0 || retained <= 0.0)
        throw Error(Errc::all_strata_empty, "no age stratum has valid bounds");

    double lower = 0.0, upper = 0.0, var_lower = 0.0, var_upper = 0.0;
    for (int a = 0; a < kNumAgeGroups; ++a) {
        if (!strata.by_age[a]) continue;
        const BoundsResult& b = *strata.by_age[a];
        double pi = w.share[a] / retained;
        lower += pi * b.lower;
        upper += pi * b.upper;
        if (opt.weighted_variance_of_mean) {
            var_lower += pi * pi * b.se_lower * b.se_lower;
            var_upper += pi * pi * b.se_upper * b.se_upper;
        } else {
            var_lower += pi * b.se_lower * b.se_lower;
            var_upper += pi * b.se_upper * b.se_upper;
        }
    }

    AgeStdResult out;
    out.strata_used = used;
    out.strata_dropped = dropped;
    out.weight_retained = retained;
    BoundsResult& r = out.result;
    // All strata share one regime; take it from the first survivor.
    for (int a = 0; a < kNumAgeGroups; ++a) {
        if (strata.by_age[a]) {
            r.regime = strata.by_age[a]->regime;
            break;
        }
    }
    r.lower = lower;
    r.upper = upper;
    r.se_lower = std::sqrt(var_lower);
    r.se_upper = std::sqrt(var_upper);
    bounds::Interval ci = region_ci({lower, upper}, r.se_lower, r.se_upper, opt.z);
    r.ci_lower = ci.lower;
    r.ci_upper = ci.upper;
    return out;
}

}  // namespace inference
}  // namespace prevbound
