#include "prevbound/bounds.hpp"

#include <algorithm>

namespace prevbound {
namespace bounds {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Each unadjusted bound is a single division of exact integer numerators, so
// scaling every count by the same factor leaves the result bit-identical.
double ratio(std::int64_t num, std::int64_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
}

CellCounts checked(CellCounts c) { return validate_cell(c); }

}  // namespace

Interval worst_case(CellCounts pop) {
    pop = checked(pop);
    if (pop.n_pop == 0) throw Error(Errc::empty_population, "worst-case bounds need n_pop > 0");
    double lower = ratio(pop.n_positive, pop.n_pop);
    double upper = ratio(pop.n_positive + (pop.n_pop - pop.n_tested), pop.n_pop);
    return {lower, upper};
}

Interval test_monotone(CellCounts pop) {
    pop = checked(pop);
    if (pop.n_tested == 0)
        throw Error(Errc::no_tests, "test-monotone upper bound needs n_tested > 0");
    double lower = ratio(pop.n_positive, pop.n_pop);
    double upper = ratio(pop.n_positive, pop.n_tested);
    return {lower, upper};
}

Interval hospital_monotone(CellCounts pop, CellCounts hosp) {
    Interval p = test_monotone(pop);
    Interval h = test_monotone(hosp);
    // The symmetric implication for the hospital lower bound is not applied;
    // only the upper bound tightens.
    return {p.lower, std::min(p.upper, h.upper)};
}

Interval hospital_independent(CellCounts pop, CellCounts hosp) {
    Interval p = test_monotone(pop);
    Interval h = test_monotone(hosp);
    return {std::max(p.lower, h.lower), std::min(p.upper, h.upper)};
}

Interval error_adjusted(Interval base, CellCounts cell, ErrorBand band, DenomRole upper_role) {
    cell = checked(cell);
    band = validate_band(band);
    std::int64_t negatives = cell.n_tested - cell.n_positive;
    // Divide first so that scaled counts produce identical corrections.
    double neg_over_pop = cell.n_pop > 0 ? ratio(negatives, cell.n_pop) : 0.0;
    double neg_over_tested = cell.n_tested > 0 ? ratio(negatives, cell.n_tested) : 0.0;
    double lower = base.lower + band.lambda_lower * neg_over_pop;
    double upper_shift =
        upper_role == DenomRole::tested ? neg_over_tested : neg_over_pop;
    double upper = base.upper + band.lambda_upper * upper_shift;
    return {clamp01(lower), clamp01(upper)};
}

namespace {

// Test-monotone interval for one cell, error-adjusted with that cell's own
// denominators when a band is present.
Interval cell_monotone(CellCounts cell, const std::optional<ErrorBand>& band) {
    Interval iv = test_monotone(cell);
    if (band) iv = error_adjusted(iv, cell, *band, DenomRole::tested);
    return iv;
}

}  // namespace

LadderResult bound_ladder(CellCounts pop, const std::optional<CellCounts>& hosp,
                          const AssumptionRegime& regime) {
    if (regime_needs_hospital(regime.kind) && !hosp)
        throw Error(Errc::missing_hospital_cell,
                    std::string(regime_name(regime.kind)) + " requires a hospital cell");

    LadderResult r;
    switch (regime.kind) {
        case RegimeKind::worst_case: {
            Interval iv = worst_case(pop);
            if (regime.error_band)
                iv = error_adjusted(iv, pop, *regime.error_band, DenomRole::population);
            r.bounds = iv;
            r.lower = {iv.lower, CellSide::population, DenomRole::population};
            r.upper = {iv.upper, CellSide::population, DenomRole::population};
            break;
        }
        case RegimeKind::test_monotone: {
            Interval iv = cell_monotone(pop, regime.error_band);
            r.bounds = iv;
            r.lower = {iv.lower, CellSide::population, DenomRole::population};
            r.upper = {iv.upper, CellSide::population, DenomRole::tested};
            break;
        }
        case RegimeKind::test_monotone_hosp_monotone:
        case RegimeKind::test_monotone_hosp_independent: {
            Interval p = cell_monotone(pop, regime.error_band);
            Interval h = cell_monotone(*hosp, regime.error_band);
            bool independent = regime.kind == RegimeKind::test_monotone_hosp_independent;
            double lower;
            if (independent && h.lower > p.lower) {
                lower = h.lower;
                r.lower = {lower, CellSide::hospital, DenomRole::population};
            } else {
                lower = p.lower;
                r.lower = {lower, CellSide::population, DenomRole::population};
            }
            double upper;
            if (h.upper < p.upper) {
                upper = h.upper;
                r.upper = {upper, CellSide::hospital, DenomRole::tested};
            } else {
                upper = p.upper;
                r.upper = {upper, CellSide::population, DenomRole::tested};
            }
            r.bounds = {lower, upper};
            break;
        }
    }
    r.refuted = r.bounds.lower > r.bounds.upper;
    return r;
}

}  // namespace bounds
}  // namespace prevbound
