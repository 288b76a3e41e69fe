#include "prevbound/enumerate.hpp"

#include <algorithm>

namespace prevbound {
namespace oracle {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

struct Window {
    std::int64_t lo;
    std::int64_t hi;
    bool empty() const { return lo > hi; }
};

// Feasible count of true infections among `negatives` tested-negative people.
Window fn_window(std::int64_t negatives, const RationalBand& band) {
    std::int64_t lo = ceil_div(band.lower_num * negatives, band.lower_den);
    std::int64_t hi = (band.upper_num * negatives) / band.upper_den;
    return {lo, hi};
}

struct CohortExtremes {
    Rational lower;
    Rational upper;
};

// Extremal attainable prevalence within one cohort by literal enumeration of
// all 2^free assignments. `monotone` adds the within-cohort test
// monotonicity constraint (untested mean <= tested mean).
std::optional<CohortExtremes> enumerate_cohort(const std::vector<const SmallPerson*>& members,
                                               bool monotone, const RationalBand& band) {
    std::int64_t n = static_cast<std::int64_t>(members.size());
    std::int64_t pinned_positive = 0;
    std::vector<bool> free_is_negative;  // per free bit: tested-negative vs untested
    for (const SmallPerson* p : members) {
        if (p->tested && p->positive) {
            ++pinned_positive;
        } else {
            free_is_negative.push_back(p->tested);
        }
    }
    std::int64_t tested = 0, negatives = 0;
    for (const SmallPerson* p : members) tested += p->tested;
    negatives = tested - pinned_positive;
    std::int64_t untested = n - tested;
    Window window = fn_window(negatives, band);

    bool any = false;
    std::int64_t best_min = 0, best_max = 0;
    std::size_t bits = free_is_negative.size();
    for (std::uint64_t mask = 0; mask < (1ull << bits); ++mask) {
        std::int64_t fn = 0, x = 0;
        for (std::size_t b = 0; b < bits; ++b) {
            if (mask & (1ull << b)) {
                if (free_is_negative[b]) ++fn;
                else ++x;
            }
        }
        if (fn < window.lo || fn > window.hi) continue;
        if (monotone) {
            // untested mean <= tested mean: x/untested <= (pinned+fn)/tested
            if (x * tested > (pinned_positive + fn) * untested) continue;
        }
        std::int64_t total = pinned_positive + fn + x;
        if (!any || total < best_min) best_min = total;
        if (!any || total > best_max) best_max = total;
        any = true;
    }
    if (!any) return std::nullopt;
    return CohortExtremes{{best_min, n}, {best_max, n}};
}

std::optional<CohortExtremes> finite_cohort(CellCounts cell, bool monotone,
                                            const RationalBand& band) {
    validate_cell(cell);
    std::int64_t n = cell.n_pop;
    std::int64_t tested = cell.n_tested;
    std::int64_t positives = cell.n_positive;
    std::int64_t negatives = tested - positives;
    std::int64_t untested = n - tested;
    Window window = fn_window(negatives, band);
    if (window.empty()) return std::nullopt;

    std::int64_t min_infected = positives + window.lo;
    std::int64_t max_infected;
    if (monotone) {
        // Worst feasible case: every allowed false negative plus as many
        // untested infections as the tested rate admits. With nobody tested
        // the constraint is vacuous.
        std::int64_t fn = window.hi;
        std::int64_t cap =
            tested == 0 ? untested : (untested * (positives + fn)) / tested;
        max_infected = positives + fn + std::min(untested, cap);
    } else {
        max_infected = positives + window.hi + untested;
    }
    return CohortExtremes{{min_infected, n}, {max_infected, n}};
}

std::optional<RationalInterval> compose(const std::optional<CohortExtremes>& pop,
                                        const std::optional<CohortExtremes>& hosp,
                                        RegimeKind regime) {
    if (!pop) return std::nullopt;
    RationalInterval out{pop->lower, pop->upper};
    if (regime_needs_hospital(regime)) {
        if (!hosp) return std::nullopt;
        if (rat_less(hosp->upper, out.upper)) out.upper = hosp->upper;
        if (regime == RegimeKind::test_monotone_hosp_independent &&
            rat_less(out.lower, hosp->lower))
            out.lower = hosp->lower;
    }
    return out;
}

}  // namespace

CellCounts population_cell(const SmallInstance& inst) {
    CellCounts c;
    for (const SmallPerson& p : inst.persons) {
        c.n_pop += 1;
        c.n_tested += p.tested;
        c.n_positive += p.tested && p.positive;
    }
    return c;
}

CellCounts hospital_cell(const SmallInstance& inst) {
    CellCounts c;
    for (const SmallPerson& p : inst.persons) {
        if (!p.hospital) continue;
        c.n_pop += 1;
        c.n_tested += p.tested;
        c.n_positive += p.tested && p.positive;
    }
    return c;
}

std::optional<RationalInterval> enumerate_bounds(const SmallInstance& inst, RegimeKind regime,
                                                 const RationalBand& band) {
    if (inst.persons.size() > kMaxEnumerable)
        throw Error(Errc::too_large, "enumeration is limited to " +
                                         std::to_string(kMaxEnumerable) + " persons");
    bool monotone = regime != RegimeKind::worst_case;
    std::vector<const SmallPerson*> all;
    std::vector<const SmallPerson*> hosp;
    for (const SmallPerson& p : inst.persons) {
        all.push_back(&p);
        if (p.hospital) hosp.push_back(&p);
    }
    auto pop_ext = enumerate_cohort(all, monotone, band);
    std::optional<CohortExtremes> hosp_ext;
    if (regime_needs_hospital(regime)) hosp_ext = enumerate_cohort(hosp, true, band);
    return compose(pop_ext, hosp_ext, regime);
}

std::optional<RationalInterval> finite_closed_form(CellCounts pop,
                                                   const std::optional<CellCounts>& hosp,
                                                   RegimeKind regime, const RationalBand& band) {
    bool monotone = regime != RegimeKind::worst_case;
    auto pop_ext = finite_cohort(pop, monotone, band);
    std::optional<CohortExtremes> hosp_ext;
    if (regime_needs_hospital(regime)) {
        if (!hosp)
            throw Error(Errc::missing_hospital_cell, "hospital regime needs a hospital cell");
        hosp_ext = finite_cohort(*hosp, true, band);
    }
    return compose(pop_ext, hosp_ext, regime);
}

}  // namespace oracle
}  // namespace prevbound
