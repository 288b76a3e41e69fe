#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prevbound/domain.hpp"

namespace prevbound {
namespace oracle {

// Brute-force verification oracle for the closed-form bounds: on small
// instances it iterates every assignment of infection status to the free
// individuals (untested people; under an error band also tested-negative
// people) and returns the extremal attainable prevalence per cohort, then
// composes cohorts the way each regime's algebra does.
//
// Everything here is exact rational arithmetic. The error band is carried as
// a rational and discretized per cohort: among k tested negatives, the
// number of true infections lies in [ceil(lambda_l*k), floor(lambda_u*k)].
// That window can be empty on tiny cohorts, in which case the instance is
// infeasible under the band and both routes must agree on that.

constexpr int kMaxEnumerable = 12;

struct SmallPerson {
    bool tested = false;
    bool positive = false;  // only meaningful when tested
    bool hospital = false;
};

struct SmallInstance {
    std::vector<SmallPerson> persons;
};

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
};

inline bool rat_less(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
inline bool rat_equal(Rational a, Rational b) { return a.num * b.den == b.num * a.den; }
inline double rat_double(Rational a) {
    return static_cast<double>(a.num) / static_cast<double>(a.den);
}

struct RationalBand {
    std::int64_t lower_num = 0;
    std::int64_t lower_den = 1;
    std::int64_t upper_num = 0;
    std::int64_t upper_den = 1;

    ErrorBand to_double() const {
        return {static_cast<double>(lower_num) / static_cast<double>(lower_den),
                static_cast<double>(upper_num) / static_cast<double>(upper_den)};
    }
};

struct RationalInterval {
    Rational lower;
    Rational upper;
};

CellCounts population_cell(const SmallInstance& inst);
CellCounts hospital_cell(const SmallInstance& inst);

// Brute-force enumeration. Throws TooLarge beyond kMaxEnumerable persons.
// Returns nullopt when no assignment satisfies the band's window.
std::optional<RationalInterval> enumerate_bounds(const SmallInstance& inst, RegimeKind regime,
                                                 const RationalBand& band);

// Closed-form counterpart on the same discretized problem: the production
// formula structure evaluated exactly, with the band window floors/ceils.
std::optional<RationalInterval> finite_closed_form(CellCounts pop,
                                                   const std::optional<CellCounts>& hosp,
                                                   RegimeKind regime, const RationalBand& band);

}  // namespace oracle
}  // namespace prevbound
