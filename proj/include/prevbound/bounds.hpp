#pragma once

#include <optional>

#include "prevbound/domain.hpp"

namespace prevbound {
namespace bounds {

// Closed-form identification bounds on active-infection prevalence from cell
// counts, under the assumption ladder:
//
//   worst case        L = P/N                U = (P + (N - T))/N
//   test monotone     L = P/N                U = P/T
//   + hosp monotone   L = P/N                U = min(P/T, Ph/Th)
//   + hosp indep      L = max(P/N, Ph/Nh)    U = min(P/T, Ph/Th)
//
// with (N, T, P) the population cell and (Nh, Th, Ph) the hospital-cohort
// cell. An error band [lambda_l, lambda_u] on the false-omission rate shifts
// each bound by lambda * (negatives / own denominator), clamped to [0,1].

struct Interval {
    double lower = 0.0;
    double upper = 1.0;
};

enum class DenomRole : std::uint8_t { population, tested };
enum class CellSide : std::uint8_t { population, hospital };

struct Endpoint {
    double value = 0.0;
    CellSide side = CellSide::population;
    DenomRole role = DenomRole::population;
};

struct LadderResult {
    Interval bounds;
    Endpoint lower;
    Endpoint upper;
    // True when the composed region is empty (lower > upper): the data
    // refute the regime's assumptions. Values are kept as computed.
    bool refuted = false;
};

Interval worst_case(CellCounts pop);
Interval test_monotone(CellCounts pop);
Interval hospital_monotone(CellCounts pop, CellCounts hosp);
Interval hospital_independent(CellCounts pop, CellCounts hosp);

// Additive false-omission correction. The lower endpoint always carries the
// n_pop denominator (both lower bounds are population proportions); the
// upper endpoint's denominator depends on the bound being adjusted.
Interval error_adjusted(Interval base, CellCounts cell, ErrorBand band, DenomRole upper_role);

LadderResult bound_ladder(CellCounts pop, const std::optional<CellCounts>& hosp,
                          const AssumptionRegime& regime);

}  // namespace bounds
}  // namespace prevbound
