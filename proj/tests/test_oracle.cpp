#include <doctest.h>

#include "prevbound/bounds.hpp"
#include "prevbound/enumerate.hpp"
#include "prevbound/rng.hpp"

using namespace prevbound;
using namespace prevbound::oracle;

namespace {

const RationalBand kNoBand{0, 1, 0, 1};
const RationalBand kTinyBand{0, 1, 1, 200};   // (0, 0.005)
const RationalBand kWideBand{1, 10, 2, 5};    // (0.1, 0.4)

SmallInstance instance(std::initializer_list<SmallPerson> persons) {
    return SmallInstance{std::vector<SmallPerson>(persons)};
}

SmallPerson untested() { return {false, false, false}; }
SmallPerson pos() { return {true, true, false}; }
SmallPerson neg() { return {true, false, false}; }

}  // namespace

TEST_CASE("worst case enumeration on 4 persons, 1 tested positive") {
    SmallInstance inst = instance({pos(), untested(), untested(), untested()});
    auto r = enumerate_bounds(inst, RegimeKind::worst_case, kNoBand);
    REQUIRE(r.has_value());
    CHECK(rat_equal(r->lower, {1, 4}));
    CHECK(rat_equal(r->upper, {4, 4}));
}

TEST_CASE("everyone tested collapses to the observed positivity") {
    SmallInstance inst = instance({pos(), neg(), neg(), pos()});
    for (RegimeKind k : {RegimeKind::worst_case, RegimeKind::test_monotone}) {
        auto r = enumerate_bounds(inst, k, kNoBand);
        REQUIRE(r.has_value());
        CHECK(rat_equal(r->lower, {2, 4}));
        CHECK(rat_equal(r->upper, {2, 4}));
    }
}

TEST_CASE("test monotone enumeration: 4 persons, 2 tested, 1 positive") {
    SmallInstance inst = instance({pos(), neg(), untested(), untested()});
    auto r = enumerate_bounds(inst, RegimeKind::test_monotone, kNoBand);
    REQUIRE(r.has_value());
    CHECK(rat_equal(r->lower, {1, 4}));
    CHECK(rat_equal(r->upper, {2, 4}));  // = 0.5 = n_positive / n_tested
    CHECK(rat_double(r->upper) == bounds::test_monotone({4, 2, 1}).upper);
}

TEST_CASE("finite closed form handles the non-divisible case the same way") {
    // 5 persons, 2 tested, 1 positive: the attainable max under monotonicity
    // is 2/5 (one of the three untested may be infected), not 1/2.
    SmallInstance inst = instance({pos(), neg(), untested(), untested(), untested()});
    auto enumerated = enumerate_bounds(inst, RegimeKind::test_monotone, kNoBand);
    auto closed = finite_closed_form({5, 2, 1}, std::nullopt, RegimeKind::test_monotone, kNoBand);
    REQUIRE(enumerated.has_value());
    REQUIRE(closed.has_value());
    CHECK(rat_equal(enumerated->upper, {2, 5}));
    CHECK(rat_equal(closed->upper, enumerated->upper));
    CHECK(rat_equal(closed->lower, enumerated->lower));
    // and the continuous production bound is an outer hull
    CHECK(bounds::test_monotone({5, 2, 1}).upper >= rat_double(enumerated->upper));
}

TEST_CASE("lambda window can be infeasible on tiny cohorts") {
    // two tested negatives under band (0.1, 0.4): ceil(0.2)=1 > floor(0.8)=0
    SmallInstance inst = instance({neg(), neg(), untested()});
    CHECK(!enumerate_bounds(inst, RegimeKind::worst_case, kWideBand).has_value());
    CHECK(!finite_closed_form({3, 2, 0}, std::nullopt, RegimeKind::worst_case, kWideBand)
               .has_value());
}

TEST_CASE("size cap") {
    SmallInstance inst;
    inst.persons.assign(13, untested());
    CHECK_THROWS_AS(enumerate_bounds(inst, RegimeKind::worst_case, kNoBand), Error);
}

namespace {

SmallInstance random_instance(Rng& rng, bool need_hospital) {
    SmallInstance inst;
    int n = 1 + static_cast<int>(rng.below(kMaxEnumerable));
    bool pop_has_test = false, hosp_any = false, hosp_has_test = false;
    for (int i = 0; i < n; ++i) {
        SmallPerson p;
        p.tested = rng.bernoulli(0.6);
        p.positive = p.tested && rng.bernoulli(0.4);
        p.hospital = need_hospital && rng.bernoulli(0.45);
        pop_has_test |= p.tested;
        hosp_any |= p.hospital;
        hosp_has_test |= p.hospital && p.tested;
        inst.persons.push_back(p);
    }
    // Monotone regimes need a tested person; hospital regimes additionally a
    // tested hospital member (the production preconditions).
    if (!pop_has_test) {
        inst.persons[0].tested = true;
        inst.persons[0].positive = rng.bernoulli(0.5);
    }
    if (need_hospital && (!hosp_any || !hosp_has_test)) {
        inst.persons[0].tested = true;
        inst.persons[0].hospital = true;
    }
    return inst;
}

}  // namespace

TEST_CASE("oracle equivalence: enumeration equals the finite closed form exactly") {
    Rng rng(20260808);
    const RationalBand bands[] = {kNoBand, kTinyBand, kWideBand};
    const RegimeKind regimes[] = {RegimeKind::worst_case, RegimeKind::test_monotone,
                                  RegimeKind::test_monotone_hosp_monotone,
                                  RegimeKind::test_monotone_hosp_independent};
    int checked = 0;
    for (int trial = 0; trial < 1200; ++trial) {
        for (RegimeKind regime : regimes) {
            bool hosp = regime_needs_hospital(regime);
            SmallInstance inst = random_instance(rng, hosp);
            CellCounts pop = population_cell(inst);
            std::optional<CellCounts> hosp_cell;
            if (hosp) hosp_cell = hospital_cell(inst);
            for (const RationalBand& band : bands) {
                auto enumerated = enumerate_bounds(inst, regime, band);
                auto closed = finite_closed_form(pop, hosp_cell, regime, band);
                REQUIRE(enumerated.has_value() == closed.has_value());
                if (!enumerated) continue;
                CHECK(rat_equal(enumerated->lower, closed->lower));
                CHECK(rat_equal(enumerated->upper, closed->upper));
                ++checked;
            }
        }
    }
    CHECK(checked > 10000);
}

TEST_CASE("production bounds are an outer hull of the enumerated region") {
    Rng rng(8675309);
    const RationalBand bands[] = {kNoBand, kTinyBand, kWideBand};
    for (int trial = 0; trial < 1000; ++trial) {
        for (RegimeKind regime :
             {RegimeKind::worst_case, RegimeKind::test_monotone,
              RegimeKind::test_monotone_hosp_monotone,
              RegimeKind::test_monotone_hosp_independent}) {
            bool hosp = regime_needs_hospital(regime);
            SmallInstance inst = random_instance(rng, hosp);
            CellCounts pop = population_cell(inst);
            std::optional<CellCounts> hosp_cell;
            if (hosp) hosp_cell = hospital_cell(inst);
            for (const RationalBand& band : bands) {
                auto enumerated = enumerate_bounds(inst, regime, band);
                if (!enumerated) continue;
                AssumptionRegime regime_cfg{regime, band.to_double()};
                bounds::LadderResult prod = bounds::bound_ladder(pop, hosp_cell, regime_cfg);
                CHECK(prod.bounds.lower <= rat_double(enumerated->lower) + 1e-12);
                CHECK(prod.bounds.upper >= rat_double(enumerated->upper) - 1e-12);
            }
        }
    }
}

TEST_CASE("production bounds equal the finite form when the discretization is exact") {
    // Fully tested cohorts and divisible untested caps, zero band.
    struct Case {
        CellCounts pop;
        std::optional<CellCounts> hosp;
        RegimeKind regime;
    };
    const Case cases[] = {
        {{4, 2, 1}, std::nullopt, RegimeKind::test_monotone},
        {{4, 4, 3}, std::nullopt, RegimeKind::test_monotone},
        {{6, 3, 2}, std::nullopt, RegimeKind::worst_case},
        {{8, 4, 2}, std::nullopt, RegimeKind::test_monotone},
        {{8, 4, 2}, CellCounts{4, 4, 1}, RegimeKind::test_monotone_hosp_monotone},
        {{8, 4, 2}, CellCounts{4, 4, 1}, RegimeKind::test_monotone_hosp_independent},
    };
    for (const Case& c : cases) {
        auto closed = finite_closed_form(c.pop, c.hosp, c.regime, kNoBand);
        REQUIRE(closed.has_value());
        AssumptionRegime regime_cfg{c.regime, std::nullopt};
        bounds::LadderResult prod = bounds::bound_ladder(c.pop, c.hosp, regime_cfg);
        CHECK(prod.bounds.lower == doctest::Approx(rat_double(closed->lower)).epsilon(1e-15));
        CHECK(prod.bounds.upper == doctest::Approx(rat_double(closed->upper)).epsilon(1e-15));
    }
}
