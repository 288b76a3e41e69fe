#include "prevbound/cohort.hpp"

#include <algorithm>
#include <limits>

namespace prevbound {
namespace cohort {

std::vector<CodeFlags> build_code_flags(const IdTable& dx_codes,
                                        const codes::CodeSetConfig& cfg) {
    std::vector<CodeFlags> flags(dx_codes.size());
    for (std::size_t id = 0; id < dx_codes.size(); ++id) {
        const std::string& code = dx_codes.name(static_cast<std::uint32_t>(id));
        CodeFlags& f = flags[id];
        f.icli = cfg.icli.matches(code);
        f.chemo = cfg.chemotherapy.matches(code);
        for (int c = 0; c < codes::kNumCauses; ++c) {
            if (cfg.clear_cause[c].matches(code)) {
                if (static_cast<codes::Cause>(c) == codes::Cause::cancer) {
                    f.cancer_code = true;  // position-dependent, resolved per admission
                } else {
                    f.cause_mask |= static_cast<std::uint16_t>(1u << c);
                }
            }
        }
    }
    return flags;
}

Classification classify_admission(const AdmissionRecord& adm,
                                  const std::vector<CodeFlags>& flags) {
    if (adm.diagnoses.empty())
        throw Error(Errc::empty_diagnoses, "admission has no diagnosis codes");
    Classification cls;
    constexpr std::uint16_t cancer_bit = 1u << static_cast<int>(codes::Cause::cancer);
    for (const DiagnosisEntry& d : adm.diagnoses) {
        const CodeFlags& f = flags[d.code];
        cls.icli = cls.icli || f.icli;
        cls.cause_mask |= f.cause_mask;
        if (f.chemo) cls.cause_mask |= cancer_bit;
        if (f.cancer_code && (d.is_admitting || d.is_primary_final))
            cls.cause_mask |= cancer_bit;
    }
    return cls;
}

Classification classify_admission(const AdmissionRecord& adm, const codes::CodeSetConfig& cfg,
                                  const IdTable& dx_codes) {
    return classify_admission(adm, build_code_flags(dx_codes, cfg));
}

TestOutcome in_hospital_test_outcome(const AdmissionRecord& adm, const ingest::LinkedStore& store,
                                     codes::InconclusivePolicy policy) {
    Day d = adm.admit_date();
    Day from = d - kWindowBefore;
    Day to = d + kWindowAfter;
    if (store.positive_in(adm.person, from, to)) return TestOutcome::tested_positive;
    bool count_inconclusive = policy == codes::InconclusivePolicy::tested_not_positive;
    if (store.tested_in(adm.person, from, to, count_inconclusive))
        return TestOutcome::tested_negative;
    return TestOutcome::not_tested;
}

bool HospitalCohort::contains(const Classification& cls) const {
    switch (kind) {
        case Kind::icli: return cls.icli;
        case Kind::non_icli: return cls.non_icli();
        case Kind::clear_cause: return cls.any_clear_cause();
        case Kind::single_cause: return cls.has(cause);
    }
    return false;
}

std::string HospitalCohort::name() const {
    switch (kind) {
        case Kind::icli: return "icli";
        case Kind::non_icli: return "non_icli";
        case Kind::clear_cause: return "clear_cause";
        case Kind::single_cause: return codes::cause_name(cause);
    }
    return "?";
}

namespace {

// Week membership for a person's collapsed test history: any test day and
// any positive test day in [from, to].
struct WindowHit {
    bool tested = false;
    bool positive = false;
};

WindowHit scan_window(const ingest::PersonTests& t, Day from, Day to,
                      codes::InconclusivePolicy policy) {
    WindowHit hit;
    auto it = std::lower_bound(t.days.begin(), t.days.end(), from);
    for (; it != t.days.end() && *it <= to; ++it) {
        TestResult r = t.results[static_cast<std::size_t>(it - t.days.begin())];
        if (r == TestResult::inconclusive && policy == codes::InconclusivePolicy::exclude)
            continue;
        hit.tested = true;
        if (r == TestResult::positive) {
            hit.positive = true;
            break;
        }
    }
    return hit;
}

void add_to(AgeCells& cells, AgeGroup g, bool tested, bool positive) {
    cells.crude.n_tested += tested;
    cells.crude.n_positive += positive;
    if (g != AgeGroup::unknown) {
        CellCounts& c = cells.by_age[static_cast<int>(g)];
        c.n_tested += tested;
        c.n_positive += positive;
    }
}

}  // namespace

AgeCells weekly_population_cells(const ingest::LinkedStore& store,
                                 const codes::AnalysisConfig& cfg, int week) {
    if (!cfg.has_age_totals)
        throw Error(Errc::missing_population_totals,
                    "population cells need population.age_totals in the code-set config");
    AgeCells cells;
    Day from = cfg.week_start(week);
    Day to = from + 6;
    for (PersonId p = 0; p < store.num_people(); ++p) {
        const ingest::PersonTests& t = store.tests[p];
        if (t.days.empty()) continue;
        WindowHit hit = scan_window(t, from, to, cfg.inconclusive);
        if (!hit.tested) continue;
        add_to(cells, store.age_of(p), hit.tested, hit.positive);
    }
    for (int a = 0; a < kNumAgeGroups; ++a) {
        cells.by_age[a].n_pop = cfg.age_totals[a];
        cells.by_age[a] = validate_cell(cells.by_age[a]);
    }
    cells.crude.n_pop = cfg.population_total();
    cells.crude = validate_cell(cells.crude);
    return cells;
}

AgeCells weekly_hospital_cells(const ingest::LinkedStore& store,
                               const codes::AnalysisConfig& cfg,
                               const std::vector<CodeFlags>& flags, int week,
                               const HospitalCohort& cohort) {
    AgeCells cells;
    Day from = cfg.week_start(week);
    Day to = from + 6;
    for (const AdmissionRecord& adm : store.admissions) {
        Day d = adm.admit_date();
        if (d < from || d > to) continue;
        if (adm.diagnoses.empty()) continue;  // no diagnosis information
        Classification cls = classify_admission(adm, flags);
        if (!cohort.contains(cls)) continue;
        TestOutcome outcome = in_hospital_test_outcome(adm, store, cfg.inconclusive);
        AgeGroup g = store.age_of(adm.person);
        cells.crude.n_pop += 1;
        if (g != AgeGroup::unknown) cells.by_age[static_cast<int>(g)].n_pop += 1;
        add_to(cells, g, outcome != TestOutcome::not_tested,
               outcome == TestOutcome::tested_positive);
    }
    for (int a = 0; a < kNumAgeGroups; ++a) cells.by_age[a] = validate_cell(cells.by_age[a]);
    cells.crude = validate_cell(cells.crude);
    return cells;
}

std::array<CellCounts, codes::kNumCauses> pooled_cause_cells(
    const ingest::LinkedStore& store, const codes::AnalysisConfig& cfg,
    const std::vector<CodeFlags>& flags) {
    std::array<CellCounts, codes::kNumCauses> cells{};
    for (const AdmissionRecord& adm : store.admissions) {
        Day d = adm.admit_date();
        if (d < cfg.study_start || d > cfg.study_end) continue;
        if (adm.diagnoses.empty()) continue;
        Classification cls = classify_admission(adm, flags);
        if (!cls.any_clear_cause()) continue;
        TestOutcome outcome = in_hospital_test_outcome(adm, store, cfg.inconclusive);
        for (int c = 0; c < codes::kNumCauses; ++c) {
            if (!cls.has(static_cast<codes::Cause>(c))) continue;
            CellCounts& cell = cells[c];
            cell.n_pop += 1;
            cell.n_tested += outcome != TestOutcome::not_tested;
            cell.n_positive += outcome == TestOutcome::tested_positive;
        }
    }
    for (CellCounts& c : cells) c = validate_cell(c);
    return cells;
}

namespace {

constexpr Day kPriorFrom = 15;  // window [t-15, t-9]
constexpr Day kPriorTo = 9;

struct PriorScan {
    std::int64_t n = 0;
    std::int64_t hit = 0;
};

// Applies fn(adm, t) to each person's single first admission on or after the
// study start, when it falls in the window, has diagnoses, and matches the
// cohort. Admissions are sorted by (person, admit_time), so the first
// qualifying index per person is the earliest admission.
template <typename Fn>
void for_each_first_admission(const ingest::LinkedStore& store, const codes::AnalysisConfig& cfg,
                              const std::vector<CodeFlags>& flags, const HospitalCohort& cohort,
                              Fn&& fn) {
    for (PersonId p = 0; p < store.num_people(); ++p) {
        auto [begin, end] = store.admissions_of(p);
        for (std::size_t i = begin; i < end; ++i) {
            const AdmissionRecord& adm = store.admissions[i];
            Day t = adm.admit_date();
            if (t < cfg.study_start) continue;
            if (t > cfg.study_end) break;
            if (!adm.diagnoses.empty()) {
                Classification cls = classify_admission(adm, flags);
                if (cohort.contains(cls)) fn(adm, t);
            }
            break;  // later admissions are never the first
        }
    }
}

}  // namespace

std::optional<double> prior_test_rate(const ingest::LinkedStore& store,
                                      const codes::AnalysisConfig& cfg,
                                      const std::vector<CodeFlags>& flags,
                                      const HospitalCohort& cohort, Day t) {
    PriorScan scan;
    for_each_first_admission(store, cfg, flags, cohort,
                             [&](const AdmissionRecord& adm, Day day) {
                                 if (day != t) return;
                                 ++scan.n;
                                 bool count_inc = cfg.inconclusive ==
                                                  codes::InconclusivePolicy::tested_not_positive;
                                 scan.hit += store.tested_in(adm.person, t - kPriorFrom,
                                                             t - kPriorTo, count_inc);
                             });
    if (scan.n == 0) return std::nullopt;
    return static_cast<double>(scan.hit) / static_cast<double>(scan.n);
}

std::vector<PriorRatePoint> prior_test_rate_series(const ingest::LinkedStore& store,
                                                   const codes::AnalysisConfig& cfg,
                                                   const std::vector<CodeFlags>& flags,
                                                   const HospitalCohort& cohort) {
    std::vector<PriorRatePoint> series(cfg.num_weeks());
    for (int w = 0; w < cfg.num_weeks(); ++w) series[w].week = w;
    bool count_inc = cfg.inconclusive == codes::InconclusivePolicy::tested_not_positive;
    for_each_first_admission(store, cfg, flags, cohort,
                             [&](const AdmissionRecord& adm, Day t) {
                                 int w = cfg.week_of(t);
                                 if (!cfg.week_in_window(w)) return;
                                 series[w].n_admissions += 1;
                                 series[w].n_with_prior_test += store.tested_in(
                                     adm.person, t - kPriorFrom, t - kPriorTo, count_inc);
                             });
    return series;
}

std::vector<PriorRatePoint> prior_test_rate_population(const ingest::LinkedStore& store,
                                                       const codes::AnalysisConfig& cfg) {
    if (!cfg.has_age_totals)
        throw Error(Errc::missing_population_totals,
                    "population prior-test series needs population.age_totals");
    std::vector<PriorRatePoint> series(cfg.num_weeks());
    bool count_inc = cfg.inconclusive == codes::InconclusivePolicy::tested_not_positive;
    for (int w = 0; w < cfg.num_weeks(); ++w) {
        series[w].week = w;
        series[w].n_admissions = cfg.population_total();
        Day t0 = cfg.week_start(w);
        std::int64_t hits = 0;
        for (PersonId p = 0; p < store.num_people(); ++p) {
            if (store.tests[p].days.empty()) continue;
            hits += store.tested_in(p, t0 - kPriorFrom, t0 - kPriorTo, count_inc);
        }
        series[w].n_with_prior_test = hits;
    }
    return series;
}

namespace {

struct CountyAccumulator {
    std::vector<std::int64_t> tested;  // by county id
    bool count_inconclusive;
};

}  // namespace

// "Ever tested" runs from the beginning of the data through the study end;
// records may predate the study start.
constexpr Day kEverSince = std::numeric_limits<Day>::min() / 2;

double community_test_rate(const ingest::LinkedStore& store, const codes::AnalysisConfig& cfg,
                           const std::string& county) {
    std::int64_t total = -1;
    for (const auto& [name, pop] : cfg.county_totals) {
        if (name == county) total = pop;
    }
    if (total < 0)
        throw Error(Errc::missing_county_totals, "no population total for county " + county);
    auto id = store.tables.counties.find(county);
    std::int64_t tested = 0;
    if (id) {
        bool count_inc = cfg.inconclusive == codes::InconclusivePolicy::tested_not_positive;
        for (PersonId p = 0; p < store.num_people(); ++p) {
            const auto& rec = store.demographics[p];
            if (!rec || rec->county != *id) continue;
            if (store.tested_in(p, kEverSince, cfg.study_end, count_inc)) ++tested;
        }
    }
    if (tested > total)
        throw Error(Errc::ordering_violation, "county " + county + " has more tested people (" +
                                                  std::to_string(tested) +
                                                  ") than its configured population (" +
                                                  std::to_string(total) + ")");
    return total == 0 ? 0.0 : static_cast<double>(tested) / static_cast<double>(total);
}

CommunityComparison community_comparison(const ingest::LinkedStore& store,
                                         const codes::AnalysisConfig& cfg,
                                         const std::vector<CodeFlags>& flags) {
    if (cfg.county_totals.empty())
        throw Error(Errc::missing_county_totals,
                    "community comparison needs population.county_totals");
    CommunityComparison out;
    bool count_inc = cfg.inconclusive == codes::InconclusivePolicy::tested_not_positive;

    // Ever-tested count per interned county id.
    std::vector<std::int64_t> tested_by_county(store.tables.counties.size(), 0);
    for (PersonId p = 0; p < store.num_people(); ++p) {
        const auto& rec = store.demographics[p];
        if (!rec || rec->county == kNoId) continue;
        if (store.tested_in(p, kEverSince, cfg.study_end, count_inc))
            ++tested_by_county[rec->county];
    }

    std::vector<double> rate_by_county(store.tables.counties.size(), -1.0);
    double weighted_sum = 0.0;
    std::int64_t weight_total = 0;
    for (const auto& [name, pop] : cfg.county_totals) {
        CommunityRow row;
        row.county = name;
        row.population = pop;
        auto id = store.tables.counties.find(name);
        row.ever_tested = id ? tested_by_county[*id] : 0;
        if (row.ever_tested > row.population)
            throw Error(Errc::ordering_violation,
                        "county " + name + " has more tested people than configured population");
        row.rate = pop == 0 ? 0.0
                            : static_cast<double>(row.ever_tested) / static_cast<double>(pop);
        if (id) rate_by_county[*id] = row.rate;
        weighted_sum += row.rate * static_cast<double>(pop);
        weight_total += pop;
        out.counties.push_back(std::move(row));
    }
    out.population_average = weight_total == 0 ? 0.0 : weighted_sum / weight_total;

    const HospitalCohort cohorts[] = {HospitalCohort::icli(), HospitalCohort::non_icli(),
                                      HospitalCohort::clear_cause()};
    for (const HospitalCohort& cohort : cohorts) {
        double sum = 0.0;
        std::int64_t n = 0;
        for (const AdmissionRecord& adm : store.admissions) {
            Day d = adm.admit_date();
            if (d < cfg.study_start || d > cfg.study_end) continue;
            if (adm.diagnoses.empty()) continue;
            if (!cohort.contains(classify_admission(adm, flags))) continue;
            const auto& rec = store.demographics[adm.person];
            if (!rec || rec->county == kNoId || rate_by_county[rec->county] < 0.0) {
                ++out.admissions_without_county;
                continue;
            }
            sum += rate_by_county[rec->county];
            ++n;
        }
        out.cohort_averages.emplace_back(cohort.name(), n == 0 ? 0.0 : sum / n);
    }
    return out;
}

}  // namespace cohort
}  // namespace prevbound
