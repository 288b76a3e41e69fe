#include "prevbound/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "prevbound/csv.hpp"
#include "prevbound/rng.hpp"

namespace prevbound {
namespace simulate {

const char* const kDefaultCodeSections = R"(# ICD-10 code sets (prefix match, dots ignored, case-insensitive).
# These are editable deployment data; the shipped defaults follow the standard
# influenza-like-illness surveillance set plus the recommended COVID-19 codes.
[icli]
codes = U07.1 U07.2 J00 J01 J02 J03 J04 J05 J06 J09 J10 J11 J12 J13 J14 J15 J16 J17 J18 J20 J21 J22 J80
codes = B34.2 B34.9 B97.21 B97.29 R05 R06.02 R09.02 R50 Z20.822 Z20.828

[clear_cause.labor_delivery]
codes = O60 O61 O62 O63 O64 O65 O66 O67 O68 O69 O70 O71 O72 O73 O74 O75 O76 O77 O80 O82 Z37

[clear_cause.ami]
codes = I21 I22

[clear_cause.stroke]
codes = I60 I61 I62 I63

[clear_cause.fractures]
codes = S02 S12 S22 S32 S42 S52 S62 S72 S82 S92 M80

[clear_cause.crushes]
codes = S07 S17 S28.0 S38.0 S38.1 S47 S57 S67 S77 S87 S97

[clear_cause.open_wounds]
codes = S01 S11 S21 S31 S41 S51 S61 S71 S81 S91

[clear_cause.appendicitis]
codes = K35 K36 K37

[clear_cause.vehicle_accidents]
codes = V0 V1 V2 V3 V4 V5 V6 V7 V8

[clear_cause.other_accidents]
codes = W0 W1 W2 W3 W4 W5 W6 W7 W8 W9 X0 X1 X2 X3 X4 X5

[clear_cause.cancer]
codes = C

[cancer_rule]
chemotherapy = Z51.11 Z51.12
)";

namespace {

// Stream tags for keyed draws; every random decision has its own tag so the
// streams stay independent of evaluation order.
enum Tag : std::uint64_t {
    kTagAge = 1,
    kTagCounty,
    kTagDemog,
    kTagInfect,
    kTagPersist,
    kTagCommTest,
    kTagTestDay,
    kTagFn,
    kTagInconclusive,
    kTagAdmit,
    kTagAdmitTime,
    kTagIcli,
    kTagDxPick,
    kTagDxExtraCount,
    kTagDxExtraPick,
    kTagHospTest,
    kTagHospTestDay,
    kTagHospFn,
    kTagHospInconclusive,
    kTagDup,
    kTagDupKind,
    kTagRetestInfect,
    kTagRetestR1,
    kTagRetestR2,
    kTagRetestAccept,
};

constexpr double kAgeShares[kNumAgeGroups] = {0.22, 0.16, 0.26, 0.19, 0.10, 0.07};

struct CountySpec {
    const char* name;
    double share;
};
constexpr CountySpec kCounties[] = {
    {"adams", 0.4}, {"brown", 0.3}, {"clay", 0.2}, {"dekalb", 0.1}};

struct PoolEntry {
    const char* code;
    bool admitting;
    bool primary;
    bool icli;
    int cause;  // codes::Cause index, -1 when none
};

constexpr PoolEntry kNonIcliPool[] = {
    {"I21.4", false, true, false, static_cast<int>(codes::Cause::ami)},
    {"I63.9", false, true, false, static_cast<int>(codes::Cause::stroke)},
    {"S72.90", true, false, false, static_cast<int>(codes::Cause::fractures)},
    {"K35.80", true, true, false, static_cast<int>(codes::Cause::appendicitis)},
    {"O80", false, true, false, static_cast<int>(codes::Cause::labor_delivery)},
    {"V43.52", false, false, false, static_cast<int>(codes::Cause::vehicle_accidents)},
    {"S61.409", false, false, false, static_cast<int>(codes::Cause::open_wounds)},
    {"S97.0", false, false, false, static_cast<int>(codes::Cause::crushes)},
    {"W19", false, false, false, static_cast<int>(codes::Cause::other_accidents)},
    {"C50.911", true, false, false, static_cast<int>(codes::Cause::cancer)},
    {"C50.911", false, false, false, -1},  // non-admitting cancer: rule rejects
    {"Z51.11", false, false, false, static_cast<int>(codes::Cause::cancer)},
    {"E11.9", false, false, false, -1},
    {"K92.2", false, false, false, -1},
    {"N39.0", false, false, false, -1},
    {"I10", false, false, false, -1},
};

constexpr PoolEntry kIcliPool[] = {
    {"U07.1", true, true, true, -1},
    {"J12.89", false, true, true, -1},
    {"J18.9", false, false, true, -1},
    {"R05.9", false, false, true, -1},
};

constexpr const char* kBenignExtras[] = {"E11.9", "K92.2", "N39.0", "I10"};

// Infected propensity: rho independent exposures to the base rate. Equals
// rho*rate for small rates, stays in [0,1], and rho < 1 suppresses.
double boosted_rate(double rate, double rho) {
    if (rate <= 0.0) return 0.0;
    if (rate >= 1.0) return 1.0;
    return 1.0 - std::pow(1.0 - rate, rho);
}

std::string person_name(std::int64_t i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "p%07lld", static_cast<long long>(i));
    return buf;
}

std::string retest_name(std::int64_t i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "r%07lld", static_cast<long long>(i));
    return buf;
}

int pick_by_shares(double u, const double* shares, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += shares[i];
        if (u < acc) return i;
    }
    return n - 1;
}

}  // namespace

void validate_scenario(const ScenarioConfig& sc) {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (sc.population < 0) throw Error(Errc::invalid_scenario, "population must be >= 0");
    if (sc.weeks <= 0) throw Error(Errc::invalid_scenario, "weeks must be > 0");
    if (sc.prevalence.size() != static_cast<std::size_t>(sc.weeks))
        throw Error(Errc::invalid_scenario, "prevalence path length must equal weeks");
    for (double p : sc.prevalence)
        if (!in01(p)) throw Error(Errc::invalid_scenario, "prevalence outside [0,1]");
    if (!(sc.rho > 0.0)) throw Error(Errc::invalid_scenario, "rho must be > 0");
    if (!in01(sc.community_test_rate) || !in01(sc.admission_rate) ||
        !in01(sc.inpatient_test_rate) || !in01(sc.icli_admission_fraction) ||
        !in01(sc.false_negative_rate) || !in01(sc.inconclusive_rate) ||
        !in01(sc.duplicate_admission_rate) || !in01(sc.demographic_coverage) ||
        !in01(sc.persistence))
        throw Error(Errc::invalid_scenario, "rates must lie in [0,1]");
    if (sc.hospital_infection_corr < -1.0)
        throw Error(Errc::invalid_scenario, "hospital_infection_corr must be >= -1");
    if (!in01(sc.admission_rate * (1.0 + sc.hospital_infection_corr)))
        throw Error(Errc::invalid_scenario,
                    "admission_rate*(1+hospital_infection_corr) outside [0,1]");
    if (sc.retest_events < 0) throw Error(Errc::invalid_scenario, "retest events must be >= 0");
    if (!in01(sc.retest_prevalence))
        throw Error(Errc::invalid_scenario, "retest prevalence outside [0,1]");
    if (sc.retest_selective_boost < 1.0)
        throw Error(Errc::invalid_scenario, "retest selective boost must be >= 1");
}

ScenarioConfig parse_scenario(const IniDoc& doc) {
    ScenarioConfig sc;
    auto num = [&](const char* key, double defval) {
        auto v = doc.get_number("scenario", key);
        return v ? *v : defval;
    };
    sc.population = static_cast<std::int64_t>(num("population", 10000));
    sc.weeks = static_cast<int>(num("weeks", 8));
    if (auto path = doc.get("scenario", "prevalence_path")) {
        for (const std::string& tok : split_tokens(*path))
            sc.prevalence.push_back(parse_number(tok, "prevalence_path"));
    } else {
        double p = num("prevalence", 0.02);
        sc.prevalence.assign(static_cast<std::size_t>(std::max(sc.weeks, 0)), p);
    }
    sc.community_test_rate = num("community_test_rate", sc.community_test_rate);
    sc.rho = num("rho", sc.rho);
    sc.admission_rate = num("admission_rate", sc.admission_rate);
    sc.hospital_infection_corr = num("hospital_infection_corr", sc.hospital_infection_corr);
    sc.inpatient_test_rate = num("inpatient_test_rate", sc.inpatient_test_rate);
    sc.icli_admission_fraction = num("icli_admission_fraction", sc.icli_admission_fraction);
    sc.false_negative_rate = num("false_negative_rate", sc.false_negative_rate);
    sc.inconclusive_rate = num("inconclusive_rate", sc.inconclusive_rate);
    sc.duplicate_admission_rate = num("duplicate_admission_rate", sc.duplicate_admission_rate);
    sc.demographic_coverage = num("demographic_coverage", sc.demographic_coverage);
    sc.persistence = num("persistence", sc.persistence);
    sc.seed = static_cast<std::uint64_t>(num("seed", 1));
    if (auto d = doc.get("scenario", "start_date")) {
        auto day = parse_date(*d);
        if (!day) throw Error(Errc::invalid_scenario, "bad start_date '" + *d + "'");
        sc.start_date = *day;
    }
    if (auto v = doc.get_number("retest", "events"))
        sc.retest_events = static_cast<std::int64_t>(*v);
    if (auto v = doc.get_number("retest", "prevalence")) sc.retest_prevalence = *v;
    if (auto v = doc.get_number("retest", "selective_boost")) sc.retest_selective_boost = *v;
    validate_scenario(sc);
    return sc;
}

namespace {

struct DxDraw {
    const PoolEntry* main;
    int n_extras;
    const char* extras[2];
};

DxDraw draw_diagnoses(std::uint64_t seed, std::int64_t i, int w, bool icli_coded) {
    DxDraw d{};
    if (icli_coded) {
        d.main = &kIcliPool[mix(seed, kTagDxPick, i, w) % std::size(kIcliPool)];
    } else {
        d.main = &kNonIcliPool[mix(seed, kTagDxPick, i, w) % std::size(kNonIcliPool)];
    }
    d.n_extras = static_cast<int>(mix(seed, kTagDxExtraCount, i, w) % 3);  // 0..2
    for (int e = 0; e < d.n_extras; ++e)
        d.extras[e] =
            kBenignExtras[mix(seed, kTagDxExtraPick, i, static_cast<std::uint64_t>(w) * 4 + e) %
                          std::size(kBenignExtras)];
    return d;
}

TestResult draw_result(std::uint64_t seed, Tag fn_tag, Tag inc_tag, std::int64_t i, int w,
                       bool infected, const ScenarioConfig& sc) {
    if (sc.inconclusive_rate > 0.0 &&
        u01(mix(seed, inc_tag, i, w)) < sc.inconclusive_rate)
        return TestResult::inconclusive;
    if (!infected) return TestResult::negative;
    if (sc.false_negative_rate > 0.0 &&
        u01(mix(seed, fn_tag, i, w)) < sc.false_negative_rate)
        return TestResult::negative;
    return TestResult::positive;
}

}  // namespace

SimOutput generate(const ScenarioConfig& sc) {
    validate_scenario(sc);
    SimOutput out;
    const std::uint64_t seed = sc.seed;

    out.truth.population.assign(sc.weeks, 0.0);
    out.truth.icli.assign(sc.weeks, {});
    out.truth.non_icli.assign(sc.weeks, {});
    out.truth.clear_cause.assign(sc.weeks, {});
    std::vector<std::int64_t> infected_count(sc.weeks, 0);

    double county_shares[std::size(kCounties)];
    for (std::size_t c = 0; c < std::size(kCounties); ++c) county_shares[c] = kCounties[c].share;
    std::array<std::int64_t, std::size(kCounties)> county_counts{};

    for (std::int64_t i = 1; i <= sc.population; ++i) {
        PersonId pid = out.tables.people.intern(person_name(i));
        int age = pick_by_shares(u01(mix(seed, kTagAge, i)), kAgeShares, kNumAgeGroups);
        out.realized_age_totals[age] += 1;
        int county =
            pick_by_shares(u01(mix(seed, kTagCounty, i)), county_shares,
                           static_cast<int>(std::size(kCounties)));
        bool covered = u01(mix(seed, kTagDemog, i)) < sc.demographic_coverage;
        if (covered) {
            PersonRecord rec;
            rec.person = pid;
            rec.age_group = static_cast<AgeGroup>(age);
            rec.sex = (mix(seed, kTagDemog, i, 1) & 1) ? Sex::female : Sex::male;
            rec.county = out.tables.counties.intern(kCounties[county].name);
            county_counts[county] += 1;
            out.persons.push_back(rec);
        }

        bool infected_prev = false;
        for (int w = 0; w < sc.weeks; ++w) {
            bool infected;
            if (sc.persistence > 0.0 && w > 0 &&
                u01(mix(seed, kTagPersist, i, w)) < sc.persistence) {
                infected = infected_prev;
            } else {
                infected = u01(mix(seed, kTagInfect, i, w)) < sc.prevalence[w];
            }
            infected_prev = infected;
            if (infected) infected_count[w] += 1;
            Day week_start = sc.start_date + 7 * w;

            double test_rate = infected ? boosted_rate(sc.community_test_rate, sc.rho)
                                        : sc.community_test_rate;
            if (u01(mix(seed, kTagCommTest, i, w)) < test_rate) {
                Day d = week_start + static_cast<Day>(mix(seed, kTagTestDay, i, w) % 7);
                out.tests.push_back(
                    {pid, d, draw_result(seed, kTagFn, kTagInconclusive, i, w, infected, sc)});
            }

            double admit_rate = infected ? sc.admission_rate * (1.0 + sc.hospital_infection_corr)
                                         : sc.admission_rate;
            if (u01(mix(seed, kTagAdmit, i, w)) < admit_rate) {
                std::uint64_t tdraw = mix(seed, kTagAdmitTime, i, w);
                Day admit_day = week_start + static_cast<Day>(tdraw % 7);
                Seconds admit_time = static_cast<Seconds>(admit_day) * kSecondsPerDay +
                                     static_cast<Seconds>((tdraw >> 3) % kSecondsPerDay);
                bool icli_coded = u01(mix(seed, kTagIcli, i, w)) < sc.icli_admission_fraction;
                DxDraw dx = draw_diagnoses(seed, i, w, icli_coded);

                AdmissionRecord adm;
                adm.person = pid;
                adm.admit_time = admit_time;
                std::uint16_t pos = 0;
                {
                    DiagnosisEntry de;
                    de.code = out.tables.dx_codes.intern(
                        *ingest::normalize_dx_code(dx.main->code));
                    de.is_admitting = dx.main->admitting;
                    de.is_primary_final = dx.main->primary;
                    de.position = pos++;
                    adm.diagnoses.push_back(de);
                }
                for (int e = 0; e < dx.n_extras; ++e) {
                    DiagnosisEntry de;
                    de.code = out.tables.dx_codes.intern(
                        *ingest::normalize_dx_code(dx.extras[e]));
                    de.position = pos++;
                    adm.diagnoses.push_back(de);
                }

                // Cohort ground truth follows the same classification rule
                // the pipeline applies.
                CohortTruth& side = dx.main->icli ? out.truth.icli[w] : out.truth.non_icli[w];
                side.admissions += 1;
                side.infected += infected;
                if (dx.main->cause >= 0) {
                    out.truth.clear_cause[w].admissions += 1;
                    out.truth.clear_cause[w].infected += infected;
                }

                double hosp_rate = infected ? boosted_rate(sc.inpatient_test_rate, sc.rho)
                                            : sc.inpatient_test_rate;
                if (u01(mix(seed, kTagHospTest, i, w)) < hosp_rate) {
                    Day d = admit_day +
                            static_cast<Day>(mix(seed, kTagHospTestDay, i, w) % 7) - 5;
                    out.tests.push_back(
                        {pid, d,
                         draw_result(seed, kTagHospFn, kTagHospInconclusive, i, w, infected, sc)});
                }

                if (sc.duplicate_admission_rate > 0.0 &&
                    u01(mix(seed, kTagDup, i, w)) < sc.duplicate_admission_rate) {
                    AdmissionRecord dup = adm;
                    if ((mix(seed, kTagDupKind, i, w) & 1) && dup.diagnoses.size() > 1) {
                        dup.diagnoses.pop_back();  // fewer codes: dedup drops it
                    } else if (dup.diagnoses.size() > 1) {
                        // Same code count, different content: a genuine tie.
                        // Only a benign extra changes, so whichever record
                        // survives classifies identically and the recorded
                        // ground truth stays consistent with the files.
                        DiagnosisEntry& last = dup.diagnoses.back();
                        last.code = out.tables.dx_codes.intern(
                            *ingest::normalize_dx_code(
                                kBenignExtras[mix(mix(seed, kTagDupKind, i, w), 7) %
                                              std::size(kBenignExtras)]));
                    }
                    out.admissions.push_back(adm);
                    out.admissions.push_back(std::move(dup));
                } else {
                    out.admissions.push_back(std::move(adm));
                }
            }
        }
    }
    for (int w = 0; w < sc.weeks; ++w)
        out.truth.population[w] =
            sc.population == 0
                ? 0.0
                : static_cast<double>(infected_count[w]) / static_cast<double>(sc.population);
    for (std::size_t c = 0; c < std::size(kCounties); ++c)
        out.realized_county_totals.emplace_back(kCounties[c].name, county_counts[c]);

    // Test-retest block: consecutive-day pairs for synthetic people outside
    // the weekly population.
    if (sc.retest_events > 0) {
        Day span = std::max(1, sc.weeks * 7 - 2);
        std::int64_t accepted = 0;
        for (std::int64_t c = 1; accepted < sc.retest_events; ++c) {
            bool infected = u01(mix(seed, kTagRetestInfect, c)) < sc.retest_prevalence;
            bool fn1 = sc.false_negative_rate > 0.0 &&
                       u01(mix(seed, kTagRetestR1, c)) < sc.false_negative_rate;
            bool fn2 = sc.false_negative_rate > 0.0 &&
                       u01(mix(seed, kTagRetestR2, c)) < sc.false_negative_rate;
            bool r1 = infected && !fn1;
            bool r2 = infected && !fn2;
            // Random retesting accepts every candidate at the base rate;
            // selective retesting boosts (infected, first test negative).
            double accept = 1.0 / sc.retest_selective_boost;
            if (infected && !r1) accept = 1.0;
            if (u01(mix(seed, kTagRetestAccept, c)) >= accept) continue;
            ++accepted;
            PersonId pid = out.tables.people.intern(retest_name(accepted));
            Day t = sc.start_date + static_cast<Day>(mix(seed, kTagRetestAccept, c, 3) % span);
            out.tests.push_back(
                {pid, t, r1 ? TestResult::positive : TestResult::negative});
            out.tests.push_back(
                {pid, t + 1, r2 ? TestResult::positive : TestResult::negative});
        }
    }
    return out;
}

codes::AnalysisConfig analysis_config_for(const SimOutput& out, const ScenarioConfig& sc) {
    std::string text = kDefaultCodeSections;
    text += "\n[study]\nstart = " + format_date(sc.start_date) +
            "\nend = " + format_date(sc.start_date + 7 * sc.weeks - 1) +
            "\n[week_anchor]\nstart = " + format_date(sc.start_date) + "\n";
    codes::AnalysisConfig cfg =
        codes::parse_analysis_config(IniDoc::parse(text, "<default-codes>"));
    cfg.age_totals = out.realized_age_totals;
    cfg.has_age_totals = true;
    for (const auto& [name, total] : out.realized_county_totals)
        cfg.county_totals.emplace_back(name, total);
    return cfg;
}

ingest::LinkedStore to_store(SimOutput out, std::uint64_t seed) {
    auto deduped = ingest::dedup_admissions(std::move(out.admissions), seed, out.tables);
    return ingest::build_store(std::move(out.persons), std::move(out.tests), std::move(deduped),
                               std::move(out.tables));
}

namespace {

void append_csv_double(std::string& s, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s += buf;
}

}  // namespace

void write_files(const SimOutput& out, const ScenarioConfig& sc, const std::string& dir) {
    std::string persons = "person_id,age_group,sex,county\n";
    for (const PersonRecord& p : out.persons) {
        persons += out.tables.people.name(p.person);
        persons += ',';
        persons += age_group_name(p.age_group);
        persons += ',';
        if (p.sex) persons += *p.sex == Sex::female ? "f" : (*p.sex == Sex::male ? "m" : "x");
        persons += ',';
        if (p.county != kNoId) persons += out.tables.counties.name(p.county);
        persons += '\n';
    }
    write_file(dir + "/persons.csv", persons);

    std::string tests = "person_id,specimen_date,result\n";
    for (const TestRecord& t : out.tests) {
        tests += out.tables.people.name(t.person);
        tests += ',';
        tests += format_date(t.date);
        tests += ',';
        tests += test_result_name(t.result);
        tests += '\n';
    }
    write_file(dir + "/tests.csv", tests);

    std::string adms = "person_id,admit_time,discharge_time,dx_codes\n";
    for (const AdmissionRecord& a : out.admissions) {
        adms += out.tables.people.name(a.person);
        adms += ',';
        adms += format_datetime(a.admit_time);
        adms += ',';
        if (a.discharge_time) adms += format_datetime(*a.discharge_time);
        adms += ',';
        for (std::size_t i = 0; i < a.diagnoses.size(); ++i) {
            const DiagnosisEntry& d = a.diagnoses[i];
            if (i) adms += ';';
            adms += out.tables.dx_codes.name(d.code);
            if (d.is_admitting) adms += ":A";
            if (d.is_primary_final) adms += ":P";
        }
        adms += '\n';
    }
    write_file(dir + "/admissions.csv", adms);

    std::string truth = "week_id,cohort,true_prevalence\n";
    for (int w = 0; w < sc.weeks; ++w) {
        std::string week_id = format_date(sc.start_date + 7 * w);
        truth += week_id + ",population,";
        append_csv_double(truth, out.truth.population[w]);
        truth += '\n';
        auto cohort_row = [&](const char* name, const CohortTruth& ct) {
            auto p = ct.prevalence();
            if (!p) return;
            truth += week_id;
            truth += ',';
            truth += name;
            truth += ',';
            append_csv_double(truth, *p);
            truth += '\n';
        };
        cohort_row("icli", out.truth.icli[w]);
        cohort_row("non_icli", out.truth.non_icli[w]);
        cohort_row("clear_cause", out.truth.clear_cause[w]);
    }
    write_file(dir + "/ground_truth.csv", truth);

    std::string cfg = kDefaultCodeSections;
    cfg += "\n[population.age_totals]\n";
    for (int a = 0; a < kNumAgeGroups; ++a) {
        cfg += age_group_name(static_cast<AgeGroup>(a));
        cfg += " = " + std::to_string(out.realized_age_totals[a]) + "\n";
    }
    cfg += "\n[population.county_totals]\n";
    for (const auto& [name, total] : out.realized_county_totals)
        cfg += name + " = " + std::to_string(total) + "\n";
    cfg += "\n[study]\nstart = " + format_date(sc.start_date) +
           "\nend = " + format_date(sc.start_date + 7 * sc.weeks - 1) + "\n";
    cfg += "\n[week_anchor]\nstart = " + format_date(sc.start_date) + "\n";
    write_file(dir + "/codes.cfg", cfg);
}

}  // namespace simulate
}  // namespace prevbound
