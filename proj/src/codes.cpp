#include "prevbound/codes.hpp"

#include <algorithm>
#include <cctype>

#include "prevbound/ingest.hpp"

namespace prevbound {
namespace codes {

const char* cause_name(Cause c) {
    switch (c) {
        case Cause::labor_delivery: return "labor_delivery";
        case Cause::ami: return "ami";
        case Cause::stroke: return "stroke";
        case Cause::fractures: return "fractures";
        case Cause::crushes: return "crushes";
        case Cause::open_wounds: return "open_wounds";
        case Cause::appendicitis: return "appendicitis";
        case Cause::vehicle_accidents: return "vehicle_accidents";
        case Cause::other_accidents: return "other_accidents";
        case Cause::cancer: return "cancer";
    }
    return "?";
}

std::optional<Cause> parse_cause(std::string_view s) {
    for (int i = 0; i < kNumCauses; ++i) {
        if (s == cause_name(static_cast<Cause>(i))) return static_cast<Cause>(i);
    }
    return std::nullopt;
}

void PrefixSet::add(std::string_view normalized_prefix) {
    if (normalized_prefix.empty()) throw Error(Errc::config_error, "empty code prefix");
    char lead = normalized_prefix[0];
    if (lead < 'A' || lead > 'Z')
        throw Error(Errc::config_error,
                    "code prefix must start with a letter: '" + std::string(normalized_prefix) +
                        "'");
    auto& bucket = by_letter_[lead - 'A'];
    std::string p(normalized_prefix);
    if (std::find(bucket.begin(), bucket.end(), p) == bucket.end()) {
        bucket.push_back(std::move(p));
        ++size_;
    }
}

bool PrefixSet::matches(std::string_view code) const {
    if (code.empty()) return false;
    char lead = code[0];
    if (lead < 'A' || lead > 'Z') return false;
    for (const std::string& p : by_letter_[lead - 'A']) {
        if (code.size() >= p.size() && code.compare(0, p.size(), p) == 0) return true;
    }
    return false;
}

std::int64_t AnalysisConfig::population_total() const {
    std::int64_t total = 0;
    for (std::int64_t v : age_totals) total += v;
    return total;
}

AgeWeights AnalysisConfig::age_weights() const {
    if (!has_age_totals)
        throw Error(Errc::missing_population_totals, "age weights require population.age_totals");
    double total = static_cast<double>(population_total());
    if (total <= 0)
        throw Error(Errc::missing_population_totals, "population.age_totals sum to zero");
    AgeWeights w;
    for (int a = 0; a < kNumAgeGroups; ++a)
        w.share[a] = static_cast<double>(age_totals[a]) / total;
    return validate_weights(w);
}

namespace {

void fill_prefixes(PrefixSet& set, const IniDoc& doc, std::string_view section) {
    for (const std::string& raw : doc.get_list(section, "codes")) {
        // Prefixes are normalized like full codes but may be shorter than a
        // complete code, so only strip dots and uppercase here.
        std::string norm;
        for (char c : raw) {
            if (c == '.') continue;
            norm.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
        set.add(norm);
    }
}

}  // namespace

AnalysisConfig parse_analysis_config(const IniDoc& doc) {
    AnalysisConfig cfg;

    if (!doc.has_section("icli"))
        throw Error(Errc::config_error, doc.origin() + ": missing [icli] section");
    fill_prefixes(cfg.codes.icli, doc, "icli");
    if (cfg.codes.icli.empty())
        throw Error(Errc::config_error, doc.origin() + ": [icli] has no codes");

    for (int i = 0; i < kNumCauses; ++i) {
        std::string section = std::string("clear_cause.") + cause_name(static_cast<Cause>(i));
        if (!doc.has_section(section))
            throw Error(Errc::config_error, doc.origin() + ": missing [" + section + "]");
        fill_prefixes(cfg.codes.clear_cause[i], doc, section);
    }
    // Reject unknown clear_cause labels: the label set is fixed.
    for (const IniSection& s : doc.sections()) {
        if (s.name.rfind("clear_cause.", 0) == 0) {
            std::string label = s.name.substr(std::string("clear_cause.").size());
            if (!parse_cause(label))
                throw Error(Errc::config_error,
                            doc.origin() + ": unknown clear cause label '" + label + "'");
        }
    }
    if (doc.has_section("cancer_rule"))
        for (const std::string& raw : doc.get_list("cancer_rule", "chemotherapy")) {
            auto norm = ingest::normalize_dx_code(raw);
            if (!norm)
                throw Error(Errc::config_error,
                            doc.origin() + ": bad chemotherapy code '" + raw + "'");
            cfg.codes.chemotherapy.add(*norm);
        }

    if (const IniSection* s = doc.section("population.age_totals")) {
        bool any = false;
        std::array<bool, kNumAgeGroups> seen{};
        for (const IniEntry& e : s->entries) {
            auto group = parse_age_group(e.key);
            if (!group)
                throw Error(Errc::config_error,
                            doc.origin() + ": unknown age group '" + e.key + "'");
            cfg.age_totals[static_cast<int>(*group)] =
                parse_integer(e.value, doc.origin() + " age total " + e.key);
            seen[static_cast<int>(*group)] = true;
            any = true;
        }
        if (any) {
            for (int a = 0; a < kNumAgeGroups; ++a) {
                if (!seen[a])
                    throw Error(Errc::missing_population_totals,
                                doc.origin() + ": age group " +
                                    age_group_name(static_cast<AgeGroup>(a)) +
                                    " missing from population.age_totals");
            }
            cfg.has_age_totals = true;
        }
    }

    if (const IniSection* s = doc.section("population.county_totals")) {
        for (const IniEntry& e : s->entries)
            cfg.county_totals.emplace_back(
                e.key, parse_integer(e.value, doc.origin() + " county total " + e.key));
    }

    auto study_start = doc.get("study", "start");
    if (!study_start)
        throw Error(Errc::config_error, doc.origin() + ": missing [study] start");
    auto start_day = parse_date(*study_start);
    if (!start_day)
        throw Error(Errc::config_error, doc.origin() + ": bad [study] start date");
    cfg.study_start = *start_day;

    auto study_end = doc.get("study", "end");
    if (!study_end) throw Error(Errc::config_error, doc.origin() + ": missing [study] end");
    auto end_day = parse_date(*study_end);
    if (!end_day || *end_day < cfg.study_start)
        throw Error(Errc::config_error, doc.origin() + ": bad [study] end date");
    cfg.study_end = *end_day;

    if (auto anchor = doc.get("week_anchor", "start")) {
        auto d = parse_date(*anchor);
        if (!d) throw Error(Errc::config_error, doc.origin() + ": bad [week_anchor] start");
        cfg.week_anchor = *d;
    } else {
        // Default: first Friday on or after the study start.
        Day d = cfg.study_start;
        while (weekday(d) != kFriday) ++d;
        cfg.week_anchor = d;
    }

    std::string policy = doc.get_or("study", "inconclusive", "tested_not_positive");
    if (policy == "tested_not_positive") {
        cfg.inconclusive = InconclusivePolicy::tested_not_positive;
    } else if (policy == "exclude") {
        cfg.inconclusive = InconclusivePolicy::exclude;
    } else {
        throw Error(Errc::config_error,
                    doc.origin() + ": bad [study] inconclusive policy '" + policy + "'");
    }

    if (auto z = doc.get_number("inference", "z")) {
        if (*z <= 0) throw Error(Errc::config_error, doc.origin() + ": [inference] z must be > 0");
        cfg.z_critical = *z;
    }
    return cfg;
}

AnalysisConfig load_analysis_config(const std::string& path) {
    return parse_analysis_config(IniDoc::load(path));
}

}  // namespace codes
}  // namespace prevbound
