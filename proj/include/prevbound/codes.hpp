#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prevbound/dates.hpp"
#include "prevbound/domain.hpp"
#include "prevbound/ini.hpp"

namespace prevbound {
namespace codes {

// ICD-10 code sets and analysis parameters. Code sets are deployment data,
// not logic: they live in a config file (see config/default_codes.cfg) and
// match by normalized prefix (uppercase, dots stripped).

enum class Cause : std::uint8_t {
    labor_delivery = 0,
    ami,
    stroke,
    fractures,
    crushes,
    open_wounds,
    appendicitis,
    vehicle_accidents,
    other_accidents,
    cancer,
};

constexpr int kNumCauses = 10;

const char* cause_name(Cause c);
std::optional<Cause> parse_cause(std::string_view s);

class PrefixSet {
public:
    void add(std::string_view normalized_prefix);
    bool matches(std::string_view normalized_code) const;
    bool empty() const { return size_ == 0; }
    std::size_t size() const { return size_; }

private:
    // Bucketed by leading letter; sets are small so a linear scan per bucket
    // is fast and keeps matching allocation-free.
    std::array<std::vector<std::string>, 26> by_letter_;
    std::size_t size_ = 0;
};

enum class InconclusivePolicy : std::uint8_t {
    tested_not_positive,  // counts toward tested, never positive (default)
    exclude,              // ignored entirely
};

struct CodeSetConfig {
    PrefixSet icli;
    std::array<PrefixSet, kNumCauses> clear_cause;
    PrefixSet chemotherapy;  // cancer rule: chemo codes count at any priority

    bool is_icli(std::string_view code) const { return icli.matches(code); }
};

struct AnalysisConfig {
    CodeSetConfig codes;

    // Census-style denominators.
    std::array<std::int64_t, kNumAgeGroups> age_totals{};
    bool has_age_totals = false;
    std::vector<std::pair<std::string, std::int64_t>> county_totals;  // by county name

    Day study_start = 0;
    Day study_end = 0;
    Day week_anchor = 0;  // first day of week 0

    InconclusivePolicy inconclusive = InconclusivePolicy::tested_not_positive;
    double z_critical = 1.96;

    std::int64_t population_total() const;
    AgeWeights age_weights() const;

    int week_of(Day d) const {
        Day delta = d - week_anchor;
        return delta >= 0 ? delta / 7 : (delta - 6) / 7;
    }
    Day week_start(int week) const { return week_anchor + 7 * week; }
    int num_weeks() const { return week_of(study_end) + 1; }
    bool week_in_window(int week) const { return week >= 0 && week < num_weeks(); }
};

// Parses the code-set config file. Sections: [icli], [clear_cause.<label>],
// [cancer_rule], [population.age_totals], [population.county_totals],
// [week_anchor], [study], [inference].
AnalysisConfig load_analysis_config(const std::string& path);
AnalysisConfig parse_analysis_config(const IniDoc& doc);

}  // namespace codes
}  // namespace prevbound
