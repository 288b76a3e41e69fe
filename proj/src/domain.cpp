#include "prevbound/domain.hpp"

#include <cctype>
#include <cmath>

#include "prevbound/rng.hpp"

namespace prevbound {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

}  // namespace

std::optional<TestResult> parse_test_result(std::string_view s) {
    if (iequals(s, "positive")) return TestResult::positive;
    if (iequals(s, "negative")) return TestResult::negative;
    if (iequals(s, "inconclusive")) return TestResult::inconclusive;
    return std::nullopt;
}

const char* test_result_name(TestResult r) {
    switch (r) {
        case TestResult::positive: return "positive";
        case TestResult::negative: return "negative";
        case TestResult::inconclusive: return "inconclusive";
    }
    return "?";
}

std::optional<AgeGroup> parse_age_group(std::string_view s) {
    if (s == "0-17") return AgeGroup::a0_17;
    if (s == "18-30") return AgeGroup::a18_30;
    if (s == "30-50") return AgeGroup::a30_50;
    if (s == "50-64") return AgeGroup::a50_64;
    if (s == "65-74") return AgeGroup::a65_74;
    if (s == "75+") return AgeGroup::a75_plus;
    return std::nullopt;
}

const char* age_group_name(AgeGroup g) {
    switch (g) {
        case AgeGroup::a0_17: return "0-17";
        case AgeGroup::a18_30: return "18-30";
        case AgeGroup::a30_50: return "30-50";
        case AgeGroup::a50_64: return "50-64";
        case AgeGroup::a65_74: return "65-74";
        case AgeGroup::a75_plus: return "75+";
        case AgeGroup::unknown: return "unknown";
    }
    return "?";
}

std::optional<Sex> parse_sex(std::string_view s) {
    if (iequals(s, "f") || iequals(s, "female")) return Sex::female;
    if (iequals(s, "m") || iequals(s, "male")) return Sex::male;
    if (iequals(s, "other") || iequals(s, "x")) return Sex::other;
    return std::nullopt;
}

CellCounts validate_cell(CellCounts c) {
    if (c.n_pop < 0 || c.n_tested < 0 || c.n_positive < 0)
        throw Error(Errc::negative_count, "cell counts must be nonnegative");
    if (c.n_positive > c.n_tested)
        throw Error(Errc::ordering_violation,
                    "n_positive (" + std::to_string(c.n_positive) + ") exceeds n_tested (" +
                        std::to_string(c.n_tested) + ")");
    if (c.n_tested > c.n_pop)
        throw Error(Errc::ordering_violation,
                    "n_tested (" + std::to_string(c.n_tested) + ") exceeds n_pop (" +
                        std::to_string(c.n_pop) + ")");
    return c;
}

ErrorBand validate_band(ErrorBand b) {
    if (!(b.lambda_lower >= 0.0) || !(b.lambda_upper <= 1.0) ||
        !(b.lambda_lower <= b.lambda_upper))
        throw Error(Errc::invalid_probability,
                    "error band must satisfy 0 <= lambda_l <= lambda_u <= 1");
    return b;
}

const char* regime_name(RegimeKind k) {
    switch (k) {
        case RegimeKind::worst_case: return "worst";
        case RegimeKind::test_monotone: return "monotone";
        case RegimeKind::test_monotone_hosp_monotone: return "hosp-monotone";
        case RegimeKind::test_monotone_hosp_independent: return "hosp-independent";
    }
    return "?";
}

std::optional<RegimeKind> parse_regime(std::string_view s) {
    if (s == "worst") return RegimeKind::worst_case;
    if (s == "monotone") return RegimeKind::test_monotone;
    if (s == "hosp-monotone") return RegimeKind::test_monotone_hosp_monotone;
    if (s == "hosp-independent") return RegimeKind::test_monotone_hosp_independent;
    return std::nullopt;
}

AgeWeights validate_weights(AgeWeights w) {
    double sum = 0.0;
    for (double v : w.share) {
        if (!(v >= 0.0)) throw Error(Errc::bad_age_weights, "age weights must be nonnegative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw Error(Errc::bad_age_weights,
                    "age weights sum to " + std::to_string(sum) + ", expected 1");
    return w;
}

void IdTable::grow() {
    std::size_t cap = slots_.empty() ? 1024 : slots_.size() * 2;
    std::vector<Slot> fresh(cap, Slot{0, kNoId});
    mask_ = cap - 1;
    for (const Slot& s : slots_) {
        if (s.id == kNoId) continue;
        std::size_t i = s.hash & mask_;
        while (fresh[i].id != kNoId) i = (i + 1) & mask_;
        fresh[i] = s;
    }
    slots_ = std::move(fresh);
}

std::uint32_t IdTable::intern(std::string_view s) {
    if (names_.size() + 1 > slots_.size() * 7 / 10) grow();
    std::uint64_t h = fnv1a(s.data(), s.size());
    std::size_t i = h & mask_;
    while (slots_[i].id != kNoId) {
        if (slots_[i].hash == h && names_[slots_[i].id] == s) return slots_[i].id;
        i = (i + 1) & mask_;
    }
    std::uint32_t id = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(s);
    slots_[i] = Slot{h, id};
    return id;
}

std::optional<std::uint32_t> IdTable::find(std::string_view s) const {
    if (slots_.empty()) return std::nullopt;
    std::uint64_t h = fnv1a(s.data(), s.size());
    std::size_t i = h & mask_;
    while (slots_[i].id != kNoId) {
        if (slots_[i].hash == h && names_[slots_[i].id] == s) return slots_[i].id;
        i = (i + 1) & mask_;
    }
    return std::nullopt;
}

}  // namespace prevbound
