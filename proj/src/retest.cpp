#include "prevbound/retest.hpp"

#include <algorithm>
#include <cmath>

namespace prevbound {
namespace retest {

ExtractResult extract_retest_events(const ingest::LinkedStore& store,
                                    const ExtractOptions& opt) {
    ExtractResult out;
    for (PersonId p = 0; p < store.num_people(); ++p) {
        const ingest::PersonTests& t = store.tests[p];
        for (std::size_t i = 0; i + 1 < t.days.size(); ++i) {
            if (t.days[i + 1] != t.days[i] + 1) continue;
            if (i > 0 && t.days[i - 1] == t.days[i] - 1) continue;  // tested on t-1
            TestResult r1 = t.results[i];
            TestResult r2 = t.results[i + 1];
            if (r1 == TestResult::inconclusive || r2 == TestResult::inconclusive) {
                if (opt.drop_inconclusive) {
                    ++out.dropped_inconclusive;
                    continue;
                }
            }
            out.events.push_back({p, t.days[i], r1 == TestResult::positive,
                                  r2 == TestResult::positive});
        }
    }
    return out;
}

RetestSummary summarize(const std::vector<RetestEvent>& events) {
    RetestSummary s;
    for (const RetestEvent& e : events) {
        if (e.r1_positive && e.r2_positive) ++s.n11;
        else if (e.r1_positive) ++s.n10;
        else if (e.r2_positive) ++s.n01;
        else ++s.n00;
    }
    return s;
}

FnEstimate estimate_fn_bound(const RetestSummary& s) {
    if (s.n11 == 0)
        throw Error(Errc::degenerate_summary,
                    "no concordant positives; false-negative rate is unidentified");
    double p11 = s.p11();
    double p10s = (s.p10() + s.p01()) / 2.0;
    double p00 = s.p00();

    FnEstimate e;
    e.fn_rate = p10s / (p11 + p10s);
    e.implied_prevalence = (p11 + p10s) * (p11 + p10s) / p11;
    if (e.implied_prevalence > 1.0) {
        e.implied_prevalence = 1.0;
        e.prevalence_clamped = true;
    }
    double pr_first_negative = p10s + p00;  // symmetrized Pr(r1 = 0)
    if (e.fn_rate == 0.0 || pr_first_negative == 0.0) {
        e.one_minus_npv = 0.0;
    } else {
        e.one_minus_npv =
            std::min(1.0, e.implied_prevalence * e.fn_rate / pr_first_negative);
    }
    return e;
}

double exact_binomial_two_sided_half(std::int64_t k, std::int64_t n) {
    // Central two-sided p-value: 2 * min tail, capped at 1. At p = 1/2 the
    // pmf is symmetric, so this equals the usual minlike definition.
    std::int64_t lo = std::min(k, n - k);
    // log C(n, i) - n log 2, accumulated over the lower tail.
    double log_half_n = -static_cast<double>(n) * std::log(2.0);
    double tail = 0.0;
    double log_choose = 0.0;  // log C(n, 0)
    for (std::int64_t i = 0;; ++i) {
        tail += std::exp(log_choose + log_half_n);
        if (i >= lo) break;
        log_choose += std::log(static_cast<double>(n - i)) -
                      std::log(static_cast<double>(i + 1));
    }
    double p = 2.0 * tail;
    // When n is even and k = n/2 both tails share the central term.
    return std::min(1.0, p);
}

SymmetryResult symmetry_diagnostic(const RetestSummary& s, double alpha) {
    std::int64_t n = s.n10 + s.n01;
    if (n == 0)
        throw Error(Errc::no_discordant_pairs, "no discordant retest pairs to compare");
    SymmetryResult out;
    out.n_discordant = n;
    out.p_value = exact_binomial_two_sided_half(s.n10, n);
    if (out.p_value < alpha) {
        out.verdict = RetestVerdict::non_random_retesting;
        out.direction = s.n01 > s.n10 ? "negative-then-positive more common"
                                      : "positive-then-negative more common";
    } else {
        out.verdict = RetestVerdict::random_retesting_consistent;
    }
    return out;
}

}  // namespace retest
}  // namespace prevbound
