#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prevbound/csv.hpp"
#include "prevbound/domain.hpp"

namespace prevbound {
namespace ingest {

// Parsing the three input files, the admission dedup rule, and the linked
// in-memory store. Person identifiers from all three files intern into one
// shared table; ICD-10 codes intern into a separate table. Rows that fail
// validation are collected with their line numbers rather than aborting the
// whole parse; callers decide whether any reject is fatal.

struct StoreTables {
    IdTable people;
    IdTable counties;
    IdTable dx_codes;  // normalized: uppercased, dots stripped
};

template <typename T>
struct ParseOutcome {
    std::vector<T> records;
    std::vector<RowIssue> rejects;
};

// tests file: person_id,specimen_date,result
ParseOutcome<TestRecord> parse_tests(std::string_view buf, StoreTables& tables);

// admissions file: person_id,admit_time,discharge_time,dx_codes
// dx_codes: ';'-separated entries CODE[:A][:P], list order = priority order.
ParseOutcome<AdmissionRecord> parse_admissions(std::string_view buf, StoreTables& tables);

// persons file: person_id,age_group,sex,county (sex and county may be empty)
ParseOutcome<PersonRecord> parse_persons(std::string_view buf, StoreTables& tables);

// Normalizes an ICD-10 code (uppercase, strip dots) and checks the lexical
// pattern: letter, two digits, optional alphanumeric suffix.
std::optional<std::string> normalize_dx_code(std::string_view raw);

// Keeps one record per (person_id, admit_time): the one with the most
// diagnosis codes, ties resolved by a deterministic draw keyed on
// (seed, person_id string, admit_time) so reruns and input reorderings give
// the same survivor. Output is sorted by (person id string order, admit_time).
std::vector<AdmissionRecord> dedup_admissions(std::vector<AdmissionRecord> raw,
                                              std::uint64_t seed, const StoreTables& tables);

struct StoreDiagnostics {
    std::uint64_t tests_without_person_record = 0;
    std::uint64_t admissions_without_person_record = 0;
    std::uint64_t same_day_tests_collapsed = 0;
    std::uint64_t persons_total = 0;
    std::uint64_t tests_total = 0;
    std::uint64_t admissions_total = 0;
};

// Per-person test history: parallel arrays sorted by day, one entry per day
// (same-day repeats collapsed to the most positive result).
struct PersonTests {
    std::vector<Day> days;
    std::vector<TestResult> results;
};

class LinkedStore {
public:
    StoreTables tables;
    std::vector<std::optional<PersonRecord>> demographics;  // indexed by PersonId
    std::vector<PersonTests> tests;                         // indexed by PersonId
    std::vector<AdmissionRecord> admissions;                // deduped, sorted
    StoreDiagnostics diag;

    std::size_t num_people() const { return tables.people.size(); }

    AgeGroup age_of(PersonId p) const {
        return demographics[p] ? demographics[p]->age_group : AgeGroup::unknown;
    }

    // Any test / any positive test with day in [from, to] (closed interval).
    bool tested_in(PersonId p, Day from, Day to, bool count_inconclusive) const;
    bool positive_in(PersonId p, Day from, Day to) const;

    // First admission date per person (admit day), or nullopt.
    std::optional<Day> first_admission_on_or_after(PersonId p, Day start) const;

    // Admission index range [begin, end) for one person.
    std::pair<std::size_t, std::size_t> admissions_of(PersonId p) const;

private:
    friend LinkedStore build_store(std::vector<PersonRecord>, std::vector<TestRecord>,
                                   std::vector<AdmissionRecord>, StoreTables);
    std::vector<std::uint32_t> admission_begin_;  // per person, index into admissions
};

// Inputs must already be deduplicated; a duplicate (person, admit_time) key
// is an error here.
LinkedStore build_store(std::vector<PersonRecord> persons, std::vector<TestRecord> tests,
                        std::vector<AdmissionRecord> deduped_admissions, StoreTables tables);

struct LoadOptions {
    std::uint64_t seed = 0;
    // When true, any rejected row aborts the load with a RowError naming the
    // first offending line.
    bool strict = true;
};

// Convenience: read + parse + dedup + link the three files.
LinkedStore load_files(const std::string& persons_path, const std::string& tests_path,
                       const std::string& admissions_path, const LoadOptions& opt);

}  // namespace ingest
}  // namespace prevbound
