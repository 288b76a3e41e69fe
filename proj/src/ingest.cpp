#include "prevbound/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "prevbound/rng.hpp"

namespace prevbound {
namespace ingest {

namespace {

void check_header(std::string_view line, std::string_view expected, const char* what) {
    if (line != expected)
        throw Error(Errc::schema_error, std::string(what) + " file must start with header '" +
                                            std::string(expected) + "', got '" +
                                            std::string(line) + "'");
}

}  // namespace

std::optional<std::string> normalize_dx_code(std::string_view raw) {
    std::string code;
    code.reserve(raw.size());
    for (char c : raw) {
        if (c == '.') continue;
        code.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    if (code.size() < 3) return std::nullopt;
    if (code[0] < 'A' || code[0] > 'Z') return std::nullopt;
    if (!std::isdigit(static_cast<unsigned char>(code[1])) ||
        !std::isdigit(static_cast<unsigned char>(code[2])))
        return std::nullopt;
    for (std::size_t i = 3; i < code.size(); ++i) {
        if (!std::isalnum(static_cast<unsigned char>(code[i]))) return std::nullopt;
    }
    return code;
}

ParseOutcome<TestRecord> parse_tests(std::string_view buf, StoreTables& tables) {
    ParseOutcome<TestRecord> out;
    bool saw_header = false;
    for_each_line(buf, [&](std::uint64_t line_no, std::string_view line) {
        if (line_no == 1) {
            check_header(line, "person_id,specimen_date,result", "tests");
            saw_header = true;
            return;
        }
        if (line.empty()) return;
        std::string_view f[4];
        std::size_t n = split_fields(line, ',', f, 4);
        if (n != 3) {
            out.rejects.push_back({line_no, "expected 3 fields"});
            return;
        }
        if (f[0].empty()) {
            out.rejects.push_back({line_no, "empty person_id"});
            return;
        }
        auto date = parse_date(f[1]);
        if (!date) {
            out.rejects.push_back({line_no, "bad date '" + std::string(f[1]) + "'"});
            return;
        }
        auto result = parse_test_result(f[2]);
        if (!result) {
            out.rejects.push_back({line_no, "bad result '" + std::string(f[2]) + "'"});
            return;
        }
        out.records.push_back({tables.people.intern(f[0]), *date, *result});
    });
    if (!saw_header) throw Error(Errc::schema_error, "tests file is empty (no header)");
    return out;
}

ParseOutcome<AdmissionRecord> parse_admissions(std::string_view buf, StoreTables& tables) {
    ParseOutcome<AdmissionRecord> out;
    bool saw_header = false;
    for_each_line(buf, [&](std::uint64_t line_no, std::string_view line) {
        if (line_no == 1) {
            check_header(line, "person_id,admit_time,discharge_time,dx_codes", "admissions");
            saw_header = true;
            return;
        }
        if (line.empty()) return;
        std::string_view f[5];
        std::size_t n = split_fields(line, ',', f, 5);
        if (n != 4) {
            out.rejects.push_back({line_no, "expected 4 fields"});
            return;
        }
        if (f[0].empty()) {
            out.rejects.push_back({line_no, "empty person_id"});
            return;
        }
        auto admit = parse_datetime(f[1]);
        if (!admit) {
            out.rejects.push_back({line_no, "bad admit_time '" + std::string(f[1]) + "'"});
            return;
        }
        AdmissionRecord rec;
        rec.person = tables.people.intern(f[0]);
        rec.admit_time = *admit;
        if (!f[2].empty()) {
            auto discharge = parse_datetime(f[2]);
            if (!discharge) {
                out.rejects.push_back({line_no, "bad discharge_time '" + std::string(f[2]) + "'"});
                return;
            }
            if (*discharge < *admit) {
                out.rejects.push_back({line_no, "discharge_time precedes admit_time"});
                return;
            }
            rec.discharge_time = *discharge;
        }
        // dx_codes: ';'-separated CODE[:A][:P]; empty field = no diagnosis info.
        bool bad = false;
        std::string_view dx = f[3];
        std::uint16_t position = 0;
        while (!dx.empty() && !bad) {
            std::size_t semi = dx.find(';');
            std::string_view entry = semi == std::string_view::npos ? dx : dx.substr(0, semi);
            dx = semi == std::string_view::npos ? std::string_view{} : dx.substr(semi + 1);
            if (entry.empty()) continue;
            DiagnosisEntry de;
            de.position = position++;
            std::size_t colon = entry.find(':');
            std::string_view code_part =
                colon == std::string_view::npos ? entry : entry.substr(0, colon);
            std::string_view flags =
                colon == std::string_view::npos ? std::string_view{} : entry.substr(colon + 1);
            while (!flags.empty()) {
                std::size_t c2 = flags.find(':');
                std::string_view flag =
                    c2 == std::string_view::npos ? flags : flags.substr(0, c2);
                flags = c2 == std::string_view::npos ? std::string_view{} : flags.substr(c2 + 1);
                if (flag == "A") {
                    de.is_admitting = true;
                } else if (flag == "P") {
                    de.is_primary_final = true;
                } else {
                    out.rejects.push_back(
                        {line_no, "bad diagnosis flag '" + std::string(flag) + "'"});
                    bad = true;
                    break;
                }
            }
            if (bad) break;
            auto code = normalize_dx_code(code_part);
            if (!code) {
                out.rejects.push_back(
                    {line_no, "bad ICD-10 code '" + std::string(code_part) + "'"});
                bad = true;
                break;
            }
            de.code = tables.dx_codes.intern(*code);
            rec.diagnoses.push_back(de);
        }
        if (!bad) out.records.push_back(std::move(rec));
    });
    if (!saw_header) throw Error(Errc::schema_error, "admissions file is empty (no header)");
    return out;
}

ParseOutcome<PersonRecord> parse_persons(std::string_view buf, StoreTables& tables) {
    ParseOutcome<PersonRecord> out;
    bool saw_header = false;
    for_each_line(buf, [&](std::uint64_t line_no, std::string_view line) {
        if (line_no == 1) {
            check_header(line, "person_id,age_group,sex,county", "persons");
            saw_header = true;
            return;
        }
        if (line.empty()) return;
        std::string_view f[5];
        std::size_t n = split_fields(line, ',', f, 5);
        if (n != 4) {
            out.rejects.push_back({line_no, "expected 4 fields"});
            return;
        }
        if (f[0].empty()) {
            out.rejects.push_back({line_no, "empty person_id"});
            return;
        }
        auto age = parse_age_group(f[1]);
        if (!age) {
            out.rejects.push_back({line_no, "bad age_group '" + std::string(f[1]) + "'"});
            return;
        }
        PersonRecord rec;
        rec.person = tables.people.intern(f[0]);
        rec.age_group = *age;
        if (!f[2].empty()) {
            auto sex = parse_sex(f[2]);
            if (!sex) {
                out.rejects.push_back({line_no, "bad sex '" + std::string(f[2]) + "'"});
                return;
            }
            rec.sex = *sex;
        }
        if (!f[3].empty()) rec.county = tables.counties.intern(f[3]);
        out.records.push_back(rec);
    });
    if (!saw_header) throw Error(Errc::schema_error, "persons file is empty (no header)");
    return out;
}

namespace {

struct AdmKey {
    PersonId person;
    Seconds admit_time;
    bool operator==(const AdmKey&) const = default;
};

struct AdmKeyHash {
    std::size_t operator()(const AdmKey& k) const {
        return static_cast<std::size_t>(
            mix(0x51ede2a7, k.person, static_cast<std::uint64_t>(k.admit_time)));
    }
};

// Content digest used to order tied candidates independently of input order.
std::uint64_t record_digest(const AdmissionRecord& r) {
    std::uint64_t h = 0x9ae16a3b2f90404fULL;
    h = mix(h, r.discharge_time ? static_cast<std::uint64_t>(*r.discharge_time) : 0x7f7f7f7fULL);
    for (const DiagnosisEntry& d : r.diagnoses) {
        h = mix(h, d.code, (static_cast<std::uint64_t>(d.is_admitting) << 1) | d.is_primary_final,
                d.position);
    }
    return h;
}

}  // namespace

std::vector<AdmissionRecord> dedup_admissions(std::vector<AdmissionRecord> raw,
                                              std::uint64_t seed, const StoreTables& tables) {
    std::unordered_map<AdmKey, std::vector<std::uint32_t>, AdmKeyHash> groups;
    groups.reserve(raw.size());
    for (std::uint32_t i = 0; i < raw.size(); ++i)
        groups[{raw[i].person, raw[i].admit_time}].push_back(i);

    std::vector<AdmissionRecord> out;
    out.reserve(groups.size());
    for (auto& [key, members] : groups) {
        std::size_t best_codes = 0;
        for (std::uint32_t idx : members)
            best_codes = std::max(best_codes, raw[idx].diagnoses.size());
        std::vector<std::uint32_t> tied;
        for (std::uint32_t idx : members)
            if (raw[idx].diagnoses.size() == best_codes) tied.push_back(idx);
        std::uint32_t survivor;
        if (tied.size() == 1) {
            survivor = tied[0];
        } else {
            // Canonical order by content digest, then a seeded draw keyed on
            // the persistent identity of the group.
            std::stable_sort(tied.begin(), tied.end(), [&](std::uint32_t a, std::uint32_t b) {
                return record_digest(raw[a]) < record_digest(raw[b]);
            });
            const std::string& pid = tables.people.name(key.person);
            std::uint64_t draw = mix(seed, fnv1a(pid.data(), pid.size()),
                                     static_cast<std::uint64_t>(key.admit_time));
            survivor = tied[draw % tied.size()];
        }
        out.push_back(std::move(raw[survivor]));
    }
    std::sort(out.begin(), out.end(), [&](const AdmissionRecord& a, const AdmissionRecord& b) {
        if (a.person != b.person)
            return tables.people.name(a.person) < tables.people.name(b.person);
        return a.admit_time < b.admit_time;
    });
    return out;
}

bool LinkedStore::tested_in(PersonId p, Day from, Day to, bool count_inconclusive) const {
    const PersonTests& t = tests[p];
    auto it = std::lower_bound(t.days.begin(), t.days.end(), from);
    for (; it != t.days.end() && *it <= to; ++it) {
        TestResult r = t.results[static_cast<std::size_t>(it - t.days.begin())];
        if (r != TestResult::inconclusive || count_inconclusive) return true;
    }
    return false;
}

bool LinkedStore::positive_in(PersonId p, Day from, Day to) const {
    const PersonTests& t = tests[p];
    auto it = std::lower_bound(t.days.begin(), t.days.end(), from);
    for (; it != t.days.end() && *it <= to; ++it) {
        if (t.results[static_cast<std::size_t>(it - t.days.begin())] == TestResult::positive)
            return true;
    }
    return false;
}

std::optional<Day> LinkedStore::first_admission_on_or_after(PersonId p, Day start) const {
    auto [begin, end] = admissions_of(p);
    for (std::size_t i = begin; i < end; ++i) {
        Day d = admissions[i].admit_date();
        if (d >= start) return d;
    }
    return std::nullopt;
}

std::pair<std::size_t, std::size_t> LinkedStore::admissions_of(PersonId p) const {
    if (p + 1 >= admission_begin_.size()) return {0, 0};
    return {admission_begin_[p], admission_begin_[p + 1]};
}

LinkedStore build_store(std::vector<PersonRecord> persons, std::vector<TestRecord> tests,
                        std::vector<AdmissionRecord> deduped_admissions, StoreTables tables) {
    LinkedStore store;
    store.tables = std::move(tables);
    std::size_t n_people = store.tables.people.size();

    store.demographics.assign(n_people, std::nullopt);
    for (PersonRecord& p : persons) store.demographics[p.person] = p;
    store.diag.persons_total = persons.size();

    // Group tests per person, collapse same-day repeats to the most positive
    // result (positive > negative > inconclusive).
    std::sort(tests.begin(), tests.end(), [](const TestRecord& a, const TestRecord& b) {
        if (a.person != b.person) return a.person < b.person;
        if (a.date != b.date) return a.date < b.date;
        return result_priority(a.result) > result_priority(b.result);
    });
    store.tests.assign(n_people, {});
    store.diag.tests_total = tests.size();
    for (std::size_t i = 0; i < tests.size();) {
        const TestRecord& t = tests[i];
        PersonTests& pt = store.tests[t.person];
        pt.days.push_back(t.date);
        pt.results.push_back(t.result);
        std::size_t j = i + 1;
        while (j < tests.size() && tests[j].person == t.person && tests[j].date == t.date) {
            ++store.diag.same_day_tests_collapsed;
            ++j;
        }
        i = j;
    }
    for (std::size_t p = 0; p < n_people; ++p) {
        if (!store.tests[p].days.empty() && !store.demographics[p])
            ++store.diag.tests_without_person_record;
    }

    // Admissions must be unique per (person, admit_time) at this point.
    std::sort(deduped_admissions.begin(), deduped_admissions.end(),
              [](const AdmissionRecord& a, const AdmissionRecord& b) {
                  if (a.person != b.person) return a.person < b.person;
                  return a.admit_time < b.admit_time;
              });
    for (std::size_t i = 1; i < deduped_admissions.size(); ++i) {
        if (deduped_admissions[i].person == deduped_admissions[i - 1].person &&
            deduped_admissions[i].admit_time == deduped_admissions[i - 1].admit_time)
            throw Error(Errc::duplicate_admission_key,
                        "duplicate (person_id, admit_time); run dedup_admissions first");
    }
    store.admissions = std::move(deduped_admissions);
    store.diag.admissions_total = store.admissions.size();

    store.admission_begin_.assign(n_people + 1, 0);
    for (const AdmissionRecord& a : store.admissions) store.admission_begin_[a.person + 1]++;
    for (std::size_t p = 1; p <= n_people; ++p)
        store.admission_begin_[p] += store.admission_begin_[p - 1];

    for (std::size_t p = 0; p < n_people; ++p) {
        auto [b, e] = store.admissions_of(static_cast<PersonId>(p));
        if (b != e && !store.demographics[p]) ++store.diag.admissions_without_person_record;
    }
    return store;
}

namespace {

void require_clean(const std::vector<RowIssue>& rejects, const std::string& path) {
    if (rejects.empty()) return;
    const RowIssue& first = rejects.front();
    throw Error(Errc::row_error,
                path + ": " + std::to_string(rejects.size()) + " bad row(s), first: " +
                    first.message,
                first.line);
}

}  // namespace

LinkedStore load_files(const std::string& persons_path, const std::string& tests_path,
                       const std::string& admissions_path, const LoadOptions& opt) {
    StoreTables tables;
    std::string persons_buf = read_file(persons_path);
    std::string tests_buf = read_file(tests_path);
    std::string admissions_buf = read_file(admissions_path);

    auto persons = parse_persons(persons_buf, tables);
    auto tests = parse_tests(tests_buf, tables);
    auto admissions = parse_admissions(admissions_buf, tables);
    if (opt.strict) {
        require_clean(persons.rejects, persons_path);
        require_clean(tests.rejects, tests_path);
        require_clean(admissions.rejects, admissions_path);
    }
    auto deduped = dedup_admissions(std::move(admissions.records), opt.seed, tables);
    return build_store(std::move(persons.records), std::move(tests.records), std::move(deduped),
                       std::move(tables));
}

}  // namespace ingest
}  // namespace prevbound
