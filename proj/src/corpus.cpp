#include "pforge/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "pforge/error.hpp"

namespace pforge::corpus {
namespace {

template <typename Entry>
bool is_sorted_by_start(const std::vector<Entry>& entries) {
  return std::is_sorted(entries.begin(), entries.end(),
                        [](const Entry& a, const Entry& b) { return a.start < b.start; });
}

template <typename Entry>
bool has_start_tie(const std::vector<Entry>& entries) {
  std::set<YearMonth> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.start).second) return true;
  }
  return false;
}

// Returns false when the order cannot be repaired.
template <typename Entry>
bool fix_order(std::vector<Entry>& entries) {
  if (is_sorted_by_start(entries)) return true;
  if (has_start_tie(entries)) return false;
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.start < b.start; });
  return true;
}

double mean(double sum, std::size_t n) { return n == 0 ? 0.0 : sum / static_cast<double>(n); }

}  // namespace

ParseResult parse_corpus(std::istream& in) {
  auto parsed = interchange::parse_profiles(in);
  ParseResult result;
  result.errors = std::move(parsed.errors);
  result.records.reserve(parsed.profiles.size());
  for (auto& p : parsed.profiles) result.records.push_back(std::move(p.record));
  return result;
}

std::string_view reason_code(RejectReason reason) {
  switch (reason) {
    case RejectReason::MissingPosition: return "MISSING_POSITION";
    case RejectReason::MissingEducationType: return "MISSING_EDUCATION_TYPE";
    case RejectReason::AgeInconsistent: return "AGE_INCONSISTENT";
    case RejectReason::UnsortedDatesUnfixable: return "UNSORTED_DATES_UNFIXABLE";
  }
  return "UNKNOWN";
}

CleanResult clean_corpus(std::vector<CvRecord> records) {
  CleanResult result;
  for (auto& r : records) {
    std::optional<RejectReason> reason;
    const bool missing_position =
        r.employment.empty() ||
        std::any_of(r.employment.begin(), r.employment.end(),
                    [](const EmploymentEntry& e) { return e.position.empty(); });
    if (missing_position) {
      reason = RejectReason::MissingPosition;
    } else if (std::any_of(r.education.begin(), r.education.end(),
                           [](const EducationEntry& e) { return e.education_type.empty(); })) {
      reason = RejectReason::MissingEducationType;
    } else if (!fix_order(r.employment) || !fix_order(r.education)) {
      reason = RejectReason::UnsortedDatesUnfixable;
    } else if (r.birth) {
      const auto end = latest_employment_end(r);
      if (total_employment_months(r) > months_between(*r.birth, *end)) {
        reason = RejectReason::AgeInconsistent;
      }
    }
    if (reason) {
      result.rejected.push_back({r.person_id, *reason});
    } else {
      result.kept.push_back(std::move(r));
    }
  }
  return result;
}

void write_rejections(std::ostream& out, const std::vector<Rejection>& rejected) {
  for (const auto& r : rejected) {
    nlohmann::ordered_json j;
    j["person_id"] = r.person_id;
    j["reason"] = reason_code(r.reason);
    out << j.dump() << '\n';
  }
}

CorpusStats corpus_stats(const std::vector<CvRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus_stats needs at least one record");
  CorpusStats s;
  s.record_count = records.size();
  std::set<std::string> positions, types;
  double emp_periods = 0, edu_periods = 0, first_job = 0, first_edu = 0, emp_gap = 0, edu_gap = 0;
  std::size_t n_emp = 0, n_edu = 0, n_first_job = 0, n_first_edu = 0, n_emp_gap = 0, n_edu_gap = 0;
  for (const auto& r : records) {
    ++s.country_frequencies[r.country];
    for (const auto& e : r.employment) positions.insert(e.position);
    for (const auto& e : r.education) types.insert(e.education_type);
    if (!r.employment.empty()) {
      emp_periods += static_cast<double>(r.employment.size());
      ++n_emp;
      if (r.birth) {
        first_job += months_between(*r.birth, r.employment.front().start) / 12.0;
        ++n_first_job;
      }
    }
    if (!r.education.empty()) {
      edu_periods += static_cast<double>(r.education.size());
      ++n_edu;
      if (r.birth) {
        first_edu += months_between(*r.birth, r.education.front().start) / 12.0;
        ++n_first_edu;
      }
    }
    for (std::size_t i = 1; i < r.employment.size(); ++i) {
      emp_gap += months_between(r.employment[i - 1].start, r.employment[i].start);
      ++n_emp_gap;
    }
    for (std::size_t i = 1; i < r.education.size(); ++i) {
      edu_gap += months_between(r.education[i - 1].start, r.education[i].start);
      ++n_edu_gap;
    }
  }
  s.unique_positions = positions.size();
  s.unique_education_types = types.size();
  s.avg_employment_periods = mean(emp_periods, n_emp);
  s.avg_education_periods = mean(edu_periods, n_edu);
  s.avg_first_job_age_years = mean(first_job, n_first_job);
  s.avg_first_education_age_years = mean(first_edu, n_first_edu);
  s.avg_employment_gap_months = mean(emp_gap, n_emp_gap);
  s.avg_education_gap_months = mean(edu_gap, n_edu_gap);
  return s;
}

nlohmann::ordered_json stats_to_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["record_count"] = s.record_count;
  j["unique_positions"] = s.unique_positions;
  j["unique_education_types"] = s.unique_education_types;
  j["avg_employment_periods"] = s.avg_employment_periods;
  j["avg_education_periods"] = s.avg_education_periods;
  j["avg_first_job_age_years"] = s.avg_first_job_age_years;
  j["avg_first_education_age_years"] = s.avg_first_education_age_years;
  j["avg_employment_gap_months"] = s.avg_employment_gap_months;
  j["avg_education_gap_months"] = s.avg_education_gap_months;
  j["country_frequencies"] = s.country_frequencies;
  return j;
}

}  // namespace pforge::corpus
