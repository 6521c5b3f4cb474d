#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pforge/record.hpp"
#include "pforge/year_month.hpp"

namespace testing {

inline pforge::YearMonth ym(const char* text) { return *pforge::YearMonth::parse(text); }

inline pforge::Location city(const std::string& name, double lat, double lon) {
  return {name, pforge::GeoPoint{lat, lon}};
}

inline pforge::EmploymentEntry job(const std::string& position, const char* start, int months,
                                   const std::string& employer = "Acme",
                                   pforge::Location where = city("Springfield", 40.0, -89.0)) {
  pforge::EmploymentEntry e;
  e.employer = employer;
  e.location = std::move(where);
  e.position = position;
  e.start = ym(start);
  e.duration_months = months;
  e.tasks = {"work"};
  return e;
}

inline pforge::EducationEntry degree(const std::string& type, const char* start, int months,
                                     const std::string& institution = "State U",
                                     pforge::Location where = city("Springfield", 40.0, -89.0)) {
  pforge::EducationEntry e;
  e.institution = institution;
  e.location = std::move(where);
  e.field_of_study = "general";
  e.education_type = type;
  e.start = ym(start);
  e.duration_months = months;
  return e;
}

// Employment-only record whose jobs follow each other, one year each.
inline pforge::CvRecord career(const std::string& id, const std::vector<std::string>& positions,
                               const char* first_start = "2010-01") {
  pforge::CvRecord r;
  r.person_id = id;
  r.first_name = "First" + id;
  r.last_name = "Last" + id;
  r.country = "Testland";
  r.birth = ym("1985-01");
  auto start = ym(first_start);
  for (const auto& p : positions) {
    auto j = job(p, "2000-01", 12);
    j.start = start;
    start = start.plus_months(12);
    r.employment.push_back(j);
  }
  return r;
}

// The three-record corpus used throughout the hand computations:
// A [intern, engineer, manager], B [intern, engineer, engineer], C [engineer, manager].
inline std::vector<std::vector<std::string>> c3_sequences() {
  return {{"intern", "engineer", "manager"}, {"intern", "engineer", "engineer"}, {"engineer", "manager"}};
}

inline std::vector<pforge::CvRecord> c3_records() {
  std::vector<pforge::CvRecord> out;
  const char* ids[] = {"A", "B", "C"};
  const auto seqs = c3_sequences();
  for (std::size_t i = 0; i < seqs.size(); ++i) out.push_back(career(ids[i], seqs[i]));
  return out;
}

}  // namespace testing
