#include "pforge/record.hpp"

#include <algorithm>

namespace pforge {

bool valid_coordinates(double latitude, double longitude) {
  return latitude >= -90.0 && latitude <= 90.0 && longitude > -180.0 && longitude <= 180.0;
}

int total_employment_months(const CvRecord& record) {
  int total = 0;
  for (const auto& job : record.employment) total += job.duration_months;
  return total;
}

std::optional<double> age_years(const CvRecord& record) {
  if (!record.birth || record.employment.empty()) return std::nullopt;
  const auto first = std::min_element(
      record.employment.begin(), record.employment.end(),
      [](const EmploymentEntry& a, const EmploymentEntry& b) { return a.start < b.start; });
  const int first_job_age_months = months_between(*record.birth, first->start);
  return (first_job_age_months + total_employment_months(record)) / 12.0;
}

std::optional<YearMonth> latest_employment_end(const CvRecord& record) {
  std::optional<YearMonth> latest;
  for (const auto& job : record.employment) {
    if (!latest || job.end() > *latest) latest = job.end();
  }
  return latest;
}

}  // namespace pforge
