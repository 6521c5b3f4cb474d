#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pforge/year_month.hpp"

namespace pforge {

struct GeoPoint {
  double latitude = 0.0;   // [-90, 90]
  double longitude = 0.0;  // (-180, 180]

  friend auto operator<=>(const GeoPoint&, const GeoPoint&) = default;
};

bool valid_coordinates(double latitude, double longitude);

// A named place. Coordinates are absent when the corpus only carried a name
// that no gazetteer entry resolved.
struct Location {
  std::string name;
  std::optional<GeoPoint> point;

  bool resolved() const { return point.has_value(); }

  friend auto operator<=>(const Location&, const Location&) = default;
};

struct EmploymentEntry {
  std::string employer;
  Location location;
  std::string position;
  YearMonth start;
  int duration_months = 1;
  std::vector<std::string> tasks;

  YearMonth end() const { return start.plus_months(duration_months); }

  friend bool operator==(const EmploymentEntry&, const EmploymentEntry&) = default;
};

struct EducationEntry {
  std::string institution;
  Location location;
  std::string field_of_study;
  std::string education_type;
  YearMonth start;
  int duration_months = 1;

  YearMonth end() const { return start.plus_months(duration_months); }

  friend bool operator==(const EducationEntry&, const EducationEntry&) = default;
};

struct Extra {
  std::string category;
  std::string value;

  friend auto operator<=>(const Extra&, const Extra&) = default;
};

struct CvRecord {
  std::string person_id;
  std::string first_name;
  std::string last_name;
  std::string country;
  std::optional<YearMonth> birth;
  std::optional<Location> current_address;
  std::vector<EducationEntry> education;
  std::vector<EmploymentEntry> employment;
  std::vector<Extra> extras;

  friend bool operator==(const CvRecord&, const CvRecord&) = default;
};

// Attached to every generated record so a profile can be replayed and its
// fallback paths audited.
struct Provenance {
  std::uint64_t seed = 0;
  int bundle_format_version = 0;
  std::string generator_version;
  double age_years = 0.0;
  double first_job_age_years = 0.0;
  int employment_radius_fallbacks = 0;
  int education_radius_fallbacks = 0;
  bool short_employment_sequence = false;
  bool short_education_sequence = false;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct GeneratedProfile {
  CvRecord record;
  Provenance provenance;

  friend bool operator==(const GeneratedProfile&, const GeneratedProfile&) = default;
};

// Sum of employment durations in months.
int total_employment_months(const CvRecord& record);

// Age as the first-job age plus the summed employment years. Needs a birth
// date and at least one job.
std::optional<double> age_years(const CvRecord& record);

std::optional<YearMonth> latest_employment_end(const CvRecord& record);

}  // namespace pforge
