#include "pforge/interchange.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "pforge/error.hpp"

namespace pforge::interchange {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

const json& field(const json& obj, const char* name, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected object");
  const auto it = obj.find(name);
  if (it == obj.end()) schema_error(path + "." + name, "missing");
  return *it;
}

std::string string_field(const json& obj, const char* name, const std::string& path) {
  const auto& v = field(obj, name, path);
  if (!v.is_string()) schema_error(path + "." + name, "expected string");
  return v.get<std::string>();
}

YearMonth month_field(const json& obj, const char* name, const std::string& path) {
  const auto text = string_field(obj, name, path);
  const auto ym = YearMonth::parse(text);
  if (!ym) schema_error(path + "." + name, "expected YYYY-MM, got '" + text + "'");
  return *ym;
}

int duration_field(const json& obj, const std::string& path) {
  const auto& v = field(obj, "duration_months", path);
  if (!v.is_number_integer()) schema_error(path + ".duration_months", "expected integer");
  const auto d = v.get<std::int64_t>();
  if (d < 1 || d > 100000) schema_error(path + ".duration_months", "must be >= 1");
  return static_cast<int>(d);
}

const json& array_field(const json& obj, const char* name, const std::string& path) {
  const auto& v = field(obj, name, path);
  if (!v.is_array()) schema_error(path + "." + name, "expected array");
  return v;
}

}  // namespace

Location location_from_json(const json& j, const std::string& path) {
  Location loc;
  loc.name = string_field(j, "name", path);
  if (loc.name.empty()) schema_error(path + ".name", "must be non-empty");
  const auto lat = j.find("lat");
  const auto lon = j.find("lon");
  const bool has_lat = lat != j.end() && !lat->is_null();
  const bool has_lon = lon != j.end() && !lon->is_null();
  if (has_lat != has_lon) schema_error(path, "lat and lon must both be set or both null");
  if (has_lat) {
    if (!lat->is_number() || !lon->is_number()) schema_error(path, "lat/lon must be numbers");
    const double la = lat->get<double>();
    const double lo = lon->get<double>();
    if (!valid_coordinates(la, lo)) schema_error(path, "coordinates out of range");
    loc.point = GeoPoint{la, lo};
  }
  return loc;
}

ordered_json location_to_json(const Location& location) {
  ordered_json j;
  j["name"] = location.name;
  if (location.point) {
    j["lat"] = location.point->latitude;
    j["lon"] = location.point->longitude;
  } else {
    j["lat"] = nullptr;
    j["lon"] = nullptr;
  }
  return j;
}

ordered_json record_to_json(const CvRecord& record) {
  ordered_json j;
  j["person_id"] = record.person_id;
  j["first_name"] = record.first_name;
  j["last_name"] = record.last_name;
  j["country"] = record.country;
  j["birth"] = record.birth ? ordered_json(record.birth->to_string()) : ordered_json(nullptr);
  auto education = ordered_json::array();
  for (const auto& e : record.education) {
    ordered_json item;
    item["institution"] = e.institution;
    item["location"] = location_to_json(e.location);
    item["field_of_study"] = e.field_of_study;
    item["education_type"] = e.education_type;
    item["start"] = e.start.to_string();
    item["duration_months"] = e.duration_months;
    education.push_back(std::move(item));
  }
  j["education"] = std::move(education);
  auto employment = ordered_json::array();
  for (const auto& e : record.employment) {
    ordered_json item;
    item["employer"] = e.employer;
    item["location"] = location_to_json(e.location);
    item["position"] = e.position;
    item["start"] = e.start.to_string();
    item["duration_months"] = e.duration_months;
    item["tasks"] = e.tasks;
    employment.push_back(std::move(item));
  }
  j["employment"] = std::move(employment);
  auto extras = ordered_json::array();
  for (const auto& x : record.extras) {
    extras.push_back(ordered_json{{"category", x.category}, {"value", x.value}});
  }
  j["extras"] = std::move(extras);
  if (record.current_address) j["current_address"] = location_to_json(*record.current_address);
  return j;
}

ordered_json provenance_to_json(const Provenance& p) {
  ordered_json j;
  j["seed"] = p.seed;
  j["bundle_format_version"] = p.bundle_format_version;
  j["generator_version"] = p.generator_version;
  j["age_years"] = p.age_years;
  j["first_job_age_years"] = p.first_job_age_years;
  j["employment_radius_fallbacks"] = p.employment_radius_fallbacks;
  j["education_radius_fallbacks"] = p.education_radius_fallbacks;
  j["short_employment_sequence"] = p.short_employment_sequence;
  j["short_education_sequence"] = p.short_education_sequence;
  return j;
}

CvRecord record_from_json(const json& j) {
  if (!j.is_object()) schema_error("$", "expected object");
  CvRecord r;
  r.person_id = string_field(j, "person_id", "$");
  if (r.person_id.empty()) schema_error("$.person_id", "must be non-empty");
  r.first_name = string_field(j, "first_name", "$");
  r.last_name = string_field(j, "last_name", "$");
  r.country = string_field(j, "country", "$");
  const auto& birth = field(j, "birth", "$");
  if (!birth.is_null()) r.birth = month_field(j, "birth", "$");

  const auto& education = array_field(j, "education", "$");
  for (std::size_t i = 0; i < education.size(); ++i) {
    const auto path = "$.education[" + std::to_string(i) + "]";
    const auto& e = education[i];
    EducationEntry entry;
    entry.institution = string_field(e, "institution", path);
    entry.location = location_from_json(field(e, "location", path), path + ".location");
    entry.field_of_study = string_field(e, "field_of_study", path);
    entry.education_type = string_field(e, "education_type", path);
    entry.start = month_field(e, "start", path);
    entry.duration_months = duration_field(e, path);
    r.education.push_back(std::move(entry));
  }

  const auto& employment = array_field(j, "employment", "$");
  for (std::size_t i = 0; i < employment.size(); ++i) {
    const auto path = "$.employment[" + std::to_string(i) + "]";
    const auto& e = employment[i];
    EmploymentEntry entry;
    entry.employer = string_field(e, "employer", path);
    entry.location = location_from_json(field(e, "location", path), path + ".location");
    entry.position = string_field(e, "position", path);
    entry.start = month_field(e, "start", path);
    entry.duration_months = duration_field(e, path);
    const auto& tasks = array_field(e, "tasks", path);
    for (const auto& t : tasks) {
      if (!t.is_string()) schema_error(path + ".tasks", "expected strings");
      entry.tasks.push_back(t.get<std::string>());
    }
    r.employment.push_back(std::move(entry));
  }

  const auto& extras = array_field(j, "extras", "$");
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const auto path = "$.extras[" + std::to_string(i) + "]";
    r.extras.push_back(
        Extra{string_field(extras[i], "category", path), string_field(extras[i], "value", path)});
  }

  if (const auto it = j.find("current_address"); it != j.end() && !it->is_null()) {
    r.current_address = location_from_json(*it, "$.current_address");
  }
  return r;
}

Provenance provenance_from_json(const json& j) {
  if (!j.is_object()) schema_error("$.provenance", "expected object");
  Provenance p;
  try {
    p.seed = j.at("seed").get<std::uint64_t>();
    p.bundle_format_version = j.at("bundle_format_version").get<int>();
    p.generator_version = j.at("generator_version").get<std::string>();
    p.age_years = j.at("age_years").get<double>();
    p.first_job_age_years = j.at("first_job_age_years").get<double>();
    p.employment_radius_fallbacks = j.at("employment_radius_fallbacks").get<int>();
    p.education_radius_fallbacks = j.at("education_radius_fallbacks").get<int>();
    p.short_employment_sequence = j.at("short_employment_sequence").get<bool>();
    p.short_education_sequence = j.at("short_education_sequence").get<bool>();
  } catch (const json::exception& e) {
    schema_error("$.provenance", e.what());
  }
  return p;
}

std::string serialize_record(const CvRecord& record) { return record_to_json(record).dump(); }

std::string serialize_profile(const GeneratedProfile& profile) {
  auto j = record_to_json(profile.record);
  j["provenance"] = provenance_to_json(profile.provenance);
  return j.dump();
}

void write_records(std::ostream& out, const std::vector<CvRecord>& records) {
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

void write_profiles(std::ostream& out, const std::vector<GeneratedProfile>& profiles) {
  for (const auto& p : profiles) out << serialize_profile(p) << '\n';
}

ProfileParseResult parse_profiles(std::istream& in) {
  if (!in) throw Error(ErrorCode::Io, "profile stream is not readable");
  ProfileParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      GeneratedProfile p;
      p.record = record_from_json(j);
      if (const auto it = j.find("provenance"); it != j.end()) p.provenance = provenance_from_json(*it);
      result.profiles.push_back(std::move(p));
    } catch (const std::exception& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw Error(ErrorCode::Io, "read failure");
  return result;
}

GazetteerParseResult parse_gazetteer(std::istream& in) {
  if (!in) throw Error(ErrorCode::Io, "gazetteer stream is not readable");
  GazetteerParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto loc = location_from_json(json::parse(line), "$");
      if (!loc.point) schema_error("$", "gazetteer entries need coordinates");
      result.entries[loc.name] = *loc.point;
    } catch (const std::exception& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw Error(ErrorCode::Io, "read failure");
  return result;
}

std::size_t apply_gazetteer(const Gazetteer& gazetteer, std::vector<CvRecord>& records) {
  std::size_t resolved = 0;
  auto resolve = [&](Location& loc) {
    if (loc.point) return;
    const auto it = gazetteer.find(loc.name);
    if (it == gazetteer.end()) return;
    loc.point = it->second;
    ++resolved;
  };
  for (auto& r : records) {
    for (auto& e : r.education) resolve(e.location);
    for (auto& e : r.employment) resolve(e.location);
    if (r.current_address) resolve(*r.current_address);
  }
  return resolved;
}

}  // namespace pforge::interchange
