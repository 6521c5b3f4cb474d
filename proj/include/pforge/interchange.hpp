#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "pforge/record.hpp"

namespace pforge::interchange {

struct LineError {
  std::size_t line_no = 0;  // 1-based
  std::string message;

  friend bool operator==(const LineError&, const LineError&) = default;
};

nlohmann::ordered_json location_to_json(const Location& location);
nlohmann::ordered_json record_to_json(const CvRecord& record);
nlohmann::ordered_json provenance_to_json(const Provenance& provenance);

// Schema-checked conversions; throw std::invalid_argument with a field path.
Location location_from_json(const nlohmann::json& j, const std::string& path = "$");
CvRecord record_from_json(const nlohmann::json& j);
Provenance provenance_from_json(const nlohmann::json& j);

// One compact line, no trailing newline.
std::string serialize_record(const CvRecord& record);
std::string serialize_profile(const GeneratedProfile& profile);

void write_records(std::ostream& out, const std::vector<CvRecord>& records);
void write_profiles(std::ostream& out, const std::vector<GeneratedProfile>& profiles);

// Reads generated-profile lines; records without a provenance object get a
// default one.
struct ProfileParseResult {
  std::vector<GeneratedProfile> profiles;
  std::vector<LineError> errors;
};
ProfileParseResult parse_profiles(std::istream& in);

using Gazetteer = std::map<std::string, GeoPoint>;

struct GazetteerParseResult {
  Gazetteer entries;
  std::vector<LineError> errors;
};
GazetteerParseResult parse_gazetteer(std::istream& in);

// Fills coordinates of unresolved locations whose name the gazetteer knows.
// Returns the number of locations resolved.
std::size_t apply_gazetteer(const Gazetteer& gazetteer, std::vector<CvRecord>& records);

}  // namespace pforge::interchange
