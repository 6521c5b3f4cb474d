#include "pforge/fixture.hpp"

#include <algorithm>
#include <map>

#include "json.hpp"
#include "pforge/interchange.hpp"
#include "pforge/rng.hpp"

namespace pforge::fixture {
namespace {

struct Weighted {
  const char* value;
  int weight;  // percent
};

using Chain = std::map<std::string, std::vector<Weighted>>;

// Careers climb one level per job and degrees one level per entry, so a
// state's index within its record is fixed by its level.
const std::vector<Weighted> kPositionStarts = {{"intern", 60}, {"qa analyst", 40}};

const Chain kPositionChain = {
    {"intern", {{"junior engineer", 70}, {"data analyst", 30}}},
    {"qa analyst", {{"junior engineer", 50}, {"data analyst", 50}}},
    {"junior engineer", {{"engineer", 80}, {"data scientist", 20}}},
    {"data analyst", {{"data scientist", 60}, {"engineer", 40}}},
    {"engineer", {{"senior engineer", 70}, {"consultant", 30}}},
    {"data scientist", {{"senior engineer", 40}, {"consultant", 60}}},
    {"senior engineer", {{"team lead", 60}, {"product manager", 40}}},
    {"consultant", {{"product manager", 60}, {"team lead", 40}}},
    {"team lead", {{"engineering manager", 70}, {"director", 30}}},
    {"product manager", {{"director", 60}, {"engineering manager", 40}}},
    {"engineering manager", {}},
    {"director", {}},
};

const std::vector<Weighted> kEducationStarts = {{"bachelor", 70}, {"associate", 30}};

const Chain kEducationChain = {
    {"associate", {{"certificate", 80}, {"master", 20}}},
    {"bachelor", {{"master", 60}, {"certificate", 40}}},
    {"master", {{"phd", 50}, {"mba", 50}}},
    {"certificate", {{"mba", 70}, {"phd", 30}}},
    {"phd", {}},
    {"mba", {}},
};

const std::map<std::string, std::vector<int>> kPositionDurations = {
    {"intern", {3, 6, 12}},
    {"junior engineer", {12, 18, 24, 30}},
    {"engineer", {24, 36, 48}},
    {"senior engineer", {24, 36, 48, 60}},
    {"team lead", {24, 36, 48}},
    {"engineering manager", {36, 48, 60}},
    {"qa analyst", {12, 24, 36}},
    {"data analyst", {12, 24, 36}},
    {"data scientist", {24, 36, 48}},
    {"product manager", {24, 36, 48}},
    {"consultant", {12, 24, 36}},
    {"director", {36, 48, 60, 72}},
};

const std::map<std::string, std::vector<std::string>> kPositionTasks = {
    {"intern", {"shadowing senior staff", "writing documentation", "fixing small bugs"}},
    {"junior engineer", {"implementing features", "writing unit tests", "code reviews"}},
    {"engineer", {"implementing features", "designing modules", "code reviews", "on-call support"}},
    {"senior engineer", {"system design", "mentoring", "code reviews", "performance tuning"}},
    {"team lead", {"sprint planning", "mentoring", "hiring", "system design"}},
    {"engineering manager", {"hiring", "budget planning", "performance reviews"}},
    {"qa analyst", {"test planning", "regression testing", "test automation"}},
    {"data analyst", {"reporting", "dashboard design", "sql queries"}},
    {"data scientist", {"model training", "feature engineering", "experiment design"}},
    {"product manager", {"roadmap planning", "stakeholder meetings", "requirements writing"}},
    {"consultant", {"client workshops", "requirements writing", "solution architecture"}},
    {"director", {"strategy", "budget planning", "hiring"}},
};

const std::map<std::string, std::vector<int>> kEducationDurations = {
    {"associate", {24}}, {"bachelor", {36}}, {"master", {12, 24}},
    {"mba", {12, 24}},   {"phd", {36, 48}}, {"certificate", {6, 12}},
};

const std::map<std::string, std::vector<std::string>> kEducationFields = {
    {"associate", {"computer technology", "business"}},
    {"bachelor", {"computer science", "mathematics", "economics", "physics"}},
    {"master", {"computer science", "statistics", "economics"}},
    {"mba", {"business administration"}},
    {"phd", {"computer science", "statistics", "physics"}},
    {"certificate", {"cloud computing", "project management", "data analytics"}},
};

struct Country {
  const char* name;
  const char* city;
  GeoPoint point;
  std::vector<std::string> first_names;
  std::vector<std::string> last_names;
  std::vector<std::string> employers;
  std::vector<std::string> institutions;
};

const std::vector<Country>& countries() {
  static const std::vector<Country> kCountries = {
      {"Northland", "Northport", kNorthport,
       {"Anna", "Erik", "Lena", "Jonas", "Mia", "Felix", "Clara", "Lukas", "Sofia", "Noah"},
       {"Berg", "Lind", "Holm", "Strand", "Dahl", "Wik", "Falk", "Nyberg", "Sand", "Ek"},
       {"Nordic Systems", "Fjord Analytics", "Harbor Soft", "Polar Consulting", "Aurora Labs"},
       {"Northport University", "Northport Institute of Technology", "Northport Community College"}},
      {"Southland", "Southport", kSouthport,
       {"Marco", "Giulia", "Luca", "Elena", "Paolo", "Chiara", "Dario", "Irene", "Nico", "Sara"},
       {"Rossi", "Bruno", "Conti", "Galli", "Marino", "Greco", "Ferri", "Serra", "Villa", "Costa"},
       {"Sole Tech", "Mare Data", "Porto Digital", "Olivo Consulting"},
       {"Southport University", "Southport Polytechnic", "Southport Business School"}},
  };
  return kCountries;
}

const std::vector<Extra> kExtras = {
    {"skill", "C++"},         {"skill", "Python"},           {"skill", "SQL"},
    {"skill", "Kubernetes"},  {"award", "employee of the year"}, {"award", "hackathon winner"},
    {"qualification", "PMP"}, {"qualification", "AWS certified"},
};

// Slot layouts: the period count of record i is kEmploymentSlots[i % 20] and
// kEducationSlots[(i / 20) % 10].
const std::vector<int> kEmploymentSlots = {1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 3, 4, 4, 4, 4, 5, 5, 6, 6};
const std::vector<int> kEducationSlots = {1, 1, 1, 1, 1, 2, 2, 2, 3, 3};

const std::string& pick(const std::vector<Weighted>& options, Rng& rng) {
  static thread_local std::string out;
  int target = static_cast<int>(rng.below(100));
  for (const auto& o : options) {
    if (target < o.weight) {
      out = o.value;
      return out;
    }
    target -= o.weight;
  }
  out = options.back().value;
  return out;
}

template <typename T>
const T& uniform(const std::vector<T>& v, Rng& rng) {
  return v[rng.below(v.size())];
}

std::vector<std::string> walk(const std::vector<Weighted>& starts, const Chain& chain, int length, Rng& rng) {
  std::vector<std::string> seq{pick(starts, rng)};
  while (static_cast<int>(seq.size()) < length) seq.push_back(pick(chain.at(seq.back()), rng));
  return seq;
}

std::string person_id(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "fx-%05zu", i + 1);
  return buf;
}

CvRecord make_record(std::size_t i, const Country& c, Rng& rng) {
  CvRecord r;
  r.person_id = person_id(i);
  r.first_name = uniform(c.first_names, rng);
  r.last_name = uniform(c.last_names, rng);
  r.country = c.name;
  const YearMonth birth = YearMonth::of(1960 + static_cast<int>(rng.below(36)), 1 + static_cast<int>(rng.below(12)));
  r.birth = birth;
  const Location city{c.city, c.point};

  const int n_edu = kEducationSlots[(i / kEmploymentSlots.size()) % kEducationSlots.size()];
  YearMonth start = birth.plus_months(210 + static_cast<int>(rng.below(13)));  // age 17.5 .. 18.5
  for (const auto& type : walk(kEducationStarts, kEducationChain, n_edu, rng)) {
    EducationEntry e;
    e.institution = uniform(c.institutions, rng);
    e.location = city;
    e.education_type = type;
    e.field_of_study = uniform(kEducationFields.at(type), rng);
    e.start = start;
    e.duration_months = uniform(kEducationDurations.at(type), rng);
    start = start.plus_months(e.duration_months + static_cast<int>(rng.below(4)));
    r.education.push_back(std::move(e));
  }

  const int n_emp = kEmploymentSlots[i % kEmploymentSlots.size()];
  // Age 26.5 .. 28.5, after every degree has started.
  start = birth.plus_months(318 + static_cast<int>(rng.below(25)));
  for (const auto& position : walk(kPositionStarts, kPositionChain, n_emp, rng)) {
    EmploymentEntry e;
    e.employer = uniform(c.employers, rng);
    e.location = city;
    e.position = position;
    e.start = start;
    e.duration_months = uniform(kPositionDurations.at(position), rng);
    const auto& tasks = kPositionTasks.at(position);
    const int n_tasks = 1 + static_cast<int>(rng.below(2));
    std::vector<std::string> pool = tasks;
    for (int t = 0; t < n_tasks && !pool.empty(); ++t) {
      const auto k = rng.below(pool.size());
      e.tasks.push_back(pool[k]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
    start = start.plus_months(e.duration_months);
    r.employment.push_back(std::move(e));
  }
  r.current_address = r.employment.back().location;

  const int n_extras = static_cast<int>(rng.below(3));
  for (int x = 0; x < n_extras; ++x) r.extras.push_back(uniform(kExtras, rng));
  return r;
}

}  // namespace

std::vector<CvRecord> build_fixture(const FixtureOptions& opts) {
  Rng rng(opts.seed);
  // Exactly 70% Northland, shuffled so country is independent of the slots.
  std::vector<int> country_of(opts.count, 1);
  std::fill(country_of.begin(), country_of.begin() + static_cast<std::ptrdiff_t>(opts.count * 7 / 10), 0);
  for (std::size_t i = country_of.size(); i > 1; --i) std::swap(country_of[i - 1], country_of[rng.below(i)]);

  std::vector<CvRecord> records;
  records.reserve(opts.count);
  for (std::size_t i = 0; i < opts.count; ++i) {
    Rng record_rng(split_seed(opts.seed, i));
    records.push_back(make_record(i, countries()[country_of[i]], record_rng));
  }
  return records;
}

DirtyFixture build_dirty_fixture(const FixtureOptions& opts, std::size_t per_reason, std::size_t corrupted) {
  auto records = build_fixture(opts);
  DirtyFixture out;
  using corpus::RejectReason;
  const RejectReason reasons[] = {RejectReason::MissingPosition, RejectReason::MissingEducationType,
                                  RejectReason::AgeInconsistent, RejectReason::UnsortedDatesUnfixable};

  // Victims are spread over the corpus; every fifth record from index 3.
  std::size_t cursor = 3;
  auto next_victim = [&](auto accept) -> CvRecord& {
    while (!accept(records[cursor])) cursor += 5;
    auto& r = records[cursor];
    cursor += 5;
    return r;
  };
  for (const auto reason : reasons) {
    for (std::size_t k = 0; k < per_reason; ++k) {
      CvRecord* r = nullptr;
      switch (reason) {
        case RejectReason::MissingPosition:
          r = &next_victim([](const CvRecord&) { return true; });
          r->employment.back().position.clear();
          break;
        case RejectReason::MissingEducationType:
          r = &next_victim([](const CvRecord& c) { return !c.education.empty(); });
          r->education.front().education_type.clear();
          break;
        case RejectReason::AgeInconsistent: {
          // Summed employment exceeds the time from birth to the last job's
          // end by five years, like a 30-year-old with 35 years of work.
          r = &next_victim([](const CvRecord&) { return true; });
          const int total = total_employment_months(*r);
          r->employment.back().duration_months += 60 + 12 * 30;
          r->birth = latest_employment_end(*r)->plus_months(-(total + 12 * 30));
          break;
        }
        case RejectReason::UnsortedDatesUnfixable:
          // Out of order, and the tie on the first two starts leaves no single order to restore.
          r = &next_victim([](const CvRecord& c) { return c.employment.size() >= 3; });
          std::swap(r->employment[0], r->employment[2]);
          r->employment[1].start = r->employment[0].start;
          break;
      }
      out.planted.push_back({r->person_id, reason});
    }
  }
  for (int k = 0; k < 2; ++k) {
    auto& r = next_victim([](const CvRecord& c) { return c.employment.size() >= 3; });
    std::swap(r.employment[0], r.employment[2]);
    out.fixable_unsorted.push_back(r.person_id);
  }

  for (const auto& r : records) out.lines.push_back(interchange::serialize_record(r));
  const char* garbage[] = {
      R"({"person_id": "broken-1", "first_name": "Trunc)",
      R"({"person_id": "broken-2", "first_name": "A", "last_name": "B", "country": "Northland", "education": [], "employment": [], "extras": []})",
      R"({"person_id": "broken-3", "first_name": "A", "last_name": "B", "country": "Northland", "birth": "1980-13", "education": [], "employment": [], "extras": []})",
  };
  for (std::size_t k = 0; k < corrupted; ++k) {
    const std::size_t line = 1 + (17 + 61 * k) % out.lines.size();
    out.lines[line - 1] = garbage[k % 3];
    out.corrupted_lines.push_back(line);
  }
  std::sort(out.corrupted_lines.begin(), out.corrupted_lines.end());
  // A corrupted line may have replaced a planted record; drop those from the plant list.
  std::vector<PlantedViolation> kept;
  for (const auto& p : out.planted) {
    const bool overwritten = std::any_of(out.corrupted_lines.begin(), out.corrupted_lines.end(),
                                         [&](std::size_t line) { return out.lines[line - 1].find(p.person_id) == std::string::npos &&
                                                                        records[line - 1].person_id == p.person_id; });
    if (!overwritten) kept.push_back(p);
  }
  out.planted = std::move(kept);
  return out;
}

std::vector<std::string> gazetteer_lines() {
  std::vector<std::string> lines;
  for (const auto& c : countries()) {
    lines.push_back(nlohmann::ordered_json{{"name", c.city}, {"lat", c.point.latitude}, {"lon", c.point.longitude}}.dump());
  }
  return lines;
}

}  // namespace pforge::fixture
