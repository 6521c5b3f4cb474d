#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pforge/model.hpp"
#include "pforge/record.hpp"
#include "pforge/rng.hpp"

namespace pforge::generator {

inline constexpr std::string_view kGeneratorVersion = "1.0.0";

struct GenerationOptions {
  std::optional<std::string> country;
  double radius_km = 100.0;
  int max_resample_attempts = 10;
  double timing_jitter_years = 1.0;
  bool include_extras = false;
  std::uint64_t seed = 0;

  // Throws INVALID_ARGUMENT when an invariant is broken.
  void validate() const;
};

struct SampledSequence {
  model::StateSequence states;
  bool short_sequence = false;  // every attempt hit a dead end early
  int attempts = 1;
};

// Walks the chain from a start-distribution draw. A walk that reaches a state
// without outgoing transitions before `length` restarts, up to max_attempts
// walks in total; the longest walk is returned flagged short otherwise.
// Throws EMPTY_MODEL.
SampledSequence sample_sequence(const model::TransitionModel& model, std::size_t length, Rng& rng,
                                int max_attempts = 10);

struct EmploymentDraw {
  std::vector<EmploymentEntry> entries;
  int radius_fallbacks = 0;
  bool short_sequence = false;
};

struct EducationDraw {
  std::vector<EducationEntry> entries;
  int radius_fallbacks = 0;
  bool short_sequence = false;
};

// Dates are laid out from `birth_anchor`; the first job starts
// first_job_age_years after it. Throws MISSING_ATTRIBUTES(position).
EmploymentDraw generate_employment(const model::ModelBundle& bundle, const GenerationOptions& opts,
                                   Rng& rng, YearMonth birth_anchor, double first_job_age_years);

// Radius checks run against the employment locations and the education
// locations already chosen. Education may overlap employment in time.
EducationDraw generate_education(const model::ModelBundle& bundle, const GenerationOptions& opts,
                                 Rng& rng, std::span<const Location> employment_locations,
                                 YearMonth birth_anchor);

// Average first-job age plus Uniform(-jitter, +jitter).
double draw_first_job_age(const model::TimingStats& timing, double jitter_years, Rng& rng);

struct AgeDerivation {
  YearMonth birth;
  double age_years = 0.0;
};

// age = summed employment years + first-job age; birth = first start minus
// the first-job age (rounded to whole months). Precondition: non-empty.
AgeDerivation derive_age(std::span<const EmploymentEntry> employment, double first_job_age_years);
AgeDerivation derive_age(std::span<const EmploymentEntry> employment, const model::TimingStats& timing,
                         double jitter_years, Rng& rng);

// Pure function of (bundle, opts). Throws UNKNOWN_COUNTRY.
GeneratedProfile generate_profile(const model::ModelBundle& bundle, const GenerationOptions& opts);

// Profile i uses seed split_seed(opts.seed, i).
std::vector<GeneratedProfile> generate_batch(const model::ModelBundle& bundle,
                                             const GenerationOptions& opts, std::size_t count,
                                             unsigned threads = 1);

// Vocabularies the random baseline draws from, uniformly.
struct BaselineVocabulary {
  std::vector<std::string> first_names;
  std::vector<std::string> last_names;
  std::vector<std::string> positions;
  std::vector<model::Placement> employers;
  std::vector<std::string> education_types;
  std::vector<model::Placement> institutions;

  static BaselineVocabulary from_bundle(const model::ModelBundle& bundle);
};

// Keeps dates, durations, country and record structure of `real`; replaces
// names, positions, employers, education types and institutions with
// uniform vocabulary draws.
CvRecord generate_random_baseline(const CvRecord& real, const BaselineVocabulary& vocab, Rng& rng);
CvRecord generate_random_baseline(const CvRecord& real, const model::ModelBundle& bundle, Rng& rng);

}  // namespace pforge::generator
