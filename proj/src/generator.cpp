#include "pforge/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "pforge/error.hpp"
#include "pforge/geo.hpp"
#include "pforge/parallel.hpp"

namespace pforge::generator {
namespace {

using model::ModelBundle;
using model::Placement;

int round_months(double years) { return static_cast<int>(std::lround(years * 12.0)); }

double jitter(double jitter_years, Rng& rng) {
  return jitter_years == 0.0 ? 0.0 : rng.uniform(-jitter_years, jitter_years);
}

// Chooses a placement within the radius of `chosen`. `previous` is excluded
// from the draw when it is set and alternatives exist. After the initial
// draw and max_resample_attempts redraws all fail, the drawn candidate
// nearest the centroid of `chosen` wins.
struct PlacementChoice {
  Placement placement;
  bool fallback = false;
};

PlacementChoice choose_placement(const FrequencyTable<Placement>& table, const Placement* previous,
                                 std::span<const Location> chosen, const GenerationOptions& opts,
                                 Rng& rng) {
  std::vector<const Placement*> candidates;
  for (int attempt = 0; attempt <= opts.max_resample_attempts; ++attempt) {
    const Placement& candidate = table.sample_excluding(rng, previous);
    if (geo::radius_check(chosen, candidate.location, opts.radius_km)) return {candidate, false};
    candidates.push_back(&candidate);
  }
  const auto center = geo::centroid(chosen);
  const Placement* best = candidates.front();
  if (center) {
    double best_distance = std::numeric_limits<double>::infinity();
    for (const auto* c : candidates) {
      const double d = geo::distance_km(*center, *c->location.point);
      if (d < best_distance) {
        best_distance = d;
        best = c;
      }
    }
  }
  return {*best, true};
}

// Weighted draw of up to k distinct keys.
std::vector<std::string> sample_distinct(const FrequencyTable<std::string>& table, int k, Rng& rng) {
  std::vector<std::pair<std::string, std::uint64_t>> pool(table.counts().begin(), table.counts().end());
  std::uint64_t total = table.total();
  std::vector<std::string> out;
  while (static_cast<int>(out.size()) < k && !pool.empty()) {
    std::uint64_t target = rng.below(total);
    auto it = pool.begin();
    while (target >= it->second) {
      target -= it->second;
      ++it;
    }
    out.push_back(it->first);
    total -= it->second;
    pool.erase(it);
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <typename T>
const T& uniform_pick(const std::vector<T>& values, Rng& rng) {
  return values[rng.below(values.size())];
}

}  // namespace

void GenerationOptions::validate() const {
  if (!(radius_km > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius_km must be > 0");
  if (max_resample_attempts < 1) throw Error(ErrorCode::InvalidArgument, "max_resample_attempts must be >= 1");
  if (!(timing_jitter_years >= 0.0)) throw Error(ErrorCode::InvalidArgument, "timing_jitter_years must be >= 0");
}

SampledSequence sample_sequence(const model::TransitionModel& model, std::size_t length, Rng& rng,
                                int max_attempts) {
  if (model.empty() || model.starts().empty()) throw Error(ErrorCode::EmptyModel, "transition model has no states");
  if (length == 0) throw Error(ErrorCode::InvalidArgument, "sequence length must be >= 1");
  SampledSequence best;
  for (int attempt = 1; attempt <= std::max(1, max_attempts); ++attempt) {
    model::StateSequence walk{model.starts().sample(rng)};
    while (walk.size() < length) {
      const auto* row = model.row(walk.back());
      if (row == nullptr || row->empty()) break;
      walk.push_back(row->sample(rng));
    }
    if (walk.size() == length) return {std::move(walk), false, attempt};
    if (walk.size() > best.states.size()) best.states = std::move(walk);
    best.attempts = attempt;
  }
  best.short_sequence = true;
  return best;
}

EmploymentDraw generate_employment(const ModelBundle& bundle, const GenerationOptions& opts, Rng& rng,
                                   YearMonth birth_anchor, double first_job_age_years) {
  const auto& attrs = bundle.attributes;
  if (attrs.employment_period_counts.empty()) {
    throw Error(ErrorCode::EmptyModel, "no employment period distribution");
  }
  const int periods = std::max(1, attrs.employment_period_counts.sample(rng));
  auto seq = sample_sequence(bundle.employment_model, static_cast<std::size_t>(periods), rng,
                             opts.max_resample_attempts);

  EmploymentDraw draw;
  draw.short_sequence = seq.short_sequence;
  std::vector<Location> chosen;
  const double gap = attrs.timing.avg_employment_gap_months();
  YearMonth start = birth_anchor.plus_months(round_months(first_job_age_years));
  for (std::size_t i = 0; i < seq.states.size(); ++i) {
    const auto& position = seq.states[i];
    const auto it = attrs.per_position.find(position);
    if (it == attrs.per_position.end() || it->second.employers.empty() || it->second.durations.empty()) {
      throw Error(ErrorCode::MissingAttributes, position);
    }
    const auto& pa = it->second;
    Placement previous;
    const bool repeat = i > 0 && seq.states[i - 1] == position;
    if (repeat) previous = {draw.entries.back().employer, draw.entries.back().location};
    auto choice = choose_placement(pa.employers, repeat ? &previous : nullptr, chosen, opts, rng);
    if (choice.fallback) ++draw.radius_fallbacks;

    EmploymentEntry entry;
    entry.employer = choice.placement.name;
    entry.location = choice.placement.location;
    entry.position = position;
    entry.duration_months = pa.durations.sample(rng);
    const int task_count = pa.task_counts.empty() ? 0 : pa.task_counts.sample(rng);
    entry.tasks = sample_distinct(pa.tasks, task_count, rng);
    if (i > 0) {
      const int step = static_cast<int>(std::lround(gap + 12.0 * jitter(opts.timing_jitter_years, rng)));
      start = start.plus_months(std::max(1, step));
    }
    entry.start = start;
    chosen.push_back(entry.location);
    draw.entries.push_back(std::move(entry));
  }
  return draw;
}

EducationDraw generate_education(const ModelBundle& bundle, const GenerationOptions& opts, Rng& rng,
                                 std::span<const Location> employment_locations, YearMonth birth_anchor) {
  const auto& attrs = bundle.attributes;
  EducationDraw draw;
  if (attrs.education_period_counts.empty()) return draw;
  const int periods = attrs.education_period_counts.sample(rng);
  if (periods <= 0) return draw;
  auto seq = sample_sequence(bundle.education_model, static_cast<std::size_t>(periods), rng,
                             opts.max_resample_attempts);
  draw.short_sequence = seq.short_sequence;

  std::vector<Location> chosen(employment_locations.begin(), employment_locations.end());
  const double gap = attrs.timing.avg_education_gap_months();
  const double first_age =
      attrs.timing.avg_first_education_age_years() + jitter(opts.timing_jitter_years, rng);
  YearMonth start = birth_anchor.plus_months(round_months(first_age));
  for (std::size_t i = 0; i < seq.states.size(); ++i) {
    const auto& type = seq.states[i];
    const auto it = attrs.per_education_type.find(type);
    if (it == attrs.per_education_type.end() || it->second.institutions.empty() ||
        it->second.durations.empty() || it->second.fields.empty()) {
      throw Error(ErrorCode::MissingAttributes, type);
    }
    const auto& ea = it->second;
    Placement previous;
    const bool repeat = i > 0 && seq.states[i - 1] == type;
    if (repeat) previous = {draw.entries.back().institution, draw.entries.back().location};
    auto choice = choose_placement(ea.institutions, repeat ? &previous : nullptr, chosen, opts, rng);
    if (choice.fallback) ++draw.radius_fallbacks;

    EducationEntry entry;
    entry.institution = choice.placement.name;
    entry.location = choice.placement.location;
    entry.education_type = type;
    entry.field_of_study = ea.fields.sample(rng);
    entry.duration_months = ea.durations.sample(rng);
    if (i > 0) {
      const int step = static_cast<int>(std::lround(gap + 12.0 * jitter(opts.timing_jitter_years, rng)));
      start = start.plus_months(std::max(1, step));
    }
    entry.start = start;
    chosen.push_back(entry.location);
    draw.entries.push_back(std::move(entry));
  }
  return draw;
}

double draw_first_job_age(const model::TimingStats& timing, double jitter_years, Rng& rng) {
  return timing.avg_first_job_age_years() + jitter(jitter_years, rng);
}

AgeDerivation derive_age(std::span<const EmploymentEntry> employment, double first_job_age_years) {
  if (employment.empty()) throw Error(ErrorCode::InvalidArgument, "derive_age needs at least one job");
  int months = 0;
  YearMonth first = employment.front().start;
  for (const auto& e : employment) {
    months += e.duration_months;
    first = std::min(first, e.start);
  }
  return {first.plus_months(-round_months(first_job_age_years)), months / 12.0 + first_job_age_years};
}

AgeDerivation derive_age(std::span<const EmploymentEntry> employment, const model::TimingStats& timing,
                         double jitter_years, Rng& rng) {
  return derive_age(employment, draw_first_job_age(timing, jitter_years, rng));
}

GeneratedProfile generate_profile(const ModelBundle& bundle, const GenerationOptions& opts) {
  opts.validate();
  const auto& attrs = bundle.attributes;
  Rng rng(opts.seed);

  std::string country;
  if (opts.country) {
    country = *opts.country;
  } else if (const auto top = attrs.country_freq.argmax()) {
    country = *top;
  }
  const auto names = attrs.names_by_country.find(country);
  if (names == attrs.names_by_country.end() || names->second.first_names.empty() ||
      names->second.last_names.empty()) {
    throw Error(ErrorCode::UnknownCountry, "'" + country + "'");
  }

  GeneratedProfile out;
  auto& record = out.record;
  record.person_id = "gen-" + hex64(opts.seed);
  record.country = country;
  record.first_name = names->second.first_names.sample(rng);
  record.last_name = names->second.last_names.sample(rng);

  // Lay the timeline out against a provisional anchor, then shift it so the
  // latest job ends at the corpus reference month.
  const double first_job_age = draw_first_job_age(attrs.timing, opts.timing_jitter_years, rng);
  const YearMonth anchor;
  auto employment = generate_employment(bundle, opts, rng, anchor, first_job_age);
  std::vector<Location> employment_locations;
  for (const auto& e : employment.entries) employment_locations.push_back(e.location);
  auto education = generate_education(bundle, opts, rng, employment_locations, anchor);

  YearMonth latest_end = employment.entries.front().end();
  for (const auto& e : employment.entries) latest_end = std::max(latest_end, e.end());
  const int shift = months_between(latest_end, attrs.timing.reference_month);
  for (auto& e : employment.entries) e.start = e.start.plus_months(shift);
  for (auto& e : education.entries) e.start = e.start.plus_months(shift);

  const auto age = derive_age(employment.entries, first_job_age);
  record.birth = age.birth;
  record.employment = std::move(employment.entries);
  record.education = std::move(education.entries);
  record.current_address = record.employment.back().location;

  if (opts.include_extras && !attrs.extras_counts.empty()) {
    const int n = attrs.extras_counts.sample(rng);
    for (int i = 0; i < n; ++i) {
      const auto& category = attrs.extra_categories.sample(rng);
      const auto values = attrs.extra_values.find(category);
      if (values == attrs.extra_values.end() || values->second.empty()) continue;
      record.extras.push_back({category, values->second.sample(rng)});
    }
  }

  auto& p = out.provenance;
  p.seed = opts.seed;
  p.bundle_format_version = static_cast<int>(bundle.provenance.format_version);
  p.generator_version = std::string(kGeneratorVersion);
  p.age_years = age.age_years;
  p.first_job_age_years = first_job_age;
  p.employment_radius_fallbacks = employment.radius_fallbacks;
  p.education_radius_fallbacks = education.radius_fallbacks;
  p.short_employment_sequence = employment.short_sequence;
  p.short_education_sequence = education.short_sequence;
  return out;
}

std::vector<GeneratedProfile> generate_batch(const ModelBundle& bundle, const GenerationOptions& opts,
                                             std::size_t count, unsigned threads) {
  opts.validate();
  std::vector<GeneratedProfile> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    GenerationOptions child = opts;
    child.seed = split_seed(opts.seed, i);
    out[i] = generate_profile(bundle, child);
  });
  return out;
}

BaselineVocabulary BaselineVocabulary::from_bundle(const ModelBundle& bundle) {
  const auto& attrs = bundle.attributes;
  std::set<std::string> first, last;
  for (const auto& [country, names] : attrs.names_by_country) {
    for (const auto& n : names.first_names.keys()) first.insert(n);
    for (const auto& n : names.last_names.keys()) last.insert(n);
  }
  std::set<Placement> employers, institutions;
  BaselineVocabulary v;
  for (const auto& [position, pa] : attrs.per_position) {
    v.positions.push_back(position);
    for (const auto& e : pa.employers.keys()) employers.insert(e);
  }
  for (const auto& [type, ea] : attrs.per_education_type) {
    v.education_types.push_back(type);
    for (const auto& e : ea.institutions.keys()) institutions.insert(e);
  }
  v.first_names.assign(first.begin(), first.end());
  v.last_names.assign(last.begin(), last.end());
  v.employers.assign(employers.begin(), employers.end());
  v.institutions.assign(institutions.begin(), institutions.end());
  return v;
}

CvRecord generate_random_baseline(const CvRecord& real, const BaselineVocabulary& vocab, Rng& rng) {
  if (vocab.first_names.empty() || vocab.last_names.empty() || vocab.positions.empty() ||
      vocab.employers.empty()) {
    throw Error(ErrorCode::EmptyModel, "bundle vocabulary is empty");
  }
  CvRecord out = real;
  out.person_id = "random-" + real.person_id;
  out.first_name = uniform_pick(vocab.first_names, rng);
  out.last_name = uniform_pick(vocab.last_names, rng);
  for (auto& e : out.employment) {
    const auto& employer = uniform_pick(vocab.employers, rng);
    e.employer = employer.name;
    e.location = employer.location;
    e.position = uniform_pick(vocab.positions, rng);
  }
  if (!out.education.empty() && (vocab.education_types.empty() || vocab.institutions.empty())) {
    throw Error(ErrorCode::EmptyModel, "bundle has no education vocabulary");
  }
  for (auto& e : out.education) {
    const auto& institution = uniform_pick(vocab.institutions, rng);
    e.institution = institution.name;
    e.location = institution.location;
    e.education_type = uniform_pick(vocab.education_types, rng);
  }
  if (out.current_address && !out.employment.empty()) {
    const auto latest = std::max_element(
        out.employment.begin(), out.employment.end(),
        [](const EmploymentEntry& a, const EmploymentEntry& b) { return a.start < b.start; });
    out.current_address = latest->location;
  }
  return out;
}

CvRecord generate_random_baseline(const CvRecord& real, const ModelBundle& bundle, Rng& rng) {
  return generate_random_baseline(real, BaselineVocabulary::from_bundle(bundle), rng);
}

}  // namespace pforge::generator
