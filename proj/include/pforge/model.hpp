#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pforge/combined_sequence.hpp"
#include "pforge/frequency_table.hpp"
#include "pforge/record.hpp"

namespace pforge::model {

using StateSequence = std::vector<std::string>;

// First-order Markov chain over string states. Counts are canonical;
// probabilities are count ratios without smoothing.
class TransitionModel {
 public:
  void add_sequence(std::span<const std::string> sequence);

  const std::set<std::string>& states() const { return states_; }
  const FrequencyTable<std::string>& starts() const { return starts_; }
  const std::map<std::string, FrequencyTable<std::string>>& rows() const { return rows_; }

  // nullptr for states with no outgoing transitions.
  const FrequencyTable<std::string>* row(const std::string& from) const;

  std::uint64_t start_count(const std::string& state) const { return starts_.count(state); }
  std::uint64_t transition_count(const std::string& from, const std::string& to) const;
  std::uint64_t row_total(const std::string& from) const;

  double start_prob(const std::string& state) const { return starts_.probability(state); }
  double transition_prob(const std::string& from, const std::string& to) const;

  bool empty() const { return states_.empty(); }

  // Reassembles a model from stored counts. States are the union of every
  // state mentioned plus `extra_states` (states seen only as sequence ends
  // are implied by the rows, so this is normally empty).
  static TransitionModel from_counts(FrequencyTable<std::string> starts,
                                     std::map<std::string, FrequencyTable<std::string>> rows,
                                     const std::set<std::string>& extra_states = {});

  friend bool operator==(const TransitionModel&, const TransitionModel&) = default;

 private:

  std::set<std::string> states_;
  FrequencyTable<std::string> starts_;
  std::map<std::string, FrequencyTable<std::string>> rows_;
};

// Throws EMPTY_INPUT for no sequences, INVALID_ARGUMENT for an empty sequence.
TransitionModel build_transition_model(const std::vector<StateSequence>& sequences);

using Bigram = std::pair<std::string, std::string>;
using Trigram = std::array<std::string, 3>;

struct NgramTable {
  FrequencyTable<std::string> unigrams;
  FrequencyTable<Bigram> bigrams;
  FrequencyTable<Trigram> trigrams;

  void add_sequence(std::span<const std::string> sequence);

  friend bool operator==(const NgramTable&, const NgramTable&) = default;
};

NgramTable build_ngram_table(const std::vector<StateSequence>& combined_sequences);

// An employer or institution together with where it is.
struct Placement {
  std::string name;
  Location location;

  friend auto operator<=>(const Placement&, const Placement&) = default;
};

struct PositionAttributes {
  FrequencyTable<Placement> employers;
  FrequencyTable<int> durations;
  FrequencyTable<std::string> tasks;
  FrequencyTable<int> task_counts;

  friend bool operator==(const PositionAttributes&, const PositionAttributes&) = default;
};

struct EducationTypeAttributes {
  FrequencyTable<Placement> institutions;
  FrequencyTable<std::string> fields;
  FrequencyTable<int> durations;

  friend bool operator==(const EducationTypeAttributes&, const EducationTypeAttributes&) = default;
};

struct NameTables {
  FrequencyTable<std::string> first_names;
  FrequencyTable<std::string> last_names;

  friend bool operator==(const NameTables&, const NameTables&) = default;
};

// Integer sum and count of a month-valued quantity.
struct MonthMean {
  std::int64_t sum = 0;
  std::uint64_t count = 0;

  void add(std::int64_t months) {
    sum += months;
    ++count;
  }
  double mean_months() const { return count == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(count); }
  double mean_years() const { return mean_months() / 12.0; }

  friend bool operator==(const MonthMean&, const MonthMean&) = default;
};

struct TimingStats {
  MonthMean first_job_age;
  MonthMean first_education_age;
  MonthMean employment_gap;  // between consecutive starts
  MonthMean education_gap;
  YearMonth reference_month;  // latest employment end in the corpus

  double avg_first_job_age_years() const { return first_job_age.mean_years(); }
  double avg_first_education_age_years() const { return first_education_age.mean_years(); }
  double avg_employment_gap_months() const { return employment_gap.mean_months(); }
  double avg_education_gap_months() const { return education_gap.mean_months(); }

  friend bool operator==(const TimingStats&, const TimingStats&) = default;
};

// Distribution of the 1-based index at which a state occurs in its record.
struct OrderStat {
  std::uint64_t count = 0;
  std::uint64_t index_sum = 0;
  std::uint64_t index_sq_sum = 0;

  void add(std::uint64_t index) {
    ++count;
    index_sum += index;
    index_sq_sum += index * index;
  }
  double mean() const;
  double stddev() const;  // population

  friend bool operator==(const OrderStat&, const OrderStat&) = default;
};

struct AttributeTables {
  std::map<std::string, NameTables> names_by_country;
  FrequencyTable<std::string> country_freq;
  FrequencyTable<int> employment_period_counts;
  FrequencyTable<int> education_period_counts;
  std::map<std::string, PositionAttributes> per_position;
  std::map<std::string, EducationTypeAttributes> per_education_type;
  TimingStats timing;
  FrequencyTable<int> extras_counts;
  FrequencyTable<std::string> extra_categories;
  std::map<std::string, FrequencyTable<std::string>> extra_values;
  std::map<std::string, OrderStat> employment_order;
  std::map<std::string, OrderStat> education_order;

  const OrderStat* order_stat(RecordKind kind, const std::string& state) const;

  friend bool operator==(const AttributeTables&, const AttributeTables&) = default;
};

// Records must be cleaned (entries sorted). Throws EMPTY_CORPUS.
AttributeTables build_attribute_tables(const std::vector<CvRecord>& records);

inline constexpr std::uint32_t kFormatVersion = 1;

struct BundleProvenance {
  std::uint32_t format_version = kFormatVersion;
  std::uint64_t corpus_record_count = 0;
  std::int64_t build_timestamp = 0;  // seconds since epoch

  friend bool operator==(const BundleProvenance&, const BundleProvenance&) = default;
};

struct ModelBundle {
  TransitionModel employment_model;
  TransitionModel education_model;
  NgramTable combined_ngrams;
  AttributeTables attributes;
  BundleProvenance provenance;

  friend bool operator==(const ModelBundle&, const ModelBundle&) = default;
};

std::vector<StateSequence> employment_sequences(const std::vector<CvRecord>& records);
std::vector<StateSequence> education_sequences(const std::vector<CvRecord>& records);
std::vector<StateSequence> combined_sequences(const std::vector<CvRecord>& records);

// Builds every table from cleaned records. Records without education do not
// contribute an education sequence.
ModelBundle build_bundle(const std::vector<CvRecord>& records, std::int64_t build_timestamp = 0);

}  // namespace pforge::model
