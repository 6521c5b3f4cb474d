#include "pforge/model.hpp"

#include <algorithm>
#include <cmath>

#include "pforge/error.hpp"

namespace pforge::model {

void TransitionModel::add_sequence(std::span<const std::string> sequence) {
  if (sequence.empty()) return;
  starts_.add(sequence.front());
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    states_.insert(sequence[i]);
    if (i + 1 < sequence.size()) rows_[sequence[i]].add(sequence[i + 1]);
  }
}

TransitionModel TransitionModel::from_counts(FrequencyTable<std::string> starts,
                                             std::map<std::string, FrequencyTable<std::string>> rows,
                                             const std::set<std::string>& extra_states) {
  TransitionModel m;
  m.states_ = extra_states;
  for (const auto& [state, count] : starts.counts()) m.states_.insert(state);
  for (const auto& [from, row] : rows) {
    m.states_.insert(from);
    for (const auto& [to, count] : row.counts()) m.states_.insert(to);
  }
  m.starts_ = std::move(starts);
  m.rows_ = std::move(rows);
  return m;
}

const FrequencyTable<std::string>* TransitionModel::row(const std::string& from) const {
  const auto it = rows_.find(from);
  return it == rows_.end() ? nullptr : &it->second;
}

std::uint64_t TransitionModel::transition_count(const std::string& from, const std::string& to) const {
  const auto* r = row(from);
  return r == nullptr ? 0 : r->count(to);
}

std::uint64_t TransitionModel::row_total(const std::string& from) const {
  const auto* r = row(from);
  return r == nullptr ? 0 : r->total();
}

double TransitionModel::transition_prob(const std::string& from, const std::string& to) const {
  const auto* r = row(from);
  return r == nullptr ? 0.0 : r->probability(to);
}

TransitionModel build_transition_model(const std::vector<StateSequence>& sequences) {
  if (sequences.empty()) throw Error(ErrorCode::EmptyInput, "no sequences to build a transition model from");
  TransitionModel model;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (sequences[i].empty()) {
      throw Error(ErrorCode::InvalidArgument, "sequence " + std::to_string(i) + " is empty");
    }
    model.add_sequence(sequences[i]);
  }
  return model;
}

void NgramTable::add_sequence(std::span<const std::string> s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    unigrams.add(s[i]);
    if (i + 1 < s.size()) bigrams.add({s[i], s[i + 1]});
    if (i + 2 < s.size()) trigrams.add({s[i], s[i + 1], s[i + 2]});
  }
}

NgramTable build_ngram_table(const std::vector<StateSequence>& combined) {
  NgramTable table;
  for (const auto& s : combined) table.add_sequence(s);
  return table;
}

double OrderStat::mean() const {
  return count == 0 ? 0.0 : static_cast<double>(index_sum) / static_cast<double>(count);
}

double OrderStat::stddev() const {
  if (count == 0) return 0.0;
  const double n = static_cast<double>(count);
  // n * sum_sq - sum^2 is exact in integers for any realistic corpus.
  const auto numerator = static_cast<long double>(count) * index_sq_sum -
                         static_cast<long double>(index_sum) * index_sum;
  return std::sqrt(std::max(0.0L, numerator) / (n * n));
}

const OrderStat* AttributeTables::order_stat(RecordKind kind, const std::string& state) const {
  const auto& stats = kind == RecordKind::Employment ? employment_order : education_order;
  const auto it = stats.find(state);
  return it == stats.end() ? nullptr : &it->second;
}

AttributeTables build_attribute_tables(const std::vector<CvRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::EmptyCorpus, "no records to build attribute tables from");
  AttributeTables t;
  std::optional<YearMonth> reference;
  for (const auto& r : records) {
    auto& names = t.names_by_country[r.country];
    names.first_names.add(r.first_name);
    names.last_names.add(r.last_name);
    t.country_freq.add(r.country);
    t.employment_period_counts.add(static_cast<int>(r.employment.size()));
    t.education_period_counts.add(static_cast<int>(r.education.size()));

    for (std::size_t i = 0; i < r.employment.size(); ++i) {
      const auto& e = r.employment[i];
      auto& attrs = t.per_position[e.position];
      attrs.employers.add({e.employer, e.location});
      attrs.durations.add(e.duration_months);
      attrs.task_counts.add(static_cast<int>(e.tasks.size()));
      for (const auto& task : e.tasks) attrs.tasks.add(task);
      t.employment_order[e.position].add(i + 1);
      if (i > 0) t.timing.employment_gap.add(months_between(r.employment[i - 1].start, e.start));
      if (!reference || e.end() > *reference) reference = e.end();
    }
    for (std::size_t i = 0; i < r.education.size(); ++i) {
      const auto& e = r.education[i];
      auto& attrs = t.per_education_type[e.education_type];
      attrs.institutions.add({e.institution, e.location});
      attrs.fields.add(e.field_of_study);
      attrs.durations.add(e.duration_months);
      t.education_order[e.education_type].add(i + 1);
      if (i > 0) t.timing.education_gap.add(months_between(r.education[i - 1].start, e.start));
    }
    if (r.birth) {
      if (!r.employment.empty()) {
        t.timing.first_job_age.add(months_between(*r.birth, r.employment.front().start));
      }
      if (!r.education.empty()) {
        t.timing.first_education_age.add(months_between(*r.birth, r.education.front().start));
      }
    }

    t.extras_counts.add(static_cast<int>(r.extras.size()));
    for (const auto& x : r.extras) {
      t.extra_categories.add(x.category);
      t.extra_values[x.category].add(x.value);
    }
  }
  if (reference) t.timing.reference_month = *reference;
  return t;
}

std::vector<StateSequence> employment_sequences(const std::vector<CvRecord>& records) {
  std::vector<StateSequence> out;
  for (const auto& r : records) {
    if (r.employment.empty()) continue;
    StateSequence s;
    for (const auto& e : r.employment) s.push_back(e.position);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<StateSequence> education_sequences(const std::vector<CvRecord>& records) {
  std::vector<StateSequence> out;
  for (const auto& r : records) {
    if (r.education.empty()) continue;
    StateSequence s;
    for (const auto& e : r.education) s.push_back(e.education_type);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<StateSequence> combined_sequences(const std::vector<CvRecord>& records) {
  std::vector<StateSequence> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(validator::combined_states(r));
  return out;
}

ModelBundle build_bundle(const std::vector<CvRecord>& records, std::int64_t build_timestamp) {
  if (records.empty()) throw Error(ErrorCode::EmptyCorpus, "no records to build a model from");
  ModelBundle b;
  b.employment_model = build_transition_model(employment_sequences(records));
  const auto edu = education_sequences(records);
  if (!edu.empty()) b.education_model = build_transition_model(edu);
  b.combined_ngrams = build_ngram_table(combined_sequences(records));
  b.attributes = build_attribute_tables(records);
  b.provenance.corpus_record_count = records.size();
  b.provenance.build_timestamp = build_timestamp;
  return b;
}

}  // namespace pforge::model
