#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "pforge/combined_sequence.hpp"
#include "pforge/model.hpp"

namespace pforge::validator {

using Rational = boost::multiprecision::cpp_rational;

// Per-state tolerance for the item-position check. With `fixed` unset each
// state gets max(floor, sd_multiplier * std of its corpus index).
struct OrderThresholdPolicy {
  std::optional<double> fixed;
  double floor = 1.5;
  double sd_multiplier = 2.0;

  double threshold_for(const model::OrderStat& stat) const;
};

// |index - mean corpus index| for a 1-based index; nullopt when the state
// never occurs in that record kind of the corpus (UNSEEN_STATE).
std::optional<double> sequence_order_error(std::size_t index, const std::string& state, RecordKind kind,
                                           const model::AttributeTables& attributes);

struct OrderItem {
  RecordKind kind;
  std::size_t index;  // 1-based within its record kind
  std::string state;
  std::optional<double> error;  // nullopt: UNSEEN_STATE
  double threshold = 0.0;
  bool pass = false;
};

struct OrderCheck {
  bool pass = true;
  std::vector<OrderItem> items;
};

OrderCheck check_sequence_order(const CvRecord& profile, const model::AttributeTables& attributes,
                                const OrderThresholdPolicy& policy);

struct LikelihoodFactor {
  std::vector<std::string> gram;
  double probability = 0.0;
  bool used_backoff = false;
};

struct LikelihoodReport {
  double rank = 0.0;       // in [0, 1] unless bound_violation
  double minus_log = 0.0;  // +inf iff zero
  Rational exact_rank{0};
  std::vector<LikelihoodFactor> factors;
  // Set exactly when the rank is zero: the first absent bigram (or unigram),
  // empty for an empty sequence.
  std::optional<std::vector<std::string>> zero_cause;
  // Backed-off estimates are not clamped; a rank above 1 is reported here.
  bool bound_violation = false;

  bool is_zero() const { return zero_cause.has_value(); }
  std::size_t backoff_count() const;
};

// Ratio of trigram to inner-bigram frequencies over the sequence, with unseen
// trigrams estimated from their two bigrams and middle unigram. Sequences of
// length 2 score their bigram frequency, length 1 its unigram frequency,
// length 0 zero. Frequencies are count / number of k-gram windows.
LikelihoodReport likelihood_rank(std::span<const std::string> sequence, const model::NgramTable& ngrams);

struct FilterPolicy {
  OrderThresholdPolicy order;
  double rank_threshold = 0.0;
};

struct ValidationOutcome {
  OrderCheck order;
  LikelihoodReport likelihood;
  bool accepted = false;
};

// accepted iff the order check passes, the rank is not (symbolically) zero
// and it exceeds the threshold. The threshold comparison runs on minus_log so
// long sequences whose rank underflows a double still compare correctly.
ValidationOutcome validate_profile(const CvRecord& profile, const model::ModelBundle& bundle,
                                   const FilterPolicy& policy);

struct FilterResult {
  std::vector<ValidationOutcome> outcomes;  // one per input, same order
  std::vector<std::size_t> accepted;        // input indices
  std::vector<std::size_t> rejected;
};

FilterResult filter_profiles(std::span<const CvRecord> profiles, const model::ModelBundle& bundle,
                             const FilterPolicy& policy, unsigned threads = 1);

nlohmann::ordered_json outcome_to_json(const std::string& person_id, const ValidationOutcome& outcome);

}  // namespace pforge::validator
