#include "pforge/validator.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include "pforge/parallel.hpp"

namespace pforge::validator {
namespace {

struct Frequency {
  std::uint64_t count = 0;
  std::uint64_t total = 0;

  double value() const { return static_cast<double>(count) / static_cast<double>(total); }
  double log() const { return std::log(static_cast<double>(count)) - std::log(static_cast<double>(total)); }
  Rational exact() const { return Rational(count) / Rational(total); }
};

Frequency unigram(const model::NgramTable& t, const std::string& a) { return {t.unigrams.count(a), t.unigrams.total()}; }
Frequency bigram(const model::NgramTable& t, const std::string& a, const std::string& b) {
  return {t.bigrams.count({a, b}), t.bigrams.total()};
}
Frequency trigram(const model::NgramTable& t, const std::string& a, const std::string& b, const std::string& c) {
  return {t.trigrams.count({a, b, c}), t.trigrams.total()};
}

LikelihoodReport zero_report(std::vector<std::string> cause) {
  LikelihoodReport r;
  r.rank = 0.0;
  r.minus_log = std::numeric_limits<double>::infinity();
  r.exact_rank = 0;
  r.zero_cause = std::move(cause);
  return r;
}

}  // namespace

double OrderThresholdPolicy::threshold_for(const model::OrderStat& stat) const {
  if (fixed) return *fixed;
  return std::max(floor, sd_multiplier * stat.stddev());
}

std::optional<double> sequence_order_error(std::size_t index, const std::string& state, RecordKind kind,
                                           const model::AttributeTables& attributes) {
  const auto* stat = attributes.order_stat(kind, state);
  if (stat == nullptr || stat->count == 0) return std::nullopt;
  return std::abs(static_cast<double>(index) - stat->mean());
}

OrderCheck check_sequence_order(const CvRecord& profile, const model::AttributeTables& attributes,
                                const OrderThresholdPolicy& policy) {
  OrderCheck check;
  auto visit = [&](RecordKind kind, std::size_t index, const std::string& state) {
    OrderItem item{kind, index, state, sequence_order_error(index, state, kind, attributes), 0.0, false};
    if (item.error) {
      item.threshold = policy.threshold_for(*attributes.order_stat(kind, state));
      item.pass = *item.error <= item.threshold;
    }
    check.pass = check.pass && item.pass;
    check.items.push_back(std::move(item));
  };
  for (std::size_t i = 0; i < profile.education.size(); ++i) {
    visit(RecordKind::Education, i + 1, profile.education[i].education_type);
  }
  for (std::size_t i = 0; i < profile.employment.size(); ++i) {
    visit(RecordKind::Employment, i + 1, profile.employment[i].position);
  }
  return check;
}

std::size_t LikelihoodReport::backoff_count() const {
  std::size_t n = 0;
  for (const auto& f : factors) n += f.used_backoff ? 1 : 0;
  return n;
}

LikelihoodReport likelihood_rank(std::span<const std::string> seq, const model::NgramTable& t) {
  const std::size_t s = seq.size();
  if (s == 0) return zero_report({});

  // Zero is decided from counts: every unigram and adjacent bigram the
  // formula touches must have been seen.
  for (std::size_t i = 0; i < s; ++i) {
    if (t.unigrams.count(seq[i]) == 0) return zero_report({seq[i]});
  }
  for (std::size_t i = 0; i + 1 < s; ++i) {
    if (t.bigrams.count({seq[i], seq[i + 1]}) == 0) return zero_report({seq[i], seq[i + 1]});
  }

  LikelihoodReport r;
  if (s == 1) {
    const auto f = unigram(t, seq[0]);
    r.factors.push_back({{seq[0]}, f.value(), false});
    r.rank = f.value();
    r.minus_log = -f.log();
    r.exact_rank = f.exact();
    return r;
  }
  if (s == 2) {
    const auto f = bigram(t, seq[0], seq[1]);
    r.factors.push_back({{seq[0], seq[1]}, f.value(), false});
    r.rank = f.value();
    r.minus_log = -f.log();
    r.exact_rank = f.exact();
    return r;
  }

  double log_sum = 0.0;
  Rational exact{1};
  for (std::size_t k = 0; k + 2 < s; ++k) {
    const auto& a = seq[k];
    const auto& b = seq[k + 1];
    const auto& c = seq[k + 2];
    const auto tri = trigram(t, a, b, c);
    LikelihoodFactor factor{{a, b, c}, 0.0, false};
    if (tri.count > 0) {
      factor.probability = tri.value();
      log_sum += tri.log();
      exact *= tri.exact();
    } else {
      const auto ab = bigram(t, a, b);
      const auto bc = bigram(t, b, c);
      const auto mid = unigram(t, b);
      factor.used_backoff = true;
      factor.probability = ab.value() * bc.value() / mid.value();
      log_sum += ab.log() + bc.log() - mid.log();
      exact *= ab.exact() * bc.exact() / mid.exact();
    }
    r.factors.push_back(std::move(factor));
  }
  for (std::size_t k = 1; k + 2 < s; ++k) {
    const auto inner = bigram(t, seq[k], seq[k + 1]);
    log_sum -= inner.log();
    exact /= inner.exact();
  }
  r.minus_log = -log_sum;
  r.rank = std::exp(log_sum);
  r.exact_rank = exact;
  r.bound_violation = exact > 1;
  return r;
}

ValidationOutcome validate_profile(const CvRecord& profile, const model::ModelBundle& bundle,
                                   const FilterPolicy& policy) {
  ValidationOutcome out;
  out.order = check_sequence_order(profile, bundle.attributes, policy.order);
  const auto states = combined_states(profile);
  out.likelihood = likelihood_rank(states, bundle.combined_ngrams);
  const bool above = policy.rank_threshold <= 0.0 ||
                     out.likelihood.minus_log < -std::log(policy.rank_threshold);
  out.accepted = out.order.pass && !out.likelihood.is_zero() && above;
  return out;
}

FilterResult filter_profiles(std::span<const CvRecord> profiles, const model::ModelBundle& bundle,
                             const FilterPolicy& policy, unsigned threads) {
  FilterResult result;
  result.outcomes.resize(profiles.size());
  parallel_for(profiles.size(), threads,
               [&](std::size_t i) { result.outcomes[i] = validate_profile(profiles[i], bundle, policy); });
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    (result.outcomes[i].accepted ? result.accepted : result.rejected).push_back(i);
  }
  return result;
}

nlohmann::ordered_json outcome_to_json(const std::string& person_id, const ValidationOutcome& o) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["person_id"] = person_id;
  j["order_pass"] = o.order.pass;
  auto items = ordered_json::array();
  for (const auto& item : o.order.items) {
    ordered_json e;
    e["kind"] = kind_name(item.kind);
    e["index"] = item.index;
    e["state"] = item.state;
    if (item.error) {
      e["error"] = *item.error;
      e["threshold"] = item.threshold;
    } else {
      e["error"] = "UNSEEN_STATE";
    }
    e["pass"] = item.pass;
    items.push_back(std::move(e));
  }
  j["errors"] = std::move(items);
  j["rank"] = o.likelihood.rank;
  // JSON has no infinity; a zero rank carries a null minus_log.
  j["minus_log"] = o.likelihood.is_zero() ? ordered_json(nullptr) : ordered_json(o.likelihood.minus_log);
  j["used_backoff"] = o.likelihood.backoff_count();
  j["zero_cause"] = o.likelihood.zero_cause ? ordered_json(*o.likelihood.zero_cause) : ordered_json(nullptr);
  j["rank_above_one"] = o.likelihood.bound_violation;
  j["accepted"] = o.accepted;
  return j;
}

}  // namespace pforge::validator
