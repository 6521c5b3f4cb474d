#include <cmath>
#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pforge/corpus.hpp"
#include "pforge/generator.hpp"
#include "pforge/model.hpp"
#include "pforge/validator.hpp"
#include "support.hpp"

using namespace pforge;
using validator::Rational;

namespace {

const model::ModelBundle& c3_bundle() {
  static const auto b = model::build_bundle(testing::c3_records());
  return b;
}

validator::LikelihoodReport rank_of(const std::vector<std::string>& seq) {
  return validator::likelihood_rank(seq, c3_bundle().combined_ngrams);
}

}  // namespace

TEST_CASE("likelihood rank by hand on C3") {
  auto r = rank_of({"intern", "engineer", "manager"});
  CHECK(r.exact_rank == Rational(1, 2));
  CHECK(r.rank == 0.5);
  CHECK(r.minus_log == doctest::Approx(std::log(2.0)));
  CHECK(r.backoff_count() == 0);

  r = rank_of({"engineer", "engineer", "manager"});
  CHECK(r.exact_rank == Rational(4, 25));
  CHECK(r.backoff_count() == 1);

  r = rank_of({"intern", "engineer", "engineer", "manager"});
  CHECK(r.exact_rank == Rational(2, 5));

  r = rank_of({"manager", "intern", "engineer"});
  CHECK(r.is_zero());
  CHECK(r.exact_rank == 0);
  CHECK(r.rank == 0.0);
  CHECK(std::isinf(r.minus_log));
  CHECK(*r.zero_cause == std::vector<std::string>{"manager", "intern"});
}

TEST_CASE("likelihood rank short sequences") {
  CHECK(rank_of({}).is_zero());
  CHECK(rank_of({"engineer"}).exact_rank == Rational(1, 2));
  CHECK(rank_of({"ceo"}).is_zero());
  CHECK(rank_of({"intern", "engineer"}).exact_rank == Rational(2, 5));
  CHECK(rank_of({"manager", "engineer"}).is_zero());
}

TEST_CASE("likelihood rank agrees with the rational oracle") {
  const oracle::NgramCounts counts(testing::c3_sequences());
  const std::vector<std::string> alphabet{"intern", "engineer", "manager", "ceo"};
  std::vector<std::vector<std::string>> frontier{{}};
  int checked = 0;
  for (int len = 1; len <= 4; ++len) {
    std::vector<std::vector<std::string>> next;
    for (const auto& prefix : frontier) {
      for (const auto& s : alphabet) {
        auto seq = prefix;
        seq.push_back(s);
        const auto r = rank_of(seq);
        CHECK(r.exact_rank == counts.rank(seq));
        CHECK(r.is_zero() == (counts.rank(seq) == 0));
        ++checked;
        next.push_back(seq);
      }
    }
    frontier = std::move(next);
  }
  CHECK(checked == 4 + 16 + 64 + 256);
}

TEST_CASE("a long sequence stays finite in log space") {
  std::vector<std::string> seq{"intern"};
  for (int i = 0; i < 600; ++i) seq.push_back("engineer");
  const auto r = rank_of(seq);
  CHECK_FALSE(r.is_zero());
  CHECK(std::isfinite(r.minus_log));
  CHECK(r.minus_log > 0);
}

TEST_CASE("sequence order error on C3") {
  const auto& attrs = c3_bundle().attributes;
  CHECK(*validator::sequence_order_error(3, "intern", RecordKind::Employment, attrs) == 2.0);
  CHECK(*validator::sequence_order_error(1, "intern", RecordKind::Employment, attrs) == 0.0);
  CHECK(*validator::sequence_order_error(2, "manager", RecordKind::Employment, attrs) == 0.5);
  CHECK_FALSE(validator::sequence_order_error(1, "ceo", RecordKind::Employment, attrs));
  CHECK_FALSE(validator::sequence_order_error(1, "intern", RecordKind::Education, attrs));
}

TEST_CASE("order check") {
  const auto& attrs = c3_bundle().attributes;
  validator::OrderThresholdPolicy fixed;
  fixed.fixed = 1.5;

  auto at_mean = testing::career("m", {"intern"});
  CHECK(validator::check_sequence_order(at_mean, attrs, fixed).pass);

  auto late_intern = testing::career("l", {"engineer", "engineer", "intern"});
  const auto late = validator::check_sequence_order(late_intern, attrs, fixed);
  CHECK_FALSE(late.pass);
  CHECK(late.items[2].error == 2.0);
  CHECK_FALSE(late.items[2].pass);

  auto unseen = testing::career("u", {"intern", "ceo"});
  const auto u = validator::check_sequence_order(unseen, attrs, {});
  CHECK_FALSE(u.pass);
  CHECK_FALSE(u.items[1].error.has_value());

  // Default policy: max(1.5, 2 * sd); engineer sits at {2, 2, 3, 1} in C3.
  validator::OrderThresholdPolicy dflt;
  const auto* eng = attrs.order_stat(RecordKind::Employment, "engineer");
  CHECK(dflt.threshold_for(*eng) == std::max(1.5, 2 * eng->stddev()));
  CHECK(dflt.threshold_for(*attrs.order_stat(RecordKind::Employment, "intern")) == 1.5);
}

TEST_CASE("filter profiles") {
  const auto& b = c3_bundle();
  const std::vector<CvRecord> batch{testing::career("a", {"intern", "engineer", "manager"}),
                                    testing::career("b", {"manager", "intern"}),
                                    testing::career("c", {"engineer", "engineer", "manager"})};
  const auto r = validator::filter_profiles(batch, b, {});
  CHECK(r.accepted == std::vector<std::size_t>{0, 2});
  CHECK(r.rejected == std::vector<std::size_t>{1});

  validator::FilterPolicy strict;
  strict.rank_threshold = 0.3;
  const auto s = validator::filter_profiles(batch, b, strict, 3);
  CHECK(s.accepted == std::vector<std::size_t>{0});

  const auto all_pass = validator::filter_profiles(testing::c3_records(), b, {});
  CHECK(all_pass.rejected.empty());

  const auto j = validator::outcome_to_json("b", r.outcomes[1]);
  CHECK(j["minus_log"].is_null());
  CHECK(j["accepted"] == false);
  CHECK(j["zero_cause"] == nlohmann::json::array({"manager", "intern"}));
}

TEST_CASE("random baselines: rejections equal a brute-force count") {
  std::ifstream in(PFORGE_DATA_DIR "/fixture_corpus.jsonl");
  const auto real = corpus::parse_corpus(in).records;
  const auto b = model::build_bundle(real);

  std::vector<oracle::Seq> combined, emp, edu;
  for (const auto& r : real) {
    combined.push_back(validator::combined_states(r));
    emp.emplace_back();
    for (const auto& e : r.employment) emp.back().push_back(e.position);
    edu.emplace_back();
    for (const auto& e : r.education) edu.back().push_back(e.education_type);
  }
  const oracle::NgramCounts grams(combined);
  const oracle::IndexStats emp_idx(emp), edu_idx(edu);

  std::vector<CvRecord> baselines;
  for (std::size_t i = 0; i < real.size(); ++i) {
    Rng rng(split_seed(31, i));
    baselines.push_back(generator::generate_random_baseline(real[i], b, rng));
  }
  std::size_t expected = 0;
  for (const auto& r : baselines) {
    oracle::Seq e, d;
    for (const auto& x : r.employment) e.push_back(x.position);
    for (const auto& x : r.education) d.push_back(x.education_type);
    expected += grams.has_unseen_bigram(validator::combined_states(r)) || emp_idx.violates(e) || edu_idx.violates(d);
  }
  const auto result = validator::filter_profiles(baselines, b, {});
  CHECK(result.rejected.size() == expected);
  CHECK(expected > real.size() / 2);
}
