#include <fstream>
#include <map>

#include "doctest.h"
#include "json.hpp"
#include "pforge/bundle_io.hpp"
#include "pforge/combined_sequence.hpp"
#include "pforge/corpus.hpp"
#include "pforge/error.hpp"
#include "pforge/model.hpp"
#include "support.hpp"

using namespace pforge;
using model::TransitionModel;

namespace {

model::ModelBundle fixture_bundle() {
  std::ifstream in(PFORGE_DATA_DIR "/fixture_corpus.jsonl");
  auto cleaned = corpus::clean_corpus(corpus::parse_corpus(in).records);
  return model::build_bundle(cleaned.kept);
}

}  // namespace

TEST_CASE("transition model on C3") {
  const auto m = model::build_transition_model(testing::c3_sequences());
  CHECK(m.transition_count("intern", "engineer") == 2);
  CHECK(m.row_total("engineer") == 3);
  CHECK(m.transition_prob("intern", "engineer") == 1.0);
  CHECK(m.transition_prob("engineer", "manager") == 2.0 / 3.0);
  CHECK(m.transition_prob("engineer", "engineer") == 1.0 / 3.0);
  CHECK(m.transition_prob("manager", "intern") == 0.0);
  CHECK(m.start_prob("intern") == 2.0 / 3.0);
  CHECK(m.start_prob("engineer") == 1.0 / 3.0);
  CHECK(m.row("manager") == nullptr);
  CHECK(m.states() == std::set<std::string>{"engineer", "intern", "manager"});
}

TEST_CASE("transition model edge cases") {
  const auto single = model::build_transition_model({{"a"}});
  CHECK(single.start_prob("a") == 1.0);
  CHECK(single.rows().empty());
  CHECK_THROWS_AS(model::build_transition_model({}), Error);
  CHECK_THROWS_AS(model::build_transition_model({{"a"}, {}}), Error);
}

TEST_CASE("n-gram table on C3") {
  const auto t = model::build_ngram_table(testing::c3_sequences());
  CHECK(t.unigrams.total() == 8);
  CHECK(t.unigrams.count("engineer") == 4);
  CHECK(t.bigrams.total() == 5);
  CHECK(t.bigrams.count({"intern", "engineer"}) == 2);
  CHECK(t.bigrams.count({"engineer", "manager"}) == 2);
  CHECK(t.bigrams.count({"engineer", "engineer"}) == 1);
  CHECK(t.trigrams.total() == 2);
  CHECK(t.trigrams.count({"intern", "engineer", "manager"}) == 1);
  CHECK(t.trigrams.count({"intern", "engineer", "engineer"}) == 1);
}

TEST_CASE("attribute tables") {
  const auto attrs = model::build_attribute_tables(testing::c3_records());
  const auto* intern = attrs.order_stat(RecordKind::Employment, "intern");
  REQUIRE(intern);
  CHECK(intern->mean() == 1.0);
  CHECK(intern->stddev() == 0.0);
  CHECK(attrs.order_stat(RecordKind::Employment, "manager")->mean() == 2.5);
  CHECK(attrs.order_stat(RecordKind::Employment, "manager")->stddev() == 0.5);
  CHECK(attrs.order_stat(RecordKind::Education, "intern") == nullptr);
  CHECK(attrs.employment_period_counts.count(3) == 2);
  CHECK(attrs.employment_period_counts.count(2) == 1);
  CHECK(attrs.country_freq.count("Testland") == 3);

  std::vector<CvRecord> threes{testing::career("x", {"a", "b", "c"}), testing::career("y", {"c", "b", "a"})};
  const auto flat = model::build_attribute_tables(threes);
  CHECK(flat.employment_period_counts.size() == 1);
  CHECK(flat.employment_period_counts.count(3) == 2);

  CHECK_THROWS_AS(model::build_attribute_tables({}), Error);
}

TEST_CASE("per-position duration table matches a group-by over the fixture file") {
  std::map<int, std::uint64_t> expected;
  std::ifstream in(PFORGE_DATA_DIR "/fixture_corpus.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    const auto record = nlohmann::json::parse(line);
    for (const auto& e : record["employment"]) {
      if (e["position"] == "engineer") ++expected[e["duration_months"].get<int>()];
    }
  }
  REQUIRE_FALSE(expected.empty());
  CHECK(fixture_bundle().attributes.per_position.at("engineer").durations.counts() == expected);
}

TEST_CASE("bundle round trip") {
  const auto b = model::build_bundle(testing::c3_records(), 1234);
  const auto bytes = model::save_bundle(b);
  CHECK(bytes.substr(0, 8) == "PFGMODEL");
  CHECK(model::save_bundle(b) == bytes);
  const auto back = model::load_bundle(bytes);
  CHECK(back == b);
  CHECK(back.provenance.build_timestamp == 1234);
  CHECK(back.provenance.corpus_record_count == 3);
  for (const auto& from : b.employment_model.states()) {
    for (const auto& to : b.employment_model.states()) {
      CHECK(std::abs(back.employment_model.transition_prob(from, to) - b.employment_model.transition_prob(from, to)) <= 1e-15);
    }
  }

  const auto fb = fixture_bundle();
  CHECK(model::load_bundle(model::save_bundle(fb)) == fb);
}

TEST_CASE("bundle decode errors") {
  const auto bytes = model::save_bundle(model::build_bundle(testing::c3_records()));
  auto expect_code = [](const std::string& data, ErrorCode code) {
    try {
      model::load_bundle(data);
      FAIL("load_bundle accepted corrupt bytes");
    } catch (const Error& e) {
      CHECK(e.code() == code);
      return std::string(e.what());
    }
    return std::string();
  };

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(expect_code(bad_magic, ErrorCode::DecodeError).find("offset 0") != std::string::npos);

  auto future = bytes;
  future[8] = 2;
  expect_code(future, ErrorCode::UnsupportedVersion);

  auto flipped = bytes;
  flipped[bytes.size() - 5] ^= 0x01;
  CHECK(expect_code(flipped, ErrorCode::DecodeError).find("offset") != std::string::npos);

  expect_code(bytes.substr(0, bytes.size() - 1), ErrorCode::DecodeError);
  expect_code(bytes.substr(0, 10), ErrorCode::DecodeError);
  expect_code("", ErrorCode::DecodeError);
}

TEST_CASE("bundle holds no record-level identifiers") {
  const auto records = testing::c3_records();
  const auto bytes = model::save_bundle(model::build_bundle(records));
  for (const auto& r : records) {
    CHECK(bytes.find("\"" + r.person_id + "\"") == std::string::npos);
  }
}

TEST_CASE("combined chronological order") {
  CvRecord r;
  r.education.push_back(testing::degree("BA", "2005-09", 36));
  r.employment.push_back(testing::job("intern", "2008-06", 6));
  r.employment.push_back(testing::job("engineer", "2009-07", 12));
  CHECK(validator::combined_states(r) == std::vector<std::string>{"BA", "intern", "engineer"});

  CvRecord only_jobs = r;
  only_jobs.education.clear();
  CHECK(validator::combined_states(only_jobs) == std::vector<std::string>{"intern", "engineer"});

  CvRecord tie;
  tie.employment.push_back(testing::job("intern", "2008-06", 6));
  tie.education.push_back(testing::degree("MSc", "2008-06", 12));
  const auto combined = validator::combine_chronological(tie);
  REQUIRE(combined.size() == 2);
  CHECK(combined[0].kind == RecordKind::Education);
  CHECK(combined[0].state == "MSc");
}
