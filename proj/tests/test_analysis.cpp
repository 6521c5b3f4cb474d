#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pforge/analysis/clustering.hpp"
#include "pforge/analysis/distribution.hpp"
#include "pforge/analysis/questionnaire.hpp"
#include "pforge/analysis/rank_by_length.hpp"
#include "pforge/analysis/stats.hpp"
#include "pforge/error.hpp"
#include "pforge/model.hpp"
#include "support.hpp"

using namespace pforge;
using namespace pforge::analysis;

TEST_CASE("welch t-test against textbook values") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10};
  const auto r = welch_t_test(a, b);
  CHECK(r.t == doctest::Approx(-1.8973665961010275).epsilon(1e-12));
  CHECK(r.df == doctest::Approx(5.882352941176471).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.10753119493062718).epsilon(1e-9));

  const auto o = oracle::welch({1, 2, 3}, {1, 2, 3, 100});
  const auto w = welch_t_test(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3, 100});
  CHECK(w.t == doctest::Approx(o.t).epsilon(1e-12));
  CHECK(w.df == doctest::Approx(o.df).epsilon(1e-12));
  CHECK(std::abs(w.p_value - o.p) < 1e-7);

  const auto same = welch_t_test(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p_value == 1.0);

  CHECK_THROWS_AS(welch_t_test(std::vector<double>{1}, a), Error);
}

TEST_CASE("one-sample t-test and effect size") {
  const std::vector<double> x{1, 1, 1, 0, -1};
  const auto r = one_sample_t_test(x);
  CHECK(r.mean == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r.sd == doctest::Approx(std::sqrt(0.8)).epsilon(1e-12));
  CHECK(r.test.t == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.test.df == 4);
  CHECK(r.test.p_value == doctest::Approx(0.373900966300059).epsilon(1e-9));
  CHECK(*cohens_d(x) == doctest::Approx(0.447213595499958).epsilon(1e-12));

  const std::vector<double> zeros(6, 0.0);
  const auto z = one_sample_t_test(zeros);
  CHECK(z.degenerate);
  CHECK(z.mean == 0.0);
  CHECK(z.test.t == 0.0);
  CHECK(z.test.p_value == 1.0);
  CHECK_FALSE(cohens_d(zeros));
}

TEST_CASE("proportion test") {
  const auto w = proportion_test(3, 5);
  CHECK(w.p_hat == doctest::Approx(0.6));
  const double half = 1.959963984540054 * std::sqrt(0.6 * 0.4 / 5);
  CHECK(w.ci_low == doctest::Approx(100 * (0.6 - half)).epsilon(1e-9));
  CHECK(w.ci_high == doctest::Approx(100 * (0.6 + half)).epsilon(1e-9));
  CHECK(w.ci_high > 100.0);  // the Wald interval is reported unclamped
  CHECK(w.p_value == doctest::Approx(0.6547208460185772).epsilon(1e-9));

  const auto s = proportion_test(3, 5, IntervalMethod::Wilson);
  CHECK(s.ci_low == doctest::Approx(23.07242812760129).epsilon(1e-9));
  CHECK(s.ci_high == doctest::Approx(88.23792257673522).epsilon(1e-9));

  CHECK(proportion_test(0, 0).degenerate);
}

TEST_CASE("response statistics") {
  const auto zeros = response_stats(std::vector<double>(10, 0.0));
  CHECK(zeros.degenerate);
  REQUIRE(zeros.t_test);
  CHECK(zeros.t_test->mean == 0.0);
  CHECK(zeros.t_test->test.p_value == 1.0);
  CHECK_FALSE(zeros.cohens_d);

  const auto j = to_json(zeros);
  CHECK(j["cohens_d"].is_null());
}

TEST_CASE("total variation distance") {
  CHECK(tv_distance({{1, 50}, {2, 50}}, {{1, 60}, {2, 40}}) == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(tv_distance({{1, 5}}, {{1, 9}}) == 0.0);
  CHECK(tv_distance({{1, 5}}, {{2, 5}}) == 1.0);
}

TEST_CASE("chi-square merges sparse bins") {
  const Histogram ref{{1, 50}, {2, 30}, {3, 15}, {4, 4}, {5, 1}};
  const auto same = chi_square(ref, ref);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == doctest::Approx(1.0));
  // The last three bins hold 20% of the mass; at n=20 they merge into one.
  const Histogram small{{1, 10}, {2, 6}, {3, 4}};
  const auto r = chi_square(ref, small);
  CHECK(r.df >= 1);
  CHECK(r.df < 4);
}

TEST_CASE("distribution comparison of identical lists") {
  const auto recs = testing::c3_records();
  for (const auto& d : compare_distributions(recs, recs)) CHECK(d.tv_distance == 0.0);
  CHECK_THROWS_AS(compare_distributions({}, recs), Error);
}

TEST_CASE("rank by length") {
  const auto b = model::build_bundle(testing::c3_records());
  const std::vector<CvRecord> two{testing::career("a", {"intern", "engineer", "manager"}),
                                  testing::career("b", {"engineer", "engineer", "manager"}),
                                  testing::career("z", {"manager", "intern"})};
  std::size_t zeros = 0;
  const auto cells = rank_by_length(two, b.combined_ngrams, &zeros);
  CHECK(zeros == 1);
  REQUIRE(cells.count(3) == 1);
  CHECK(cells.at(3).count == 2);
  CHECK(cells.at(3).avg_minus_log == doctest::Approx((-std::log(0.5) - std::log(0.16)) / 2).epsilon(1e-12));
  CHECK(cells.at(3).avg_minus_log == doctest::Approx(1.263).epsilon(1e-3));
  CHECK(cells.count(2) == 0);

  const std::vector<CvRecord> one{two[0]};
  const auto single = rank_by_length(one, b.combined_ngrams);
  CHECK(single.at(3).min_minus_log == single.at(3).avg_minus_log);
  CHECK(single.at(3).max_minus_log == single.at(3).avg_minus_log);
}

namespace {

// Ten binary rows in three loose groups.
Matrix ten_points() {
  return {{1, 1, 0, 0, 0}, {1, 1, 1, 0, 0}, {1, 0, 1, 0, 0}, {0, 0, 1, 1, 0}, {0, 0, 0, 1, 1},
          {0, 1, 0, 1, 1}, {0, 0, 0, 0, 1}, {1, 1, 1, 1, 0}, {0, 1, 1, 0, 1}, {1, 0, 0, 0, 1}};
}

}  // namespace

TEST_CASE("silhouette matches the definition") {
  const auto x = ten_points();
  const std::vector<std::vector<int>> labelings{{0, 0, 0, 1, 1, 1, 1, 0, 1, 0},
                                                {0, 0, 1, 1, 2, 2, 2, 0, 1, 2},
                                                {0, 1, 2, 3, 4, 0, 1, 2, 3, 4},
                                                {0, 0, 0, 0, 0, 0, 0, 0, 0, 1}};
  for (const auto& l : labelings) CHECK(std::abs(silhouette(x, l) - oracle::silhouette(x, l)) < 1e-12);
  CHECK(silhouette(x, std::vector<int>(10, 0)) == 0.0);
}

TEST_CASE("k-means") {
  const auto x = ten_points();
  KMeansOptions opts;
  opts.seed = 3;
  for (int k = 2; k <= 4; ++k) {
    const auto r = kmeans(x, k, opts);
    CHECK(r.restarts.size() == 20);
    double lowest = INFINITY;
    for (const auto& run : r.restarts) {
      CHECK(run.objective_non_increasing());
      CHECK(run.iterations <= 300);
      lowest = std::min(lowest, run.objective);
    }
    CHECK(r.best.objective == lowest);
  }
  opts.threads = 4;
  CHECK(kmeans(x, 3, opts).best.assignments == kmeans(x, 3, KMeansOptions{20, 300, 3, 1}).best.assignments);
}

TEST_CASE("separated duplicate blobs split perfectly") {
  Matrix x;
  for (int i = 0; i < 5; ++i) x.push_back({1, 1, 0, 0});
  for (int i = 0; i < 5; ++i) x.push_back({0, 0, 1, 1});
  const auto report = cluster_rows(x, 2, 2, {});
  CHECK(report.k == 2);
  CHECK(report.silhouette == 1.0);
  for (int i = 1; i < 5; ++i) CHECK(report.assignments[i] == report.assignments[0]);
  CHECK(report.assignments[5] != report.assignments[0]);

  // Only two distinct rows: k = 3 is skipped.
  const auto r3 = cluster_rows(x, 2, 3, {});
  CHECK(r3.degenerate_k == std::vector<int>{3});
}

TEST_CASE("membership matrix") {
  const std::vector<std::string> vocab{"engineer", "intern", "manager"};
  const auto m = membership_matrix(testing::c3_records(), vocab, RecordKind::Employment);
  CHECK(m[0] == Point{1, 1, 1});
  CHECK(m[1] == Point{1, 1, 0});
  CHECK(m[2] == Point{1, 0, 1});
}

namespace {

std::vector<CvRecord> pool(const std::string& prefix, int n) {
  std::vector<CvRecord> out;
  for (int i = 0; i < n; ++i) {
    auto r = testing::career(prefix + std::to_string(i), {"a"});
    r.first_name = "Alex";
    r.last_name = "Smith";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

TEST_CASE("questionnaire layout") {
  const auto real = pool("r", 4), art = pool("gen-", 4), rnd = pool("random-", 4);
  const auto qs = build_questionnaires(real, art, rnd, 1, 5);
  REQUIRE(qs.size() == 1);
  REQUIRE(qs[0].pairs.size() == 6);
  std::map<PairType, int> types;
  std::set<std::string> ids;
  for (const auto& p : qs[0].pairs) {
    types[*pair_type(p.left_type, p.right_type)]++;
    ids.insert(p.left.person_id);
    ids.insert(p.right.person_id);
  }
  CHECK(types[PairType::RealVsArtificial] == 2);
  CHECK(types[PairType::ArtificialVsRandom] == 2);
  CHECK(types[PairType::RealVsRandom] == 2);
  CHECK(ids.size() == 12);

  const auto again = build_questionnaires(real, art, rnd, 1, 5);
  CHECK(questionnaire_to_json(again[0]) == questionnaire_to_json(qs[0]));

  CHECK_THROWS_AS(build_questionnaires(real, art, rnd, 2, 5), Error);

  // The labelled types never leak into the respondent-facing documents.
  const auto text = questionnaire_to_json(qs[0]).dump();
  CHECK(text.find("artificial") == std::string::npos);
  CHECK(text.find("gen-") == std::string::npos);
  CHECK(text.find("random-") == std::string::npos);
  std::ostringstream doc;
  write_readable(doc, qs[0]);
  CHECK(doc.str().find("random") == std::string::npos);
  CHECK(doc.str().find("gen-") == std::string::npos);
}

TEST_CASE("response coding") {
  using PT = ProfileType;
  CHECK(coded_value(PT::Real, PT::Random, Choice::LeftMoreReal) == 1);
  CHECK(coded_value(PT::Random, PT::Real, Choice::LeftMoreReal) == -1);
  CHECK(coded_value(PT::Random, PT::Artificial, Choice::RightMoreReal) == 1);
  CHECK(coded_value(PT::Artificial, PT::Real, Choice::RightMoreReal) == 1);
  CHECK(coded_value(PT::Real, PT::Artificial, Choice::Equal) == 0);
}

TEST_CASE("responses round trip through keys") {
  const auto qs = build_questionnaires(pool("r", 4), pool("a", 4), pool("x", 4), 1, 9);
  std::ostringstream keys_text;
  for (const auto& k : answer_keys(qs)) keys_text << answer_key_to_json(k).dump() << "\n";
  std::istringstream keys_in(keys_text.str());
  const auto keys = parse_answer_keys(keys_in);
  CHECK(keys.errors.empty());
  REQUIRE(keys.keys.size() == 6);

  std::ostringstream resp;
  for (const auto& p : qs[0].pairs) {
    for (const char* who : {"e1", "e2"}) {
      resp << nlohmann::json{{"questionnaire_id", qs[0].questionnaire_id},
                             {"pair_id", p.pair_id},
                             {"respondent_id", who},
                             {"choice", "left_more_real"}}
                  .dump()
           << "\n";
    }
  }
  resp << R"({"questionnaire_id":"q999","pair_id":"q999-p1","respondent_id":"e1","choice":"left_more_real"})" << "\n";
  resp << R"({"questionnaire_id":"q001","pair_id":"q001-p1","respondent_id":"e1","choice":"maybe"})" << "\n";
  std::istringstream resp_in(resp.str());
  const auto parsed = parse_responses(resp_in);
  CHECK(parsed.errors.size() == 1);
  const auto grouped = group_responses(parsed.responses, keys.keys);
  CHECK(grouped.unmatched == std::vector<std::string>{"q999-p1"});
  std::size_t total = 0;
  for (const auto& [type, coded] : grouped.coded) {
    CHECK(coded.size() == 4);
    total += coded.size();
  }
  CHECK(total == 12);
}
