#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pforge/fixture.hpp"
#include "pforge/interchange.hpp"

using namespace pforge;

TEST_CASE("committed fixture matches the builder") {
  std::ostringstream built;
  interchange::write_records(built, fixture::build_fixture());
  std::ifstream in(PFORGE_DATA_DIR "/fixture_corpus.jsonl", std::ios::binary);
  std::stringstream committed;
  committed << in.rdbuf();
  CHECK(committed.str() == built.str());

  std::string gaz;
  for (const auto& l : fixture::gazetteer_lines()) gaz += l + "\n";
  std::ifstream gin(PFORGE_DATA_DIR "/gazetteer.jsonl", std::ios::binary);
  std::stringstream gc;
  gc << gin.rdbuf();
  CHECK(gc.str() == gaz);
}

TEST_CASE("fixture shape") {
  const auto recs = fixture::build_fixture({400, 3});
  std::map<std::pair<std::size_t, std::size_t>, int> joint;
  std::set<std::string> positions, types;
  for (const auto& r : recs) {
    joint[{r.employment.size(), r.education.size()}]++;
    for (const auto& e : r.employment) positions.insert(e.position);
    for (const auto& e : r.education) types.insert(e.education_type);
    // Every degree starts before the first job.
    for (const auto& e : r.education) CHECK(e.start < r.employment.front().start);
  }
  CHECK(positions.size() == 12);
  CHECK(types.size() == 6);
  // 20 x 10 slot layout: each (employment, education) cell is a product of marginals.
  CHECK(joint[{3, 1}] == 2 * 5 * 5);
  CHECK(joint[{6, 3}] == 2 * 2 * 2);
}
