#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pforge/corpus.hpp"
#include "pforge/record.hpp"

// Deterministic synthetic CV corpus used as the bundled fixture.
//
// Two countries (Northland 70%, Southland 30%), each with one city; the
// cities are about 700 km apart. Position and education-type sequences come
// from fixed first-order chains that move up one level per step, and every
// degree starts before the first job. Employment and
// education period counts are laid out as a full factorial over 20 x 10
// slots, so in any multiple of 200 records the joint count distribution is
// exactly the product of its marginals. Jobs follow each other without gaps.
namespace pforge::fixture {

inline constexpr GeoPoint kNorthport{50.0, 10.0};
inline constexpr GeoPoint kSouthport{43.7, 10.0};

struct FixtureOptions {
  std::size_t count = 200;
  std::uint64_t seed = 20210601;
};

std::vector<CvRecord> build_fixture(const FixtureOptions& opts = {});

struct PlantedViolation {
  std::string person_id;
  corpus::RejectReason reason;
};

struct DirtyFixture {
  std::vector<std::string> lines;  // one serialized record (or garbage) per line
  std::vector<std::size_t> corrupted_lines;  // 1-based
  std::vector<PlantedViolation> planted;
  std::vector<std::string> fixable_unsorted;  // person_ids re-sorted by cleaning
};

// The clean fixture with `per_reason` records broken for each rejection
// reason, two records with repairable date order, and `corrupted` lines
// replaced by malformed text.
DirtyFixture build_dirty_fixture(const FixtureOptions& opts = {}, std::size_t per_reason = 2,
                                 std::size_t corrupted = 3);

// Gazetteer lines for the fixture's two cities.
std::vector<std::string> gazetteer_lines();

}  // namespace pforge::fixture
