#pragma once

#include <cstddef>
#include <map>
#include <span>

#include "json.hpp"
#include "pforge/model.hpp"

namespace pforge::analysis {

struct RankCell {
  std::size_t count = 0;
  double avg_minus_log = 0.0;
  double min_minus_log = 0.0;
  double max_minus_log = 0.0;
};

using RankByLength = std::map<std::size_t, RankCell>;  // keyed by combined length

struct RankByLengthReport {
  RankByLength real;
  RankByLength artificial;
  std::size_t real_zero_excluded = 0;
  std::size_t artificial_zero_excluded = 0;
};

// Aggregates minus-log likelihood rank per combined length. Zero-rank
// profiles belong to no bucket and are only counted.
RankByLength rank_by_length(std::span<const CvRecord> profiles, const model::NgramTable& ngrams,
                            std::size_t* zero_excluded = nullptr);

RankByLengthReport rank_by_length(std::span<const CvRecord> real, std::span<const CvRecord> artificial,
                                  const model::ModelBundle& bundle);

nlohmann::ordered_json to_json(const RankByLengthReport& report);

}  // namespace pforge::analysis
