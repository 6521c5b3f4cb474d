#include "pforge/analysis/rank_by_length.hpp"

#include <algorithm>

#include "pforge/validator.hpp"

namespace pforge::analysis {

RankByLength rank_by_length(std::span<const CvRecord> profiles, const model::NgramTable& ngrams,
                            std::size_t* zero_excluded) {
  std::map<std::size_t, std::vector<double>> buckets;
  std::size_t zeros = 0;
  for (const auto& p : profiles) {
    const auto states = validator::combined_states(p);
    const auto report = validator::likelihood_rank(states, ngrams);
    if (report.is_zero()) {
      ++zeros;
      continue;
    }
    buckets[states.size()].push_back(report.minus_log);
  }
  if (zero_excluded != nullptr) *zero_excluded = zeros;
  RankByLength out;
  for (const auto& [length, values] : buckets) {
    RankCell cell;
    cell.count = values.size();
    double sum = 0.0;
    for (const double v : values) sum += v;
    cell.avg_minus_log = sum / static_cast<double>(values.size());
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    cell.min_minus_log = *lo;
    cell.max_minus_log = *hi;
    // Summation rounding must not push the mean outside [min, max].
    cell.avg_minus_log = std::clamp(cell.avg_minus_log, cell.min_minus_log, cell.max_minus_log);
    out[length] = cell;
  }
  return out;
}

RankByLengthReport rank_by_length(std::span<const CvRecord> real, std::span<const CvRecord> artificial,
                                  const model::ModelBundle& bundle) {
  RankByLengthReport r;
  r.real = rank_by_length(real, bundle.combined_ngrams, &r.real_zero_excluded);
  r.artificial = rank_by_length(artificial, bundle.combined_ngrams, &r.artificial_zero_excluded);
  return r;
}

nlohmann::ordered_json to_json(const RankByLengthReport& report) {
  using nlohmann::ordered_json;
  auto cells = [](const RankByLength& table) {
    auto arr = ordered_json::array();
    for (const auto& [length, c] : table) {
      arr.push_back(ordered_json{{"length", length},
                                 {"count", c.count},
                                 {"avg_minus_log", c.avg_minus_log},
                                 {"min_minus_log", c.min_minus_log},
                                 {"max_minus_log", c.max_minus_log}});
    }
    return arr;
  };
  return ordered_json{{"real", cells(report.real)},
                      {"artificial", cells(report.artificial)},
                      {"real_zero_excluded", report.real_zero_excluded},
                      {"artificial_zero_excluded", report.artificial_zero_excluded}};
}

}  // namespace pforge::analysis
