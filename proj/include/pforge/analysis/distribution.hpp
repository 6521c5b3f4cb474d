#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pforge/record.hpp"

namespace pforge::analysis {

using Histogram = std::map<std::int64_t, std::uint64_t>;

// Half the L1 distance between the normalized histograms over their union
// support. Two empty histograms are at distance 0; one empty is at 1.
double tv_distance(const Histogram& p, const Histogram& q);

struct ChiSquare {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// Pearson goodness-of-fit of `observed` against the proportions of
// `reference`, scaled to the observed total. Adjacent bins (in key order)
// are merged until each expected count is at least 5.
ChiSquare chi_square(const Histogram& reference, const Histogram& observed);

struct DistributionReport {
  std::string label;
  Histogram real_hist;
  Histogram artificial_hist;
  double tv_distance = 0.0;
  ChiSquare chi_square;
};

Histogram employment_period_histogram(std::span<const CvRecord> records);
Histogram education_period_histogram(std::span<const CvRecord> records);
Histogram combined_period_histogram(std::span<const CvRecord> records);
Histogram age_histogram(std::span<const CvRecord> records);  // integer-year bins

// Reports, in order: employment_periods, education_periods,
// combined_periods, age_years. Throws EMPTY_INPUT.
std::vector<DistributionReport> compare_distributions(std::span<const CvRecord> real,
                                                      std::span<const CvRecord> artificial);

nlohmann::ordered_json to_json(const DistributionReport& report);

}  // namespace pforge::analysis
