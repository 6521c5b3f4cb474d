#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "json.hpp"
#include "pforge/record.hpp"

namespace pforge::analysis {

double mean(std::span<const double> xs);
// Sample (n - 1) standard deviation.
double sample_sd(std::span<const double> xs);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // two-sided
};

// Welch's unequal-variance two-sample test. Throws INSUFFICIENT_DATA when
// either side has fewer than two values.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct OneSampleResult {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
  TTestResult test;
  bool degenerate = false;  // sd == 0
};

OneSampleResult one_sample_t_test(std::span<const double> xs, double mu = 0.0);

enum class IntervalMethod { Wald, Wilson };

struct ProportionTest {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;   // percent
  double ci_high = 0.0;  // percent
  double z = 0.0;
  double p_value = 1.0;  // two-sided, against 0.5
  bool degenerate = false;  // no trials
};

// One-sample z-test of a success rate against 0.5 with a 95% interval.
ProportionTest proportion_test(std::size_t successes, std::size_t trials,
                               IntervalMethod method = IntervalMethod::Wald);

// Standardized mean (mean / sample sd); nullopt when sd is zero.
std::optional<double> cohens_d(std::span<const double> xs);

struct AgeStats {
  std::size_t n_real = 0;
  std::size_t n_artificial = 0;
  double mean_real = 0.0;
  double sd_real = 0.0;
  double mean_artificial = 0.0;
  double sd_artificial = 0.0;
  TTestResult test;
};

std::vector<double> ages(std::span<const CvRecord> records);

// Welch test on record ages; records without a derivable age are skipped.
AgeStats age_stats(std::span<const CvRecord> real, std::span<const CvRecord> artificial);

nlohmann::ordered_json to_json(const AgeStats& stats);

}  // namespace pforge::analysis
