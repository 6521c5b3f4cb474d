#include "pforge/analysis/stats.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "pforge/error.hpp"

namespace pforge::analysis {
namespace {

double two_sided_t(double t, double df) {
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double two_sided_z(double z) {
  if (std::isinf(z)) return 0.0;
  boost::math::normal dist;
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(z)));
}

const double kZ975 = boost::math::quantile(boost::math::normal(), 0.975);

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (const double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "Welch t-test needs at least two values per group");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = std::pow(sample_sd(a), 2) / na;
  const double vb = std::pow(sample_sd(b), 2) / nb;
  const double diff = mean(a) - mean(b);
  TTestResult r;
  if (va + vb == 0.0) {
    r.df = na + nb - 2.0;
    if (diff == 0.0) return r;
    r.t = std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.p_value = 0.0;
    return r;
  }
  r.t = diff / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_value = two_sided_t(r.t, r.df);
  return r;
}

OneSampleResult one_sample_t_test(std::span<const double> xs, double mu) {
  if (xs.size() < 2) throw Error(ErrorCode::InsufficientData, "one-sample t-test needs at least two values");
  OneSampleResult r;
  r.n = xs.size();
  r.mean = mean(xs);
  r.sd = sample_sd(xs);
  r.test.df = static_cast<double>(r.n - 1);
  const double diff = r.mean - mu;
  if (r.sd == 0.0) {
    r.degenerate = true;
    if (diff != 0.0) {
      r.test.t = std::copysign(std::numeric_limits<double>::infinity(), diff);
      r.test.p_value = 0.0;
    }
    return r;
  }
  r.test.t = diff / (r.sd / std::sqrt(static_cast<double>(r.n)));
  r.test.p_value = two_sided_t(r.test.t, r.test.df);
  return r;
}

ProportionTest proportion_test(std::size_t successes, std::size_t trials, IntervalMethod method) {
  ProportionTest r;
  r.successes = successes;
  r.trials = trials;
  if (trials == 0) {
    r.degenerate = true;
    r.p_hat = std::numeric_limits<double>::quiet_NaN();
    r.ci_low = r.ci_high = r.p_hat;
    return r;
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  r.p_hat = p;
  r.z = (p - 0.5) / std::sqrt(0.25 / n);
  r.p_value = two_sided_z(r.z);
  if (method == IntervalMethod::Wald) {
    const double half = kZ975 * std::sqrt(p * (1.0 - p) / n);
    r.ci_low = 100.0 * (p - half);
    r.ci_high = 100.0 * (p + half);
  } else {
    const double z2 = kZ975 * kZ975;
    const double center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = kZ975 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    r.ci_low = 100.0 * (center - half);
    r.ci_high = 100.0 * (center + half);
  }
  return r;
}

std::optional<double> cohens_d(std::span<const double> xs) {
  const double sd = sample_sd(xs);
  if (xs.size() < 2 || sd == 0.0) return std::nullopt;
  return mean(xs) / sd;
}

std::vector<double> ages(std::span<const CvRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (const auto a = age_years(r)) out.push_back(*a);
  }
  return out;
}

AgeStats age_stats(std::span<const CvRecord> real, std::span<const CvRecord> artificial) {
  const auto ra = ages(real);
  const auto aa = ages(artificial);
  AgeStats s;
  s.test = welch_t_test(ra, aa);
  s.n_real = ra.size();
  s.n_artificial = aa.size();
  s.mean_real = mean(ra);
  s.sd_real = sample_sd(ra);
  s.mean_artificial = mean(aa);
  s.sd_artificial = sample_sd(aa);
  return s;
}

nlohmann::ordered_json to_json(const AgeStats& s) {
  return nlohmann::ordered_json{{"n_real", s.n_real},
                                {"n_artificial", s.n_artificial},
                                {"mean_real", s.mean_real},
                                {"sd_real", s.sd_real},
                                {"mean_artificial", s.mean_artificial},
                                {"sd_artificial", s.sd_artificial},
                                {"t_stat", s.test.t},
                                {"df", s.test.df},
                                {"p_value", s.test.p_value}};
}

}  // namespace pforge::analysis
