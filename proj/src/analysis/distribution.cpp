#include "pforge/analysis/distribution.hpp"

#include <cmath>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "pforge/error.hpp"

namespace pforge::analysis {
namespace {

std::uint64_t total(const Histogram& h) {
  std::uint64_t t = 0;
  for (const auto& kv : h) t += kv.second;
  return t;
}

template <typename Fn>
Histogram histogram_of(std::span<const CvRecord> records, Fn value) {
  Histogram h;
  for (const auto& r : records) ++h[value(r)];
  return h;
}

nlohmann::ordered_json hist_json(const Histogram& h) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [bin, count] : h) arr.push_back(nlohmann::ordered_json::array({bin, count}));
  return arr;
}

}  // namespace

double tv_distance(const Histogram& p, const Histogram& q) {
  const auto tp = total(p);
  const auto tq = total(q);
  if (tp == 0 && tq == 0) return 0.0;
  if (tp == 0 || tq == 0) return 1.0;
  std::set<std::int64_t> support;
  for (const auto& kv : p) support.insert(kv.first);
  for (const auto& kv : q) support.insert(kv.first);
  double sum = 0.0;
  for (const auto bin : support) {
    const auto pi = p.count(bin) ? p.at(bin) : 0;
    const auto qi = q.count(bin) ? q.at(bin) : 0;
    sum += std::abs(static_cast<double>(pi) / static_cast<double>(tp) -
                    static_cast<double>(qi) / static_cast<double>(tq));
  }
  return std::min(1.0, 0.5 * sum);
}

ChiSquare chi_square(const Histogram& reference, const Histogram& observed) {
  ChiSquare result;
  const auto tr = total(reference);
  const auto to = total(observed);
  if (tr == 0 || to == 0) return result;
  std::set<std::int64_t> support;
  for (const auto& kv : reference) support.insert(kv.first);
  for (const auto& kv : observed) support.insert(kv.first);

  struct Group {
    double observed = 0.0;
    double expected = 0.0;
  };
  std::vector<Group> groups;
  Group open;
  for (const auto bin : support) {
    open.observed += observed.count(bin) ? static_cast<double>(observed.at(bin)) : 0.0;
    open.expected += reference.count(bin)
                         ? static_cast<double>(to) * static_cast<double>(reference.at(bin)) / static_cast<double>(tr)
                         : 0.0;
    if (open.expected >= 5.0) {
      groups.push_back(open);
      open = {};
    }
  }
  if (open.observed > 0.0 || open.expected > 0.0) {
    if (groups.empty()) {
      groups.push_back(open);
    } else {
      groups.back().observed += open.observed;
      groups.back().expected += open.expected;
    }
  }
  result.df = static_cast<int>(groups.size()) - 1;
  if (result.df < 1) return result;
  for (const auto& g : groups) {
    const double d = g.observed - g.expected;
    result.statistic += d * d / g.expected;
  }
  boost::math::chi_squared dist(result.df);
  result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  return result;
}

Histogram employment_period_histogram(std::span<const CvRecord> records) {
  return histogram_of(records, [](const CvRecord& r) { return static_cast<std::int64_t>(r.employment.size()); });
}

Histogram education_period_histogram(std::span<const CvRecord> records) {
  return histogram_of(records, [](const CvRecord& r) { return static_cast<std::int64_t>(r.education.size()); });
}

Histogram combined_period_histogram(std::span<const CvRecord> records) {
  return histogram_of(records, [](const CvRecord& r) {
    return static_cast<std::int64_t>(r.employment.size() + r.education.size());
  });
}

Histogram age_histogram(std::span<const CvRecord> records) {
  Histogram h;
  for (const auto& r : records) {
    if (const auto age = age_years(r)) ++h[static_cast<std::int64_t>(std::floor(*age))];
  }
  return h;
}

std::vector<DistributionReport> compare_distributions(std::span<const CvRecord> real,
                                                      std::span<const CvRecord> artificial) {
  if (real.empty() || artificial.empty()) {
    throw Error(ErrorCode::EmptyInput, "compare_distributions needs both populations");
  }
  std::vector<DistributionReport> reports;
  auto add = [&](std::string label, Histogram (*fn)(std::span<const CvRecord>)) {
    DistributionReport r;
    r.label = std::move(label);
    r.real_hist = fn(real);
    r.artificial_hist = fn(artificial);
    r.tv_distance = tv_distance(r.real_hist, r.artificial_hist);
    r.chi_square = chi_square(r.real_hist, r.artificial_hist);
    reports.push_back(std::move(r));
  };
  add("employment_periods", employment_period_histogram);
  add("education_periods", education_period_histogram);
  add("combined_periods", combined_period_histogram);
  add("age_years", age_histogram);
  return reports;
}

nlohmann::ordered_json to_json(const DistributionReport& r) {
  return nlohmann::ordered_json{{"label", r.label},
                                {"real_hist", hist_json(r.real_hist)},
                                {"artificial_hist", hist_json(r.artificial_hist)},
                                {"tv_distance", r.tv_distance},
                                {"chi_square_stat", r.chi_square.statistic},
                                {"chi_square_df", r.chi_square.df},
                                {"p_value", r.chi_square.p_value}};
}

}  // namespace pforge::analysis
