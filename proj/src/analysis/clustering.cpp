#include "pforge/analysis/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pforge/error.hpp"
#include "pforge/parallel.hpp"
#include "pforge/rng.hpp"

namespace pforge::analysis {
namespace {

int nearest(const Point& p, const Matrix& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

Matrix seed_centroids(const Matrix& rows, int k, Rng& rng) {
  Matrix centroids;
  centroids.push_back(rows[rng.below(rows.size())]);
  std::vector<double> d2(rows.size(), std::numeric_limits<double>::infinity());
  while (static_cast<int>(centroids.size()) < k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      d2[i] = std::min(d2[i], squared_distance(rows[i], centroids.back()));
      sum += d2[i];
    }
    std::size_t pick = rows.size() - 1;
    if (sum > 0.0) {
      double target = rng.uniform01() * sum;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (d2[i] <= 0.0) continue;
        if (target < d2[i]) {
          pick = i;
          break;
        }
        target -= d2[i];
        pick = i;  // rounding lands on the last positive-weight row
      }
    } else {
      pick = rng.below(rows.size());
    }
    centroids.push_back(rows[pick]);
  }
  return centroids;
}

}  // namespace

Matrix membership_matrix(std::span<const CvRecord> profiles, std::span<const std::string> vocab,
                         RecordKind kind) {
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < vocab.size(); ++i) column.emplace(vocab[i], i);
  Matrix m;
  m.reserve(profiles.size());
  for (const auto& p : profiles) {
    Point row(vocab.size(), 0.0);
    auto mark = [&](const std::string& state) {
      const auto it = column.find(state);
      if (it != column.end()) row[it->second] = 1.0;
    };
    if (kind == RecordKind::Employment) {
      for (const auto& e : p.employment) mark(e.position);
    } else {
      for (const auto& e : p.education) mark(e.education_type);
    }
    m.push_back(std::move(row));
  }
  return m;
}

double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

bool KMeansRun::objective_non_increasing() const {
  for (std::size_t i = 1; i < objective_history.size(); ++i) {
    // Tolerance covers re-summation of identical assignments in another order.
    if (objective_history[i] > objective_history[i - 1] * (1.0 + 1e-12) + 1e-12) return false;
  }
  return true;
}

KMeansRun kmeans_once(const Matrix& rows, int k, int max_iterations, std::uint64_t seed) {
  Rng rng(seed);
  KMeansRun run;
  run.centroids = seed_centroids(rows, k, rng);
  run.assignments.assign(rows.size(), -1);
  const std::size_t dim = rows.front().size();
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    double objective = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int c = nearest(rows[i], run.centroids);
      if (c != run.assignments[i]) {
        run.assignments[i] = c;
        changed = true;
      }
      objective += squared_distance(rows[i], run.centroids[c]);
    }
    run.objective_history.push_back(objective);
    run.objective = objective;
    run.iterations = iter + 1;
    if (!changed) {
      run.converged = true;
      break;
    }
    // Empty clusters keep their previous centroid.
    Matrix sums(k, Point(dim, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int c = run.assignments[i];
      ++sizes[c];
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] += rows[i][d];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) run.centroids[c][d] = sums[c][d] / static_cast<double>(sizes[c]);
    }
  }
  return run;
}

KMeansResult kmeans(const Matrix& rows, int k, const KMeansOptions& opts) {
  if (rows.empty() || k < 1) throw Error(ErrorCode::InvalidArgument, "k-means needs rows and k >= 1");
  KMeansResult result;
  result.restarts.resize(std::max(1, opts.restarts));
  parallel_for(result.restarts.size(), opts.threads, [&](std::size_t r) {
    result.restarts[r] = kmeans_once(rows, k, opts.max_iterations, split_seed(opts.seed, r));
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < result.restarts.size(); ++r) {
    if (result.restarts[r].objective < result.restarts[best].objective) best = r;
  }
  result.best = result.restarts[best];
  return result;
}

double silhouette(const Matrix& rows, std::span<const int> assignments) {
  const std::size_t n = rows.size();
  std::map<int, std::size_t> sizes;
  for (const int a : assignments) ++sizes[a];
  if (sizes.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::map<int, double> sum_by_cluster;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum_by_cluster[assignments[j]] += std::sqrt(squared_distance(rows[i], rows[j]));
    }
    const int own = assignments[i];
    if (sizes[own] == 1) continue;  // contributes 0
    const double a = sum_by_cluster[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [cluster, size] : sizes) {
      if (cluster == own) continue;
      b = std::min(b, sum_by_cluster[cluster] / static_cast<double>(size));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

std::size_t distinct_rows(const Matrix& rows) { return std::set<Point>(rows.begin(), rows.end()).size(); }

ClusterReport cluster_rows(const Matrix& rows, int k_min, int k_max, const KMeansOptions& opts) {
  if (k_min < 2 || k_max < k_min) throw Error(ErrorCode::InvalidArgument, "need 2 <= k_min <= k_max");
  const auto distinct = distinct_rows(rows);
  ClusterReport report;
  bool have_best = false;
  for (int k = k_min; k <= k_max; ++k) {
    if (distinct < static_cast<std::size_t>(k)) {
      report.degenerate_k.push_back(k);
      continue;
    }
    const auto result = kmeans(rows, k, opts);
    for (const auto& run : result.restarts) {
      report.objective_monotone = report.objective_monotone && run.objective_non_increasing();
    }
    const double s = silhouette(rows, result.best.assignments);
    report.silhouette_by_k[k] = s;
    if (!have_best || s > report.silhouette) {
      have_best = true;
      report.k = k;
      report.silhouette = s;
      report.assignments = result.best.assignments;
    }
  }
  if (!have_best) {
    throw Error(ErrorCode::InsufficientData, "every k in range exceeds the " + std::to_string(distinct) +
                                                 " distinct rows (DEGENERATE_K)");
  }
  return report;
}

ClusterReport cluster_diversity(std::span<const CvRecord> profiles, std::span<const std::string> vocab,
                                RecordKind kind, int k_min, int k_max, const KMeansOptions& opts) {
  if (profiles.empty()) throw Error(ErrorCode::EmptyInput, "no profiles to cluster");
  return cluster_rows(membership_matrix(profiles, vocab, kind), k_min, k_max, opts);
}

nlohmann::ordered_json to_json(const ClusterReport& r, std::span<const CvRecord> profiles) {
  using nlohmann::ordered_json;
  auto curve = ordered_json::array();
  for (const auto& [k, s] : r.silhouette_by_k) curve.push_back(ordered_json{{"k", k}, {"silhouette", s}});
  auto assignments = ordered_json::array();
  for (std::size_t i = 0; i < r.assignments.size(); ++i) {
    assignments.push_back(ordered_json{{"person_id", i < profiles.size() ? profiles[i].person_id : ""},
                                       {"cluster", r.assignments[i]}});
  }
  return ordered_json{{"k", r.k},
                      {"silhouette", r.silhouette},
                      {"silhouette_by_k", std::move(curve)},
                      {"degenerate_k", r.degenerate_k},
                      {"objective_monotone", r.objective_monotone},
                      {"assignments", std::move(assignments)}};
}

}  // namespace pforge::analysis
