#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pforge/combined_sequence.hpp"
#include "pforge/record.hpp"

namespace pforge::analysis {

using Point = std::vector<double>;
using Matrix = std::vector<Point>;

// Row per profile, column per vocabulary entry: 1 when the profile holds
// that position (Employment) or education type (Education).
Matrix membership_matrix(std::span<const CvRecord> profiles, std::span<const std::string> vocab,
                         RecordKind kind);

double squared_distance(const Point& a, const Point& b);

struct KMeansOptions {
  int restarts = 20;
  int max_iterations = 300;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct KMeansRun {
  std::vector<int> assignments;
  Matrix centroids;
  double objective = 0.0;                 // within-cluster sum of squares
  std::vector<double> objective_history;  // after every assignment step
  int iterations = 0;
  bool converged = false;

  bool objective_non_increasing() const;
};

// One Lloyd run from k-means++ (D^2-weighted) seeding.
KMeansRun kmeans_once(const Matrix& rows, int k, int max_iterations, std::uint64_t seed);

struct KMeansResult {
  KMeansRun best;  // lowest objective, ties to the lowest restart index
  std::vector<KMeansRun> restarts;
};

// Restart r is seeded with split_seed(opts.seed, r).
KMeansResult kmeans(const Matrix& rows, int k, const KMeansOptions& opts);

// Mean over points of (b - a) / max(a, b) with Euclidean distances; a point
// alone in its cluster scores 0. Returns 0 with fewer than two clusters.
double silhouette(const Matrix& rows, std::span<const int> assignments);

std::size_t distinct_rows(const Matrix& rows);

struct ClusterReport {
  int k = 0;  // argmax of the silhouette curve
  std::vector<int> assignments;
  double silhouette = 0.0;
  std::map<int, double> silhouette_by_k;
  std::vector<int> degenerate_k;  // skipped: fewer distinct rows than k
  bool objective_monotone = true;  // across every restart of every k
};

// Throws INVALID_ARGUMENT for k_min < 2 or k_max < k_min, INSUFFICIENT_DATA
// when every k is degenerate.
ClusterReport cluster_diversity(std::span<const CvRecord> profiles, std::span<const std::string> vocab,
                                RecordKind kind, int k_min, int k_max, const KMeansOptions& opts);

ClusterReport cluster_rows(const Matrix& rows, int k_min, int k_max, const KMeansOptions& opts);

nlohmann::ordered_json to_json(const ClusterReport& report, std::span<const CvRecord> profiles);

}  // namespace pforge::analysis
