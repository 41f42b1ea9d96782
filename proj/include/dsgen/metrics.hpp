#pragma once

#include <span>
#include <vector>

#include "dsgen/errors.hpp"

namespace dsgen {

using PointSet = std::vector<std::vector<double>>;

enum class DistanceKind { euclidean, manhattan };
enum class SetDistanceKind { hausdorff, chamfer };

double distance(std::span<const double> a, std::span<const double> b,
                DistanceKind kind = DistanceKind::euclidean);

// exp(-0.5 d^2) with d the Euclidean distance; inputs are expected to be
// normalized or standardized by the caller.
double rbf_similarity(std::span<const double> a, std::span<const double> b);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// hausdorff: max over both directions of the largest nearest-neighbor
// distance. chamfer: mean nearest-neighbor distance in both directions,
// averaged.
double set_distance(const PointSet& a, const PointSet& b, SetDistanceKind kind);

struct HistRange {
  double lo = 0.0;
  double hi = 1.0;
};

// Histogram KL divergence for 1-D or 2-D sample sets over a shared binning
// range. Samples outside the range fall into the edge bins. Empty q bins are
// floored at eps so the value stays finite; KL(P,P) is exactly zero.
double kl_divergence_hist(const PointSet& p_samples, const PointSet& q_samples,
                          int bins_per_dim, std::span<const HistRange> range,
                          double eps = 1e-9);

double shannon_entropy(const PointSet& samples, int bins_per_dim,
                       std::span<const HistRange> range);

// Dense symmetric similarity matrix.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

  int size() const { return n_; }
  double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::vector<double>& data() const { return a_; }

 private:
  int n_ = 0;
  std::vector<double> a_;
};

// Unit-diagonal RBF kernel over row vectors.
SimilarityMatrix rbf_kernel(const PointSet& rows);

// log det of the principal submatrix selected by `subset`; -inf for singular
// submatrices. Throws on out-of-range indices.
double dpp_log_det(std::span<const int> subset, const SimilarityMatrix& kernel);

struct HullBoxResult {
  double hull_area = 0.0;
  double box_area = 0.0;
  double circle_area = 0.0;
  bool degenerate = false;  // fewer than 3 points or all collinear
};

// Convex hull (monotone chain + shoelace), axis-aligned bounding box, and
// minimal enclosing circle (Welzl) areas of a 2-D point set.
HullBoxResult hull_and_box(const PointSet& points);

struct NnStats {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Exact nearest-neighbor distance statistics (brute force for small sets, a
// sorted sweep with pruning above that).
NnStats nn_distance_stats(const PointSet& points);

}  // namespace dsgen
