#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsgen/errors.hpp"
#include "dsgen/metrics.hpp"

namespace dsgen {

struct ColumnStats {
  double mean = 0.0;
  double variance = 0.0;  // sample variance (n-1); 0 for n < 2
  double median = 0.0;    // lower-middle element for even n
  double iqr = 0.0;       // linear-interpolation quartiles
  double min = 0.0;
  double max = 0.0;
  std::vector<std::size_t> histogram;  // equal-width bins over [min, max]
};

ColumnStats descriptive_stats(std::span<const double> column, int histogram_bins = 10);

enum class CorrelationKind { pearson, spearman };

// Correlation matrix over columns; zero-variance columns yield NaN entries.
std::vector<std::vector<double>> correlation(const PointSet& columns, CorrelationKind kind);

// One-way F statistic of a numeric column against a binary class.
double anova_f(std::span<const double> column, std::span<const int> cls);

struct PCAModel {
  std::vector<double> mean;                 // over kept columns
  std::vector<double> scale;                // standardization divisor
  std::vector<int> kept_columns;            // indices into the input columns
  std::vector<int> dropped_columns;         // zero-variance columns
  std::vector<std::vector<double>> components;  // k x kept, orthonormal rows
  std::vector<double> explained_variance;       // nonincreasing
  std::vector<double> explained_variance_ratio;
};

// PCA on internally standardized data. Sign convention: the largest-magnitude
// loading of each component is positive.
PCAModel pca_fit(const PointSet& rows, int k);
PointSet pca_transform(const PCAModel& model, const PointSet& rows);

struct KMeansResult {
  std::vector<int> assignment;
  PointSet centroids;
  double inertia = 0.0;
  int iterations = 0;
};

// Seeded k-means++ initialization followed by Lloyd iterations until the
// assignment reaches a fixpoint; empty clusters are reseeded to the point
// farthest from its centroid.
KMeansResult kmeans(const PointSet& rows, int n_clusters, std::uint64_t seed,
                    int max_iter = 300);

struct KnnModel {
  int k = 15;
  PointSet x;           // caller-normalized feature rows
  std::vector<int> y;   // binary labels (1 = positive/working)
};

KnnModel knn_fit(PointSet train_x, std::vector<int> train_y, int k_neighbors = 15);

// Majority vote among the k nearest (Euclidean); ties break toward the
// negative class.
std::vector<int> knn_predict(const KnnModel& model, const PointSet& rows, int workers = 1);

// 2TP / (2TP + FP + FN); 0/0 is defined as 0.
double f1_score(std::span<const int> predictions, std::span<const int> truth);

// Mean F1 drop over `repeats` shuffles of each feature column.
std::vector<double> permutation_importance(const KnnModel& model, const PointSet& test_x,
                                           const std::vector<int>& test_y, int repeats,
                                           std::uint64_t seed, int workers = 1);

struct TestSetView {
  std::string name;
  const PointSet* x = nullptr;
  const std::vector<int>* y = nullptr;
};

struct LearningCurvePoint {
  std::size_t train_size = 0;
  std::string test_set;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;
};

// For each size: `repeats` independent subsamples of the pool, fit, score on
// every test set. Output rows are sorted by size (test sets in given order).
std::vector<LearningCurvePoint> learning_curve(const PointSet& pool_x,
                                               const std::vector<int>& pool_y,
                                               const std::vector<TestSetView>& tests,
                                               std::vector<std::size_t> sizes, int repeats,
                                               std::uint64_t seed, int k_neighbors = 15,
                                               int workers = 1);

// Column-wise standardization to zero mean / unit variance; zero-variance
// columns become zeros.
PointSet standardize_rows(const PointSet& rows);

}  // namespace dsgen
