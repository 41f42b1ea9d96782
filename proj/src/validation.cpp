#include "dsgen/validation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>

#include "dsgen/rng.hpp"

namespace dsgen {

namespace {

// Linear-interpolation quantile on sorted data (numpy's default rule).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const int t = std::min<int>(workers, static_cast<int>(n));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(t));
  for (int w = 0; w < t; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(t))
        body(i);
    });
  }
  for (auto& th : threads) th.join();
}

std::vector<double> fractional_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // average tie rank, 1-based
    for (std::size_t q = i; q <= j; ++q) ranks[order[q]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

ColumnStats descriptive_stats(std::span<const double> column, int histogram_bins) {
  if (column.empty()) throw DataError("descriptive_stats: empty column");
  ColumnStats s;
  const std::size_t n = column.size();
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  for (const double v : sorted) s.mean += v;
  s.mean /= static_cast<double>(n);
  if (n > 1) {
    double acc = 0.0;
    for (const double v : sorted) acc += (v - s.mean) * (v - s.mean);
    s.variance = acc / static_cast<double>(n - 1);
  }
  s.median = sorted[(n - 1) / 2];  // lower-middle for even n
  s.iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  if (histogram_bins > 0) {
    s.histogram.assign(static_cast<std::size_t>(histogram_bins), 0);
    const double width = s.max - s.min;
    for (const double v : sorted) {
      int bin = width > 0 ? static_cast<int>((v - s.min) / width * histogram_bins) : 0;
      bin = std::clamp(bin, 0, histogram_bins - 1);
      ++s.histogram[static_cast<std::size_t>(bin)];
    }
  }
  return s;
}

std::vector<std::vector<double>> correlation(const PointSet& columns, CorrelationKind kind) {
  const std::size_t d = columns.size();
  if (d == 0) return {};
  const std::size_t n = columns[0].size();
  if (n < 2) throw DataError("correlation: needs at least two rows");
  for (const auto& c : columns)
    if (c.size() != n) throw DataError("correlation: ragged columns");

  PointSet work;
  const PointSet* src = &columns;
  if (kind == CorrelationKind::spearman) {
    work.reserve(d);
    for (const auto& c : columns) work.push_back(fractional_ranks(c));
    src = &work;
  }
  std::vector<std::vector<double>> m(d, std::vector<double>(d, 1.0));
  for (std::size_t i = 0; i < d; ++i) {
    // A constant column is undefined even against itself.
    const double self = pearson((*src)[i], (*src)[i]);
    m[i][i] = std::isnan(self) ? self : 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      const double r = pearson((*src)[i], (*src)[j]);
      m[i][j] = r;
      m[j][i] = r;
    }
  }
  return m;
}

double anova_f(std::span<const double> column, std::span<const int> cls) {
  if (column.size() != cls.size()) throw DataError("anova_f: length mismatch");
  const std::size_t n = column.size();
  if (n < 3) throw DataError("anova_f: needs at least three rows");
  double sum[2] = {0, 0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const int g = cls[i] ? 1 : 0;
    sum[g] += column[i];
    ++count[g];
  }
  if (count[0] == 0 || count[1] == 0) return 0.0;
  const double grand = (sum[0] + sum[1]) / static_cast<double>(n);
  const double mean0 = sum[0] / static_cast<double>(count[0]);
  const double mean1 = sum[1] / static_cast<double>(count[1]);
  double ss_between = static_cast<double>(count[0]) * (mean0 - grand) * (mean0 - grand) +
                      static_cast<double>(count[1]) * (mean1 - grand) * (mean1 - grand);
  double ss_within = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = cls[i] ? mean1 : mean0;
    ss_within += (column[i] - mu) * (column[i] - mu);
  }
  const double df_within = static_cast<double>(n - 2);
  if (ss_within <= 0.0) return std::numeric_limits<double>::infinity();
  return (ss_between / 1.0) / (ss_within / df_within);
}

PointSet standardize_rows(const PointSet& rows) {
  if (rows.empty()) return {};
  const std::size_t d = rows[0].size();
  const std::size_t n = rows.size();
  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
  for (auto& m : mean) m /= static_cast<double>(n);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) sd[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
  for (auto& s : sd) s = std::sqrt(s / static_cast<double>(n));
  PointSet out(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out[i][j] = sd[j] > 0.0 ? (rows[i][j] - mean[j]) / sd[j] : 0.0;
  return out;
}

PCAModel pca_fit(const PointSet& rows, int k) {
  const std::size_t n = rows.size();
  if (n < 2) throw DataError("pca_fit: needs at least two rows");
  const std::size_t d = rows[0].size();
  for (const auto& r : rows)
    if (r.size() != d) throw DataError("pca_fit: ragged rows");

  PCAModel model;
  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
  for (auto& m : mean) m /= static_cast<double>(n);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) sd[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
  for (auto& s : sd) s = std::sqrt(s / static_cast<double>(n));

  for (std::size_t j = 0; j < d; ++j) {
    if (sd[j] > 1e-12) {
      model.kept_columns.push_back(static_cast<int>(j));
      model.mean.push_back(mean[j]);
      model.scale.push_back(sd[j]);
    } else {
      model.dropped_columns.push_back(static_cast<int>(j));
    }
  }
  const std::size_t kept = model.kept_columns.size();
  if (kept == 0) throw DataError("pca_fit: all columns have zero variance");
  if (k < 1 || static_cast<std::size_t>(k) > std::min(n, kept))
    k = static_cast<int>(std::min(n, kept));

  Eigen::MatrixXd z(n, kept);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < kept; ++j)
      z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (rows[i][static_cast<std::size_t>(model.kept_columns[j])] - model.mean[j]) /
          model.scale[j];
  const Eigen::MatrixXd cov = z.transpose() * z / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);

  // Eigen returns ascending order; take the top-k from the back.
  for (int c = 0; c < k; ++c) {
    const Eigen::Index col = static_cast<Eigen::Index>(kept) - 1 - c;
    Eigen::VectorXd v = eig.eigenvectors().col(col);
    Eigen::Index arg_max = 0;
    v.cwiseAbs().maxCoeff(&arg_max);
    if (v(arg_max) < 0) v = -v;
    model.components.emplace_back(v.data(), v.data() + v.size());
    model.explained_variance.push_back(std::max(eig.eigenvalues()(col), 0.0));
  }
  const double total = std::max(eig.eigenvalues().cwiseMax(0.0).sum(),
                                std::numeric_limits<double>::min());
  for (const double ev : model.explained_variance)
    model.explained_variance_ratio.push_back(ev / total);
  return model;
}

PointSet pca_transform(const PCAModel& model, const PointSet& rows) {
  const std::size_t kept = model.kept_columns.size();
  PointSet out;
  out.reserve(rows.size());
  std::vector<double> z(kept);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < kept; ++j)
      z[j] = (r[static_cast<std::size_t>(model.kept_columns[j])] - model.mean[j]) /
             model.scale[j];
    std::vector<double> y(model.components.size(), 0.0);
    for (std::size_t c = 0; c < model.components.size(); ++c)
      for (std::size_t j = 0; j < kept; ++j) y[c] += model.components[c][j] * z[j];
    out.push_back(std::move(y));
  }
  return out;
}

KMeansResult kmeans(const PointSet& rows, int n_clusters, std::uint64_t seed, int max_iter) {
  const std::size_t n = rows.size();
  if (n == 0) throw DataError("kmeans: empty input");
  if (n_clusters < 1 || static_cast<std::size_t>(n_clusters) > n)
    throw DataError("kmeans: n_clusters must be in [1, N]");
  const std::size_t d = rows[0].size();

  Rng rng(seed);
  KMeansResult res;
  res.centroids.reserve(static_cast<std::size_t>(n_clusters));

  // k-means++ seeding.
  res.centroids.push_back(rows[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(n) - 1))]);
  std::vector<double> d2(n);
  while (res.centroids.size() < static_cast<std::size_t>(n_clusters)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : res.centroids) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = rows[i][j] - c[j];
          acc += diff * diff;
        }
        best = std::min(best, acc);
      }
      d2[i] = best;
      total += best;
    }
    std::size_t pick;
    if (total <= 0.0) {
      pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    } else {
      const double target = rng.uniform01() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    }
    res.centroids.push_back(rows[pick]);
  }

  res.assignment.assign(n, -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best_c = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < res.centroids.size(); ++c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = rows[i][j] - res.centroids[c][j];
          acc += diff * diff;
        }
        if (acc < best_d) {
          best_d = acc;
          best_c = static_cast<int>(c);
        }
      }
      if (res.assignment[i] != best_c) {
        res.assignment[i] = best_c;
        changed = true;
      }
      inertia += best_d;
    }
    res.inertia = inertia;
    if (!changed && iter > 0) break;

    PointSet sums(static_cast<std::size_t>(n_clusters), std::vector<double>(d, 0.0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_clusters), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(res.assignment[i]);
      ++counts[c];
      for (std::size_t j = 0; j < d; ++j) sums[c][j] += rows[i][j];
    }
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (counts[c] == 0) {
        // Reseed an empty cluster at the point farthest from its centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const auto a = static_cast<std::size_t>(res.assignment[i]);
          double acc = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            const double diff = rows[i][j] - res.centroids[a][j];
            acc += diff * diff;
          }
          if (acc > far_d) {
            far_d = acc;
            far = i;
          }
        }
        res.centroids[c] = rows[far];
        continue;
      }
      for (std::size_t j = 0; j < d; ++j)
        res.centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
    }
  }
  return res;
}

KnnModel knn_fit(PointSet train_x, std::vector<int> train_y, int k_neighbors) {
  if (train_x.empty()) throw DataError("knn_fit: empty train set");
  if (train_x.size() != train_y.size()) throw DataError("knn_fit: feature/label size mismatch");
  if (k_neighbors < 1) throw DataError("knn_fit: k must be positive");
  KnnModel m;
  m.k = k_neighbors;
  m.x = std::move(train_x);
  m.y = std::move(train_y);
  return m;
}

std::vector<int> knn_predict(const KnnModel& model, const PointSet& rows, int workers) {
  const std::size_t n_train = model.x.size();
  const std::size_t k = std::min(static_cast<std::size_t>(model.k), n_train);
  std::vector<int> out(rows.size(), 0);

  parallel_for(rows.size(), workers, [&](std::size_t qi) {
    const auto& q = rows[qi];
    // (distance, index) pairs; lexicographic order makes ties deterministic.
    std::vector<std::pair<double, std::size_t>> d(n_train);
    for (std::size_t i = 0; i < n_train; ++i) {
      double acc = 0.0;
      const auto& t = model.x[i];
      for (std::size_t j = 0; j < q.size(); ++j) {
        const double diff = q[j] - t[j];
        acc += diff * diff;
      }
      d[i] = {acc, i};
    }
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
    std::sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k));
    int votes = 0;
    for (std::size_t i = 0; i < k; ++i) votes += model.y[d[i].second] ? 1 : 0;
    // Strict majority; a tie goes to the negative class.
    out[qi] = 2 * votes > static_cast<int>(k) ? 1 : 0;
  });
  return out;
}

double f1_score(std::span<const int> predictions, std::span<const int> truth) {
  if (predictions.size() != truth.size()) throw DataError("f1_score: length mismatch");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool p = predictions[i] != 0, t = truth[i] != 0;
    if (p && t) ++tp;
    else if (p && !t) ++fp;
    else if (!p && t) ++fn;
  }
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
}

std::vector<double> permutation_importance(const KnnModel& model, const PointSet& test_x,
                                           const std::vector<int>& test_y, int repeats,
                                           std::uint64_t seed, int workers) {
  if (test_x.empty()) throw DataError("permutation_importance: empty test set");
  if (test_x.size() != test_y.size())
    throw DataError("permutation_importance: feature/label size mismatch");
  if (repeats < 1) throw DataError("permutation_importance: repeats must be positive");

  const std::size_t d = test_x[0].size();
  const auto baseline_pred = knn_predict(model, test_x, workers);
  const double baseline = f1_score(baseline_pred, test_y);

  std::vector<double> importance(d, 0.0);
  PointSet shuffled = test_x;
  for (std::size_t f = 0; f < d; ++f) {
    double drop = 0.0;
    for (int rep = 0; rep < repeats; ++rep) {
      Rng rng(mix_seed(seed, f * static_cast<std::size_t>(repeats) + static_cast<std::size_t>(rep)));
      std::vector<std::size_t> perm(test_x.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      rng.shuffle(perm);
      for (std::size_t i = 0; i < test_x.size(); ++i) shuffled[i][f] = test_x[perm[i]][f];
      const auto pred = knn_predict(model, shuffled, workers);
      drop += baseline - f1_score(pred, test_y);
    }
    for (std::size_t i = 0; i < test_x.size(); ++i) shuffled[i][f] = test_x[i][f];
    importance[f] = drop / static_cast<double>(repeats);
  }
  return importance;
}

std::vector<LearningCurvePoint> learning_curve(const PointSet& pool_x,
                                               const std::vector<int>& pool_y,
                                               const std::vector<TestSetView>& tests,
                                               std::vector<std::size_t> sizes, int repeats,
                                               std::uint64_t seed, int k_neighbors,
                                               int workers) {
  if (pool_x.size() != pool_y.size()) throw DataError("learning_curve: pool size mismatch");
  if (repeats < 1) throw DataError("learning_curve: repeats must be positive");
  std::sort(sizes.begin(), sizes.end());
  for (const std::size_t s : sizes)
    if (s == 0 || s > pool_x.size())
      throw DataError("learning_curve: size " + std::to_string(s) +
                      " exceeds the pool (" + std::to_string(pool_x.size()) + ")");

  std::vector<LearningCurvePoint> out;
  std::vector<std::size_t> indices(pool_x.size());
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const std::size_t size = sizes[si];
    // scores[test][rep]
    std::vector<std::vector<double>> scores(tests.size(), std::vector<double>(repeats));
    for (int rep = 0; rep < repeats; ++rep) {
      Rng rng(mix_seed(seed, si * 1000 + static_cast<std::size_t>(rep)));
      std::iota(indices.begin(), indices.end(), std::size_t{0});
      // Partial Fisher-Yates: the first `size` entries become the subsample.
      for (std::size_t i = 0; i < size; ++i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(
            static_cast<std::int64_t>(i), static_cast<std::int64_t>(indices.size()) - 1));
        std::swap(indices[i], indices[j]);
      }
      PointSet train_x;
      std::vector<int> train_y;
      train_x.reserve(size);
      train_y.reserve(size);
      for (std::size_t i = 0; i < size; ++i) {
        train_x.push_back(pool_x[indices[i]]);
        train_y.push_back(pool_y[indices[i]]);
      }
      const KnnModel model = knn_fit(std::move(train_x), std::move(train_y), k_neighbors);
      for (std::size_t t = 0; t < tests.size(); ++t) {
        const auto pred = knn_predict(model, *tests[t].x, workers);
        scores[t][static_cast<std::size_t>(rep)] = f1_score(pred, *tests[t].y);
      }
    }
    for (std::size_t t = 0; t < tests.size(); ++t) {
      LearningCurvePoint p;
      p.train_size = size;
      p.test_set = tests[t].name;
      for (const double v : scores[t]) p.mean_f1 += v;
      p.mean_f1 /= static_cast<double>(repeats);
      if (repeats > 1) {
        double acc = 0.0;
        for (const double v : scores[t]) acc += (v - p.mean_f1) * (v - p.mean_f1);
        p.std_f1 = std::sqrt(acc / static_cast<double>(repeats - 1));
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace dsgen
