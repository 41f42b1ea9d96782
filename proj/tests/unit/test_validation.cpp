#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsgen/rng.hpp"
#include "dsgen/validation.hpp"

using namespace dsgen;

TEST_CASE("descriptive stats") {
  const std::vector<double> small = {1.0, 2.0, 3.0};
  const ColumnStats s = descriptive_stats(small);
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.median == doctest::Approx(2.0));
  CHECK(s.min == 1.0);
  CHECK(s.max == 3.0);

  const ColumnStats c = descriptive_stats(std::vector<double>{4.0, 4.0, 4.0, 4.0});
  CHECK(c.variance == 0.0);
  CHECK(c.iqr == 0.0);

  // Hand arithmetic for [1,2,3,4]: linear-interpolation quartiles are
  // Q1 = 1.75 and Q3 = 3.25, the lower-middle median is 2.
  const ColumnStats q = descriptive_stats(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(q.median == doctest::Approx(2.0));
  CHECK(q.iqr == doctest::Approx(1.5));
  CHECK(q.variance == doctest::Approx(5.0 / 3.0));  // sample variance

  CHECK_THROWS_AS(descriptive_stats(std::vector<double>{}), DataError);
}

TEST_CASE("correlation") {
  std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y;
  for (const double v : x) y.push_back(2.0 * v);
  const auto lin = correlation({x, y}, CorrelationKind::pearson);
  CHECK(lin[0][1] == doctest::Approx(1.0));
  CHECK(lin[0][0] == doctest::Approx(1.0));

  // Monotone nonlinear: Spearman 1, Pearson < 1.
  std::vector<double> t = {-2, -1, 0, 1, 2};
  std::vector<double> cubic;
  for (const double v : t) cubic.push_back(v * v * v);
  CHECK(correlation({t, cubic}, CorrelationKind::spearman)[0][1] == doctest::Approx(1.0));
  CHECK(correlation({t, cubic}, CorrelationKind::pearson)[0][1] < 1.0);

  SUBCASE("random table against the direct formula") {
    Rng rng(41);
    std::vector<double> a(5), b(5);
    for (int i = 0; i < 5; ++i) {
      a[i] = rng.uniform(-3, 3);
      b[i] = rng.uniform(-3, 3);
    }
    const double got = correlation({a, b}, CorrelationKind::pearson)[0][1];
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / 5;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / 5;
    double sab = 0, saa = 0, sbb = 0;
    for (int i = 0; i < 5; ++i) {
      sab += (a[i] - ma) * (b[i] - mb);
      saa += (a[i] - ma) * (a[i] - ma);
      sbb += (b[i] - mb) * (b[i] - mb);
    }
    CHECK(got == doctest::Approx(sab / std::sqrt(saa * sbb)).epsilon(1e-12));
  }

  SUBCASE("zero-variance column reports the undefined sentinel") {
    const std::vector<double> flat = {1, 1, 1, 1, 1};
    const auto m = correlation({x, flat}, CorrelationKind::pearson);
    CHECK(std::isnan(m[0][1]));
    CHECK(std::isnan(m[1][1]));
  }

  SUBCASE("spearman handles ties by average rank") {
    const std::vector<double> u = {1, 2, 2, 3};
    const std::vector<double> v = {10, 20, 20, 30};
    CHECK(correlation({u, v}, CorrelationKind::spearman)[0][1] == doctest::Approx(1.0));
  }
}

TEST_CASE("anova F statistic separates shifted classes") {
  std::vector<double> col;
  std::vector<int> cls;
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const int c = i % 2;
    col.push_back(rng.normal(c ? 3.0 : 0.0, 1.0));
    cls.push_back(c);
  }
  CHECK(anova_f(col, cls) > 50.0);

  std::vector<double> noise;
  for (int i = 0; i < 200; ++i) noise.push_back(rng.normal(0.0, 1.0));
  CHECK(anova_f(noise, cls) < 10.0);
}

TEST_CASE("pca") {
  SUBCASE("rank-1 data: first component explains everything") {
    PointSet rows;
    for (int i = 0; i < 50; ++i) {
      const double t = 0.1 * i;
      rows.push_back({t, 2.0 * t, -t});
    }
    const PCAModel m = pca_fit(rows, 2);
    CHECK(m.explained_variance_ratio[0] >= 1.0 - 1e-9);
  }

  SUBCASE("components are orthonormal, variances nonincreasing, mean maps to origin") {
    Rng rng(43);
    PointSet rows;
    for (int i = 0; i < 300; ++i)
      rows.push_back({rng.normal(0, 3), rng.normal(0, 1), rng.normal(0, 0.2)});
    const PCAModel m = pca_fit(rows, 3);
    for (std::size_t a = 0; a < m.components.size(); ++a) {
      for (std::size_t b = 0; b < m.components.size(); ++b) {
        double dot = 0.0;
        for (std::size_t j = 0; j < m.components[a].size(); ++j)
          dot += m.components[a][j] * m.components[b][j];
        CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-9));
      }
    }
    for (std::size_t c = 1; c < m.explained_variance.size(); ++c)
      CHECK(m.explained_variance[c] <= m.explained_variance[c - 1] + 1e-12);
    double ratio_sum = 0.0;
    for (const double r : m.explained_variance_ratio) {
      CHECK(r >= 0.0);
      ratio_sum += r;
    }
    CHECK(ratio_sum <= 1.0 + 1e-9);

    std::vector<double> mean(3, 0.0);
    for (const auto& r : rows)
      for (int j = 0; j < 3; ++j) mean[j] += r[j] / rows.size();
    const auto y = pca_transform(m, {mean});
    for (const double v : y[0]) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));
  }

  SUBCASE("full-rank reconstruction") {
    Rng rng(47);
    PointSet rows;
    for (int i = 0; i < 100; ++i)
      rows.push_back({rng.uniform01(), rng.uniform01() * 5, rng.uniform01() - 2});
    const PCAModel m = pca_fit(rows, 3);
    const PointSet y = pca_transform(m, rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      // Reconstruct the standardized vector from the components.
      for (std::size_t j = 0; j < 3; ++j) {
        double z = 0.0;
        for (std::size_t c = 0; c < 3; ++c) z += m.components[c][j] * y[i][c];
        const double orig = (rows[i][j] - m.mean[j]) / m.scale[j];
        CHECK(z == doctest::Approx(orig).epsilon(1e-8));
      }
    }
  }

  SUBCASE("component order matches a covariance eigen-oracle") {
    Rng rng(53);
    PointSet rows;
    for (int i = 0; i < 2000; ++i) {
      const double u = rng.normal(0, 2);
      const double v = rng.normal(0, 0.5);
      rows.push_back({u + v, u - v});  // anisotropic, correlated
    }
    const PCAModel m = pca_fit(rows, 2);
    // After standardization both columns have unit variance; the leading
    // eigenvector of [[1, rho], [rho, 1]] is (1, 1)/sqrt(2) for rho > 0.
    CHECK(m.explained_variance[0] > m.explained_variance[1]);
    CHECK(std::abs(m.components[0][0]) ==
          doctest::Approx(std::abs(m.components[0][1])).epsilon(0.05));
  }

  SUBCASE("zero-variance columns are dropped with notice") {
    PointSet rows;
    for (int i = 0; i < 20; ++i) rows.push_back({1.0, 0.1 * i, 0.2 * i});
    const PCAModel m = pca_fit(rows, 2);
    CHECK(m.dropped_columns == std::vector<int>{0});
    CHECK(m.kept_columns == std::vector<int>{1, 2});
  }

  CHECK_THROWS_AS(pca_fit(PointSet{{1.0}}, 1), DataError);
}

TEST_CASE("kmeans") {
  SUBCASE("well-separated blobs recover membership") {
    Rng rng(59);
    PointSet rows;
    for (int i = 0; i < 40; ++i)
      rows.push_back({rng.normal(0, 0.05), rng.normal(0, 0.05)});
    for (int i = 0; i < 40; ++i)
      rows.push_back({rng.normal(3, 0.05), rng.normal(3, 0.05)});
    const KMeansResult r = kmeans(rows, 2, 7);
    for (int i = 1; i < 40; ++i) CHECK(r.assignment[i] == r.assignment[0]);
    for (int i = 41; i < 80; ++i) CHECK(r.assignment[i] == r.assignment[40]);
    CHECK(r.assignment[0] != r.assignment[40]);
  }

  SUBCASE("k = N drives inertia to zero") {
    PointSet rows = {{0, 0}, {1, 0}, {0, 1}, {5, 5}};
    CHECK(kmeans(rows, 4, 3).inertia == doctest::Approx(0.0));
  }

  SUBCASE("k = 1 yields the column means") {
    PointSet rows = {{1, 10}, {2, 20}, {3, 30}};
    const KMeansResult r = kmeans(rows, 1, 3);
    CHECK(r.centroids[0][0] == doctest::Approx(2.0));
    CHECK(r.centroids[0][1] == doctest::Approx(20.0));
  }

  SUBCASE("deterministic per seed; inertia nonincreasing along the iterations") {
    Rng rng(61);
    PointSet rows;
    for (int i = 0; i < 200; ++i) rows.push_back({rng.uniform01(), rng.uniform01()});
    const KMeansResult a = kmeans(rows, 5, 11);
    const KMeansResult b = kmeans(rows, 5, 11);
    CHECK(a.assignment == b.assignment);
    CHECK(a.inertia == b.inertia);

    double prev = 1e300;
    for (int cap = 1; cap <= a.iterations; ++cap) {
      const double inertia = kmeans(rows, 5, 11, cap).inertia;
      CHECK(inertia <= prev + 1e-12);
      prev = inertia;
    }
  }
}

TEST_CASE("knn") {
  SUBCASE("query equal to a train point with k = 1") {
    const PointSet x = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.5}};
    const std::vector<int> y = {0, 1, 0};
    const KnnModel m = knn_fit(x, y, 1);
    CHECK(knn_predict(m, {{1.0, 1.0}}) == std::vector<int>{1});
    CHECK(knn_predict(m, {{0.0, 0.0}}) == std::vector<int>{0});
  }

  SUBCASE("linearly separated clouds") {
    Rng rng(67);
    PointSet x;
    std::vector<int> y;
    for (int i = 0; i < 400; ++i) {
      const int c = i % 2;
      x.push_back({rng.normal(c ? 2.0 : -2.0, 0.3), rng.normal(0, 0.3)});
      y.push_back(c);
    }
    const KnnModel m = knn_fit(x, y, 5);
    PointSet qx;
    std::vector<int> qy;
    for (int i = 0; i < 400; ++i) {
      const int c = i % 2;
      qx.push_back({rng.normal(c ? 2.0 : -2.0, 0.3), rng.normal(0, 0.3)});
      qy.push_back(c);
    }
    const auto pred = knn_predict(m, qx, 4);
    int correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (pred[i] == qy[i]) ++correct;
    CHECK(correct >= 396);  // >= 99%
  }

  SUBCASE("single-class train set predicts that class") {
    const KnnModel m = knn_fit({{0.0}, {1.0}}, {1, 1}, 5);
    CHECK(knn_predict(m, {{0.3}, {9.0}}) == std::vector<int>{1, 1});
  }

  SUBCASE("vote ties go to the negative class") {
    const KnnModel m = knn_fit({{0.0}, {1.0}}, {0, 1}, 2);
    CHECK(knn_predict(m, {{0.5}}) == std::vector<int>{0});
  }

  SUBCASE("worker count does not change predictions") {
    Rng rng(71);
    PointSet x;
    std::vector<int> y;
    for (int i = 0; i < 200; ++i) {
      x.push_back({rng.uniform01(), rng.uniform01()});
      y.push_back(rng.uniform01() < 0.4 ? 1 : 0);
    }
    const KnnModel m = knn_fit(x, y, 7);
    PointSet q;
    for (int i = 0; i < 100; ++i) q.push_back({rng.uniform01(), rng.uniform01()});
    CHECK(knn_predict(m, q, 1) == knn_predict(m, q, 8));
  }
}

TEST_CASE("f1 score") {
  CHECK(f1_score(std::vector<int>{1, 0, 1}, std::vector<int>{1, 0, 1}) == 1.0);
  // TP=1, FP=1, FN=1 -> 2/(2+1+1) = 0.5
  CHECK(f1_score(std::vector<int>{1, 1, 0}, std::vector<int>{1, 0, 1}) == doctest::Approx(0.5));
  // No positive predictions, no positive truths: 0/0 defined as 0.
  CHECK(f1_score(std::vector<int>{0, 0}, std::vector<int>{0, 0}) == 0.0);
  CHECK_THROWS_AS(f1_score(std::vector<int>{1}, std::vector<int>{1, 0}), DataError);

  SUBCASE("explicit confusion-matrix arithmetic on random labelings") {
    Rng rng(73);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<int> pred(50), truth(50);
      for (int i = 0; i < 50; ++i) {
        pred[i] = rng.uniform01() < 0.5;
        truth[i] = rng.uniform01() < 0.5;
      }
      double tp = 0, fp = 0, fn = 0;
      for (int i = 0; i < 50; ++i) {
        if (pred[i] && truth[i]) ++tp;
        if (pred[i] && !truth[i]) ++fp;
        if (!pred[i] && truth[i]) ++fn;
      }
      const double expected = (2 * tp + fp + fn) > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
      CHECK(f1_score(pred, truth) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("permutation importance") {
  // Class depends only on column 0; column 1 is pure noise.
  Rng rng(79);
  PointSet x;
  std::vector<int> y;
  for (int i = 0; i < 600; ++i) {
    const int c = i % 2;
    x.push_back({rng.normal(c ? 1.5 : -1.5, 0.4), rng.uniform01()});
    y.push_back(c);
  }
  const KnnModel m = knn_fit(x, y, 9);
  const auto importance = permutation_importance(m, x, y, 5, 33);
  CHECK(importance[0] > 0.2);
  CHECK(std::abs(importance[1]) <= 0.02);

  SUBCASE("duplicating the informative feature dilutes both copies") {
    PointSet xdup;
    for (const auto& r : x) xdup.push_back({r[0], r[0], r[1]});
    const KnnModel md = knn_fit(xdup, y, 9);
    const auto imp_dup = permutation_importance(md, xdup, y, 5, 33);
    CHECK(imp_dup[0] < importance[0]);
    CHECK(imp_dup[1] < importance[0]);
  }

  SUBCASE("deterministic per seed") {
    CHECK(permutation_importance(m, x, y, 3, 9) == permutation_importance(m, x, y, 3, 9));
  }
}

TEST_CASE("learning curve") {
  Rng rng(83);
  PointSet pool;
  std::vector<int> pool_y;
  for (int i = 0; i < 400; ++i) {
    const int c = i % 2;
    pool.push_back({rng.normal(c ? 1.0 : -1.0, 0.6), rng.uniform01()});
    pool_y.push_back(c);
  }
  PointSet test_x(pool.begin(), pool.begin() + 100);
  std::vector<int> test_y(pool_y.begin(), pool_y.begin() + 100);
  const std::vector<TestSetView> tests = {{"self", &test_x, &test_y}};

  SUBCASE("size = pool with one repeat is a single deterministic score") {
    const auto a = learning_curve(pool, pool_y, tests, {400}, 1, 5);
    const auto b = learning_curve(pool, pool_y, tests, {400}, 1, 5);
    REQUIRE(a.size() == 1);
    CHECK(a[0].train_size == 400);
    CHECK(a[0].std_f1 == 0.0);
    CHECK(a[0].mean_f1 == b[0].mean_f1);
  }

  SUBCASE("rows are sorted by size") {
    const auto rows = learning_curve(pool, pool_y, tests, {200, 50, 400}, 3, 5);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].train_size == 50);
    CHECK(rows[1].train_size == 200);
    CHECK(rows[2].train_size == 400);
  }

  SUBCASE("degenerate single-class pool scores zero") {
    PointSet xs;
    std::vector<int> ys;
    for (int i = 0; i < 50; ++i) {
      xs.push_back({rng.uniform01()});
      ys.push_back(0);
    }
    PointSet tx = {{0.5}, {0.6}};
    std::vector<int> ty = {1, 0};
    const std::vector<TestSetView> t = {{"t", &tx, &ty}};
    const auto rows = learning_curve(xs, ys, t, {10, 50}, 2, 5);
    for (const auto& r : rows) CHECK(r.mean_f1 == 0.0);
  }

  SUBCASE("size exceeding the pool is an error") {
    CHECK_THROWS_AS(learning_curve(pool, pool_y, tests, {401}, 1, 5), DataError);
  }
}
