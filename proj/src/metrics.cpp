#include "dsgen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dsgen/rng.hpp"

namespace dsgen {

namespace {

void check_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DataError("vector length mismatch: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
}

double sq_euclidean(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double min_sq_dist_to(const std::vector<double>& p, const PointSet& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : set) best = std::min(best, sq_euclidean(p, q));
  return best;
}

void check_set(const PointSet& s, const char* name) {
  if (s.empty()) throw DataError(std::string("set_distance: ") + name + " is empty");
}

// Shared histogram machinery for the 1-D/2-D divergence and entropy
// estimators. Out-of-range samples are clamped into the edge bins.
std::vector<double> histogram01(const PointSet& samples, int bins,
                                std::span<const HistRange> range) {
  const std::size_t dims = range.size();
  if (dims != 1 && dims != 2) throw DataError("histograms support 1-D or 2-D data only");
  if (bins < 1) throw DataError("bins must be positive");
  if (samples.empty()) throw DataError("empty sample set");

  std::vector<double> h(dims == 1 ? static_cast<std::size_t>(bins)
                                  : static_cast<std::size_t>(bins) * bins,
                        0.0);
  for (const auto& s : samples) {
    if (s.size() != dims) throw DataError("sample dimensionality does not match range");
    std::size_t index = 0;
    for (std::size_t d = 0; d < dims; ++d) {
      const auto& r = range[d];
      const double width = r.hi - r.lo;
      int bin = width > 0 ? static_cast<int>((s[d] - r.lo) / width * bins) : 0;
      bin = std::clamp(bin, 0, bins - 1);
      index = index * static_cast<std::size_t>(bins) + static_cast<std::size_t>(bin);
    }
    h[index] += 1.0;
  }
  const double total = static_cast<double>(samples.size());
  for (auto& v : h) v /= total;
  return h;
}

struct Point2 {
  double x, y;
};

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

struct Circle {
  Point2 c{0, 0};
  double r2 = -1.0;  // squared radius; negative = empty

  bool contains(const Point2& p) const {
    if (r2 < 0) return false;
    const double dx = p.x - c.x, dy = p.y - c.y;
    return dx * dx + dy * dy <= r2 * (1.0 + 1e-10) + 1e-30;
  }
};

Circle circle_two(const Point2& a, const Point2& b) {
  Circle c;
  c.c = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  const double dx = a.x - c.c.x, dy = a.y - c.c.y;
  c.r2 = dx * dx + dy * dy;
  return c;
}

Circle circle_three(const Point2& a, const Point2& b, const Point2& c) {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  if (std::abs(d) < 1e-30) {
    // Collinear: fall back to the widest pair.
    Circle best = circle_two(a, b);
    for (const Circle& cand : {circle_two(a, c), circle_two(b, c)})
      if (cand.r2 > best.r2) best = cand;
    return best;
  }
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  Circle out;
  out.c = {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
  const double dx = a.x - out.c.x, dy = a.y - out.c.y;
  out.r2 = dx * dx + dy * dy;
  return out;
}

// Welzl's algorithm in the iterative three-loop form; expected linear after
// the seeded shuffle (fixed key keeps the result a pure function).
Circle min_enclosing_circle(std::vector<Point2> pts) {
  Rng rng(0x9d2c5680u);
  for (std::size_t i = pts.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(pts[i - 1], pts[j]);
  }
  Circle c;
  if (pts.empty()) return c;
  c = {pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (c.contains(pts[i])) continue;
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (c.contains(pts[j])) continue;
      c = circle_two(pts[i], pts[j]);
      for (std::size_t q = 0; q < j; ++q) {
        if (c.contains(pts[q])) continue;
        c = circle_three(pts[i], pts[j], pts[q]);
      }
    }
  }
  return c;
}

}  // namespace

double distance(std::span<const double> a, std::span<const double> b, DistanceKind kind) {
  check_same_length(a, b);
  if (kind == DistanceKind::euclidean) return std::sqrt(sq_euclidean(a, b));
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc;
}

double rbf_similarity(std::span<const double> a, std::span<const double> b) {
  check_same_length(a, b);
  return std::exp(-0.5 * sq_euclidean(a, b));
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  check_same_length(a, b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0)
    throw DataError("cosine_similarity is undefined for a zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double set_distance(const PointSet& a, const PointSet& b, SetDistanceKind kind) {
  check_set(a, "A");
  check_set(b, "B");
  if (a[0].size() != b[0].size())
    throw DataError("set_distance: dimensionality mismatch");

  if (kind == SetDistanceKind::hausdorff) {
    double worst = 0.0;
    for (const auto& p : a) worst = std::max(worst, min_sq_dist_to(p, b));
    for (const auto& q : b) worst = std::max(worst, min_sq_dist_to(q, a));
    return std::sqrt(worst);
  }
  double mean_ab = 0.0, mean_ba = 0.0;
  for (const auto& p : a) mean_ab += std::sqrt(min_sq_dist_to(p, b));
  for (const auto& q : b) mean_ba += std::sqrt(min_sq_dist_to(q, a));
  mean_ab /= static_cast<double>(a.size());
  mean_ba /= static_cast<double>(b.size());
  return 0.5 * (mean_ab + mean_ba);
}

double kl_divergence_hist(const PointSet& p_samples, const PointSet& q_samples,
                          int bins_per_dim, std::span<const HistRange> range,
                          double eps) {
  const auto p = histogram01(p_samples, bins_per_dim, range);
  const auto q = histogram01(q_samples, bins_per_dim, range);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    const double qi = q[i] > 0.0 ? q[i] : eps;
    kl += p[i] * std::log(p[i] / qi);
  }
  return kl;
}

double shannon_entropy(const PointSet& samples, int bins_per_dim,
                       std::span<const HistRange> range) {
  const auto p = histogram01(samples, bins_per_dim, range);
  double h = 0.0;
  for (const double pi : p)
    if (pi > 0.0) h -= pi * std::log(pi);
  return h;
}

SimilarityMatrix rbf_kernel(const PointSet& rows) {
  const int n = static_cast<int>(rows.size());
  SimilarityMatrix k(n);
  for (int i = 0; i < n; ++i) {
    k.at(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double s = std::exp(-0.5 * sq_euclidean(rows[static_cast<std::size_t>(i)],
                                                    rows[static_cast<std::size_t>(j)]));
      k.at(i, j) = s;
      k.at(j, i) = s;
    }
  }
  return k;
}

double dpp_log_det(std::span<const int> subset, const SimilarityMatrix& kernel) {
  const int n = kernel.size();
  for (const int idx : subset)
    if (idx < 0 || idx >= n)
      throw DataError("dpp_log_det: index " + std::to_string(idx) + " out of range");

  // Cholesky on the principal submatrix; a non-positive pivot means the
  // submatrix is singular (or indefinite) and the determinant is zero.
  const std::size_t m = subset.size();
  std::vector<double> chol(m * m, 0.0);
  double log_det = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = kernel.at(subset[i], subset[j]);
      for (std::size_t q = 0; q < j; ++q) acc -= chol[i * m + q] * chol[j * m + q];
      if (i == j) {
        if (acc <= 0.0) return -std::numeric_limits<double>::infinity();
        chol[i * m + i] = std::sqrt(acc);
        log_det += std::log(acc);
      } else {
        chol[i * m + j] = acc / chol[j * m + j];
      }
    }
  }
  return log_det;
}

HullBoxResult hull_and_box(const PointSet& points) {
  HullBoxResult out;
  if (points.empty()) {
    out.degenerate = true;
    return out;
  }
  std::vector<Point2> pts;
  pts.reserve(points.size());
  for (const auto& p : points) {
    if (p.size() != 2) throw DataError("hull_and_box expects 2-D points");
    pts.push_back({p[0], p[1]});
  }

  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const auto& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  out.box_area = (max_x - min_x) * (max_y - min_y);

  const Circle circle = min_enclosing_circle(pts);
  out.circle_area = circle.r2 > 0 ? M_PI * circle.r2 : 0.0;

  // Monotone chain; duplicates collapse in the sort.
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  if (pts.size() < 3) {
    out.degenerate = true;
    return out;
  }
  std::vector<Point2> hull(2 * pts.size());
  std::size_t h = 0;
  for (const auto& p : pts) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], p) <= 0) --h;
    hull[h++] = p;
  }
  const std::size_t lower = h + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], *it) <= 0) --h;
    hull[h++] = *it;
  }
  hull.resize(h > 0 ? h - 1 : 0);
  if (hull.size() < 3) {
    out.degenerate = true;
    return out;
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    area2 += a.x * b.y - b.x * a.y;
  }
  out.hull_area = 0.5 * std::abs(area2);
  return out;
}

NnStats nn_distance_stats(const PointSet& points) {
  const std::size_t n = points.size();
  if (n < 2) throw DataError("nn_distance_stats needs at least two points");

  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  if (n <= 10'000) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d2 = sq_euclidean(points[i], points[j]);
        nn[i] = std::min(nn[i], d2);
        nn[j] = std::min(nn[j], d2);
      }
  } else {
    // Sweep along the first coordinate; |dx| >= current best prunes the scan.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return points[a][0] < points[b][0];
    });
    for (std::size_t oi = 0; oi < n; ++oi) {
      const std::size_t i = order[oi];
      double best = nn[i];
      for (std::size_t oj = oi + 1; oj < n; ++oj) {
        const std::size_t j = order[oj];
        const double dx = points[j][0] - points[i][0];
        if (dx * dx >= best) break;
        best = std::min(best, sq_euclidean(points[i], points[j]));
      }
      for (std::size_t oj = oi; oj-- > 0;) {
        const std::size_t j = order[oj];
        const double dx = points[i][0] - points[j][0];
        if (dx * dx >= best) break;
        best = std::min(best, sq_euclidean(points[i], points[j]));
      }
      nn[i] = best;
    }
  }

  NnStats s;
  s.min = std::numeric_limits<double>::infinity();
  for (auto& d2 : nn) {
    const double d = std::sqrt(d2);
    s.mean += d;
    s.min = std::min(s.min, d);
    s.max = std::max(s.max, d);
    d2 = d;
  }
  s.mean /= static_cast<double>(n);
  double var = 0.0;
  for (const double d : nn) var += (d - s.mean) * (d - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(n));
  return s;
}

}  // namespace dsgen
