#include "dsgen/sampling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dsgen/rng.hpp"
#include "dsgen/sobol.hpp"
#include "dsgen/validation.hpp"

namespace dsgen {

namespace {

void check_space(const std::shared_ptr<const DesignSpace>& space) {
  if (!space) throw DataError("sampler requires a design space");
}

std::pair<std::int64_t, std::int64_t> integer_range(double lo, double hi,
                                                    const std::string& name) {
  const auto ilo = static_cast<std::int64_t>(std::ceil(lo - 1e-9));
  const auto ihi = static_cast<std::int64_t>(std::floor(hi + 1e-9));
  if (ilo > ihi)
    throw DataError("no integer value inside the resolved bounds of '" + name + "'");
  return {ilo, ihi};
}

// Materializes one row from pre-drawn unit-cube coordinates, resolving
// dependent bounds in feature order. Used by the space-filling samplers.
DesignVector denormalize_row(const DesignSpace& space, const std::vector<double>& unit) {
  return space.denormalize(unit);
}

}  // namespace

SampleBatch sample_uniform(std::shared_ptr<const DesignSpace> space, std::size_t n,
                           std::uint64_t seed) {
  check_space(space);
  if (n == 0) throw DataError("sample_uniform: n must be positive");

  SampleBatch batch;
  batch.space = space;
  batch.seed = seed;
  batch.method = "uniform";
  batch.rows.reserve(n);

  Rng rng(seed);
  const auto& features = space->features();
  const int d = space->dimension();
  for (std::size_t row = 0; row < n; ++row) {
    DesignVector x(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const FeatureSpec& f = features[static_cast<std::size_t>(i)];
      const auto prefix = std::span<const double>(x.data(), static_cast<std::size_t>(i));
      double v = 0.0;
      if (f.kind == FeatureKind::categorical) {
        v = static_cast<double>(
            rng.uniform_int(0, static_cast<std::int64_t>(f.categories.size()) - 1));
      } else {
        const double lo = f.lower.eval(prefix);
        const double hi = f.upper.eval(prefix);
        if (lo > hi)
          throw DataError("degenerate bounds for '" + f.name + "' while sampling");
        switch (f.distribution) {
          case DistributionKind::fixed:
            v = lo;
            break;
          case DistributionKind::power: {
            // density ~ t^(alpha-1) on [0,1], mapped affinely onto the range
            const double t = std::pow(rng.uniform01(), 1.0 / f.power_alpha);
            v = lo + t * (hi - lo);
            break;
          }
          case DistributionKind::uniform:
          default:
            if (f.kind == FeatureKind::integer) {
              const auto [ilo, ihi] = integer_range(lo, hi, f.name);
              v = static_cast<double>(rng.uniform_int(ilo, ihi));
            } else {
              v = lo + rng.uniform01() * (hi - lo);
            }
            break;
        }
      }
      x[static_cast<std::size_t>(i)] = v;
    }
    batch.rows.push_back(std::move(x));
  }
  return batch;
}

SampleBatch sample_sobol(std::shared_ptr<const DesignSpace> space, int m,
                         std::uint64_t seed) {
  check_space(space);
  if (m < 0) throw DataError("sample_sobol: m must be non-negative");
  if (m > 20) throw DataError("sample_sobol: m capped at 20 (2^20 points)");
  const int d = space->dimension();
  if (d > kSobolMaxDimension)
    throw DataError("sample_sobol: space dimension exceeds the direction table (" +
                    std::to_string(kSobolMaxDimension) + ")");

  SampleBatch batch;
  batch.space = space;
  batch.seed = seed;
  batch.method = "sobol";
  const auto unit = sobol_points(d, m, seed, /*scramble=*/true);
  batch.rows.reserve(unit.size());
  for (const auto& u : unit) batch.rows.push_back(denormalize_row(*space, u));
  return batch;
}

SampleBatch sample_lhs(std::shared_ptr<const DesignSpace> space, std::size_t n,
                       std::uint64_t seed) {
  check_space(space);
  if (n == 0) throw DataError("sample_lhs: n must be positive");

  SampleBatch batch;
  batch.space = space;
  batch.seed = seed;
  batch.method = "lhs";
  const int d = space->dimension();

  Rng rng(seed);
  std::vector<std::vector<double>> unit(n, std::vector<double>(static_cast<std::size_t>(d)));
  std::vector<std::size_t> perm(n);
  for (int c = 0; c < d; ++c) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    for (std::size_t r = 0; r < n; ++r)
      unit[r][static_cast<std::size_t>(c)] =
          (static_cast<double>(perm[r]) + rng.uniform01()) / static_cast<double>(n);
  }
  batch.rows.reserve(n);
  for (const auto& u : unit) batch.rows.push_back(denormalize_row(*space, u));
  return batch;
}

SampleBatch augment(std::shared_ptr<const DesignSpace> space,
                    const std::vector<DesignVector>& parents, std::size_t n,
                    double sigma_frac, std::uint64_t seed) {
  check_space(space);
  if (parents.empty()) throw DataError("augment: parent list is empty");
  if (!(sigma_frac > 0.0)) throw DataError("augment: sigma_frac must be positive");
  if (n == 0) throw DataError("augment: n must be positive");

  const int d = space->dimension();
  struct ParentState {
    DesignVector unit;
    std::vector<char> frozen;  // categorical / fixed / degenerate coordinates
  };
  std::vector<ParentState> states;
  states.reserve(parents.size());
  for (const auto& p : parents) {
    const auto report = space->validate(p);
    if (!report.valid)
      throw DataError("augment: parent violates the design space (feature '" +
                      report.violations.front().feature + "')");
    ParentState st;
    st.unit = space->normalize(p);
    st.frozen.resize(static_cast<std::size_t>(d), 0);
    for (int i = 0; i < d; ++i) {
      const FeatureSpec& f = space->feature(i);
      if (f.kind == FeatureKind::categorical || f.distribution == DistributionKind::fixed) {
        st.frozen[static_cast<std::size_t>(i)] = 1;
        continue;
      }
      const auto prefix = std::span<const double>(p.data(), static_cast<std::size_t>(i));
      if (f.upper.eval(prefix) - f.lower.eval(prefix) <= 0.0)
        st.frozen[static_cast<std::size_t>(i)] = 1;
    }
    states.push_back(std::move(st));
  }

  SampleBatch batch;
  batch.space = space;
  batch.seed = seed;
  batch.method = "augment";
  batch.rows.reserve(n);
  batch.parent_ids.reserve(n);

  Rng rng(seed);
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t p = row % parents.size();
    const ParentState& st = states[p];
    std::vector<double> u = st.unit;
    for (int i = 0; i < d; ++i) {
      const double noise = rng.normal(0.0, sigma_frac);  // fixed draw count per row
      if (st.frozen[static_cast<std::size_t>(i)]) continue;
      double& ui = u[static_cast<std::size_t>(i)];
      ui += noise;
      if (ui < 0.0 || ui > 1.0) {
        ui = std::clamp(ui, 0.0, 1.0);
        ++batch.clip_events;
      }
    }
    batch.rows.push_back(space->denormalize(u));
    batch.parent_ids.push_back(static_cast<std::int64_t>(p));
  }
  return batch;
}

KernelProducer rbf_kernel_producer() {
  return [](const PointSet& rows) { return rbf_kernel(rows); };
}

SimilarityMatrix blend_kernels(const SimilarityMatrix& design,
                               const SimilarityMatrix& performance, double w) {
  if (w < 0.0 || w > 1.0) throw DataError("blend weight w must be in [0, 1]");
  const int n = design.size();
  if (w > 0.0 && performance.size() != n)
    throw DataError("blend_kernels: kernel sizes differ");

  constexpr double kJitter = 1e-10;
  constexpr double kPsdTol = 1e-8;

  SimilarityMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = (1.0 - w) * design.at(i, j);
      if (w > 0.0) v += w * performance.at(i, j);
      out.at(i, j) = v;
    }
  for (int i = 0; i < n; ++i) out.at(i, i) += kJitter;

  // Fast path: a successful Cholesky certifies positive semidefiniteness.
  Eigen::MatrixXd mat = Eigen::Map<const Eigen::MatrixXd>(out.data().data(), n, n);
  mat = 0.5 * (mat + mat.transpose().eval());
  Eigen::LLT<Eigen::MatrixXd> llt(mat);
  if (llt.info() == Eigen::Success) return out;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mat);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -kPsdTol)
    throw DataError("blended kernel is not positive semidefinite (min eigenvalue " +
                    std::to_string(min_eig) + ")");
  Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd rebuilt =
      eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = rebuilt(i, j);
  return out;
}

namespace {

// Incremental-Cholesky greedy run with a forced first pick. Returns the
// selection and the accumulated log-det (log of each pivot^2).
std::pair<std::vector<int>, double> greedy_from_anchor(const SimilarityMatrix& kernel,
                                                       int k, int anchor) {
  const int n = kernel.size();
  std::vector<std::vector<double>> factors(static_cast<std::size_t>(n));
  std::vector<double> gain(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) gain[static_cast<std::size_t>(j)] = kernel.at(j, j);
  std::vector<char> used(static_cast<std::size_t>(n), 0);

  std::vector<int> picked;
  picked.reserve(static_cast<std::size_t>(k));
  double log_det = 0.0;
  for (int t = 0; t < k; ++t) {
    int best = anchor;
    if (t > 0) {
      best = -1;
      for (int j = 0; j < n; ++j)
        if (!used[static_cast<std::size_t>(j)] &&
            (best < 0 ||
             gain[static_cast<std::size_t>(j)] > gain[static_cast<std::size_t>(best)]))
          best = j;  // strict > keeps ties at the lowest index
    }
    picked.push_back(best);
    used[static_cast<std::size_t>(best)] = 1;
    const double g = std::max(gain[static_cast<std::size_t>(best)], 0.0);
    log_det += g > 0.0 ? std::log(g) : -std::numeric_limits<double>::infinity();
    const double pivot = std::sqrt(g);
    const auto& cb = factors[static_cast<std::size_t>(best)];
    for (int j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      auto& cj = factors[static_cast<std::size_t>(j)];
      double e = kernel.at(best, j);
      for (std::size_t q = 0; q < cb.size(); ++q) e -= cb[q] * cj[q];
      e = pivot > 0.0 ? e / pivot : 0.0;
      cj.push_back(e);
      gain[static_cast<std::size_t>(j)] -= e * e;
    }
  }
  return {std::move(picked), log_det};
}

// Deterministic 2-swap polish: replace a selected item by the unselected
// candidate with the best log-det improvement until a sweep finds none.
void refine_by_swaps(const SimilarityMatrix& kernel, std::vector<int>& subset) {
  const int n = kernel.size();
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (const int i : subset) used[static_cast<std::size_t>(i)] = 1;
  bool improved = true;
  int sweeps = 0;
  const int max_sweeps = 4 * static_cast<int>(subset.size()) + 8;
  while (improved && sweeps++ < max_sweeps) {
    improved = false;
    double current = dpp_log_det(subset, kernel);
    for (std::size_t pos = 0; pos < subset.size(); ++pos) {
      const int old = subset[pos];
      int best_j = -1;
      double best_v = current;
      for (int j = 0; j < n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        subset[pos] = j;
        const double v = dpp_log_det(subset, kernel);
        if (v > best_v + 1e-12) {
          best_v = v;
          best_j = j;
        }
      }
      subset[pos] = old;
      if (best_j >= 0) {
        used[static_cast<std::size_t>(old)] = 0;
        used[static_cast<std::size_t>(best_j)] = 1;
        subset[pos] = best_j;
        current = best_v;
        improved = true;
      }
    }
  }
}

}  // namespace

std::vector<int> dpp_greedy_map(const SimilarityMatrix& kernel, int k) {
  const int n = kernel.size();
  if (k < 0 || k > n)
    throw DataError("dpp_greedy_map: k must be in [0, N]");
  if (k == 0) return {};

  // On unit-diagonal kernels every first-step gain ties, so a single greedy
  // run is anchored arbitrarily and lands measurably below the optimum. The
  // scan runs one greedy per anchor and keeps the best subset (lowest anchor
  // wins ties); the kernel itself is already O(N^2), so the O(N^2 k) scan
  // stays in the same cost class. A swap pass then removes the residual
  // greedy misses.
  std::vector<int> best_pick;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int anchor = 0; anchor < n; ++anchor) {
    auto [picked, value] = greedy_from_anchor(kernel, k, anchor);
    if (value > best_value ||
        (best_pick.empty() && !std::isfinite(best_value) && !std::isfinite(value))) {
      best_value = value;
      best_pick = std::move(picked);
    }
  }
  refine_by_swaps(kernel, best_pick);
  return best_pick;
}

std::vector<int> dpp_greedy_select(const SampleBatch& candidates, int k,
                                   const KernelBlend& blend, const PointSet* performance) {
  check_space(candidates.space);
  const int n = static_cast<int>(candidates.size());
  if (k > n) throw DataError("dpp_greedy_select: k exceeds the candidate count");

  PointSet normalized;
  normalized.reserve(candidates.rows.size());
  for (const auto& row : candidates.rows)
    normalized.push_back(candidates.space->normalize(row));

  const SimilarityMatrix design = blend.kernel_design(normalized);
  SimilarityMatrix perf;
  if (blend.w > 0.0) {
    if (performance == nullptr || static_cast<int>(performance->size()) != n)
      throw DataError("dpp_greedy_select: w > 0 requires one performance row per candidate");
    perf = blend.kernel_performance(*performance);
  }
  const SimilarityMatrix blended = blend_kernels(design, perf, blend.w);
  return dpp_greedy_map(blended, k);
}

std::vector<int> cluster_select(const SampleBatch& candidates, int k, int n_clusters,
                                std::uint64_t seed) {
  check_space(candidates.space);
  const int n = static_cast<int>(candidates.size());
  if (n == 0) throw DataError("cluster_select: empty candidate set");
  if (n_clusters < 1 || n_clusters > n)
    throw DataError("cluster_select: n_clusters must be in [1, N]");
  if (k < n_clusters || k > n)
    throw DataError("cluster_select: k must be in [n_clusters, N]");

  PointSet normalized;
  normalized.reserve(candidates.rows.size());
  for (const auto& row : candidates.rows)
    normalized.push_back(candidates.space->normalize(row));

  const KMeansResult km = kmeans(normalized, n_clusters, seed);

  // Per cluster: members ordered nearest-to-centroid first (ties by index).
  std::vector<std::vector<std::pair<double, int>>> members(
      static_cast<std::size_t>(n_clusters));
  for (int i = 0; i < n; ++i) {
    const int c = km.assignment[static_cast<std::size_t>(i)];
    const double d = distance(normalized[static_cast<std::size_t>(i)],
                              km.centroids[static_cast<std::size_t>(c)]);
    members[static_cast<std::size_t>(c)].push_back({d, i});
  }
  for (auto& m : members) std::sort(m.begin(), m.end());

  std::vector<int> picked;
  picked.reserve(static_cast<std::size_t>(k));
  std::vector<std::size_t> cursor(static_cast<std::size_t>(n_clusters), 0);
  while (static_cast<int>(picked.size()) < k) {
    bool progressed = false;
    for (int c = 0; c < n_clusters && static_cast<int>(picked.size()) < k; ++c) {
      auto& pos = cursor[static_cast<std::size_t>(c)];
      if (pos >= members[static_cast<std::size_t>(c)].size()) continue;
      picked.push_back(members[static_cast<std::size_t>(c)][pos].second);
      ++pos;
      progressed = true;
    }
    if (!progressed) break;  // k <= N, so this cannot trigger; guards a stall
  }
  return picked;
}

}  // namespace dsgen
