#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dsgen/design_space.hpp"
#include "dsgen/metrics.hpp"

namespace dsgen {

struct SampleBatch {
  std::shared_ptr<const DesignSpace> space;
  std::vector<DesignVector> rows;
  std::uint64_t seed = 0;
  std::string method;                     // uniform | sobol | lhs | augment | dpp | cluster
  std::vector<std::int64_t> parent_ids;   // augment provenance (else empty)
  int clip_events = 0;                    // augmentation values clipped to bounds

  std::size_t size() const { return rows.size(); }
};

// I.i.d. draws; per-feature distribution overrides apply (uniform, power,
// fixed), dependent bounds are resolved per row in feature order.
SampleBatch sample_uniform(std::shared_ptr<const DesignSpace> space, std::size_t n,
                           std::uint64_t seed);

// 2^m points of a scrambled Sobol sequence on the unit cube, denormalized in
// feature order. m is capped at 20.
SampleBatch sample_sobol(std::shared_ptr<const DesignSpace> space, int m,
                         std::uint64_t seed);

// Latin hypercube: exactly one point per axis bin [k/n, (k+1)/n) before
// denormalization, bins permuted independently per coordinate, uniform
// jitter within bins.
SampleBatch sample_lhs(std::shared_ptr<const DesignSpace> space, std::size_t n,
                       std::uint64_t seed);

// Perturbs parents (round-robin) with zero-mean normal noise of standard
// deviation sigma_frac in normalized coordinates; clips to bounds and counts
// the clip events. Categorical values are kept.
SampleBatch augment(std::shared_ptr<const DesignSpace> space,
                    const std::vector<DesignVector>& parents, std::size_t n,
                    double sigma_frac, std::uint64_t seed);

using KernelProducer = std::function<SimilarityMatrix(const PointSet&)>;

KernelProducer rbf_kernel_producer();

// Pair of similarity-kernel producers blended as (1-w) design + w
// performance.
struct KernelBlend {
  KernelProducer kernel_design = rbf_kernel_producer();
  KernelProducer kernel_performance = rbf_kernel_producer();
  double w = 0.0;
};

// (1-w) L1 + w L2 with a small diagonal jitter. Eigenvalues in [-1e-8, 0)
// are clipped to zero; anything more negative is an error.
SimilarityMatrix blend_kernels(const SimilarityMatrix& design,
                               const SimilarityMatrix& performance, double w);

// Greedy MAP subset selection: repeatedly add the candidate with the largest
// marginal log-det gain (incremental Cholesky); ties break toward the lowest
// index. Returns indices in selection order.
std::vector<int> dpp_greedy_map(const SimilarityMatrix& kernel, int k);

// Convenience wrapper: builds the design kernel over normalized candidate
// rows and, when w > 0, the performance kernel over the given standardized
// performance rows, then runs greedy MAP on the blend.
std::vector<int> dpp_greedy_select(const SampleBatch& candidates, int k,
                                   const KernelBlend& blend,
                                   const PointSet* performance = nullptr);

// k-means the normalized candidates into n_clusters and picks members per
// cluster nearest-to-centroid first, round-robin, until k are chosen.
std::vector<int> cluster_select(const SampleBatch& candidates, int k,
                                int n_clusters, std::uint64_t seed);

}  // namespace dsgen
