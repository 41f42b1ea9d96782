#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dsgen/annotate.hpp"

namespace dsgen {

// Named, pairwise-disjoint test index sets; everything else becomes train.
struct SplitPlan {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> tests;
};

// Balanced draw: n_per_class rows per working/non-working class, uniform
// without replacement. Returned indices are sorted.
std::vector<std::size_t> build_uniform_testset(const Dataset& dataset,
                                               std::size_t n_per_class,
                                               std::uint64_t seed);

// As build_uniform_testset, restricted to rows carrying augmentation
// provenance (a parent id).
std::vector<std::size_t> build_real_testset(const Dataset& dataset,
                                            std::size_t n_per_class,
                                            std::uint64_t seed);

struct GridAxis {
  std::string feature;
  int resolution = 50;  // >= 3
};

struct GridSpec {
  std::vector<GridAxis> axes = {{"Ma21", 50}, {"Ma41", 50}};
};

struct SpecializedTestset {
  Dataset grid;                        // freshly generated, annotated grid rows
  std::vector<char> near_boundary;     // per grid row
  std::vector<std::size_t> selected;   // balanced draw from the marked rows
};

// For every real design, sweeps the operating-condition grid (non-swept
// features keep the design's values), annotates it, marks rows with at least
// one axis-adjacent neighbor of the opposite working label, and draws a
// balanced n_per_class sample from the marked rows.
SpecializedTestset build_specialized_testset(const std::vector<DesignVector>& real_designs,
                                             const Evaluator& evaluator,
                                             const GridSpec& grid, std::size_t n_per_class,
                                             std::uint64_t seed, int workers = 1);

// Tags plan rows as test:<name> and every remaining row as train. Returns the
// train-row count (zero is allowed, callers may warn).
std::size_t apply_split(Dataset& dataset, const SplitPlan& plan);

}  // namespace dsgen
