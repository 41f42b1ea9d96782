#include "dsgen/testsets.hpp"

#include <algorithm>

#include "dsgen/rng.hpp"

namespace dsgen {

namespace {

// Draws n indices per class, uniform without replacement, from the eligible
// rows. Classes are working (1) and non-working (0).
std::vector<std::size_t> balanced_draw(const Dataset& dataset,
                                       const std::vector<std::size_t>& eligible,
                                       std::size_t n_per_class, std::uint64_t seed,
                                       const char* what) {
  if (!dataset.labeled()) throw DataError(std::string(what) + ": dataset has no labels");
  if (n_per_class == 0) throw DataError(std::string(what) + ": n_per_class must be positive");

  std::vector<std::size_t> cls[2];
  for (const std::size_t i : eligible)
    cls[dataset.labels[i].working ? 1 : 0].push_back(i);
  for (int c = 0; c < 2; ++c)
    if (cls[c].size() < n_per_class)
      throw DataError(std::string(what) + ": class " + (c ? "working" : "non-working") +
                      " has " + std::to_string(cls[c].size()) + " rows, need " +
                      std::to_string(n_per_class));

  Rng rng(seed);
  std::vector<std::size_t> out;
  out.reserve(2 * n_per_class);
  for (auto& pool : cls) {
    // Partial Fisher-Yates; the first n entries are the draw.
    for (std::size_t i = 0; i < n_per_class; ++i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(
          static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size()) - 1));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::size_t> build_uniform_testset(const Dataset& dataset,
                                               std::size_t n_per_class, std::uint64_t seed) {
  std::vector<std::size_t> all(dataset.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return balanced_draw(dataset, all, n_per_class, seed, "build_uniform_testset");
}

std::vector<std::size_t> build_real_testset(const Dataset& dataset, std::size_t n_per_class,
                                            std::uint64_t seed) {
  if (dataset.parents.size() != dataset.size())
    throw DataError("build_real_testset: dataset carries no augmentation provenance");
  std::vector<std::size_t> augmented;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (dataset.parents[i] >= 0) augmented.push_back(i);
  if (augmented.empty())
    throw DataError("build_real_testset: no augmentation-tagged rows");
  return balanced_draw(dataset, augmented, n_per_class, seed, "build_real_testset");
}

SpecializedTestset build_specialized_testset(const std::vector<DesignVector>& real_designs,
                                             const Evaluator& evaluator, const GridSpec& grid,
                                             std::size_t n_per_class, std::uint64_t seed,
                                             int workers) {
  if (real_designs.empty())
    throw DataError("build_specialized_testset: no real designs given");
  if (grid.axes.empty()) throw DataError("build_specialized_testset: grid has no axes");

  const DesignSpace& space = evaluator.space();
  std::vector<int> axis_index;
  std::vector<std::vector<double>> axis_levels;
  std::size_t block = 1;
  for (const GridAxis& axis : grid.axes) {
    if (axis.resolution < 3)
      throw DataError("grid resolution must be at least 3 per swept axis");
    const int idx = space.feature_index(axis.feature);
    if (idx < 0)
      throw DataError("grid axis '" + axis.feature + "' is not a feature of the space");
    const FeatureSpec& f = space.feature(idx);
    if (f.kind == FeatureKind::categorical || !f.lower.is_constant() ||
        !f.upper.is_constant())
      throw DataError("grid axis '" + axis.feature + "' must have constant numeric bounds");
    const double lo = f.lower.eval({});
    const double hi = f.upper.eval({});
    std::vector<double> levels(static_cast<std::size_t>(axis.resolution));
    for (int q = 0; q < axis.resolution; ++q)
      levels[static_cast<std::size_t>(q)] =
          lo + (hi - lo) * static_cast<double>(q) / static_cast<double>(axis.resolution - 1);
    axis_index.push_back(idx);
    axis_levels.push_back(std::move(levels));
    block *= static_cast<std::size_t>(axis.resolution);
  }

  SpecializedTestset out;
  out.grid.space = std::make_shared<DesignSpace>(space);
  out.grid.provenance.method = "grid";
  out.grid.provenance.seed = seed;
  out.grid.rows.reserve(real_designs.size() * block);

  // Row-major sweep: the last axis varies fastest within a design block.
  for (const auto& design : real_designs) {
    if (design.size() != static_cast<std::size_t>(space.dimension()))
      throw DataError("build_specialized_testset: design length mismatch");
    for (std::size_t cell = 0; cell < block; ++cell) {
      DesignVector row = design;
      std::size_t rem = cell;
      for (std::size_t a = grid.axes.size(); a-- > 0;) {
        const std::size_t res = axis_levels[a].size();
        row[static_cast<std::size_t>(axis_index[a])] = axis_levels[a][rem % res];
        rem /= res;
      }
      out.grid.rows.push_back(std::move(row));
    }
  }

  batch_annotate(out.grid, evaluator, workers);

  // Mark rows with an opposite-label neighbor one step along any swept axis.
  out.near_boundary.assign(out.grid.size(), 0);
  std::vector<std::size_t> stride(grid.axes.size(), 1);
  for (std::size_t a = grid.axes.size(); a-- > 1;)
    stride[a - 1] = stride[a] * axis_levels[a].size();
  for (std::size_t d = 0; d < real_designs.size(); ++d) {
    const std::size_t base = d * block;
    for (std::size_t cell = 0; cell < block; ++cell) {
      const bool w = out.grid.labels[base + cell].working;
      for (std::size_t a = 0; a < grid.axes.size(); ++a) {
        const std::size_t res = axis_levels[a].size();
        const std::size_t pos = (cell / stride[a]) % res;
        if (pos > 0 && out.grid.labels[base + cell - stride[a]].working != w) {
          out.near_boundary[base + cell] = 1;
          break;
        }
        if (pos + 1 < res && out.grid.labels[base + cell + stride[a]].working != w) {
          out.near_boundary[base + cell] = 1;
          break;
        }
      }
    }
  }

  std::vector<std::size_t> marked;
  for (std::size_t i = 0; i < out.grid.size(); ++i)
    if (out.near_boundary[i]) marked.push_back(i);

  std::size_t marked_by_class[2] = {0, 0};
  for (const std::size_t i : marked) ++marked_by_class[out.grid.labels[i].working ? 1 : 0];
  const std::size_t achievable = std::min(marked_by_class[0], marked_by_class[1]);
  if (achievable < n_per_class)
    throw DataError("specialized test set: marked boundary rows support only " +
                    std::to_string(achievable) + " per class, need " +
                    std::to_string(n_per_class));

  out.selected = balanced_draw(out.grid, marked, n_per_class, seed,
                               "build_specialized_testset");
  return out;
}

std::size_t apply_split(Dataset& dataset, const SplitPlan& plan) {
  std::vector<std::string> tags(dataset.size(), "train");
  std::size_t tagged = 0;
  for (const auto& [name, indices] : plan.tests) {
    if (name.empty()) throw DataError("apply_split: test set name is empty");
    for (const std::size_t i : indices) {
      if (i >= dataset.size())
        throw DataError("apply_split: index " + std::to_string(i) + " out of range");
      if (tags[i] != "train")
        throw DataError("apply_split: row " + std::to_string(i) + " tagged by both '" +
                        tags[i] + "' and 'test:" + name + "'");
      tags[i] = "test:" + name;
      ++tagged;
    }
  }
  dataset.split = std::move(tags);
  return dataset.size() - tagged;
}

}  // namespace dsgen
