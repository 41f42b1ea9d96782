#pragma once

#include <cstdint>
#include <vector>

namespace dsgen {

inline constexpr int kSobolMaxDimension = 64;

// First 2^m points of a base-2 digital low-discrepancy sequence in [0,1)^dim.
// Direction numbers come from the standard published Joe-Kuo table (up to
// 64 dimensions). When `scramble` is set, each dimension gets an Owen-style
// randomization (random lower-triangular linear scramble plus digital shift)
// keyed by `seed`; both preserve one-point-per-dyadic-bin stratification in
// every 1-D projection.
std::vector<std::vector<double>> sobol_points(int dim, int m, std::uint64_t seed,
                                              bool scramble = true);

}  // namespace dsgen
