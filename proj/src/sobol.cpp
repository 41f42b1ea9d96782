#include "dsgen/sobol.hpp"

#include <bit>
#include <cstddef>

#include "dsgen/errors.hpp"
#include "dsgen/rng.hpp"

namespace dsgen {

namespace {

constexpr int kBits = 32;

// Joe-Kuo primitive polynomials and initial direction numbers for dimensions
// 2..64 (dimension 1 is the plain radical-inverse sequence). `poly` is the
// full polynomial bit pattern; `m` holds the `degree` initial values.
struct DirectionSeed {
  int degree;
  std::uint32_t poly;
  std::uint32_t m[9];
};

constexpr DirectionSeed kDirectionSeeds[] = {
{1, 3, {1}},
    {2, 7, {1, 3}},
    {3, 11, {1, 3, 1}},
    {3, 13, {1, 1, 1}},
    {4, 19, {1, 1, 3, 3}},
    {4, 25, {1, 3, 5, 13}},
    {5, 37, {1, 1, 5, 5, 17}},
    {5, 41, {1, 1, 5, 5, 5}},
    {5, 47, {1, 1, 7, 11, 19}},
    {5, 55, {1, 1, 5, 1, 1}},
    {5, 59, {1, 1, 1, 3, 11}},
    {5, 61, {1, 3, 5, 5, 31}},
    {6, 67, {1, 3, 3, 9, 7, 49}},
    {6, 91, {1, 1, 1, 15, 21, 21}},
    {6, 97, {1, 3, 1, 13, 27, 49}},
    {6, 103, {1, 1, 1, 15, 7, 5}},
    {6, 109, {1, 3, 1, 15, 13, 25}},
    {6, 115, {1, 1, 5, 5, 19, 61}},
    {7, 131, {1, 3, 7, 11, 23, 15, 103}},
    {7, 137, {1, 3, 7, 13, 13, 15, 69}},
    {7, 143, {1, 1, 3, 13, 7, 35, 63}},
    {7, 145, {1, 3, 5, 9, 1, 25, 53}},
    {7, 157, {1, 3, 1, 13, 9, 35, 107}},
    {7, 167, {1, 3, 1, 5, 27, 61, 31}},
    {7, 171, {1, 1, 5, 11, 19, 41, 61}},
    {7, 185, {1, 3, 5, 3, 3, 13, 69}},
    {7, 191, {1, 1, 7, 13, 1, 19, 1}},
    {7, 193, {1, 3, 7, 5, 13, 19, 59}},
    {7, 203, {1, 1, 3, 9, 25, 29, 41}},
    {7, 211, {1, 3, 5, 13, 23, 1, 55}},
    {7, 213, {1, 3, 7, 3, 13, 59, 17}},
    {7, 229, {1, 3, 1, 3, 5, 53, 69}},
    {7, 239, {1, 1, 5, 5, 23, 33, 13}},
    {7, 241, {1, 1, 7, 7, 1, 61, 123}},
    {7, 247, {1, 1, 7, 9, 13, 61, 49}},
    {7, 253, {1, 3, 3, 5, 3, 55, 33}},
    {8, 285, {1, 3, 1, 15, 31, 13, 49, 245}},
    {8, 299, {1, 3, 5, 15, 31, 59, 63, 97}},
    {8, 301, {1, 3, 1, 11, 11, 11, 77, 249}},
    {8, 333, {1, 3, 1, 11, 27, 43, 71, 9}},
    {8, 351, {1, 1, 7, 15, 21, 11, 81, 45}},
    {8, 355, {1, 3, 7, 3, 25, 31, 65, 79}},
    {8, 357, {1, 3, 1, 1, 19, 11, 3, 205}},
    {8, 361, {1, 1, 5, 9, 19, 21, 29, 157}},
    {8, 369, {1, 3, 7, 11, 1, 33, 89, 185}},
    {8, 391, {1, 3, 3, 3, 15, 9, 79, 71}},
    {8, 397, {1, 3, 7, 11, 15, 39, 119, 27}},
    {8, 425, {1, 1, 3, 1, 11, 31, 97, 225}},
    {8, 451, {1, 1, 1, 3, 23, 43, 57, 177}},
    {8, 463, {1, 3, 7, 7, 17, 17, 37, 71}},
    {8, 487, {1, 3, 1, 5, 27, 63, 123, 213}},
    {8, 501, {1, 1, 3, 5, 11, 43, 53, 133}},
    {9, 529, {1, 3, 5, 5, 29, 17, 47, 173, 479}},
    {9, 539, {1, 3, 3, 11, 3, 1, 109, 9, 69}},
    {9, 545, {1, 1, 1, 5, 17, 39, 23, 5, 343}},
    {9, 557, {1, 3, 1, 5, 25, 15, 31, 103, 499}},
    {9, 563, {1, 1, 1, 11, 11, 17, 63, 105, 183}},
    {9, 601, {1, 1, 5, 11, 9, 29, 97, 231, 363}},
    {9, 607, {1, 1, 5, 15, 19, 45, 41, 7, 383}},
    {9, 617, {1, 3, 7, 7, 31, 19, 83, 137, 221}},
    {9, 623, {1, 1, 1, 3, 23, 15, 111, 223, 83}},
    {9, 631, {1, 1, 5, 13, 31, 15, 55, 25, 161}},
    {9, 637, {1, 1, 3, 13, 25, 47, 39, 87, 257}},
};

// Fills v[0..31] with direction numbers in fixed-point form (bit 31 is the
// first binary digit).
void direction_vectors(int dim_index, std::uint32_t* v) {
  if (dim_index == 0) {
    for (int k = 0; k < kBits; ++k) v[k] = 1u << (31 - k);
    return;
  }
  const DirectionSeed& seed = kDirectionSeeds[dim_index - 1];
  const int s = seed.degree;
  for (int k = 0; k < s; ++k) v[k] = seed.m[k] << (31 - k);
  // Interior coefficients of the primitive polynomial.
  const std::uint32_t a = (seed.poly >> 1) & ((1u << (s - 1)) - 1u);
  for (int k = s; k < kBits; ++k) {
    std::uint32_t vk = v[k - s] ^ (v[k - s] >> s);
    for (int i = 1; i < s; ++i)
      if ((a >> (s - 1 - i)) & 1u) vk ^= v[k - i];
    v[k] = vk;
  }
}

// Random lower-triangular linear scramble in digit space. Digit r of the
// output mixes digits 0..r of the input; the diagonal stays set so the map
// is a bijection on every dyadic refinement.
struct DigitScramble {
  std::uint32_t rows[kBits];
  std::uint32_t shift;

  static DigitScramble make(Rng& rng) {
    DigitScramble s;
    for (int r = 0; r < kBits; ++r) {
      const std::uint32_t diagonal = 1u << (31 - r);
      const std::uint32_t above = r == 0
          ? 0u
          : static_cast<std::uint32_t>(rng.next_u64()) & ~((1u << (32 - r)) - 1u);
      s.rows[r] = diagonal | above;
    }
    s.shift = static_cast<std::uint32_t>(rng.next_u64());
    return s;
  }

  std::uint32_t apply(std::uint32_t x) const {
    std::uint32_t y = 0;
    for (int r = 0; r < kBits; ++r)
      y |= static_cast<std::uint32_t>(std::popcount(x & rows[r]) & 1) << (31 - r);
    return y ^ shift;
  }
};

}  // namespace

std::vector<std::vector<double>> sobol_points(int dim, int m, std::uint64_t seed,
                                              bool scramble) {
  if (dim < 1 || dim > kSobolMaxDimension)
    throw DataError("sobol_points: dimension must be in [1, " +
                    std::to_string(kSobolMaxDimension) + "], got " + std::to_string(dim));
  if (m < 0 || m > 30)
    throw DataError("sobol_points: m must be in [0, 30], got " + std::to_string(m));

  const std::size_t n = std::size_t{1} << m;
  std::vector<std::vector<double>> points(n, std::vector<double>(dim));

  std::vector<std::uint32_t> v(static_cast<std::size_t>(dim) * kBits);
  for (int d = 0; d < dim; ++d) direction_vectors(d, v.data() + std::size_t(d) * kBits);

  std::vector<DigitScramble> scrambles;
  if (scramble) {
    scrambles.reserve(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(d)));
      scrambles.push_back(DigitScramble::make(rng));
    }
  }

  constexpr double kScale = 0x1.0p-32;
  std::vector<std::uint32_t> state(static_cast<std::size_t>(dim), 0u);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      // Gray-code step: flip the direction of the lowest zero bit of i-1.
      const int c = std::countr_one(i - 1);
      for (int d = 0; d < dim; ++d)
        state[static_cast<std::size_t>(d)] ^= v[std::size_t(d) * kBits + c];
    }
    for (int d = 0; d < dim; ++d) {
      const std::uint32_t x = state[static_cast<std::size_t>(d)];
      const std::uint32_t y = scramble ? scrambles[static_cast<std::size_t>(d)].apply(x) : x;
      points[i][static_cast<std::size_t>(d)] = static_cast<double>(y) * kScale;
    }
  }
  return points;
}

}  // namespace dsgen
