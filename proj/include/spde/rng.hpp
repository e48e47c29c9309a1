#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random number generation. Every variate is a pure function of
// (seed, stream, index), so refining a simulation (more modes, more steps,
// more replications) extends the set of draws without reshuffling the ones
// already consumed.

namespace spde::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Value at position `ctr` of the seed's splitmix stream, with a second
// finalization round to decorrelate nearby seeds.
inline std::uint64_t at(std::uint64_t seed, std::uint64_t ctr) noexcept {
  std::uint64_t z = mix(seed + kGolden * (ctr + 1));
  return mix(z ^ 0xD1B54A32D192ED03ull);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) noexcept {
  return mix(seed ^ mix(a + kGolden));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b) noexcept {
  return derive_seed(derive_seed(seed, a), b);
}

// Uniform on (0,1), never exactly 0 or 1.
inline double uniform(std::uint64_t seed, std::uint64_t ctr) noexcept {
  return (static_cast<double>(at(seed, ctr) >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal draw indexed by (stream, idx); stream < 2^30, idx < 2^34.
// Consecutive indices share a Box-Muller pair, so each variate stays a pure
// function of (seed, stream, idx) while bulk generation touches one
// log/sqrt/sincos per two draws.
inline double gaussian(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t idx) noexcept {
  const std::uint64_t base = (stream << 34) | (idx & ~1ull);
  const double u1 = uniform(seed, base);
  const double u2 = uniform(seed, base | 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925287 * u2;
  return (idx & 1) ? r * std::sin(a) : r * std::cos(a);
}

// out[0..n) = gaussian(seed, stream, first + i), evaluating each pair once.
inline void fill_gaussians(std::uint64_t seed, std::uint64_t stream, std::uint64_t first,
                           std::size_t n, double* out) noexcept {
  std::size_t i = 0;
  if ((first & 1) && n > 0) out[i++] = gaussian(seed, stream, first);
  while (i + 1 < n) {
    const std::uint64_t idx = first + i;
    const std::uint64_t base = (stream << 34) | idx;
    const double u1 = uniform(seed, base);
    const double u2 = uniform(seed, base | 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925287 * u2;
    out[i] = r * std::cos(a);
    out[i + 1] = r * std::sin(a);
    i += 2;
  }
  if (i < n) out[i] = gaussian(seed, stream, first + i);
}

}  // namespace spde::rng
