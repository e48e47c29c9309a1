#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spde/model.hpp"

namespace spde {

/// Observations X_{t_i}(y_k) on a regular grid, row-major in time:
/// values[i*(M+1) + k], i = 0..N, k = 0..M.
struct Field {
  enum class Provenance { spectral, exact, external };

  std::vector<double> values;
  model::GridSpec grid;
  Provenance provenance = Provenance::external;
  int K = 0;              ///< spectral cutoff (spectral provenance only)
  std::uint64_t seed = 0;

  double operator()(int i, int k) const {
    return values[static_cast<std::size_t>(i) * (grid.M + 1) + k];
  }
  double& operator()(int i, int k) {
    return values[static_cast<std::size_t>(i) * (grid.M + 1) + k];
  }
};

/// CSV layout: header "t,<y_0>,...,<y_M>", then one row per t_i. Values are
/// printed with 17 significant digits and round-trip exactly.
void write_field_csv(const Field& f, const std::string& path);
Field read_field_csv(const std::string& path);

/// Compact binary layout: magic "SPDE1", version byte, u64 N, u64 M, f64 T,
/// f64 b, then (N+1)(M+1) little-endian f64 row-major in time.
void write_field_binary(const Field& f, const std::string& path);
Field read_field_binary(const std::string& path);

/// Dispatch on extension: ".csv" text, anything else binary.
void write_field(const Field& f, const std::string& path);
Field read_field(const std::string& path);

}  // namespace spde
