#pragma once

#include <cstdint>
#include <vector>

#include "spde/field.hpp"
#include "spde/model.hpp"
#include "spde/numerics.hpp"

namespace spde::sim {

struct SimConfig {
  enum class Scheme { spectral, exact };

  int K = 0;  ///< spectral cutoff; 0 = auto max(4M, 1000)
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::spectral;
  long max_exact_points = 4096;  ///< dense-factorization cap of the exact sampler
  double exact_tol = 1e-12;      ///< covariance truncation tol of the exact sampler
};

/// Default spectral cutoff for a grid with M spatial intervals. Small cutoffs
/// bias spatial-increment statistics noticeably, hence the 4M floor.
int default_cutoff(int M);

/// Truncated eigen-expansion with exact OU transitions per mode:
///   u_l(0) = sigma/sqrt(2 lambda_l) Z,   u_l(t+dt) = e^{-lambda_l dt} u_l(t)
///            + sigma sqrt((1-e^{-2 lambda_l dt})/(2 lambda_l)) Z'.
/// Bit-identical for a fixed seed; enlarging K or N extends the set of draws
/// without changing earlier ones.
Field simulate_spectral(const model::Params& p, const model::GridSpec& g, const SimConfig& c);

/// Stationary OU coefficient paths u_l(t_i), l = 1..K (row l-1), for tests and
/// diagnostics; simulate_spectral assembles exactly these paths.
std::vector<std::vector<double>> ou_paths(const model::Params& p, const model::GridSpec& g,
                                          int K, std::uint64_t seed);

/// One exact draw of the field: assembles the full covariance matrix from
/// field_covariance, factorizes with a jitter ladder, multiplies a standard
/// normal vector. Grid points with y in {0,1} are exactly zero.
Field simulate_exact(const model::Params& p, const model::GridSpec& g, const SimConfig& c);

/// Exact sampler with the factorization done once; draws then cost one
/// triangular multiply. Thread-safe after construction.
class ExactFieldSampler {
 public:
  ExactFieldSampler(const model::Params& p, const model::GridSpec& g,
                    long max_points = 4096, double tol = 1e-12);
  Field draw(std::uint64_t seed) const;

 private:
  model::GridSpec grid_;
  std::vector<int> cols_;  ///< interior spatial indices (boundary stays 0)
  num::Mat chol_;
};

/// Variance lost to spectral truncation at location y:
/// sigma^2 sum_{l>K} e_l(y)^2 / (2 lambda_l).
double truncation_deficit(const model::Params& p, double y, int K);

}  // namespace spde::sim
