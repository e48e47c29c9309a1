#pragma once

#include <limits>

// Renormalization and asymptotic-constant functions used by the realized
// quadratic variation statistics and estimators:
//   F(z, dt)       eigen-series normalizer of squared double increments
//   phi(dx, dt)    exact mean normalizer of squared space-time increments
//   psi(r)         balanced-regime limit of phi/sqrt(dt) at ratio r
//   Lambda_{j,l}   fourth-order difference kernel of a Gaussian-kernel surface
//   C(h)           asymptotic variance factor (lattice sum of Lambda^2)
//   B              asymptotic variance constant of the time-increment statistic
// All eigen sums here use the heat-kernel eigenvalues theta2 pi^2 l^2.

namespace spde::series {

struct Config {
  double tol = 1e-12;        ///< absolute truncation tolerance of series
  long max_terms = 20'000'000;  ///< hard cap on 1-D summation length
  int lattice_cut = 128;     ///< initial half-width of Z^2 lattice sums

  void validate() const;
};

/// F for lag 0: sum_l (1 - e^{-theta2 pi^2 l^2 dt}) cos(pi l z)/(theta2 pi^2 l^2);
/// for lag J >= 1 the second-order difference version of the same series.
/// z in [0,2].
double f_series(int lag, double z, double dt, double theta2, const Config& cfg = {});

/// phi(dx, dt) = F(0,dt)(1 + e^{-kappa dx}) - 2 F(dx,dt) e^{-kappa dx/2}.
double phi(double dx, double dt, double theta2, double kappa, const Config& cfg = {});

/// psi_{theta2}(r); accepts r = 0 (limit 0) and r = infinity
/// (limit 2/sqrt(pi theta2)). Gaussian tails via erfc.
double psi(double r, double theta2);

/// d psi / d theta2 (strictly negative for r > 0).
double psi_dtheta2(double r, double theta2);

/// Moment function H with psi_{theta2}(r) = H(r/(2 sqrt(theta2)))/r.
double h_moment(double x);
double h_moment_prime(double x);

/// Kernel H with H(0) = 1/(2 sqrt(pi)), used by the Lambda surface.
double h_kernel(double x);

/// Unique theta2 with psi_{theta2}(r) = v, by bracketed root search.
double psi_inverse(double v, double r);

/// Lambda_{j,l}(h): double second difference of the surface
/// G_h(j,l) = sqrt(|j|) h_kernel(h|l|/sqrt(|j|)) 1{j != 0} at (|j|-1, |l|-1).
double lambda_weight(long j, long l, double h);

struct TruncatedSum {
  double value = 0.0;
  double tail = 0.0;  ///< certified or estimated remainder bound
  long terms = 0;     ///< summation length / lattice half-width used
};

/// B = 2 + sum_{J>=1} (2 sqrt(J) - sqrt(J+1) - sqrt(J-1))^2 with certified tail.
TruncatedSum b_constant(const Config& cfg = {});

/// C(h) = 2 sum_{j,l} Lambda_{j,l}^2(h) / Lambda_{0,0}^2(h) on [0, infinity];
/// dedicated branches C(0) = 3 and C(inf) = (3/2) B.
TruncatedSum c_of_h(double h, const Config& cfg = {});

inline double c_value(double h, const Config& cfg = {}) { return c_of_h(h, cfg).value; }

/// Lattice sums entering the least-squares covariance: with
/// a_{ik} = -Lambda_{ik}(h)/sqrt(theta2),
///   A = sum a^2, B = sum (2a_{ik} + a_{(i-1)k} + a_{(i+1)k})^2,
///   C = sum (a_{ik} + a_{(i-1)k})^2.
struct LatticeSums {
  double a = 0.0, b = 0.0, c = 0.0;
  long cut = 0;
};
LatticeSums ls_lattice_sums(double h, double theta2, const Config& cfg = {});

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace spde::series
