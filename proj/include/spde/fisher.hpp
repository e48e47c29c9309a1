#pragma once

#include <array>

// Fisher information for discretely observed Ornstein-Uhlenbeck coefficient
// processes du = -a mu u dt + nu sqrt(mu) dB, u(0) ~ N(0, nu^2/(2a)), sampled
// at i/N, i = 0..N, and the induced information bounds and minimax rates for
// the discretely observed field.

namespace spde::fisher {

struct OuFisherInput {
  double a = 1.0;    ///< eigen-scale factor (a = l^2 in applications)
  double mu = 1.0;   ///< > 0
  double nu2 = 1.0;  ///< > 0
  int n_steps = 1;   ///< N; mesh dt = 1/N
};

/// 2x2 information matrix for (mu, nu^2) of one full sample path
/// (u(0), ..., u(1)); closed form.
std::array<double, 4> ou_fisher(const OuFisherInput& in);

struct SpectralFisher {
  double j_sigma2 = 0.0;  ///< information for sigma^2
  double j_rho2 = 0.0;    ///< information for rho^2 = sigma^2/theta2
};

/// Information of the first M coefficient processes for (sigma^2, rho^2)
/// under theta1 = theta0 = 0, via mu = pi^2 theta2, nu^2 = sigma^2/(pi^2 theta2)
/// and the change-of-variables Jacobian.
SpectralFisher spectral_fisher_diag(int N, int M, double sigma2, double rho2);

/// Minimax rate N^{-3/4} when M >= sqrt(N), else (M^3 log(N/M^2))^{-1/2}.
double minimax_rate(int M, int N);

}  // namespace spde::fisher
