#include "spde/fisher.hpp"

#include <cmath>
#include <stdexcept>

namespace spde::fisher {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

std::array<double, 4> ou_fisher(const OuFisherInput& in) {
  if (!(in.a > 0.0 && in.mu > 0.0 && in.nu2 > 0.0) || in.n_steps < 1)
    throw std::invalid_argument("ou_fisher needs positive a, mu, nu2 and N >= 1");
  const double dt = 1.0 / in.n_steps;
  const double e2 = std::exp(-2.0 * in.mu * in.a * dt);
  const double e4 = e2 * e2;
  const double om = 1.0 - e2;
  const double i11 = in.a * in.a * dt * (e4 + e2) / (om * om);
  const double i12 = in.a * e2 / (in.nu2 * om);
  const double i22 = (in.n_steps + 1.0) / (2.0 * in.nu2 * in.nu2);
  return {i11, i12, i12, i22};
}

SpectralFisher spectral_fisher_diag(int N, int M, double sigma2, double rho2) {
  if (N < 1 || M < 1 || !(sigma2 > 0.0) || !(rho2 > 0.0))
    throw std::invalid_argument("spectral_fisher_diag needs N, M >= 1 and positive parameters");
  const double theta2 = sigma2 / rho2;
  const double mu = kPi * kPi * theta2;
  const double nu2 = sigma2 / (kPi * kPi * theta2);
  double i11 = 0.0, i12 = 0.0, i22 = 0.0;
  for (int l = 1; l <= M; ++l) {
    const auto I = ou_fisher({static_cast<double>(l) * l, mu, nu2, N});
    i11 += I[0];
    i12 += I[1];
    i22 += I[3];
  }
  const double pi4 = kPi * kPi * kPi * kPi;
  SpectralFisher out;
  out.j_sigma2 = pi4 / (rho2 * rho2) * i11;
  out.j_rho2 = pi4 * sigma2 * sigma2 / (rho2 * rho2 * rho2 * rho2) * i11 -
               2.0 * sigma2 / (rho2 * rho2) * i12 + i22 / pi4;
  return out;
}

double minimax_rate(int M, int N) {
  if (M < 2 || N < 2) throw std::invalid_argument("minimax_rate needs M, N >= 2");
  const double m = M, n = N;
  if (m * m >= n) return std::pow(n, -0.75);
  return 1.0 / std::sqrt(m * m * m * std::log(n / (m * m)));
}

}  // namespace spde::fisher
