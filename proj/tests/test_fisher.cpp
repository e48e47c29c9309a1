#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "spde/fisher.hpp"
#include "spde/rng.hpp"

using namespace spde;
namespace fi = spde::fisher;

namespace {

/// MC oracle: negative expected Hessian of the exact Gaussian log-likelihood
/// of a discretely sampled OU path, by central differences with common random
/// numbers across the stencil.
std::array<double, 4> fd_expected_hessian(const fi::OuFisherInput& in, int paths,
                                          std::uint64_t seed) {
  const double dt = 1.0 / in.n_steps;
  auto loglik = [&](double mu, double nu2, const std::vector<double>& u) {
    const double stat_var = nu2 / (2 * in.a);
    const double e = std::exp(-mu * in.a * dt);
    const double trans_var = stat_var * (1 - e * e);
    double ll = -0.5 * std::log(2 * M_PI * stat_var) - u[0] * u[0] / (2 * stat_var);
    for (int i = 0; i + 1 < static_cast<int>(u.size()); ++i) {
      const double resid = u[i + 1] - e * u[i];
      ll += -0.5 * std::log(2 * M_PI * trans_var) - resid * resid / (2 * trans_var);
    }
    return ll;
  };
  const double hmu = 1e-3 * in.mu, hn = 1e-3 * in.nu2;
  double s_pp = 0, s_p0 = 0, s_00 = 0, s_m0 = 0, s_0p = 0, s_0m = 0, s_mm = 0, s_pm = 0,
         s_mp = 0;
  std::vector<double> u(in.n_steps + 1);
  for (int p = 0; p < paths; ++p) {
    const double e = std::exp(-in.mu * in.a * dt);
    const double stat_sd = std::sqrt(in.nu2 / (2 * in.a));
    const double innov_sd = stat_sd * std::sqrt(1 - e * e);
    u[0] = stat_sd * rng::gaussian(seed, p, 0);
    for (int i = 0; i < in.n_steps; ++i)
      u[i + 1] = e * u[i] + innov_sd * rng::gaussian(seed, p, i + 1);
    s_00 += loglik(in.mu, in.nu2, u);
    s_p0 += loglik(in.mu + hmu, in.nu2, u);
    s_m0 += loglik(in.mu - hmu, in.nu2, u);
    s_0p += loglik(in.mu, in.nu2 + hn, u);
    s_0m += loglik(in.mu, in.nu2 - hn, u);
    s_pp += loglik(in.mu + hmu, in.nu2 + hn, u);
    s_pm += loglik(in.mu + hmu, in.nu2 - hn, u);
    s_mp += loglik(in.mu - hmu, in.nu2 + hn, u);
    s_mm += loglik(in.mu - hmu, in.nu2 - hn, u);
  }
  const double inv = 1.0 / paths;
  const double i11 = -(s_p0 - 2 * s_00 + s_m0) * inv / (hmu * hmu);
  const double i22 = -(s_0p - 2 * s_00 + s_0m) * inv / (hn * hn);
  const double i12 = -(s_pp - s_pm - s_mp + s_mm) * inv / (4 * hmu * hn);
  return {i11, i12, i12, i22};
}

}  // namespace

TEST_CASE("closed-form entries") {
  // I22 with N = 1, nu = 1
  const auto I = fi::ou_fisher({1.0, 2.0, 1.0, 1});
  CHECK(I[3] == 1.0);
  CHECK_THROWS_AS(fi::ou_fisher({0.0, 1.0, 1.0, 10}), std::invalid_argument);
}

TEST_CASE("small-mesh expansion of the drift information") {
  // I11 -> 1/(2 mu^2 dt) as the mesh refines (a = 1)
  const double mu = 2.0;
  for (int N : {1000, 100000}) {
    const auto I = fi::ou_fisher({1.0, mu, 0.5, N});
    const double lead = N / (2 * mu * mu);
    CHECK(std::abs(I[0] / lead - 1.0) < 10.0 * mu / N + 1e-3);
  }
}

TEST_CASE("information matrix is symmetric positive definite") {
  for (double a : {1.0, 4.0, 25.0})
    for (double mu : {0.5, 5.0}) {
      const auto I = fi::ou_fisher({a, mu, 0.7, 50});
      CHECK(I[1] == I[2]);
      CHECK(I[0] > 0.0);
      CHECK(I[3] > 0.0);
      CHECK(I[0] * I[3] - I[1] * I[2] > 0.0);
    }
}

TEST_CASE("matches the Monte Carlo expected-Hessian oracle") {
  const fi::OuFisherInput in{1.0, 2.0, 0.5, 50};
  const auto exact = fi::ou_fisher(in);
  const auto mc = fd_expected_hessian(in, 30000, 4242);
  for (int k : {0, 1, 3})
    CHECK(mc[k] == doctest::Approx(exact[k]).epsilon(0.03));
}

TEST_CASE("reparametrization consistency") {
  // J = A^T I A; applying the inverse Jacobian recovers I
  const double sigma2 = 1.3, rho2 = 0.6;
  const double theta2 = sigma2 / rho2;
  const double pi2 = M_PI * M_PI;
  const int N = 64, M = 12;
  const double mu = pi2 * theta2, nu2 = sigma2 / (pi2 * theta2);
  double i11 = 0, i12 = 0, i22 = 0;
  for (int l = 1; l <= M; ++l) {
    const auto I = fi::ou_fisher({static_cast<double>(l) * l, mu, nu2, N});
    i11 += I[0];
    i12 += I[1];
    i22 += I[3];
  }
  const auto j = fi::spectral_fisher_diag(N, M, sigma2, rho2);
  // invert the 2x2 change of variables on the diagonal entries
  const double a11 = pi2 / rho2, a12 = -pi2 * sigma2 / (rho2 * rho2), a22 = 1.0 / pi2;
  const double j11 = a11 * a11 * i11;
  const double j22 = a12 * a12 * i11 + 2 * a12 * a22 * i12 + a22 * a22 * i22;
  CHECK(j.j_sigma2 == doctest::Approx(j11).epsilon(1e-12));
  CHECK(j.j_rho2 == doctest::Approx(j22).epsilon(1e-12));
}

TEST_CASE("information growth rates") {
  // J(sigma^2)/N^{3/2} bounded at M = 4 sqrt(N)
  double lo = 1e300, hi = 0.0;
  for (int N : {64, 256, 1024}) {
    const int M = 4 * static_cast<int>(std::sqrt(N));
    const auto j = fi::spectral_fisher_diag(N, M, 1.0, 1.0);
    const double scaled = j.j_sigma2 / std::pow(N, 1.5);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  CHECK(hi / lo < 3.0);

  // J(rho^2)/M^3 bounded at N = M^4
  lo = 1e300;
  hi = 0.0;
  for (int M : {8, 16, 32}) {
    const int N = M * M * M * M;
    const auto j = fi::spectral_fisher_diag(N, M, 1.0, 1.0);
    const double scaled = j.j_rho2 / (static_cast<double>(M) * M * M);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  CHECK(hi / lo < 2.0);

  // leading-term cancellation: J(rho^2) << MN when M sqrt(dt) -> 0
  const auto j = fi::spectral_fisher_diag(4096, 8, 1.0, 1.0);
  CHECK(j.j_rho2 / (8.0 * 4096.0) < 0.2);
}

TEST_CASE("minimax rate") {
  CHECK(fi::minimax_rate(100, 100) == doctest::Approx(std::pow(100.0, -0.75)).epsilon(1e-12));
  // N = M^2: the balanced branch equals (MN)^{-1/2}
  for (int M : {8, 20}) {
    const int N = M * M;
    CHECK(fi::minimax_rate(M, N) ==
          doctest::Approx(1.0 / std::sqrt(static_cast<double>(M) * N)).epsilon(1e-12));
  }
  // never faster than the parametric rate
  for (int M : {4, 8, 32, 128})
    for (int N : {16, 256, 4096, 65536}) {
      const double r = fi::minimax_rate(M, N);
      CHECK(r >= 0.999 / std::sqrt(static_cast<double>(M) * N));
    }
  // monotone growth of the diagonals in both M and N
  const auto base = fi::spectral_fisher_diag(128, 8, 1.0, 1.0);
  const auto more_n = fi::spectral_fisher_diag(256, 8, 1.0, 1.0);
  const auto more_m = fi::spectral_fisher_diag(128, 16, 1.0, 1.0);
  CHECK(more_n.j_sigma2 >= base.j_sigma2);
  CHECK(more_m.j_sigma2 >= base.j_sigma2);
  CHECK(more_n.j_rho2 >= base.j_rho2);
  CHECK(more_m.j_rho2 >= base.j_rho2);
  CHECK_THROWS_AS(fi::minimax_rate(1, 100), std::invalid_argument);
}
