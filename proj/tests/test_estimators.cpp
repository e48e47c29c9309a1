#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "spde/estimators.hpp"
#include "spde/rng.hpp"
#include "spde/simulate.hpp"

using namespace spde;
namespace e = spde::est;

namespace {
const model::Params kStudy{0.1, 0.5, -0.4, 0.3};

Field sample_field(int N, int M, int K, std::uint64_t seed) {
  const model::GridSpec g(N, M, 1.0, 0.1);
  sim::SimConfig c;
  c.K = K;
  c.seed = seed;
  return sim::simulate_spectral(kStudy, g, c);
}
}  // namespace

TEST_CASE("method tags round-trip") {
  for (const char* tag : {"sigma2-sp", "sigma2-t", "sigma2-double", "theta2-sp",
                          "theta2-t", "theta2-r", "rho-kappa", "eta-ls", "eta-avg"})
    CHECK(e::method_tag(e::parse_method(tag)) == tag);
  CHECK_THROWS_AS(e::parse_method("bogus"), std::invalid_argument);
  CHECK(e::method_dim(e::Method::rho_kappa) == 2);
  CHECK(e::method_dim(e::Method::eta_avg) == 3);
  CHECK(e::method_dim(e::Method::sigma2_sp) == 1);
}

TEST_CASE("plug-in identities tie estimators to their statistics") {
  const Field f = sample_field(16, 16, 1000, 5);
  const double kap = -0.8;
  const double vsp = stats::realized_qv(f, stats::QvKind::vsp, kap).value;
  const double vt = stats::realized_qv(f, stats::QvKind::vt, kap).value;
  const double vd = stats::realized_qv(f, stats::QvKind::vdouble, kap, 0.5).value;

  CHECK(e::estimate_sigma2(f, "sp", 0.5, kap).estimate[0] == 2 * 0.5 * vsp);
  CHECK(e::estimate_sigma2(f, "t", 0.5, kap).estimate[0] ==
        doctest::Approx(std::sqrt(model::kPi * 0.5) * vt).epsilon(1e-15));
  CHECK(e::estimate_sigma2(f, "double", 0.5, kap).estimate[0] == vd);
  CHECK(e::estimate_theta2(f, "sp", 0.1, kap).estimate[0] ==
        doctest::Approx(0.1 / (2 * vsp)).epsilon(1e-15));
  CHECK(e::estimate_theta2(f, "t", 0.1, kap).estimate[0] ==
        doctest::Approx(0.1 * 0.1 / (model::kPi * vt * vt)).epsilon(1e-15));
}

TEST_CASE("scaling equivariance") {
  const Field f = sample_field(12, 12, 800, 6);
  Field f2 = f;
  for (double& v : f2.values) v *= 3.0;
  const double kap = -0.8;
  for (const char* variant : {"sp", "t", "double"}) {
    const double a = e::estimate_sigma2(f, variant, 0.5, kap).estimate[0];
    const double b = e::estimate_sigma2(f2, variant, 0.5, kap).estimate[0];
    CHECK(b == doctest::Approx(9.0 * a).epsilon(1e-13));
  }
  // theta2 estimators are invariant when the known sigma2 scales along
  for (const char* variant : {"sp", "t"}) {
    const double a = e::estimate_theta2(f, variant, 0.1, kap).estimate[0];
    const double b = e::estimate_theta2(f2, variant, 0.9, kap).estimate[0];
    CHECK(b == doctest::Approx(a).epsilon(1e-12));
  }
  const double a = e::estimate_theta2(f, "r", 0.1, kap).estimate[0];
  const double b = e::estimate_theta2(f2, "r", 0.9, kap).estimate[0];
  CHECK(b == doctest::Approx(a).epsilon(1e-9));
}

TEST_CASE("rho-kappa least squares recovers exact moments") {
  const int M = 64;
  std::vector<double> m(M), y(M);
  const double rho2 = 0.2, kap = -0.8;
  for (int k = 0; k < M; ++k) {
    y[k] = 0.1 + 0.8 * k / M;
    m[k] = rho2 * std::exp(-kap * y[k]);
  }
  const auto res = e::rho_kappa_from_moments(m, y);
  CHECK(std::abs(res.estimate[0] - rho2) <= 1e-10);
  CHECK(std::abs(res.estimate[1] - kap) <= 1e-10);

  // kappa = 0 data
  std::vector<double> mc(M, 0.31);
  const auto res0 = e::rho_kappa_from_moments(mc, y);
  CHECK(std::abs(res0.estimate[1]) <= 1e-9);
  CHECK(res0.estimate[0] == doctest::Approx(0.31).epsilon(1e-10));

  std::vector<double> zeros(M, 0.0);
  CHECK_THROWS_AS(e::rho_kappa_from_moments(zeros, y), std::runtime_error);
}

TEST_CASE("rho-kappa on simulated data") {
  const int reps = 150;
  std::vector<double> rho(reps), kap(reps);
  for (int r = 0; r < reps; ++r) {
    const Field f = sample_field(16, 128, 8192, rng::derive_seed(101, r));
    const auto res = e::estimate_rho_kappa(f);
    rho[r] = res.estimate[0];
    kap[r] = res.estimate[1];
  }
  auto mean_se = [&](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair<double, double>(m, std::sqrt(s / (v.size() - 1) / v.size()));
  };
  const auto [mr, ser] = mean_se(rho);
  const auto [mk, sek] = mean_se(kap);
  CHECK(std::abs(mr - 0.2) < 4 * ser + 0.004);  // allows the O(dx)+cutoff bias
  CHECK(std::abs(mk - (-0.8)) < 4 * sek + 0.05);
}

TEST_CASE("eta contrast recovers exact moments and flags boundary optima") {
  const double r = 0.8;
  const int M = 32;
  std::vector<double> z(M), m1(M), m2(M);
  const double s2 = 0.1, t2 = 0.5, kap = -0.8;
  for (int k = 0; k < M; ++k) {
    z[k] = 0.1 + 0.8 * (k + 0.5) / M;
    m1[k] = s2 * std::exp(-kap * z[k]) * series::psi(r, t2);
    m2[k] = s2 * std::exp(-kap * z[k]) * series::psi(r / std::sqrt(2.0), t2);
  }
  e::BoxH box;
  box.lo = {0.01, 0.05, -5.0};
  box.hi = {1.0, 5.0, 5.0};
  const auto res = e::eta_from_moments(m1, m2, z, r, box, 0.0);
  CHECK(res.converged);
  CHECK(std::abs(res.estimate[0] - s2) <= 1e-6);
  CHECK(std::abs(res.estimate[1] - t2) <= 1e-5);
  CHECK(std::abs(res.estimate[2] - kap) <= 1e-5);
  CHECK(res.diagnostics.at("objective") <= 1e-14);

  // truth parked on the boundary of H cannot be an interior optimum
  e::BoxH tight = box;
  tight.hi[0] = s2;  // sigma2 upper bound equals the truth
  const auto res2 = e::eta_from_moments(m1, m2, z, r, tight, 0.0);
  CHECK_FALSE(res2.converged);
}

TEST_CASE("averaged estimator with unit lags equals the balanced one") {
  const Field f = sample_field(64, 8, 1000, 7);
  e::BoxH box;
  const auto a = e::estimate_eta_ls(f, box, 1e-6);
  const auto b = e::estimate_eta_avg(f, box, 1e-6, 1, 1);
  for (int c = 0; c < 3; ++c) CHECK(a.estimate[c] == b.estimate[c]);
  CHECK(a.diagnostics.at("r") == b.diagnostics.at("r"));
}

TEST_CASE("auto coarse lags follow the sampling regime") {
  // N = 400, M = 20: balanced, v = w = 1
  const Field f = sample_field(400, 20, 1000, 8);
  e::BoxH box;
  const auto res = e::estimate_eta_avg(f, box);
  CHECK(res.diagnostics.at("v") == 1.0);
  CHECK(res.diagnostics.at("w") == 1.0);
  // N = 256, M = 4: v = round(256/64) = 4, w = 1
  const Field f2 = sample_field(256, 4, 1000, 9);
  const auto res2 = e::estimate_eta_avg(f2, box);
  CHECK(res2.diagnostics.at("v") == 4.0);
  CHECK(res2.diagnostics.at("w") == 1.0);
  // N = 16, M = 64: v = 1, w = round(64/4) = 16
  const Field f3 = sample_field(16, 64, 1000, 10);
  const auto res3 = e::estimate_eta_avg(f3, box);
  CHECK(res3.diagnostics.at("v") == 1.0);
  CHECK(res3.diagnostics.at("w") == 16.0);
}

TEST_CASE("theta1 from a full eta estimate") {
  e::EstimateResult res;
  res.estimate = {0.1, 0.5, -0.8};
  CHECK(e::theta1_from_eta(res) == doctest::Approx(-0.4).epsilon(1e-15));
  res.estimate = {0.1, 0.5, 0.0};
  CHECK(e::theta1_from_eta(res) == 0.0);
  res.estimate = {0.1, 0.5, 2.0};
  CHECK(e::theta1_from_eta(res) > 0.0);
  res.estimate = {0.1};
  CHECK_THROWS_AS(e::theta1_from_eta(res), std::invalid_argument);
}

TEST_CASE("scalar asymptotic variances") {
  CHECK(e::asymptotic_variance_scalar(e::Method::sigma2_sp, kStudy, 1.0) ==
        2.0 * 0.1 * 0.1);
  CHECK(e::asymptotic_variance_scalar(e::Method::theta2_sp, kStudy, 1.0) ==
        2.0 * 0.5 * 0.5);
  const double bs = e::asymptotic_variance_scalar(e::Method::sigma2_t, kStudy, 1.0);
  CHECK(bs == doctest::Approx(series::b_constant().value * 0.01).epsilon(1e-12));
  CHECK_THROWS_AS(e::asymptotic_variance_scalar(e::Method::rho_kappa, kStudy, 1.0),
                  std::invalid_argument);
}

TEST_CASE("inverting psi differentiates like the implicit function") {
  const double r = 0.8, t2 = 0.5;
  const double v0 = series::psi(r, t2);
  const double h = 1e-6 * v0;
  const double numeric =
      (series::psi_inverse(v0 + h, r) - series::psi_inverse(v0 - h, r)) / (2 * h);
  const double analytic = 1.0 / series::psi_dtheta2(r, t2);
  CHECK(numeric == doctest::Approx(analytic).epsilon(1e-6));
}

TEST_CASE("least-squares covariance matrix") {
  const auto ls = e::ls_covariance(kStudy, 1.0, 0.1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(ls.omega[i][j] == doctest::Approx(ls.omega[j][i]).epsilon(1e-10));
      CHECK(ls.u[i][j] == doctest::Approx(ls.u[j][i]).epsilon(1e-10));
    }
  const auto ev = num::mat3_sym_eigenvalues(ls.omega);
  CHECK(ev[0] > 0.0);
  const auto evu = num::mat3_sym_eigenvalues(ls.u);
  CHECK(evu[0] > 0.0);
  const auto evv = num::mat3_sym_eigenvalues(ls.v);
  CHECK(evv[0] > 0.0);
}

TEST_CASE("lattice cross sum is the inner product of the two difference arrays") {
  const double t2 = 0.5, h = 1.0 / std::sqrt(t2);
  const long L = 128;
  double sa = 0, sb = 0, sc = 0, inner = 0;
  for (long k = -L; k <= L; ++k)
    for (long i = -L; i <= L; ++i) {
      const double a0 = -series::lambda_weight(i, k, h) / std::sqrt(t2);
      const double am = -series::lambda_weight(i - 1, k, h) / std::sqrt(t2);
      const double ap = -series::lambda_weight(i + 1, k, h) / std::sqrt(t2);
      const double bb = 2 * a0 + am + ap;
      const double cc = a0 + am;
      sa += a0 * a0;
      sb += bb * bb;
      sc += cc * cc;
      inner += a0 * bb;
    }
  CHECK(sc == doctest::Approx(inner).epsilon(1e-4));  // boundary leakage only
  CHECK(sc * sc < sa * sb);
}

TEST_CASE("nonpositive statistics are rejected") {
  const model::GridSpec g(4, 4, 1.0, 0.1);
  Field zero;
  zero.grid = g;
  zero.values.assign(g.points(), 0.0);
  // the volatility estimators report a degenerate zero statistic as
  // non-converged instead of a positive estimate
  CHECK_FALSE(e::estimate_sigma2(zero, "sp", 0.5, -0.8).converged);
  CHECK_THROWS_AS(e::estimate_theta2(zero, "sp", 0.1, -0.8), std::runtime_error);
  CHECK_THROWS_AS(e::estimate_theta2(zero, "t", 0.1, -0.8), std::runtime_error);
  CHECK_THROWS_AS(e::estimate_theta2(zero, "r", 0.1, -0.8), std::runtime_error);
  CHECK_THROWS_AS(e::estimate_sigma2(zero, "bogus", 0.5, -0.8), std::invalid_argument);
}
