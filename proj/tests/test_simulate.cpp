#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "spde/model.hpp"
#include "spde/rng.hpp"
#include "spde/simulate.hpp"

using namespace spde;

namespace {
const model::Params kStudy{0.1, 0.5, -0.4, 0.3};

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}
double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}
}  // namespace

TEST_CASE("fixed seed gives a bit-identical field") {
  const model::GridSpec g(8, 8, 1.0, 0.1);
  sim::SimConfig c;
  c.K = 500;
  c.seed = 20260808;
  const Field a = sim::simulate_spectral(kStudy, g, c);
  const Field b = sim::simulate_spectral(kStudy, g, c);
  CHECK(a.values == b.values);
  CHECK(a.provenance == Field::Provenance::spectral);
  CHECK(a.K == 500);
}

TEST_CASE("raising the cutoff extends, never reshuffles, the mode draws") {
  const model::GridSpec g(6, 4, 1.0, 0.1);
  const auto p8 = sim::ou_paths(kStudy, g, 8, 99);
  const auto p16 = sim::ou_paths(kStudy, g, 16, 99);
  for (int l = 0; l < 8; ++l) CHECK(p8[l] == p16[l]);
}

TEST_CASE("boundary columns vanish exactly when b = 0") {
  const model::GridSpec g(5, 6, 1.0, 0.0);
  sim::SimConfig c;
  c.K = 200;
  c.seed = 3;
  const Field f = sim::simulate_spectral(kStudy, g, c);
  for (int i = 0; i <= g.N; ++i) {
    CHECK(f(i, 0) == 0.0);
    CHECK(f(i, g.M) == 0.0);
  }
  c.max_exact_points = 4096;
  const Field fe = sim::simulate_exact(kStudy, g, c);
  for (int i = 0; i <= g.N; ++i) {
    CHECK(fe(i, 0) == 0.0);
    CHECK(fe(i, g.M) == 0.0);
  }
}

TEST_CASE("coefficient processes have the stationary OU covariance") {
  const model::DerivedParams d = model::derive(kStudy);
  const model::GridSpec g(1, 2, 0.05, 0.1);
  const int reps = 20000;
  std::vector<double> u0(reps), u1(reps), v0(reps);
  for (int r = 0; r < reps; ++r) {
    const auto paths = sim::ou_paths(kStudy, g, 2, rng::derive_seed(7, r));
    u0[r] = paths[0][0];
    u1[r] = paths[0][1];
    v0[r] = paths[1][0];
  }
  const double lam1 = d.lambda(1);
  const double var_expect = kStudy.sigma2 / (2 * lam1);
  const double cov_expect = var_expect * std::exp(-lam1 * g.dt());
  double cov = 0.0, cross = 0.0;
  const double m0 = mean(u0), m1 = mean(u1), mv = mean(v0);
  for (int r = 0; r < reps; ++r) {
    cov += (u0[r] - m0) * (u1[r] - m1);
    cross += (u0[r] - m0) * (v0[r] - mv);
  }
  cov /= reps - 1;
  cross /= reps - 1;
  const double se_cov = std::sqrt((variance(u0) * variance(u1) + cov * cov) / reps);
  CHECK(std::abs(cov - cov_expect) < 4 * se_cov);
  // different modes are independent
  const double se_cross = std::sqrt(variance(u0) * variance(v0) / reps);
  CHECK(std::abs(cross) < 4 * se_cross);
}

TEST_CASE("spectral field is stationary in time and matches the covariance kernel") {
  const model::GridSpec g(4, 4, 1.0, 0.1);
  sim::SimConfig c;
  c.K = 1000;
  const int reps = 6000;
  std::vector<double> first(reps), last(reps);
  for (int r = 0; r < reps; ++r) {
    c.seed = rng::derive_seed(11, r);
    const Field f = sim::simulate_spectral(kStudy, g, c);
    first[r] = f(0, 2);
    last[r] = f(g.N, 2);
  }
  const double truth =
      model::spatial_covariance_closed(g.y(2), g.y(2), kStudy) - sim::truncation_deficit(kStudy, g.y(2), c.K);
  for (auto* v : {&first, &last}) {
    const double var = variance(*v);
    const double se = var * std::sqrt(2.0 / (reps - 1));
    CHECK(std::abs(var - truth) < 4 * se);
  }
}

TEST_CASE("exact sampler reproduces the covariance kernel") {
  const model::GridSpec g(3, 3, 0.5, 0.1);
  sim::SimConfig c;
  const int reps = 6000;
  std::vector<std::vector<double>> node(16, std::vector<double>(reps));
  for (int r = 0; r < reps; ++r) {
    c.seed = rng::derive_seed(5, r);
    const Field f = sim::simulate_exact(kStudy, g, c);
    for (int i = 0; i <= 3; ++i)
      for (int k = 0; k <= 3; ++k) node[i * 4 + k][r] = f(i, k);
  }
  for (int i = 0; i <= 3; ++i)
    for (int k = 0; k <= 3; ++k) {
      const double truth = model::spatial_covariance_closed(g.y(k), g.y(k), kStudy);
      const double var = variance(node[i * 4 + k]);
      const double se = truth * std::sqrt(2.0 / (reps - 1));
      CHECK(std::abs(var - truth) < 4 * se);
    }
  // deterministic draw
  c.seed = 123;
  const Field a = sim::simulate_exact(kStudy, g, c);
  const Field b = sim::simulate_exact(kStudy, g, c);
  CHECK(a.values == b.values);
}

TEST_CASE("spectral and exact samplers agree in distribution") {
  const model::GridSpec g(4, 4, 1.0, 0.1);
  sim::SimConfig cs, ce;
  cs.K = 5000;
  const int reps = 5000;
  std::vector<double> xs(reps), xe(reps);
  for (int r = 0; r < reps; ++r) {
    cs.seed = rng::derive_seed(21, r);
    ce.seed = rng::derive_seed(22, r);
    xs[r] = sim::simulate_spectral(kStudy, g, cs)(2, 2);
    xe[r] = sim::simulate_exact(kStudy, g, ce)(2, 2);
  }
  // same mean (zero) and variance at the 1% level
  const double pooled_se = std::sqrt(variance(xs) / reps + variance(xe) / reps);
  CHECK(std::abs(mean(xs) - mean(xe)) < 2.6 * pooled_se);
  const double vs = variance(xs), ve = variance(xe);
  const double se_var = std::sqrt(2.0 / (reps - 1)) * std::sqrt(vs * ve);
  CHECK(std::abs(vs - ve) < 2.6 * se_var);
}

TEST_CASE("truncation deficit is the variance lost to the cutoff") {
  const double y = 0.37;
  double prev = sim::truncation_deficit(kStudy, y, 10);
  CHECK(prev > 0.0);
  for (int K : {50, 250, 1000}) {
    const double d = sim::truncation_deficit(kStudy, y, K);
    CHECK(d > 0.0);
    CHECK(d < prev);
    prev = d;
  }
  // partial series + deficit = closed-form variance
  const model::DerivedParams d = model::derive(kStudy);
  double partial = 0.0;
  for (int l = 1; l <= 500; ++l) {
    const double e = model::eigenfunction(l, y, d);
    partial += kStudy.sigma2 * e * e / (2 * d.lambda(l));
  }
  CHECK(partial + sim::truncation_deficit(kStudy, y, 500) ==
        doctest::Approx(model::spatial_covariance_closed(y, y, kStudy)).epsilon(1e-12));
}

TEST_CASE("exact sampler rejects grids above its cap") {
  const model::GridSpec g(80, 80, 1.0, 0.1);
  sim::SimConfig c;
  c.max_exact_points = 4096;
  CHECK_THROWS_AS(sim::simulate_exact(kStudy, g, c), std::invalid_argument);
}
