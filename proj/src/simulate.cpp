#include "spde/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "spde/rng.hpp"

namespace spde::sim {

int default_cutoff(int M) { return std::max(4 * M, 1000); }

namespace {

int effective_cutoff(const model::GridSpec& g, const SimConfig& c) {
  const int K = c.K > 0 ? c.K : default_cutoff(g.M);
  if (K < g.M)
    std::fprintf(stderr,
                 "warning: spectral cutoff K=%d below M=%d; spatial-increment "
                 "statistics will carry a visible truncation bias\n",
                 K, g.M);
  return K;
}

}  // namespace

std::vector<std::vector<double>> ou_paths(const model::Params& p, const model::GridSpec& g,
                                          int K, std::uint64_t seed) {
  const model::DerivedParams d = model::derive(p);
  const double dt = g.dt();
  const double sigma = std::sqrt(p.sigma2);
  std::vector<std::vector<double>> paths(K);
  std::vector<double> z(g.N + 1);
  for (int l = 1; l <= K; ++l) {
    const double lam = d.lambda(l);
    const double decay = std::exp(-lam * dt);
    const double stat_sd = sigma / std::sqrt(2.0 * lam);
    const double innov_sd = sigma * std::sqrt((1.0 - decay * decay) / (2.0 * lam));
    rng::fill_gaussians(seed, static_cast<std::uint64_t>(l), 0, g.N + 1, z.data());
    auto& u = paths[l - 1];
    u.resize(g.N + 1);
    u[0] = stat_sd * z[0];
    for (int i = 0; i < g.N; ++i) u[i + 1] = decay * u[i] + innov_sd * z[i + 1];
  }
  return paths;
}

Field simulate_spectral(const model::Params& p, const model::GridSpec& g, const SimConfig& c) {
  if (c.scheme != SimConfig::Scheme::spectral)
    throw std::invalid_argument("simulate_spectral called with non-spectral scheme");
  const model::DerivedParams d = model::derive(p);
  const int K = effective_cutoff(g, c);
  const double dt = g.dt();
  const double sigma = std::sqrt(p.sigma2);

  Field f;
  f.grid = g;
  f.provenance = Field::Provenance::spectral;
  f.K = K;
  f.seed = c.seed;
  f.values.assign(g.points(), 0.0);

  // sin(pi l y) advances by a three-term recurrence across modes; the
  // mode-independent weight carries the exp factor and pins boundaries to 0.
  const int cols = g.M + 1;
  std::vector<double> w(cols), twoc(cols), s_prev(cols, 0.0), s_cur(cols), e(cols),
      u(g.N + 1), z(g.N + 1);
  for (int k = 0; k < cols; ++k) {
    const double y = g.y(k);
    w[k] = (y == 0.0 || y == 1.0) ? 0.0 : std::sqrt(2.0) * std::exp(-0.5 * d.kappa * y);
    twoc[k] = 2.0 * std::cos(model::kPi * y);
    s_cur[k] = std::sin(model::kPi * y);
  }

  for (int l = 1; l <= K; ++l) {
    const double lam = d.lambda(l);
    const double decay = std::exp(-lam * dt);
    const double stat_sd = sigma / std::sqrt(2.0 * lam);
    const double innov_sd = sigma * std::sqrt((1.0 - decay * decay) / (2.0 * lam));
    for (int k = 0; k < cols; ++k) e[k] = w[k] * s_cur[k];
    rng::fill_gaussians(c.seed, static_cast<std::uint64_t>(l), 0, g.N + 1, z.data());
    u[0] = stat_sd * z[0];
    for (int i = 0; i < g.N; ++i) u[i + 1] = decay * u[i] + innov_sd * z[i + 1];
    for (int i = 0; i <= g.N; ++i) {
      double* row = &f.values[static_cast<std::size_t>(i) * cols];
      const double ui = u[i];
      for (int k = 0; k < cols; ++k) row[k] += ui * e[k];
    }
    for (int k = 0; k < cols; ++k) {
      const double s_next = twoc[k] * s_cur[k] - s_prev[k];
      s_prev[k] = s_cur[k];
      s_cur[k] = s_next;
    }
  }
  return f;
}

ExactFieldSampler::ExactFieldSampler(const model::Params& p, const model::GridSpec& g,
                                     long max_points, double tol)
    : grid_(g) {
  const long n_all = static_cast<long>(g.points());
  if (n_all > max_points)
    throw std::invalid_argument("exact sampler: grid has " + std::to_string(n_all) +
                                " points, above the cap of " + std::to_string(max_points));
  model::derive(p);  // admissibility

  for (int k = 0; k <= g.M; ++k) {
    const double y = g.y(k);
    if (y != 0.0 && y != 1.0) cols_.push_back(k);
  }
  const std::size_t mc = cols_.size();
  const std::size_t n = static_cast<std::size_t>(g.N + 1) * mc;

  // entries depend on (|i-j|, k, l): one covariance table per time lag
  std::vector<num::Mat> lag_cov(g.N + 1);
  for (int J = 0; J <= g.N; ++J) {
    num::Mat& cm = lag_cov[J];
    cm = num::Mat(mc, mc);
    for (std::size_t a = 0; a < mc; ++a)
      for (std::size_t b = a; b < mc; ++b) {
        const double v =
            model::field_covariance(0.0, g.y(cols_[a]), g.t(J), g.y(cols_[b]), p, tol);
        cm(a, b) = v;
        cm(b, a) = v;
      }
  }
  auto assemble = [&](num::Mat& cov) {
    for (int i = 0; i <= g.N; ++i)
      for (int j = 0; j <= g.N; ++j) {
        const num::Mat& cm = lag_cov[std::abs(i - j)];
        for (std::size_t a = 0; a < mc; ++a)
          for (std::size_t b = 0; b < mc; ++b)
            cov(static_cast<std::size_t>(i) * mc + a,
                static_cast<std::size_t>(j) * mc + b) = cm(a, b);
      }
  };

  chol_ = num::Mat(n, n);
  assemble(chol_);
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += chol_(i, i);
  const double base_jitter = 1e-12 * trace / static_cast<double>(n);

  double min_pivot = 0.0;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    if (attempt > 0) {
      assemble(chol_);
      const double jitter = base_jitter * std::pow(10.0, attempt - 1);
      for (std::size_t i = 0; i < n; ++i) chol_(i, i) += jitter;
    }
    if (num::cholesky_lower(chol_, &min_pivot)) return;
  }
  throw std::runtime_error(
      "exact sampler: factorization failed after jitter ladder; smallest pivot "
      "estimate " +
      std::to_string(min_pivot));
}

Field ExactFieldSampler::draw(std::uint64_t seed) const {
  const std::size_t mc = cols_.size();
  const std::size_t n = chol_.rows;
  const std::uint64_t draw_seed = rng::derive_seed(seed, 0x45584143u /* "EXAC" */);
  std::vector<double> z(n);
  rng::fill_gaussians(draw_seed, 0, 0, n, z.data());

  Field f;
  f.grid = grid_;
  f.provenance = Field::Provenance::exact;
  f.K = 0;
  f.seed = seed;
  f.values.assign(grid_.points(), 0.0);
  for (std::size_t row = 0; row < n; ++row) {
    const double* lrow = &chol_.a[row * n];
    double s = 0.0;
    for (std::size_t k = 0; k <= row; ++k) s += lrow[k] * z[k];
    const int i = static_cast<int>(row / mc);
    const int k = cols_[row % mc];
    f(i, k) = s;
  }
  return f;
}

Field simulate_exact(const model::Params& p, const model::GridSpec& g, const SimConfig& c) {
  return ExactFieldSampler(p, g, c.max_exact_points, c.exact_tol).draw(c.seed);
}

double truncation_deficit(const model::Params& p, double y, int K) {
  const model::DerivedParams d = model::derive(p);
  double partial = 0.0;
  for (int l = 1; l <= K; ++l) {
    const double e = model::eigenfunction(l, y, d);
    partial += e * e / (2.0 * d.lambda(l));
  }
  return model::spatial_covariance_closed(y, y, p) - p.sigma2 * partial;
}

}  // namespace spde::sim
