#include "spde/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace spde::stats {

namespace {

constexpr double kPi = model::kPi;

double delta2_spatial_cov(const model::GridSpec& g, const model::Params& p, int k, int l) {
  const double a = g.y(k), a1 = g.y(k + 1), b = g.y(l), b1 = g.y(l + 1);
  return model::spatial_covariance_closed(a1, b1, p) -
         model::spatial_covariance_closed(a1, b, p) -
         model::spatial_covariance_closed(a, b1, p) +
         model::spatial_covariance_closed(a, b, p);
}

/// Coefficient of sigma^2/lambda_l in the time factor of time/double
/// increment covariances at lag J (the part that decays only like l^-2).
double slow_coeff(long J) {
  if (J == 0) return 1.0;
  if (J == 1) return -0.5;
  return 0.0;
}

/// Exponentially decaying remainder of the time factor at lag J.
double fast_weight(double lam, double dt, double sigma2, long J) {
  if (J == 0) return -sigma2 * std::exp(-lam * dt) / lam;
  if (J == 1) {
    const double e = std::exp(-lam * dt);
    return sigma2 * (2.0 * e - e * e) / (2.0 * lam);
  }
  const double Jd = static_cast<double>(J);
  return sigma2 *
         (2.0 * std::exp(-lam * Jd * dt) - std::exp(-lam * (Jd + 1.0) * dt) -
          std::exp(-lam * (Jd - 1.0) * dt)) /
         (2.0 * lam);
}

/// Decay rate (in units of lambda_l dt) of the fast part at lag J.
double fast_rate(IncrementKind kind, long J) {
  if (kind == IncrementKind::space) return static_cast<double>(J);
  return J <= 1 ? 1.0 : static_cast<double>(J - 1);
}

}  // namespace

IncrementArray increments(const Field& f, IncrementKind kind) {
  const int N = f.grid.N, M = f.grid.M;
  if (N < 1 || M < 1) throw std::invalid_argument("increments need N >= 1 and M >= 1");
  IncrementArray out;
  out.kind = kind;
  out.grid = f.grid;
  switch (kind) {
    case IncrementKind::time:
      out.rows = N;
      out.cols = M + 1;
      out.values.resize(out.rows * out.cols);
      for (int i = 0; i < N; ++i)
        for (int k = 0; k <= M; ++k)
          out.values[static_cast<std::size_t>(i) * out.cols + k] = f(i + 1, k) - f(i, k);
      break;
    case IncrementKind::space:
      out.rows = N + 1;
      out.cols = M;
      out.values.resize(out.rows * out.cols);
      for (int i = 0; i <= N; ++i)
        for (int k = 0; k < M; ++k)
          out.values[static_cast<std::size_t>(i) * out.cols + k] = f(i, k + 1) - f(i, k);
      break;
    case IncrementKind::space_time:
      out.rows = N;
      out.cols = M;
      out.values.resize(out.rows * out.cols);
      for (int i = 0; i < N; ++i)
        for (int k = 0; k < M; ++k)
          out.values[static_cast<std::size_t>(i) * out.cols + k] =
              f(i + 1, k + 1) - f(i + 1, k) - f(i, k + 1) + f(i, k);
      break;
  }
  return out;
}

QvStatistic realized_qv(const Field& f, QvKind kind, double kappa,
                        std::optional<double> theta2, const series::Config& cfg) {
  const int N = f.grid.N, M = f.grid.M;
  const double dt = f.grid.dt(), dx = f.grid.dx();
  QvStatistic out;
  out.kind = kind;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(N) * M);

  switch (kind) {
    case QvKind::vt: {
      const IncrementArray a = increments(f, IncrementKind::time);
      for (int i = 0; i < N; ++i)
        for (int k = 0; k < M; ++k) {
          const double v = a(i, k);
          terms.push_back(std::exp(kappa * f.grid.y(k)) * v * v);
        }
      out.normalization = static_cast<double>(M) * N * std::sqrt(dt);
      break;
    }
    case QvKind::vsp: {
      const IncrementArray a = increments(f, IncrementKind::space);
      for (int i = 0; i < N; ++i)
        for (int k = 0; k < M; ++k) {
          const double v = a(i, k);
          terms.push_back(std::exp(kappa * f.grid.y(k)) * v * v);
        }
      out.normalization = static_cast<double>(N) * M * dx;
      break;
    }
    case QvKind::vdouble: {
      if (!theta2)
        throw std::invalid_argument("vdouble needs theta2 to evaluate its normalizer");
      const IncrementArray a = increments(f, IncrementKind::space_time);
      for (int i = 0; i < N; ++i)
        for (int k = 0; k < M; ++k) {
          const double v = a(i, k);
          terms.push_back(std::exp(kappa * f.grid.y(k)) * v * v);
        }
      out.normalization =
          static_cast<double>(M) * N * series::phi(dx, dt, *theta2, kappa, cfg);
      break;
    }
    case QvKind::vr: {
      const IncrementArray a = increments(f, IncrementKind::space_time);
      for (int i = 0; i < N; ++i)
        for (int k = 0; k < M; ++k) {
          const double v = a(i, k);
          terms.push_back(std::exp(0.5 * kappa * (f.grid.y(k) + f.grid.y(k + 1))) * v * v);
        }
      out.normalization = static_cast<double>(M) * N * std::sqrt(dt);
      break;
    }
  }
  out.value = num::pairwise_sum(terms) / out.normalization;
  return out;
}

double increment_covariance_exact(const model::GridSpec& g, const model::Params& p,
                                  IncrementKind kind, int i, int k, int j, int l,
                                  const series::Config& cfg) {
  cfg.validate();
  const int N = g.N, M = g.M;
  const bool spatial_diff = kind != IncrementKind::time;
  const bool temporal_diff = kind != IncrementKind::space;
  const int imax = temporal_diff ? N - 1 : N;
  const int kmax = spatial_diff ? M - 1 : M;
  if (i < 0 || i > imax || j < 0 || j > imax || k < 0 || k > kmax || l < 0 || l > kmax)
    throw std::invalid_argument("increment index out of range");

  const model::DerivedParams d = model::derive(p);
  const double dt = g.dt();
  const long J = std::labs(static_cast<long>(i) - static_cast<long>(j));

  double slow = 0.0;
  if (kind == IncrementKind::time)
    slow = slow_coeff(J) * 2.0 * model::spatial_covariance_closed(g.y(k), g.y(l), p);
  else if (kind == IncrementKind::space_time)
    slow = slow_coeff(J) * 2.0 * delta2_spatial_cov(g, p, k, l);
  else if (J == 0)
    return delta2_spatial_cov(g, p, k, l);  // equal-time spatial increments are exact

  const double rate = fast_rate(kind, J);
  const double env = 16.0 * p.sigma2 * std::exp(std::abs(d.kappa));
  double fast = 0.0;
  for (long m = 1; m <= cfg.max_terms; ++m) {
    const double lam = d.lambda(m);
    double w;
    if (kind == IncrementKind::space)
      w = p.sigma2 * std::exp(-lam * static_cast<double>(J) * dt) / (2.0 * lam);
    else
      w = fast_weight(lam, dt, p.sigma2, J);
    double efac;
    if (spatial_diff)
      efac = (model::eigenfunction(m, g.y(k + 1), d) - model::eigenfunction(m, g.y(k), d)) *
             (model::eigenfunction(m, g.y(l + 1), d) - model::eigenfunction(m, g.y(l), d));
    else
      efac = model::eigenfunction(m, g.y(k), d) * model::eigenfunction(m, g.y(l), d);
    fast += w * efac;
    const double lam_next = d.lambda(m + 1);
    const double q = std::exp(-d.theta2 * kPi * kPi * (2.0 * m + 3.0) * rate * dt);
    const double tail = env * std::exp(-lam_next * rate * dt) / (lam_next * (1.0 - q));
    if (tail < cfg.tol) break;
  }
  return slow + fast;
}

double qv_variance_exact(const model::GridSpec& g, const model::Params& p, QvKind kind,
                         const series::Config& cfg) {
  cfg.validate();
  const model::DerivedParams d = model::derive(p);
  const int N = g.N, M = g.M;
  const double dt = g.dt(), dx = g.dx();
  const IncrementKind ik =
      (kind == QvKind::vt) ? IncrementKind::time
      : (kind == QvKind::vsp) ? IncrementKind::space
                              : IncrementKind::space_time;
  const bool spatial_diff = ik != IncrementKind::time;

  // sqrt of the weight each squared increment carries in the statistic
  std::vector<double> wh(M);
  for (int k = 0; k < M; ++k)
    wh[k] = (kind == QvKind::vr)
                ? std::exp(0.25 * d.kappa * (g.y(k) + g.y(k + 1)))
                : std::exp(0.5 * d.kappa * g.y(k));

  // Cutoff for the slowest-decaying fast series (rate 1 in lambda_l dt).
  const double env = 16.0 * p.sigma2 * std::exp(std::abs(d.kappa));
  long L = 0;
  for (long m = 1; m <= cfg.max_terms; ++m) {
    const double lam_next = d.lambda(m + 1);
    const double q = std::exp(-d.theta2 * kPi * kPi * (2.0 * m + 3.0) * dt);
    if (env * std::exp(-lam_next * dt) / (lam_next * (1.0 - q)) < cfg.tol) {
      L = m;
      break;
    }
  }
  if (L == 0) throw std::runtime_error("qv_variance_exact: series cutoff not reached");

  // Weighted eigen rows and their squared Gram matrix.
  num::Mat de(L, M);
  for (long m = 1; m <= L; ++m)
    for (int k = 0; k < M; ++k)
      de(m - 1, k) = wh[k] * (spatial_diff
                                  ? model::eigenfunction(m, g.y(k + 1), d) -
                                        model::eigenfunction(m, g.y(k), d)
                                  : model::eigenfunction(m, g.y(k), d));
  num::Mat gram_sq(L, L);
  for (long a = 0; a < L; ++a)
    for (long b = a; b < L; ++b) {
      double s = 0.0;
      for (int k = 0; k < M; ++k) s += de(a, k) * de(b, k);
      gram_sq(a, b) = s * s;
      gram_sq(b, a) = s * s;
    }

  // Slow (closed-form) part, weighted.
  num::Mat qmat(M, M);
  for (int k = 0; k < M; ++k)
    for (int l = k; l < M; ++l) {
      const double base =
          spatial_diff ? 2.0 * delta2_spatial_cov(g, p, k, l)
                       : 2.0 * model::spatial_covariance_closed(g.y(k), g.y(l), p);
      const double v = wh[k] * wh[l] * base;
      qmat(k, l) = v;
      qmat(l, k) = v;
    }
  const double qnorm = num::frobenius_sq(qmat);
  std::vector<double> u(L);
  for (long a = 0; a < L; ++a) {
    double s = 0.0;
    for (int k = 0; k < M; ++k) {
      double inner = 0.0;
      for (int l = 0; l < M; ++l) inner += qmat(k, l) * de(a, l);
      s += de(a, k) * inner;
    }
    u[a] = s;
  }

  std::vector<double> w(L);
  double total = 0.0;
  for (long J = 0; J < N; ++J) {
    const double rate = fast_rate(ik, J);
    double scoef;
    long lj = 0;
    if (ik == IncrementKind::space) {
      // lag 0 is entirely the closed form; lags >= 1 entirely fast
      scoef = (J == 0) ? 0.5 : 0.0;
      if (J >= 1) {
        for (long m = 1; m <= L; ++m) {
          const double lam = d.lambda(m);
          w[m - 1] = p.sigma2 * std::exp(-lam * static_cast<double>(J) * dt) / (2.0 * lam);
          lj = m;
          const double lam_next = d.lambda(m + 1);
          const double q =
              std::exp(-d.theta2 * kPi * kPi * (2.0 * m + 3.0) * rate * dt);
          if (env * std::exp(-lam_next * rate * dt) / (lam_next * (1.0 - q)) < cfg.tol)
            break;
        }
      }
    } else {
      scoef = slow_coeff(J);
      for (long m = 1; m <= L; ++m) {
        const double lam = d.lambda(m);
        w[m - 1] = fast_weight(lam, dt, p.sigma2, J);
        lj = m;
        const double lam_next = d.lambda(m + 1);
        const double q = std::exp(-d.theta2 * kPi * kPi * (2.0 * m + 3.0) * rate * dt);
        if (env * std::exp(-lam_next * rate * dt) / (lam_next * (1.0 - q)) < cfg.tol)
          break;
      }
    }
    double s2 = scoef * scoef * qnorm;
    if (scoef != 0.0)
      for (long m = 0; m < lj; ++m) s2 += 2.0 * scoef * w[m] * u[m];
    for (long a = 0; a < lj; ++a) {
      double row = 0.0;
      for (long b = 0; b < lj; ++b) row += w[b] * gram_sq(a, b);
      s2 += w[a] * row;
    }
    if (J == 0)
      total += static_cast<double>(N) * s2;
    else
      total += 2.0 * static_cast<double>(N - J) * s2;
  }

  double denom;
  switch (kind) {
    case QvKind::vt: denom = static_cast<double>(M) * N * std::sqrt(dt); break;
    case QvKind::vsp: denom = static_cast<double>(N) * M * dx; break;
    case QvKind::vdouble:
      denom = static_cast<double>(M) * N * series::phi(dx, dt, d.theta2, d.kappa, cfg);
      break;
    default: denom = static_cast<double>(M) * N * std::sqrt(dt); break;
  }
  return 2.0 * total / (denom * denom);
}

double qv_mean_exact(const model::GridSpec& g, const model::Params& p, QvKind kind,
                     const series::Config& cfg) {
  const model::DerivedParams d = model::derive(p);
  const int M = g.M;
  const double dt = g.dt(), dx = g.dx();
  std::vector<double> terms(M);
  double denom = 0.0;
  switch (kind) {
    case QvKind::vt:
      for (int k = 0; k < M; ++k)
        terms[k] = std::exp(d.kappa * g.y(k)) *
                   increment_covariance_exact(g, p, IncrementKind::time, 0, k, 0, k, cfg);
      denom = M * std::sqrt(dt);
      break;
    case QvKind::vsp:
      for (int k = 0; k < M; ++k)
        terms[k] = std::exp(d.kappa * g.y(k)) *
                   increment_covariance_exact(g, p, IncrementKind::space, 0, k, 0, k, cfg);
      denom = M * dx;
      break;
    case QvKind::vdouble:
      for (int k = 0; k < M; ++k)
        terms[k] =
            std::exp(d.kappa * g.y(k)) *
            increment_covariance_exact(g, p, IncrementKind::space_time, 0, k, 0, k, cfg);
      denom = M * series::phi(dx, dt, d.theta2, d.kappa, cfg);
      break;
    case QvKind::vr:
      for (int k = 0; k < M; ++k)
        terms[k] =
            std::exp(0.5 * d.kappa * (g.y(k) + g.y(k + 1))) *
            increment_covariance_exact(g, p, IncrementKind::space_time, 0, k, 0, k, cfg);
      denom = M * std::sqrt(dt);
      break;
  }
  return num::pairwise_sum(terms) / denom;
}

CltDiagnostic clt_diagnostic(const num::Mat& sigma) {
  if (sigma.rows != sigma.cols) throw std::invalid_argument("clt_diagnostic needs a square matrix");
  double maxabs = 0.0;
  for (double v : sigma.a) maxabs = std::max(maxabs, std::abs(v));
  for (std::size_t i = 0; i < sigma.rows; ++i)
    for (std::size_t j = i + 1; j < sigma.cols; ++j)
      if (std::abs(sigma(i, j) - sigma(j, i)) > 1e-10 * std::max(1.0, maxabs))
        throw std::invalid_argument("clt_diagnostic needs a symmetric matrix");
  CltDiagnostic out;
  const double spec = num::spectral_norm_sym(sigma);
  out.spectral_norm_sq = spec * spec;
  out.variance = 2.0 * num::frobenius_sq(sigma);
  out.ratio = out.variance > 0.0 ? out.spectral_norm_sq / out.variance : 0.0;
  return out;
}

}  // namespace spde::stats
