#pragma once

#include <optional>

#include "spde/field.hpp"
#include "spde/model.hpp"
#include "spde/numerics.hpp"
#include "spde/series.hpp"

namespace spde::stats {

enum class IncrementKind { time, space, space_time };

/// First differences of the field: time N x (M+1), space (N+1) x M,
/// space_time (double increments) N x M.
struct IncrementArray {
  IncrementKind kind = IncrementKind::time;
  std::size_t rows = 0, cols = 0;
  std::vector<double> values;
  model::GridSpec grid;

  double operator()(std::size_t i, std::size_t k) const { return values[i * cols + k]; }
};

IncrementArray increments(const Field& f, IncrementKind kind);

enum class QvKind { vt, vsp, vdouble, vr };

struct QvStatistic {
  QvKind kind = QvKind::vt;
  double value = 0.0;
  double normalization = 0.0;  ///< denominator used (MN sqrt(dt), NM dx, MN phi, ...)
};

/// Rescaled realized quadratic variations.
///   vt:      1/(MN sqrt(dt)) sum e^{kappa y_k} (time increment)^2,   k < M
///   vsp:     1/(NM dx)       sum e^{kappa y_k} (space increment)^2,  i < N
///   vdouble: 1/(MN phi)      sum e^{kappa y_k} (double increment)^2
///   vr:      1/(MN sqrt(dt)) sum e^{kappa (y_k+y_{k+1})/2} (double increment)^2
/// vdouble needs theta2 to evaluate phi; the others only kappa.
QvStatistic realized_qv(const Field& f, QvKind kind, double kappa,
                        std::optional<double> theta2 = std::nullopt,
                        const series::Config& cfg = {});

/// Exact covariance between two increments of the same kind, by direct
/// summation of the eigen-series with the exact eigenvalues (including Gamma).
/// Slowly converging components are folded into the closed-form equal-time
/// covariance; the remainder decays exponentially.
double increment_covariance_exact(const model::GridSpec& g, const model::Params& p,
                                  IncrementKind kind, int i, int k, int j, int l,
                                  const series::Config& cfg = {});

/// Exact finite-sample variance of a realized quadratic variation,
///   Var = 2 ||Sigma~||_F^2 / normalization^2,
/// where Sigma~ is the covariance matrix of the weighted increments entering
/// the statistic. Uses the time-lag structure and a Gram-matrix contraction
/// instead of assembling Sigma~.
double qv_variance_exact(const model::GridSpec& g, const model::Params& p, QvKind kind,
                         const series::Config& cfg = {});

inline double vdouble_variance_exact(const model::GridSpec& g, const model::Params& p,
                                     const series::Config& cfg = {}) {
  return qv_variance_exact(g, p, QvKind::vdouble, cfg);
}

/// Exact mean of a realized quadratic variation (diagnostic for bias studies).
double qv_mean_exact(const model::GridSpec& g, const model::Params& p, QvKind kind,
                     const series::Config& cfg = {});

struct CltDiagnostic {
  double spectral_norm_sq = 0.0;
  double variance = 0.0;  ///< 2 ||Sigma||_F^2
  double ratio = 0.0;     ///< spectral_norm_sq / variance; CLT wants this -> 0
};

/// Normality condition check for sums of squares of a centered Gaussian
/// vector with covariance sigma (symmetric PSD).
CltDiagnostic clt_diagnostic(const num::Mat& sigma);

}  // namespace spde::stats
