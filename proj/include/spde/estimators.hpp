#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spde/field.hpp"
#include "spde/numerics.hpp"
#include "spde/series.hpp"
#include "spde/stats.hpp"

namespace spde::est {

enum class Method {
  sigma2_sp,
  sigma2_t,
  sigma2_double,
  theta2_sp,
  theta2_t,
  theta2_r,
  rho_kappa,
  eta_ls,
  eta_avg,
};

Method parse_method(const std::string& tag);
std::string method_tag(Method m);
/// Number of components the method estimates (1, 2 for rho-kappa, 3 for eta).
int method_dim(Method m);

struct EstimateResult {
  std::string method;
  std::vector<double> estimate;
  std::vector<double> se;  ///< per-component asymptotic standard error (may be NaN)
  bool converged = true;
  std::map<std::string, double> diagnostics;
};

/// Box constraints for (sigma2, theta2, kappa).
struct BoxH {
  std::array<double, 3> lo{1e-4, 1e-3, -10.0};
  std::array<double, 3> hi{10.0, 20.0, 10.0};

  void validate() const;
};

/// Volatility estimators with (theta2, kappa) known. Regimes: sp wants
/// N = o(M), t wants M = o(sqrt(N)), double is robust across regimes.
EstimateResult estimate_sigma2(const Field& f, const std::string& variant, double theta2,
                               double kappa, const series::Config& cfg = {});

/// Diffusivity estimators with (sigma2, kappa) known.
EstimateResult estimate_theta2(const Field& f, const std::string& variant, double sigma2,
                               double kappa, const series::Config& cfg = {});

/// Least-squares fit of (rho^2 = sigma2/theta2, kappa) to the per-location
/// time averages of squared space increments; rho^2 is profiled out exactly,
/// kappa found by 1-D search. Recommended in the N = o(M) regime.
EstimateResult estimate_rho_kappa(const Field& f);
/// Moment-level entry point: m_k = (2/(N dx)) sum_i (space increment)^2.
EstimateResult rho_kappa_from_moments(const std::vector<double>& m,
                                      const std::vector<double>& y);

/// Least-squares estimator of eta = (sigma2, theta2, kappa) from per-location
/// time averages of squared double increments at the two time lags (1, 2);
/// requires an (approximately) constant mesh ratio. ridge < 0 selects the
/// default 1/(NM).
EstimateResult estimate_eta_ls(const Field& f, const BoxH& box, double ridge = -1.0,
                               const series::Config& cfg = {});

/// Averaged variant on the coarse grid with time lag v and space lag w
/// (auto-chosen from the sampling regime when omitted); ridge < 0 selects the
/// default 1/(M^3 min N^{3/2}).
EstimateResult estimate_eta_avg(const Field& f, const BoxH& box, double ridge = -1.0,
                                std::optional<int> v = std::nullopt,
                                std::optional<int> w = std::nullopt,
                                const series::Config& cfg = {});

/// Moment-level contrast fit shared by the two eta estimators.
EstimateResult eta_from_moments(const std::vector<double>& m1, const std::vector<double>& m2,
                                const std::vector<double>& z, double r, const BoxH& box,
                                double ridge);

/// theta1 = theta2 * kappa from a full eta estimate.
double theta1_from_eta(const EstimateResult& e);

/// Scalar asymptotic variances of the single-parameter estimators (the
/// variance of sqrt(MN)(est - true)).
double asymptotic_variance_scalar(Method m, const model::Params& p, double r,
                                  const series::Config& cfg = {});

/// Asymptotic covariance of sqrt(MN)(eta_hat - eta) for the least-squares
/// estimator: Omega = V^{-1} U V^{-1} built from lattice sums and weighted
/// inner products of the contrast gradients over [b, 1-b].
struct LsCovariance {
  num::Mat3 omega{}, u{}, v{};
};
LsCovariance ls_covariance(const model::Params& p, double r, double b,
                           const series::Config& cfg = {});

}  // namespace spde::est
