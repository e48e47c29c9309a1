#include "spde/model.hpp"

#include <cmath>
#include <stdexcept>

namespace spde::model {

ParamCheck validate_params(const Params& p) {
  if (!(p.sigma2 > 0.0)) return {false, "sigma2 > 0"};
  if (!(p.theta2 > 0.0)) return {false, "theta2 > 0"};
  const double gamma =
      p.theta1 * p.theta1 / (4.0 * p.theta2 * p.theta2) - p.theta0 / p.theta2;
  if (!(gamma + kPi * kPi > 0.0))
    return {false, "theta1^2/(4 theta2^2) - theta0/theta2 + pi^2 > 0"};
  return {};
}

DerivedParams derive(const Params& p) {
  const ParamCheck c = validate_params(p);
  if (!c.ok) throw std::invalid_argument("parameters outside admissible set: " + c.violated);
  DerivedParams d;
  d.sigma2 = p.sigma2;
  d.theta2 = p.theta2;
  d.kappa = p.theta1 / p.theta2;
  d.gamma = p.theta1 * p.theta1 / (4.0 * p.theta2 * p.theta2) - p.theta0 / p.theta2;
  return d;
}

GridSpec::GridSpec(int n, int m, double t, double margin) : N(n), M(m), T(t), b(margin) {
  if (N < 1 || M < 1) throw std::invalid_argument("grid needs N >= 1 and M >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("grid needs T > 0");
  if (!(b >= 0.0 && b < 0.5)) throw std::invalid_argument("grid needs b in [0, 1/2)");
}

double GridSpec::ratio() const { return dx() / std::sqrt(dt()); }

double eigenfunction(long l, double y, const DerivedParams& d) {
  if (l < 1) throw std::invalid_argument("eigenfunction index must be >= 1");
  if (y == 0.0 || y == 1.0) return 0.0;
  return std::sqrt(2.0) * std::sin(kPi * static_cast<double>(l) * y) *
         std::exp(-0.5 * d.kappa * y);
}

namespace {

/// Basel-type closed form sum_{l>=1} cos(pi l z)/l^2 for z in [0, 2].
double basel_cosine(double z) {
  return kPi * kPi * ((z - 1.0) * (z - 1.0) * 0.25 - 1.0 / 12.0);
}

}  // namespace

double cosine_series_closed(double beta, double x) {
  if (!(beta > -1.0)) throw std::invalid_argument("cosine_series_closed needs beta > -1");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("cosine_series_closed needs x in [0,1]");
  const double b0 = std::sqrt(std::abs(beta));
  if (std::abs(beta) < 1e-9) return basel_cosine(x);
  if (beta < 0.0)
    return -kPi * std::cos(kPi * b0 * (x - 1.0)) / (2.0 * b0 * std::sin(kPi * b0)) +
           1.0 / (2.0 * std::abs(beta));
  return kPi * std::cosh(kPi * b0 * (x - 1.0)) / (2.0 * b0 * std::sinh(kPi * b0)) -
         1.0 / (2.0 * beta);
}

double field_covariance(double s, double x, double t, double y, const Params& p, double tol) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw std::invalid_argument("field_covariance needs locations in [0,1]");
  if (s < 0.0 || t < 0.0) throw std::invalid_argument("field_covariance needs times >= 0");
  if (x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0) return 0.0;

  const DerivedParams d = derive(p);
  const double tau = std::abs(t - s);
  const double pre = 0.5 * p.sigma2 * std::exp(-0.5 * d.kappa * (x + y));
  const double zm = std::abs(y - x), zp = x + y;
  const double pt2 = kPi * kPi * d.theta2;

  if (tau == 0.0) {
    // 1/lambda_l = 1/(theta2 pi^2 l^2) + correction of order l^-4; the first
    // part has the Basel closed form, the correction is summed directly.
    double val = (basel_cosine(zm) - basel_cosine(zp)) / pt2;
    if (d.gamma != 0.0) {
      double corr = 0.0;
      for (long l = 1;; ++l) {
        const double ld = static_cast<double>(l);
        const double lam = d.lambda(l);
        const double w = 1.0 / lam - 1.0 / (pt2 * ld * ld);
        corr += w * (std::cos(kPi * ld * zm) - std::cos(kPi * ld * zp));
        const double l2pi = kPi * kPi * ld * ld;
        if (l2pi > 2.0 * std::abs(d.gamma)) {
          const double tail =
              pre * 8.0 * std::abs(d.gamma) / (d.theta2 * kPi * kPi * kPi * kPi) /
              (3.0 * ld * ld * ld);
          if (tail < tol) break;
        }
        if (l > 100'000'000L) break;
      }
      val += corr;
    }
    return pre * val;
  }

  // tau > 0: every term carries e^{-lambda_l tau}; direct summation with a
  // geometric tail bound.
  double val = 0.0;
  for (long l = 1;; ++l) {
    const double ld = static_cast<double>(l);
    const double lam = d.lambda(l);
    val += std::exp(-lam * tau) / lam *
           (std::cos(kPi * ld * zm) - std::cos(kPi * ld * zp));
    const double lam_next = d.lambda(l + 1);
    const double q = std::exp(-d.theta2 * kPi * kPi * (2.0 * ld + 3.0) * tau);
    const double tail = pre * 2.0 / lam_next * std::exp(-lam_next * tau) / (1.0 - q);
    if (tail < tol) break;
    if (l > 100'000'000L) break;
  }
  return pre * val;
}

double spatial_covariance_closed(double x, double y, const Params& p) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw std::invalid_argument("spatial_covariance_closed needs locations in [0,1]");
  if (x > y) std::swap(x, y);
  const DerivedParams d = derive(p);
  const double pre =
      p.sigma2 / (2.0 * p.theta2) * std::exp(-0.5 * d.kappa * (x + y));
  const double g0 = std::sqrt(std::abs(d.gamma));
  double shape;
  if (std::abs(d.gamma) < kDegenerateGamma) {
    shape = x * (1.0 - y);
  } else if (d.gamma < 0.0) {
    shape = std::sin(g0 * (1.0 - y)) * std::sin(g0 * x) / (g0 * std::sin(g0));
  } else {
    shape = std::sinh(g0 * (1.0 - y)) * std::sinh(g0 * x) / (g0 * std::sinh(g0));
  }
  return pre * shape;
}

std::pair<double, double> ito_coefficients(double x, double z, const Params& p) {
  if (!(x > 0.0 && x < 1.0))
    throw std::invalid_argument("ito_coefficients needs x in (0,1)");
  const DerivedParams d = derive(p);
  const double g0 = std::sqrt(std::abs(d.gamma));
  double q;
  if (std::abs(d.gamma) < kDegenerateGamma) {
    q = 1.0 / (1.0 - x);
  } else if (d.gamma < 0.0) {
    q = g0 * std::cos(g0 * (1.0 - x)) / std::sin(g0 * (1.0 - x));
  } else {
    q = g0 * std::cosh(g0 * (1.0 - x)) / std::sinh(g0 * (1.0 - x));
  }
  const double drift = -(q + 0.5 * d.kappa) * z;
  const double diffusion =
      std::sqrt(p.sigma2 / (2.0 * p.theta2)) * std::exp(-0.5 * d.kappa * x);
  return {drift, diffusion};
}

}  // namespace spde::model
