#pragma once

#include <cstdint>
#include <string>
#include <utility>

// Model layer for the 1-D linear parabolic SPDE
//   dX = (theta2 X'' + theta1 X' + theta0 X) dt + sigma dW,  X(0)=X(1)=0,
// observed on a regular space-time grid. The stationary solution is the
// centered Gaussian field with covariance
//   Cov(X_s(x), X_t(y)) = sigma^2 sum_l e^{-lambda_l |t-s|} / (2 lambda_l)
//                                   e_l(x) e_l(y),
// where e_l(y) = sqrt(2) sin(pi l y) e^{-kappa y/2} and
// lambda_l = theta2 (pi^2 l^2 + Gamma).

namespace spde::model {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
/// |Gamma| below this use the Gamma = 0 branch of the closed forms.
inline constexpr double kDegenerateGamma = 1e-8;

struct Params {
  double sigma2 = 1.0;  ///< volatility sigma^2 > 0
  double theta2 = 1.0;  ///< diffusivity > 0
  double theta1 = 0.0;  ///< advection
  double theta0 = 0.0;  ///< reaction
};

/// kappa = theta1/theta2, Gamma = theta1^2/(4 theta2^2) - theta0/theta2.
struct DerivedParams {
  double sigma2 = 1.0;
  double theta2 = 1.0;
  double kappa = 0.0;
  double gamma = 0.0;

  double lambda(long l) const {
    return theta2 * (kPi * kPi * static_cast<double>(l) * static_cast<double>(l) + gamma);
  }
};

struct ParamCheck {
  bool ok = true;
  std::string violated;  ///< inequality that failed, empty when ok
};

/// Admissibility: sigma2 > 0, theta2 > 0 and Gamma + pi^2 > 0 so that every
/// eigenvalue -lambda_l is negative.
ParamCheck validate_params(const Params& p);

/// Derived quantities; throws std::invalid_argument naming the violated
/// inequality when the parameters are not admissible.
DerivedParams derive(const Params& p);

/// Regular observation grid: t_i = i T/N, y_k = b + k (1-2b)/M.
struct GridSpec {
  int N = 1;       ///< temporal intervals
  int M = 1;       ///< spatial intervals
  double T = 1.0;  ///< time horizon
  double b = 0.0;  ///< spatial margin in [0, 1/2)

  GridSpec() = default;
  GridSpec(int n, int m, double t, double margin);

  double dt() const { return T / N; }
  double dx() const { return (1.0 - 2.0 * b) / M; }
  /// Mesh ratio r = dx / sqrt(dt).
  double ratio() const;
  double t(int i) const { return T * (static_cast<double>(i) / N); }
  double y(int k) const { return b + (1.0 - 2.0 * b) * (static_cast<double>(k) / M); }
  std::size_t points() const {
    return static_cast<std::size_t>(N + 1) * static_cast<std::size_t>(M + 1);
  }
};

/// e_l(y) = sqrt(2) sin(pi l y) e^{-kappa y/2}; exactly 0 at y in {0,1}.
double eigenfunction(long l, double y, const DerivedParams& d);

/// sum_{l>=1} cos(pi l x) / (l^2 + beta) in closed form, beta > -1, x in [0,1].
double cosine_series_closed(double beta, double x);

/// Space-time covariance of the stationary field, truncated so the certified
/// tail bound is below `tol`.
double field_covariance(double s, double x, double t, double y, const Params& p,
                        double tol = 1e-10);

/// Equal-time covariance in closed form (three branches in the sign of Gamma).
double spatial_covariance_closed(double x, double y, const Params& p);

/// Drift and diffusion of the Ito representation of x -> X_t(x); x in (0,1).
std::pair<double, double> ito_coefficients(double x, double z, const Params& p);

}  // namespace spde::model
