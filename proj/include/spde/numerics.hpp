#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace spde::num {

/// Dense row-major matrix, just large enough for the needs of this project.
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

/// Cascade (pairwise) summation; deterministic and low error.
double pairwise_sum(std::span<const double> x);

/// Frobenius norm squared.
double frobenius_sq(const Mat& m);

/// Spectral norm of a symmetric matrix by power iteration.
double spectral_norm_sym(const Mat& m, int max_iter = 1000, double tol = 1e-13);

/// In-place lower Cholesky; returns false on a non-positive pivot, in which
/// case `min_pivot` receives the worst pivot encountered.
bool cholesky_lower(Mat& m, double* min_pivot = nullptr);

/// Root of f on [lo, hi] (f(lo), f(hi) of opposite sign) by Brent's method.
double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  double rel_tol = 1e-13, int max_iter = 200);

/// Scalar minimizer of f on [lo, hi] by golden section with parabolic steps.
double brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-12, int max_iter = 300);

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead simplex minimization with projection onto box constraints.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> start,
                          std::span<const double> lo, std::span<const double> hi,
                          double rel_tol = 1e-12, int max_iter = 2000);

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 mat3_mul(const Mat3& a, const Mat3& b);
Mat3 mat3_inverse(const Mat3& a);
/// Eigenvalues of a symmetric 3x3 matrix (ascending), by Jacobi rotations.
std::array<double, 3> mat3_sym_eigenvalues(const Mat3& a);

}  // namespace spde::num
