#include "spde/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spde::est {

namespace {
constexpr double kPi = model::kPi;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}  // namespace

Method parse_method(const std::string& tag) {
  if (tag == "sigma2-sp") return Method::sigma2_sp;
  if (tag == "sigma2-t") return Method::sigma2_t;
  if (tag == "sigma2-double") return Method::sigma2_double;
  if (tag == "theta2-sp") return Method::theta2_sp;
  if (tag == "theta2-t") return Method::theta2_t;
  if (tag == "theta2-r") return Method::theta2_r;
  if (tag == "rho-kappa") return Method::rho_kappa;
  if (tag == "eta-ls") return Method::eta_ls;
  if (tag == "eta-avg") return Method::eta_avg;
  throw std::invalid_argument("unknown estimator method: " + tag);
}

std::string method_tag(Method m) {
  switch (m) {
    case Method::sigma2_sp: return "sigma2-sp";
    case Method::sigma2_t: return "sigma2-t";
    case Method::sigma2_double: return "sigma2-double";
    case Method::theta2_sp: return "theta2-sp";
    case Method::theta2_t: return "theta2-t";
    case Method::theta2_r: return "theta2-r";
    case Method::rho_kappa: return "rho-kappa";
    case Method::eta_ls: return "eta-ls";
    case Method::eta_avg: return "eta-avg";
  }
  return {};
}

int method_dim(Method m) {
  switch (m) {
    case Method::rho_kappa: return 2;
    case Method::eta_ls:
    case Method::eta_avg: return 3;
    default: return 1;
  }
}

void BoxH::validate() const {
  for (int c = 0; c < 3; ++c)
    if (!(lo[c] < hi[c])) throw std::invalid_argument("box bounds must satisfy lo < hi");
  if (!(lo[0] > 0.0) || !(lo[1] > 0.0))
    throw std::invalid_argument("box must keep sigma2 and theta2 strictly positive");
}

EstimateResult estimate_sigma2(const Field& f, const std::string& variant, double theta2,
                               double kappa, const series::Config& cfg) {
  const double mn = static_cast<double>(f.grid.M) * f.grid.N;
  const double r = f.grid.ratio();
  EstimateResult out;
  out.method = "sigma2-" + variant;
  double est, avar;
  if (variant == "sp") {
    est = 2.0 * theta2 * realized_qv(f, stats::QvKind::vsp, kappa).value;
    avar = 2.0 * est * est;
  } else if (variant == "t") {
    est = std::sqrt(kPi * theta2) * realized_qv(f, stats::QvKind::vt, kappa).value;
    avar = series::b_constant(cfg).value * est * est;
  } else if (variant == "double") {
    est = realized_qv(f, stats::QvKind::vdouble, kappa, theta2, cfg).value;
    avar = series::c_value(r / std::sqrt(theta2), cfg) * est * est;
    out.diagnostics["r"] = r;
  } else {
    throw std::invalid_argument("estimate_sigma2 variant must be sp, t or double");
  }
  out.estimate = {est};
  out.se = {std::sqrt(avar / mn)};
  out.converged = est > 0.0;
  return out;
}

EstimateResult estimate_theta2(const Field& f, const std::string& variant, double sigma2,
                               double kappa, const series::Config& cfg) {
  const double mn = static_cast<double>(f.grid.M) * f.grid.N;
  const double r = f.grid.ratio();
  EstimateResult out;
  out.method = "theta2-" + variant;
  double est, avar;
  if (variant == "sp") {
    const double vsp = realized_qv(f, stats::QvKind::vsp, kappa).value;
    if (!(vsp > 0.0)) throw std::runtime_error("theta2-sp: nonpositive spatial variation");
    est = sigma2 / (2.0 * vsp);
    avar = 2.0 * est * est;
  } else if (variant == "t") {
    const double vt = realized_qv(f, stats::QvKind::vt, kappa).value;
    if (!(vt > 0.0)) throw std::runtime_error("theta2-t: nonpositive temporal variation");
    est = sigma2 * sigma2 / (kPi * vt * vt);
    avar = 4.0 * est * est * series::b_constant(cfg).value;
  } else if (variant == "r") {
    const double vr = realized_qv(f, stats::QvKind::vr, kappa).value;
    if (!(vr > 0.0)) throw std::runtime_error("theta2-r: nonpositive variation");
    est = series::psi_inverse(vr / sigma2, r);
    const double ps = series::psi(r, est);
    const double dps = series::psi_dtheta2(r, est);
    avar = series::c_value(r / std::sqrt(est), cfg) * (ps / dps) * (ps / dps);
    out.diagnostics["r"] = r;
  } else {
    throw std::invalid_argument("estimate_theta2 variant must be sp, t or r");
  }
  out.estimate = {est};
  out.se = {std::sqrt(avar / mn)};
  return out;
}

EstimateResult rho_kappa_from_moments(const std::vector<double>& m,
                                      const std::vector<double>& y) {
  if (m.size() != y.size() || m.empty())
    throw std::invalid_argument("rho_kappa_from_moments: mismatched inputs");
  bool all_zero = true;
  for (double v : m)
    if (v != 0.0) all_zero = false;
  if (all_zero) throw std::runtime_error("rho-kappa: all increments are zero");

  // Profile rho^2 out of the quadratic: for fixed kappa the optimum is a
  // weighted projection, leaving a smooth 1-D objective in kappa.
  auto profiled = [&](double kap, double* rho2_out) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double w = std::exp(-kap * y[k]);
      num += m[k] * w;
      den += w * w;
    }
    const double rho2 = num / den;
    double q = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double d = m[k] - rho2 * std::exp(-kap * y[k]);
      q += d * d;
    }
    if (rho2_out) *rho2_out = rho2;
    return q;
  };

  const double kmax = 60.0;
  double best_k = 0.0, best_q = std::numeric_limits<double>::infinity();
  const int coarse = 481;
  for (int i = 0; i < coarse; ++i) {
    const double kap = -kmax + 2.0 * kmax * i / (coarse - 1);
    const double q = profiled(kap, nullptr);
    if (q < best_q) {
      best_q = q;
      best_k = kap;
    }
  }
  const double step = 2.0 * kmax / (coarse - 1);
  const double khat = num::brent_minimize([&](double kap) { return profiled(kap, nullptr); },
                                          best_k - step, best_k + step, 1e-13, 400);
  double rho2 = 0.0;
  const double q = profiled(khat, &rho2);
  EstimateResult out;
  out.method = "rho-kappa";
  out.estimate = {rho2, khat};
  out.se = {kNan, kNan};
  out.diagnostics["objective"] = q;
  return out;
}

EstimateResult estimate_rho_kappa(const Field& f) {
  const int N = f.grid.N, M = f.grid.M;
  const stats::IncrementArray s = increments(f, stats::IncrementKind::space);
  std::vector<double> m(M), y(M);
  std::vector<double> col(N);
  for (int k = 0; k < M; ++k) {
    for (int i = 0; i < N; ++i) {
      const double v = s(i, k);
      col[i] = v * v;
    }
    m[k] = 2.0 * num::pairwise_sum(col) / (N * f.grid.dx());
    y[k] = f.grid.y(k);
  }
  return rho_kappa_from_moments(m, y);
}

EstimateResult eta_from_moments(const std::vector<double>& m1, const std::vector<double>& m2,
                                const std::vector<double>& z, double r, const BoxH& box,
                                double ridge) {
  box.validate();
  if (m1.size() != z.size() || m2.size() != z.size() || z.empty())
    throw std::invalid_argument("eta_from_moments: mismatched inputs");
  if (!(ridge >= 0.0)) throw std::invalid_argument("eta_from_moments: ridge must be >= 0");
  const double r2 = r / std::sqrt(2.0);
  const double inv_m = 1.0 / static_cast<double>(z.size());

  auto objective = [&](std::span<const double> eta) {
    const double s2 = eta[0], t2 = eta[1], kap = eta[2];
    const double p1 = s2 * series::psi(r, t2);
    const double p2 = s2 * series::psi(r2, t2);
    double q = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double e = std::exp(-kap * z[k]);
      const double d1 = m1[k] - p1 * e;
      const double d2 = m2[k] - p2 * e;
      q += d1 * d1 + d2 * d2;
    }
    return q * inv_m + ridge * (s2 * s2 + t2 * t2 + kap * kap);
  };

  // Deterministic multi-start: geometric fractions for the positive
  // components, linear for kappa. Ties broken by start order.
  const std::array<std::array<double, 3>, 5> fr = {{{0.5, 0.5, 0.5},
                                                    {0.2, 0.2, 0.35},
                                                    {0.8, 0.8, 0.65},
                                                    {0.2, 0.8, 0.5},
                                                    {0.8, 0.2, 0.5}}};
  num::SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  int total_iter = 0;
  for (const auto& fracs : fr) {
    std::array<double, 3> start;
    for (int c = 0; c < 2; ++c)
      start[c] = box.lo[c] * std::pow(box.hi[c] / box.lo[c], fracs[c]);
    start[2] = box.lo[2] + fracs[2] * (box.hi[2] - box.lo[2]);
    num::SimplexResult res = num::nelder_mead(objective, start, box.lo, box.hi, 1e-12, 2000);
    total_iter += res.iterations;
    if (res.value < best.value) best = res;
  }

  EstimateResult out;
  out.method = "eta";
  out.estimate = {best.x[0], best.x[1], best.x[2]};
  out.se = {kNan, kNan, kNan};
  bool interior = true;
  for (int c = 0; c < 3; ++c) {
    const double margin = 1e-6 * (box.hi[c] - box.lo[c]);
    if (best.x[c] < box.lo[c] + margin || best.x[c] > box.hi[c] - margin) interior = false;
  }
  out.converged = best.converged && interior;
  out.diagnostics["objective"] = best.value;
  out.diagnostics["iterations"] = total_iter;
  out.diagnostics["r"] = r;
  return out;
}

namespace {

/// Per-location time averages of squared coarse double increments at time lag
/// `tlag` and space lag `w`, normalized by sqrt(tlag * dt).
std::vector<double> coarse_moments(const Field& f, int tlag, int w) {
  const int N = f.grid.N, M = f.grid.M;
  if (tlag > N || w > M) throw std::invalid_argument("coarse increment lags exceed grid");
  const double norm = std::sqrt(static_cast<double>(tlag) * f.grid.dt());
  std::vector<double> m(M - w + 1);
  std::vector<double> buf(N - tlag + 1);
  for (int k = 0; k + w <= M; ++k) {
    for (int i = 0; i + tlag <= N; ++i) {
      const double d =
          f(i + tlag, k + w) - f(i, k + w) - f(i + tlag, k) + f(i, k);
      buf[i] = d * d;
    }
    m[k] = num::pairwise_sum(buf) / (static_cast<double>(N - tlag + 1) * norm);
  }
  return m;
}

}  // namespace

EstimateResult estimate_eta_avg(const Field& f, const BoxH& box, double ridge,
                                std::optional<int> v_opt, std::optional<int> w_opt,
                                const series::Config&) {
  const int N = f.grid.N, M = f.grid.M;
  const double n = N, m = M;
  const int v = v_opt.value_or(
      std::max(1, static_cast<int>(std::floor(std::max(1.0, n / (4.0 * m * m)) + 0.5))));
  const int w = w_opt.value_or(
      std::max(1, static_cast<int>(std::floor(std::max(1.0, m / std::sqrt(n)) + 0.5))));
  if (v < 1 || w < 1) throw std::invalid_argument("coarse lags must be >= 1");
  if (2 * v > N || w > M) throw std::invalid_argument("coarse lags exceed grid");
  if (ridge < 0.0)
    ridge = 1.0 / std::min(m * m * m, std::pow(n, 1.5));

  const double r = w * f.grid.dx() / std::sqrt(v * f.grid.dt());
  std::vector<double> m1 = coarse_moments(f, v, w);
  std::vector<double> m2 = coarse_moments(f, 2 * v, w);
  m2.resize(m1.size());  // same k range for both lags
  std::vector<double> z(m1.size());
  for (std::size_t k = 0; k < z.size(); ++k)
    z[k] = 0.5 * (f.grid.y(static_cast<int>(k)) + f.grid.y(static_cast<int>(k) + w));

  EstimateResult out = eta_from_moments(m1, m2, z, r, box, ridge);
  out.method = "eta-avg";
  out.diagnostics["v"] = v;
  out.diagnostics["w"] = w;
  out.diagnostics["ridge"] = ridge;
  return out;
}

EstimateResult estimate_eta_ls(const Field& f, const BoxH& box, double ridge,
                               const series::Config& cfg) {
  if (ridge < 0.0) ridge = 1.0 / (static_cast<double>(f.grid.N) * f.grid.M);
  EstimateResult out = estimate_eta_avg(f, box, ridge, 1, 1, cfg);
  out.method = "eta-ls";
  return out;
}

double theta1_from_eta(const EstimateResult& e) {
  if (e.estimate.size() != 3)
    throw std::invalid_argument("theta1_from_eta needs a full eta estimate");
  return e.estimate[1] * e.estimate[2];
}

double asymptotic_variance_scalar(Method m, const model::Params& p, double r,
                                  const series::Config& cfg) {
  const model::DerivedParams d = model::derive(p);
  const double s4 = p.sigma2 * p.sigma2;
  const double t2 = p.theta2;
  switch (m) {
    case Method::sigma2_sp: return 2.0 * s4;
    case Method::sigma2_t: return series::b_constant(cfg).value * s4;
    case Method::sigma2_double:
      return series::c_value(r / std::sqrt(t2), cfg) * s4;
    case Method::theta2_sp: return 2.0 * t2 * t2;
    case Method::theta2_t: return 4.0 * t2 * t2 * series::b_constant(cfg).value;
    case Method::theta2_r: {
      const double ps = series::psi(r, t2);
      const double dps = series::psi_dtheta2(r, t2);
      return series::c_value(r / std::sqrt(t2), cfg) * (ps / dps) * (ps / dps);
    }
    default:
      break;
  }
  (void)d;
  throw std::invalid_argument("asymptotic_variance_scalar: no scalar variance for " +
                              method_tag(m));
}

LsCovariance ls_covariance(const model::Params& p, double r, double b,
                           const series::Config& cfg) {
  if (!(r > 0.0)) throw std::invalid_argument("ls_covariance needs r > 0");
  if (!(b > 0.0 && b < 0.5)) throw std::invalid_argument("ls_covariance needs b in (0, 1/2)");
  const model::DerivedParams d = model::derive(p);
  const double t2 = p.theta2, s2 = p.sigma2, kap = d.kappa;
  const double h = r / std::sqrt(t2);
  const series::LatticeSums ls = series::ls_lattice_sums(h, t2, cfg);

  // Gradient of f^i(z) = sigma2 e^{-kappa z} psi(r_i) in (sigma2, theta2, kappa).
  const double rr[2] = {r, r / std::sqrt(2.0)};
  auto grad = [&](int i, double z, int comp) {
    const double ps = series::psi(rr[i], t2);
    const double dps = series::psi_dtheta2(rr[i], t2);
    const double e = std::exp(-kap * z);
    switch (comp) {
      case 0: return e * ps;
      case 1: return e * s2 * dps;
      default: return -z * e * s2 * ps;
    }
  };
  auto inner = [&](auto&& fa, auto&& fb) {
    return num::integrate([&](double x) { return fa(x) * fb(x); }, b, 1.0 - b, 1e-11) /
           (1.0 - 2.0 * b);
  };

  LsCovariance out;
  for (int e = 0; e < 3; ++e)
    for (int f2 = e; f2 < 3; ++f2) {
      double u = 0.0, v = 0.0;
      // h^i = e^{-kappa z} g^i
      const double h11 = inner([&](double z) { return std::exp(-kap * z) * grad(0, z, e); },
                               [&](double z) { return std::exp(-kap * z) * grad(0, z, f2); });
      const double h22 = inner([&](double z) { return std::exp(-kap * z) * grad(1, z, e); },
                               [&](double z) { return std::exp(-kap * z) * grad(1, z, f2); });
      const double h12 = inner([&](double z) { return std::exp(-kap * z) * grad(0, z, e); },
                               [&](double z) { return std::exp(-kap * z) * grad(1, z, f2); });
      const double h21 = inner([&](double z) { return std::exp(-kap * z) * grad(1, z, e); },
                               [&](double z) { return std::exp(-kap * z) * grad(0, z, f2); });
      u = 4.0 * s2 * s2 *
          (2.0 * ls.a * h11 + ls.b * h22 + std::sqrt(2.0) * ls.c * (h12 + h21));
      const double g11 = inner([&](double z) { return grad(0, z, e); },
                               [&](double z) { return grad(0, z, f2); });
      const double g22 = inner([&](double z) { return grad(1, z, e); },
                               [&](double z) { return grad(1, z, f2); });
      v = 2.0 * (g11 + g22);
      out.u[e][f2] = out.u[f2][e] = u;
      out.v[e][f2] = out.v[f2][e] = v;
    }
  const num::Mat3 vinv = num::mat3_inverse(out.v);
  out.omega = num::mat3_mul(num::mat3_mul(vinv, out.u), vinv);
  return out;
}

}  // namespace spde::est
