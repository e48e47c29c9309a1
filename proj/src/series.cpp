#include "spde/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "spde/numerics.hpp"

namespace spde::series {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrtPiHalf = 0.88622692545275801364908374167057;  // sqrt(pi)/2

/// int_x^infty e^{-z^2} dz
double gauss_tail(double x) {
  if (std::isinf(x)) return x > 0 ? 0.0 : 2.0 * kSqrtPiHalf;
  return kSqrtPiHalf * std::erfc(x);
}

/// sum_{l>=1} cos(pi l z)/l^2, z in [0,2]
double basel_cosine(double z) {
  return kPi * kPi * ((z - 1.0) * (z - 1.0) * 0.25 - 1.0 / 12.0);
}

}  // namespace

void Config::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("series tol must be > 0");
  if (max_terms < 1000) throw std::invalid_argument("series max_terms must be >= 1000");
  if (lattice_cut < 8) throw std::invalid_argument("series lattice_cut must be >= 8");
}

double f_series(int lag, double z, double dt, double theta2, const Config& cfg) {
  cfg.validate();
  if (lag < 0) throw std::invalid_argument("f_series needs lag >= 0");
  if (!(z >= 0.0 && z <= 2.0)) throw std::invalid_argument("f_series needs z in [0,2]");
  if (!(dt > 0.0) || !(theta2 > 0.0))
    throw std::invalid_argument("f_series needs dt > 0 and theta2 > 0");

  const double pt2 = kPi * kPi * theta2;
  const double a = pt2 * dt;

  if (lag == 0) {
    // (1 - e^{-a l^2})/(pt2 l^2): Basel part in closed form, the exponentially
    // damped part summed directly.
    double expo = 0.0;
    for (long l = 1; l <= cfg.max_terms; ++l) {
      const double ld = static_cast<double>(l);
      expo += std::exp(-a * ld * ld) / (pt2 * ld * ld) * std::cos(kPi * ld * z);
      const double lnxt = ld + 1.0;
      const double q = std::exp(-a * (2.0 * ld + 3.0));
      const double tail = std::exp(-a * lnxt * lnxt) / (pt2 * lnxt * lnxt) / (1.0 - q);
      if (tail < cfg.tol) break;
    }
    return basel_cosine(z) / pt2 - expo;
  }
  if (lag == 1) {
    return 0.5 * f_series(0, z, 2.0 * dt, theta2, cfg) - f_series(0, z, dt, theta2, cfg);
  }
  const double J = static_cast<double>(lag);
  double sum = 0.0;
  for (long l = 1; l <= cfg.max_terms; ++l) {
    const double ld = static_cast<double>(l);
    const double e = std::exp(-a * J * ld * ld);
    const double ep = std::exp(-a * (J + 1.0) * ld * ld);
    const double em = std::exp(-a * (J - 1.0) * ld * ld);
    sum += (2.0 * e - ep - em) / (2.0 * pt2 * ld * ld) * std::cos(kPi * ld * z);
    const double lnxt = ld + 1.0;
    const double q = std::exp(-a * (J - 1.0) * (2.0 * ld + 3.0));
    const double tail = 2.0 * std::exp(-a * (J - 1.0) * lnxt * lnxt) /
                        (pt2 * lnxt * lnxt) / (1.0 - q);
    if (tail < cfg.tol) break;
  }
  return sum;
}

double phi(double dx, double dt, double theta2, double kappa, const Config& cfg) {
  if (!(dx > 0.0)) throw std::invalid_argument("phi needs dx > 0");
  const double f0 = f_series(0, 0.0, dt, theta2, cfg);
  const double fd = f_series(0, dx, dt, theta2, cfg);
  return f0 * (1.0 + std::exp(-kappa * dx)) - 2.0 * fd * std::exp(-0.5 * kappa * dx);
}

double psi(double r, double theta2) {
  if (!(theta2 > 0.0)) throw std::invalid_argument("psi needs theta2 > 0");
  if (!(r >= 0.0)) throw std::invalid_argument("psi needs r >= 0");
  const double c = 2.0 / std::sqrt(kPi * theta2);
  if (r == 0.0) return 0.0;
  if (std::isinf(r)) return c;
  const double x = r / (2.0 * std::sqrt(theta2));
  return c * (1.0 - std::exp(-x * x) + 2.0 * x * gauss_tail(x));
}

double h_moment(double x) {
  return 4.0 * x / std::sqrt(kPi) * (1.0 - std::exp(-x * x) + 2.0 * x * gauss_tail(x));
}

double h_moment_prime(double x) {
  if (std::isinf(x)) return 4.0 / std::sqrt(kPi);
  return 4.0 / std::sqrt(kPi) * (1.0 - std::exp(-x * x) + 4.0 * x * gauss_tail(x));
}

double psi_dtheta2(double r, double theta2) {
  if (!(theta2 > 0.0)) throw std::invalid_argument("psi_dtheta2 needs theta2 > 0");
  if (!(r >= 0.0)) throw std::invalid_argument("psi_dtheta2 needs r >= 0");
  const double x = std::isinf(r) ? r : r / (2.0 * std::sqrt(theta2));
  return -h_moment_prime(x) / (4.0 * theta2 * std::sqrt(theta2));
}

double h_kernel(double x) {
  if (std::isinf(x)) return 0.0;
  return 0.5 / std::sqrt(kPi) * (std::exp(-0.25 * x * x) - x * gauss_tail(0.5 * x));
}

double psi_inverse(double v, double r) {
  if (!(v > 0.0)) throw std::invalid_argument("psi_inverse needs a positive target value");
  if (!(r > 0.0) || std::isinf(r)) throw std::invalid_argument("psi_inverse needs finite r > 0");
  // psi is strictly decreasing in theta2 with range (0, infinity).
  double lo = 1.0, hi = 1.0;
  int guard = 0;
  while (psi(r, lo) <= v) {
    lo *= 0.25;
    if (++guard > 600) throw std::runtime_error("psi_inverse: bracket expansion failed (low)");
  }
  guard = 0;
  while (psi(r, hi) >= v) {
    hi *= 4.0;
    if (++guard > 600) throw std::runtime_error("psi_inverse: bracket expansion failed (high)");
  }
  return num::brent_root([&](double t2) { return psi(r, t2) - v; }, lo, hi, 1e-13);
}

double lambda_weight(long j, long l, double h) {
  if (!(h >= 0.0)) throw std::invalid_argument("lambda_weight needs h >= 0");
  static constexpr double c[3] = {1.0, -2.0, 1.0};
  const long aj = std::labs(j) - 1, al = std::labs(l) - 1;
  double sum = 0.0;
  for (int s = 0; s < 3; ++s)
    for (int t = 0; t < 3; ++t) {
      const long x = std::labs(aj + s), y = std::labs(al + t);
      if (x == 0) continue;
      const double sx = std::sqrt(static_cast<double>(x));
      const double arg = (y == 0) ? 0.0 : h * static_cast<double>(y) / sx;
      sum += c[s] * c[t] * sx * h_kernel(arg);
    }
  return sum;
}

TruncatedSum b_constant(const Config& cfg) {
  cfg.validate();
  // terms (2 sqrt(J) - sqrt(J+1) - sqrt(J-1))^2 <= (J-1)^{-3}/16, so the
  // remainder past L is bounded by 1/(32 (L-1)^2).
  long L = 1 + static_cast<long>(std::ceil(std::sqrt(1.0 / (32.0 * cfg.tol))));
  L = std::clamp(L, 1000L, cfg.max_terms);
  double sum = 0.0, comp = 0.0;
  for (long J = 1; J <= L; ++J) {
    const double Jd = static_cast<double>(J);
    const double d = 2.0 * std::sqrt(Jd) - std::sqrt(Jd + 1.0) - std::sqrt(Jd - 1.0);
    const double term = d * d - comp;
    const double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  TruncatedSum out;
  out.value = 2.0 + sum;
  out.tail = 1.0 / (32.0 * static_cast<double>(L - 1) * static_cast<double>(L - 1));
  out.terms = L;
  return out;
}

namespace {

/// Cached surface G_h(a,b) = sqrt(a) h_kernel(h b / sqrt(a)) on [0,L]x[0,L].
struct LambdaTable {
  long half = 0;  // Lambda available for |j|,|l| <= half
  std::vector<double> g;  // (half+3)^2
  long stride = 0;

  LambdaTable(double h, long half_width) : half(half_width), stride(half + 3) {
    g.assign(static_cast<std::size_t>(stride) * stride, 0.0);
    for (long a = 1; a < stride; ++a) {
      const double sa = std::sqrt(static_cast<double>(a));
      for (long b = 0; b < stride; ++b)
        g[static_cast<std::size_t>(a) * stride + b] =
            sa * h_kernel(h * static_cast<double>(b) / sa);
    }
  }

  double surf(long a, long b) const {
    const long x = std::labs(a), y = std::labs(b);
    if (x == 0) return 0.0;
    return g[static_cast<std::size_t>(x) * stride + y];
  }

  double lambda(long j, long l) const {
    static constexpr double c[3] = {1.0, -2.0, 1.0};
    const long aj = std::labs(j) - 1, al = std::labs(l) - 1;
    double sum = 0.0;
    for (int s = 0; s < 3; ++s)
      for (int t = 0; t < 3; ++t)
        sum += c[s] * c[t] * surf(aj + s, al + t);
    return sum;
  }
};

double lambda_sq_lattice(const LambdaTable& tab, long L, double* envelope) {
  double s00 = tab.lambda(0, 0);
  double sum = s00 * s00;
  double env = std::abs(s00);
  for (long j = 1; j <= L; ++j) {
    const double v = tab.lambda(j, 0);
    sum += 2.0 * v * v;
    env = std::max(env, std::abs(v) * static_cast<double>(j + 1));
  }
  for (long l = 1; l <= L; ++l) {
    const double v = tab.lambda(0, l);
    sum += 2.0 * v * v;
    env = std::max(env, std::abs(v) * static_cast<double>(l + 1));
  }
  for (long j = 1; j <= L; ++j)
    for (long l = 1; l <= L; ++l) {
      const double v = tab.lambda(j, l);
      sum += 4.0 * v * v;
      if (j == L || l == L)
        env = std::max(env, std::abs(v) * static_cast<double>((j + 1) * (l + 1)));
    }
  if (envelope) *envelope = env;
  return sum;
}

}  // namespace

TruncatedSum c_of_h(double h, const Config& cfg) {
  cfg.validate();
  if (!(h >= 0.0)) throw std::invalid_argument("c_of_h needs h in [0, infinity]");
  if (h == 0.0) return {3.0, 0.0, 0};
  if (std::isinf(h)) {
    const TruncatedSum b = b_constant(cfg);
    return {1.5 * b.value, 1.5 * b.tail, b.terms};
  }
  const long max_cut = 4096;
  long L = cfg.lattice_cut;
  double prev = 0.0, cur = 0.0, env = 0.0, l00 = 0.0;
  bool have_prev = false;
  while (true) {
    LambdaTable tab(h, L);
    l00 = tab.lambda(0, 0);
    const double s = lambda_sq_lattice(tab, L, &env);
    cur = 2.0 * s / (l00 * l00);
    if (have_prev && std::abs(cur - prev) <= std::max(1e-9 * std::abs(cur), 1e3 * cfg.tol))
      break;
    if (2 * L > max_cut) break;
    prev = cur;
    have_prev = true;
    L *= 2;
  }
  TruncatedSum out;
  out.value = cur;
  // envelope |Lambda| <= env/((j+1)(l+1)) outside the cut
  const double lattice_tail = 8.0 * env * env * 1.645 / static_cast<double>(L);
  out.tail = 2.0 * lattice_tail / (l00 * l00) + (have_prev ? std::abs(cur - prev) : 0.0);
  out.terms = L;
  return out;
}

LatticeSums ls_lattice_sums(double h, double theta2, const Config& cfg) {
  cfg.validate();
  if (!(h > 0.0) || std::isinf(h)) throw std::invalid_argument("ls_lattice_sums needs finite h > 0");
  if (!(theta2 > 0.0)) throw std::invalid_argument("ls_lattice_sums needs theta2 > 0");
  const long max_cut = 4096;
  long L = cfg.lattice_cut;
  LatticeSums prev{}, cur{};
  bool have_prev = false;
  while (true) {
    LambdaTable tab(h, L + 1);
    double sa = 0.0, sb = 0.0, sc = 0.0;
    for (long k = 0; k <= L; ++k) {
      const double wk = (k == 0) ? 1.0 : 2.0;
      for (long i = -L; i <= L; ++i) {
        const double a0 = tab.lambda(i, k);
        const double am = tab.lambda(i - 1, k);
        const double ap = tab.lambda(i + 1, k);
        sa += wk * a0 * a0;
        const double bb = 2.0 * a0 + am + ap;
        sb += wk * bb * bb;
        const double cc = a0 + am;
        sc += wk * cc * cc;
      }
    }
    cur = {sa / theta2, sb / theta2, sc / theta2, L};
    if (have_prev &&
        std::abs(cur.a - prev.a) + std::abs(cur.b - prev.b) + std::abs(cur.c - prev.c) <=
            1e-9 * (std::abs(cur.a) + std::abs(cur.b) + std::abs(cur.c)))
      break;
    if (2 * L > max_cut) break;
    prev = cur;
    have_prev = true;
    L *= 2;
  }
  return cur;
}

}  // namespace spde::series
