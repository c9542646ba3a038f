#include "relay_aser/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/owens_t.hpp>

#include "relay_aser/errors.hpp"
#include "relay_aser/quadrature.hpp"

namespace relay_aser::specfun {

namespace {

constexpr double kPi = std::numbers::pi;

double env_rel_tol() {
  const char* raw = std::getenv("RELAY_ASER_TOL");
  if (raw == nullptr || *raw == '\0') return 1e-10;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || !(v > 0.0) || !std::isfinite(v)) return 1e-10;
  return v;
}

quad::Options quad_options(const SeriesControl& ctl) {
  quad::Options opt;
  opt.rel_tol = ctl.rel_tol;
  opt.nodes = ctl.quad_nodes;
  return opt;
}

void check_sizes(const char* op, std::span<const double> b, std::span<const double> x) {
  if (b.size() != x.size()) {
    throw DomainError(std::string(op) + ": b and x must have the same length");
  }
}

// Integral over (0,1) of u^{a-1} (1-u)^{c-a-1} g(u, 1-u) du, divided by B(a, c-a).
// An endpoint whose weight exponent is negative is removed exactly by
// u = t^{1/a} (resp. 1-u = t^{1/(c-a)}).
template <class G>
double euler_integral(const char* op, double a, double c, G&& g, const SeriesControl& ctl) {
  const double ca = c - a;
  const auto opt = quad_options(ctl);

  double left = 0.0;
  if (a < 1.0) {
    const double inv = 1.0 / a;
    left = quad::integrate_or_throw(
               op,
               [&](double t) {
                 const double u = std::pow(t, inv);
                 const double s = 1.0 - u;
                 return std::pow(s, ca - 1.0) * g(u, s);
               },
               0.0, std::pow(0.5, a), opt) /
           a;
  } else {
    left = quad::integrate_or_throw(
        op,
        [&](double u) {
          const double s = 1.0 - u;
          return std::pow(u, a - 1.0) * std::pow(s, ca - 1.0) * g(u, s);
        },
        0.0, 0.5, opt);
  }

  double right = 0.0;
  if (ca < 1.0) {
    const double inv = 1.0 / ca;
    right = quad::integrate_or_throw(
                op,
                [&](double t) {
                  const double s = std::pow(t, inv);
                  const double u = 1.0 - s;
                  return std::pow(u, a - 1.0) * g(u, s);
                },
                0.0, std::pow(0.5, ca), opt) /
            ca;
  } else {
    right = quad::integrate_or_throw(
        op,
        [&](double s) {
          const double u = 1.0 - s;
          return std::pow(u, a - 1.0) * std::pow(s, ca - 1.0) * g(u, s);
        },
        0.0, 0.5, opt);
  }
  return (left + right) * std::exp(-log_beta(a, ca));
}

// log prod (1 - u x_i)^{-b_i}, written so that u close to 1 keeps the digits of 1 - x_i.
double log_kernel(std::span<const double> b, std::span<const double> x, double u, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] == 0.0) continue;
    const double one_minus = (u <= 0.5) ? 1.0 - u * x[i] : (1.0 - x[i]) + s * x[i];
    acc -= b[i] * std::log(one_minus);
  }
  return acc;
}

// Sum over total degree N of ratio_N * [t^N] prod_i (1 - x_i t)^{-b_i} * exp(xn t),
// where ratio_N = (a)_N/(c)_N, or 1/(c)_N when `a` is empty. Each N is one
// hyper-row; truncation after two consecutive rows below rel_tol * |sum|.
double hyper_row_series(const char* op, std::optional<double> a, double c,
                        std::span<const double> b, std::span<const double> x, double xn,
                        const SeriesControl& ctl) {
  const std::size_t nf = b.size();
  const bool has_exp = xn != 0.0;
  // coeff[j][m]: m-th Taylor coefficient of factor j.
  std::vector<std::vector<double>> coeff(nf + (has_exp ? 1 : 0));
  // prod[j][N]: coefficients of the product of factors 0..j.
  std::vector<std::vector<double>> prod(coeff.size());
  for (auto& v : coeff) v.reserve(256);
  for (auto& v : prod) v.reserve(256);

  double sum = 1.0;
  double ratio = 1.0;
  int quiet_rows = 0;
  for (int n = 0; n <= ctl.max_terms; ++n) {
    for (std::size_t j = 0; j < coeff.size(); ++j) {
      double next = 1.0;
      if (n > 0) {
        const double prev = coeff[j][n - 1];
        if (j < nf) {
          next = prev * (b[j] + n - 1) * x[j] / n;
        } else {
          next = prev * xn / n;
        }
      }
      coeff[j].push_back(next);
      if (j == 0) {
        prod[0].push_back(next);
      } else {
        double acc = 0.0;
        for (int m = 0; m <= n; ++m) acc += prod[j - 1][n - m] * coeff[j][m];
        prod[j].push_back(acc);
      }
    }
    if (n == 0) continue;
    ratio *= (a ? (*a + n - 1) : 1.0) / (c + n - 1);
    const double row = coeff.empty() ? 0.0 : ratio * prod.back()[n];
    sum += row;
    if (!std::isfinite(sum)) {
      throw ConvergenceError(op, "series overflowed");
    }
    if (std::abs(row) < ctl.rel_tol * std::abs(sum)) {
      if (++quiet_rows >= 2) return sum;
    } else {
      quiet_rows = 0;
    }
  }
  throw ConvergenceError(op, "series did not converge within " + std::to_string(ctl.max_terms) +
                                 " terms");
}

void check_euler_params(const char* op, double a, double c) {
  if (!(a > 0.0) || !(c > a)) {
    throw DomainError(std::string(op) + ": integral representation needs c > a > 0");
  }
}

void check_series_args(const char* op, std::span<const double> x) {
  for (double xi : x) {
    if (!(std::abs(xi) < 1.0)) {
      throw DivergenceError(std::string(op) + ": series needs |x_i| < 1");
    }
  }
}

void check_integral_args(const char* op, std::span<const double> x) {
  for (double xi : x) {
    if (!(xi < 1.0)) {
      throw DivergenceError(std::string(op) + ": integral diverges for x_i >= 1");
    }
  }
}

}  // namespace

double SeriesControl::default_rel_tol() {
  static const double tol = env_rel_tol();
  return tol;
}

void SeriesControl::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("SeriesControl: rel_tol must be > 0");
  if (max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
  if (quad_nodes < 2) throw DomainError("SeriesControl: quad_nodes must be >= 2");
}

double log_gamma(double x) { return boost::math::lgamma(x); }

double pochhammer(double a, double n) {
  if (n == 0.0) return 1.0;
  if (n == std::floor(n) && n > 0.0 && n <= 64.0) {
    double p = 1.0;
    for (int k = 0; k < static_cast<int>(n); ++k) p *= a + k;
    return p;
  }
  if (!(a > 0.0) || !(a + n > 0.0)) {
    throw DomainError("pochhammer: non-integer order needs a > 0 and a + n > 0");
  }
  return std::exp(log_gamma(a + n) - log_gamma(a));
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double beta(double a, double b) { return std::exp(log_beta(a, b)); }

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double bounded_q(double x, double phi) {
  if (!(x >= 0.0) || std::isnan(phi) || !(phi > 0.0) || phi > kPi / 2 + 1e-15) {
    throw DomainError("bounded_q: need x >= 0 and 0 < phi <= pi/2");
  }
  if (x == 0.0) return phi / kPi;
  const double full = gaussian_q(x);
  if (phi >= kPi / 2) return full;
  if (full == 0.0) return 0.0;
  // Q(x, phi) = Q(x) - 2 T(x, cot phi).
  const double via_owen = full - 2.0 * boost::math::owens_t(x, std::cos(phi) / std::sin(phi));
  if (via_owen > 1e-6 * full) return via_owen;
  quad::Options opt;
  opt.rel_tol = 1e-13;
  auto r = quad::integrate(
      [x](double t) {
        const double s = std::sin(t);
        return std::exp(-x * x / (2.0 * s * s));
      },
      0.0, phi, opt);
  return std::max(0.0, r.value / kPi);
}

double lauricella_fd(double a, std::span<const double> b, double c, std::span<const double> x,
                     const SeriesControl& ctl, Evaluation how) {
  constexpr const char* op = "lauricella_fd";
  ctl.validate();
  check_sizes(op, b, x);
  if (how == Evaluation::Series) {
    check_series_args(op, x);
    return hyper_row_series(op, a, c, b, x, 0.0, ctl);
  }
  check_euler_params(op, a, c);
  check_integral_args(op, x);
  if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) return 1.0;
  return euler_integral(
      op, a, c, [&](double u, double s) { return std::exp(log_kernel(b, x, u, s)); }, ctl);
}

double lauricella_phi1(double a, std::span<const double> b, double c, std::span<const double> x,
                       double xn, const SeriesControl& ctl, Evaluation how) {
  constexpr const char* op = "lauricella_phi1";
  ctl.validate();
  check_sizes(op, b, x);
  if (!std::isfinite(xn)) throw DomainError("lauricella_phi1: xn must be finite");
  if (xn == 0.0) return lauricella_fd(a, b, c, x, ctl, how);
  if (how == Evaluation::Series) {
    check_series_args(op, x);
    return hyper_row_series(op, a, c, b, x, xn, ctl);
  }
  check_euler_params(op, a, c);
  check_integral_args(op, x);
  return euler_integral(
      op, a, c, [&](double u, double s) { return std::exp(log_kernel(b, x, u, s) + u * xn); },
      ctl);
}

double lauricella_phi2(double b1, double b2, double c, double x1, double x2,
                       const SeriesControl& ctl) {
  ctl.validate();
  if (!(c > 0.0)) throw DomainError("lauricella_phi2: need c > 0");
  if (!std::isfinite(x1) || !std::isfinite(x2)) {
    throw DomainError("lauricella_phi2: arguments must be finite");
  }
  const double b[2] = {b1, b2};
  const double x[2] = {x1, x2};
  // (b)_m x^m / m! factors with 1/(c)_N row weights are exactly the F_D
  // machinery without the (a)_N numerator.
  return hyper_row_series("lauricella_phi2", std::nullopt, c, b, x, 0.0, ctl);
}

double yacoub_y(double nu, double a, double b, const SeriesControl& ctl) {
  constexpr const char* op = "yacoub_y";
  ctl.validate();
  if (!(nu > 0.0)) throw DomainError("yacoub_y: need nu > 0");
  if (!(std::abs(a) < 1.0)) throw DomainError("yacoub_y: need |a| < 1");
  if (!(b >= 0.0)) throw DomainError("yacoub_y: need b >= 0");
  if (b == 0.0) return 1.0;
  if (std::isinf(b)) return 0.0;

  // 1 - Y = (1-a^2)^nu b^{4nu} Phi_2(nu, nu; 1+2nu; -(1+a)b^2, -(1-a)b^2) / Gamma(1+2nu).
  // With x1 the more negative argument, Phi_2 = e^{x1} Phi_2(1, nu; 1+2nu; -x1, x2-x1),
  // a series of positive terms. Summing its n-index in closed progression gives
  //   Phi_2(1, nu; 1+2nu; X, D) = sum_N X^N / (1+2nu)_N * s_N,
  //   s_N = sum_{n<=N} (nu)_n / n! (D/X)^n.
  const double aa = std::abs(a);
  const double b2 = b * b;
  if ((1.0 - aa) * b2 > 745.0) return 0.0;
  const double big_x = (1.0 + aa) * b2;
  const double r = 2.0 * aa / (1.0 + aa);
  const double log_x = std::log(big_x);

  double log_term = 0.0;  // log X^N / (1+2nu)_N
  double s_n = 1.0;
  double u_n = 1.0;
  double shift = 0.0;  // running log-sum-exp
  double acc = 1.0;
  int quiet_rows = 0;
  bool converged = false;
  for (int n = 1; n <= ctl.max_terms; ++n) {
    log_term += log_x - std::log(2.0 * nu + n);
    u_n *= r * (nu + n - 1) / n;
    s_n += u_n;
    const double t = log_term + std::log(s_n);
    if (t > shift) {
      acc = acc * std::exp(shift - t) + 1.0;
      shift = t;
    } else {
      acc += std::exp(t - shift);
    }
    if (n > big_x && t - (shift + std::log(acc)) < std::log(ctl.rel_tol * 1e-3)) {
      if (++quiet_rows >= 2) {
        converged = true;
        break;
      }
    } else {
      quiet_rows = 0;
    }
  }
  if (!converged) {
    throw ConvergenceError(op, "Phi_2 series did not converge within " +
                                   std::to_string(ctl.max_terms) + " rows");
  }
  const double log_cdf = nu * std::log1p(-aa * aa) + 4.0 * nu * std::log(b) - big_x -
                         log_gamma(1.0 + 2.0 * nu) + shift + std::log(acc);
  return std::clamp(1.0 - std::exp(log_cdf), 0.0, 1.0);
}

double log_bessel_i_reduced(double nu, double z) {
  if (!(nu > -1.0)) throw DomainError("bessel_i: need nu > -1");
  if (!(z >= 0.0)) throw DomainError("bessel_i: need z >= 0");
  if (z == 0.0) return -log_gamma(nu + 1.0);
  if (z > 1e4) {
    // Hankel expansion of exp(-z) I_nu(z) sqrt(2 pi z).
    const double mu4 = 4.0 * nu * nu;
    double term = 1.0, series = 1.0;
    for (int k = 1; k < 30; ++k) {
      const double next = -term * (mu4 - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * z);
      if (std::abs(next) >= std::abs(term)) break;
      term = next;
      series += term;
      if (std::abs(term) < 1e-17 * std::abs(series)) break;
    }
    return z - 0.5 * std::log(2.0 * kPi * z) + std::log(series) - nu * std::log(0.5 * z);
  }
  // sum_k q^k / (k! Gamma(k+nu+1)), q = z^2/4, summed outward from its peak.
  const double q = 0.25 * z * z;
  const double peak_real = 0.5 * (-(nu + 2.0) + std::sqrt(nu * nu + 4.0 * q));
  const long peak = std::max(0L, static_cast<long>(std::floor(peak_real)));
  const double log_peak = peak * std::log(q) - log_gamma(peak + 1.0) - log_gamma(peak + nu + 1.0);
  double sum = 1.0;
  double t = 1.0;
  for (long k = peak; t > 1e-18 * sum; ++k) {
    t *= q / ((k + 1.0) * (k + nu + 1.0));
    sum += t;
  }
  t = 1.0;
  for (long k = peak; k > 0 && t > 1e-18 * sum; --k) {
    t *= k * (k + nu) / q;
    sum += t;
  }
  return log_peak + std::log(sum);
}

double bessel_i_scaled(double nu, double z) {
  const double lr = log_bessel_i_reduced(nu, z);
  if (z == 0.0) {
    if (nu == 0.0) return 1.0;
    return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::exp(lr + nu * std::log(0.5 * z) - z);
}

}  // namespace relay_aser::specfun
