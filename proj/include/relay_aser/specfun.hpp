#pragma once

// Special-function kernel: Gamma-family helpers, the bounded Gaussian
// Q-integral, Lauricella F_D^(n), confluent Lauricella Phi_1^(n) and
// Phi_2^(2), the Yacoub integral, and a scaled modified Bessel I_nu.
//
// Every function is pure and safe to call concurrently.

#include <span>

namespace relay_aser::specfun {

/// Accuracy and work limits shared by the series and integral paths.
struct SeriesControl {
  double rel_tol = default_rel_tol();
  int max_terms = 10000;  // per series dimension
  int quad_nodes = 61;    // Kronrod points per panel

  void validate() const;

  /// 1e-10 unless the RELAY_ASER_TOL environment variable holds a positive number.
  static double default_rel_tol();
};

enum class Evaluation { Integral, Series };

double log_gamma(double x);
/// (a)_n = Gamma(a+n)/Gamma(a), computed in log space for a > 0.
double pochhammer(double a, double n);
double beta(double a, double b);
double log_beta(double a, double b);

/// Gaussian tail probability Q(x) = erfc(x/sqrt 2)/2.
double gaussian_q(double x);

/// (1/pi) * integral over [0, phi] of exp(-x^2 / (2 sin^2 t)) dt,
/// for x >= 0 and 0 < phi <= pi/2.
double bounded_q(double x, double phi);

/// F_D^(n)(a; b_1..b_n; c; x_1..x_n). The integral path needs c > a > 0 and
/// x_i < 1; the series path needs |x_i| < 1.
double lauricella_fd(double a, std::span<const double> b, double c, std::span<const double> x,
                     const SeriesControl& ctl = {}, Evaluation how = Evaluation::Integral);

/// Phi_1^(n)(a; b_1..b_{n-1}; c; x_1..x_{n-1}, xn) with Euler kernel
/// u^{a-1}(1-u)^{c-a-1} exp(u xn) / prod (1 - u x_i)^{b_i}.
double lauricella_phi1(double a, std::span<const double> b, double c, std::span<const double> x,
                       double xn, const SeriesControl& ctl = {},
                       Evaluation how = Evaluation::Integral);

/// Phi_2^(2)(b1, b2; c; x1, x2) by its double series.
double lauricella_phi2(double b1, double b2, double c, double x1, double x2,
                       const SeriesControl& ctl = {});

/// Yacoub integral Y_nu(a, b), the survival function kernel of eta-mu fading.
/// nu > 0, |a| < 1, b >= 0.
double yacoub_y(double nu, double a, double b, const SeriesControl& ctl = {});

/// log(I_nu(z) / (z/2)^nu) for z >= 0 and nu > -1. Finite at z = 0.
double log_bessel_i_reduced(double nu, double z);
/// exp(-z) I_nu(z) for z >= 0 and nu > -1.
double bessel_i_scaled(double nu, double z);

}  // namespace relay_aser::specfun
