#pragma once

// Source/relay power split minimising the high-SNR ASER.

#include <functional>

#include "relay_aser/modulation.hpp"

namespace relay_aser::poweralloc {

struct PowerSolution {
  double xi_opt = 0.0;
  double aser_at_opt = 0.0;
  int iterations = 0;
  double residual = 0.0;   // |dP/dxi| / P at xi_opt
  double xi_golden = 0.0;  // golden-section estimate before refinement
  double xi_lower = 0.0;   // 2 d_sd / (2 d_sd + d_rd) style lower bracket
};

struct ScalarMin {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Golden-section search for a unimodal f on [lo, hi].
ScalarMin golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                  double tol, int max_iter = 500);

/// Root of the central-difference derivative of f on [lo, hi] by bisection.
/// Needs a sign change of f' across the interval.
ScalarMin bisect_stationary(const std::function<double(double)>& f, double lo, double hi, double tol,
                            int max_iter = 500);

/// Asymptotic ASER with P_s = xi P and P_r = (1 - xi) P.
double asym_aser_of_xi(const relay::RelaySystem& sys, const modulation::Constellation& c, double xi,
                       const specfun::SeriesControl& ctl = {});

PowerSolution optimize_xi(const relay::RelaySystem& sys, const modulation::Constellation& c,
                          double tol = 1e-6, const specfun::SeriesControl& ctl = {});

}  // namespace relay_aser::poweralloc
