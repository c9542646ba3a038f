#include "relay_aser/poweralloc.hpp"

#include <cmath>
#include <limits>

#include "relay_aser/errors.hpp"

namespace relay_aser::poweralloc {

namespace {

constexpr double kEdge = 1e-6;

double central_slope(const std::function<double(double)>& f, double x, double lo, double hi) {
  const double h = std::max(1e-7, 1e-6 * std::abs(x));
  const double a = std::max(lo, x - h);
  const double b = std::min(hi, x + h);
  return (f(b) - f(a)) / (b - a);
}

}  // namespace

ScalarMin golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                  double tol, int max_iter) {
  if (!(tol > 0.0)) throw DomainError("golden_section_minimize: tol must be > 0");
  if (!(lo < hi)) throw DomainError("golden_section_minimize: need lo < hi");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  ScalarMin out;
  for (out.iterations = 0; out.iterations < max_iter && (b - a) > tol; ++out.iterations) {
    if (!std::isfinite(fc) || !std::isfinite(fd)) {
      throw ConvergenceError("golden_section_minimize", "objective is not finite inside the bracket");
    }
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  out.x = fc < fd ? c : d;
  out.fx = std::min(fc, fd);
  return out;
}

ScalarMin bisect_stationary(const std::function<double(double)>& f, double lo, double hi, double tol,
                            int max_iter) {
  if (!(lo < hi)) throw DomainError("bisect_stationary: need lo < hi");
  const double s_lo = central_slope(f, lo, lo, hi);
  const double s_hi = central_slope(f, hi, lo, hi);
  if (!(s_lo < 0.0 && s_hi > 0.0)) {
    throw ConvergenceError("bisect_stationary", "derivative does not change sign on the bracket");
  }
  ScalarMin out;
  double a = lo, b = hi;
  for (out.iterations = 0; out.iterations < max_iter && (b - a) > tol; ++out.iterations) {
    const double m = 0.5 * (a + b);
    const double s = central_slope(f, m, lo, hi);
    if (s < 0.0) {
      a = m;
    } else {
      b = m;
    }
  }
  out.x = 0.5 * (a + b);
  out.fx = f(out.x);
  return out;
}

double asym_aser_of_xi(const relay::RelaySystem& sys, const modulation::Constellation& c, double xi,
                       const specfun::SeriesControl& ctl) {
  if (!(xi > 0.0 && xi < 1.0)) throw DomainError("asym_aser_of_xi: xi must be in (0, 1)");
  return modulation::aser_asym(sys.with_xi(xi), c, ctl);
}

PowerSolution optimize_xi(const relay::RelaySystem& sys, const modulation::Constellation& c,
                          double tol, const specfun::SeriesControl& ctl) {
  if (!(tol > 0.0)) throw DomainError("optimize_xi: tol must be > 0");
  if (sys.direct_only()) throw DomainError("optimize_xi: no relay in direct-only mode");
  auto objective = [&](double xi) { return asym_aser_of_xi(sys, c, xi, ctl); };
  const double d_sd = channel::diversity(sys.sd().fading);
  const double d_rd = channel::diversity(sys.rd().fading);

  PowerSolution out;
  out.xi_lower = d_sd / (d_sd + d_rd);
  const auto golden = golden_section_minimize(objective, kEdge, 1.0 - kEdge, tol);
  out.xi_golden = golden.x;
  out.iterations = golden.iterations;

  // refine on a small bracket around the golden estimate, widening if needed
  double half = 1e-3;
  ScalarMin refined = golden;
  bool done = false;
  while (!done) {
    const double lo = std::max(kEdge, golden.x - half);
    const double hi = std::min(1.0 - kEdge, golden.x + half);
    try {
      refined = bisect_stationary(objective, lo, hi, tol);
      done = true;
    } catch (const ConvergenceError&) {
      if (lo <= kEdge && hi >= 1.0 - kEdge) {
        refined = golden;  // minimiser on the boundary; keep the golden estimate
        done = true;
      }
      half *= 8.0;
    }
  }
  out.iterations += refined.iterations;
  out.xi_opt = refined.x;
  out.aser_at_opt = objective(out.xi_opt);
  const double slope = central_slope(objective, out.xi_opt, kEdge, 1.0 - kEdge);
  out.residual = std::abs(slope) / objective(out.xi_opt);
  return out;
}

}  // namespace relay_aser::poweralloc
