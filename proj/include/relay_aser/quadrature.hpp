#pragma once

// Globally adaptive Gauss-Kronrod quadrature on a finite interval.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "relay_aser/errors.hpp"

namespace relay_aser::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int nodes = 61;  // Kronrod points per panel: 15, 21, 31, 41, 51 or 61
  int max_panels = 4000;
};

namespace detail {

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One Kronrod/Gauss pair on [lo, hi]. Returns {kronrod, |kronrod - gauss|, L1}.
template <unsigned N, class F>
Panel rule(F& f, double lo, double hi, double& l1, int& evals) {
  using kronrod = boost::math::quadrature::gauss_kronrod<double, N>;
  using gauss = boost::math::quadrature::gauss<double, (N - 1) / 2>;
  const auto& xk = kronrod::abscissa();
  const auto& wk = kronrod::weights();
  const auto& wg = gauss::weights();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  unsigned gauss_start = 2;
  unsigned kronrod_start = 1;
  const double f0 = f(mid);
  double k_sum = f0 * wk[0];
  double g_sum = 0.0;
  double abs_sum = std::abs(f0) * wk[0];
  if (((N - 1) / 2) & 1u) {
    g_sum = f0 * wg[0];
  } else {
    gauss_start = 1;
    kronrod_start = 2;
  }
  for (unsigned i = gauss_start; i < xk.size(); i += 2) {
    const double fp = f(mid + half * xk[i]);
    const double fm = f(mid - half * xk[i]);
    k_sum += (fp + fm) * wk[i];
    g_sum += (fp + fm) * wg[i / 2];
    abs_sum += (std::abs(fp) + std::abs(fm)) * wk[i];
  }
  for (unsigned i = kronrod_start; i < xk.size(); i += 2) {
    const double fp = f(mid + half * xk[i]);
    const double fm = f(mid - half * xk[i]);
    k_sum += (fp + fm) * wk[i];
    abs_sum += (std::abs(fp) + std::abs(fm)) * wk[i];
  }
  evals += static_cast<int>(N);
  l1 = abs_sum * half;
  return Panel{lo, hi, k_sum * half, std::abs(k_sum - g_sum) * half};
}

template <class F>
Panel apply_rule(int nodes, F& f, double lo, double hi, double& l1, int& evals) {
  switch (nodes) {
    case 15: return rule<15>(f, lo, hi, l1, evals);
    case 21: return rule<21>(f, lo, hi, l1, evals);
    case 31: return rule<31>(f, lo, hi, l1, evals);
    case 41: return rule<41>(f, lo, hi, l1, evals);
    case 51: return rule<51>(f, lo, hi, l1, evals);
    case 61: return rule<61>(f, lo, hi, l1, evals);
    default:
      throw DomainError("quadrature: unsupported Kronrod node count " + std::to_string(nodes));
  }
}

}  // namespace detail

/// Integrates f over [lo, hi], bisecting the panel with the largest error
/// estimate until the summed estimate meets max(abs_tol, rel_tol * |I|).
/// The returned Result reports whether the tolerance was met; it never throws
/// on non-convergence (see integrate_or_throw).
template <class F>
Result integrate(F&& f, double lo, double hi, const Options& opt = {}) {
  Result out;
  if (hi == lo) {
    out.converged = true;
    return out;
  }
  double sign = 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  std::priority_queue<detail::Panel> heap;
  double l1_total = 0.0;
  double l1 = 0.0;
  auto first = detail::apply_rule(opt.nodes, f, lo, hi, l1, out.evaluations);
  l1_total = l1;
  double total = first.value;
  double error = first.error;
  heap.push(first);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto done = [&] {
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    return error <= tol || error <= 50.0 * eps * l1_total;
  };
  int panels = 1;
  while (!done() && panels < opt.max_panels) {
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      heap.push(worst);
      break;  // panel width at machine resolution
    }
    double l1_left = 0.0, l1_right = 0.0;
    auto left = detail::apply_rule(opt.nodes, f, worst.lo, mid, l1_left, out.evaluations);
    auto right = detail::apply_rule(opt.nodes, f, mid, worst.hi, l1_right, out.evaluations);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1_total = std::max(l1_total, l1_left + l1_right);
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum from the panels to shed accumulated cancellation in the running totals.
  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = sign * total;
  out.error = error;
  out.converged = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) ||
                  error <= 50.0 * eps * l1_total;
  return out;
}

/// integrate() that raises ConvergenceError naming `operation` when the
/// tolerance is missed.
template <class F>
double integrate_or_throw(const char* operation, F&& f, double lo, double hi,
                          const Options& opt = {}) {
  auto r = integrate(std::forward<F>(f), lo, hi, opt);
  if (!r.converged || !std::isfinite(r.value)) {
    throw ConvergenceError(operation, "quadrature did not reach rel_tol " +
                                          std::to_string(opt.rel_tol) + " (error estimate " +
                                          std::to_string(r.error) + ")");
  }
  return r.value;
}

}  // namespace relay_aser::quad
