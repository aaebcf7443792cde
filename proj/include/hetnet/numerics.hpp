#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hetnet::num {

/// Bracketed bisection for a continuous function with f(lo) and f(hi) of
/// opposite sign. Infinite endpoint values are accepted as long as their sign
/// is defined. Converges to |hi - lo| <= rel_tol * max(1, |x|).
template <class F>
double bisect(F&& f, double lo, double hi, double rel_tol = 1e-12,
              int max_iter = 200) {
  if (!(lo < hi)) throw std::invalid_argument("bisect: lo must be < hi");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::isnan(flo) || std::isnan(fhi))
    throw std::runtime_error("bisect: NaN at bracket endpoint");
  if ((flo < 0.0) == (fhi < 0.0))
    throw std::runtime_error("bisect: no sign change in bracket");
  const bool neg_lo = flo < 0.0;
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;  // bracket is one ulp wide
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == neg_lo)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Scans [lo, hi] with n sample points (log-spaced when requested; requires
/// lo > 0 in that case) and returns every adjacent pair with a sign change.
template <class F>
std::vector<std::pair<double, double>> sign_change_brackets(F&& f, double lo,
                                                            double hi, int n,
                                                            bool log_spaced) {
  if (n < 2) throw std::invalid_argument("sign_change_brackets: n >= 2");
  std::vector<std::pair<double, double>> brackets;
  double prev_x = lo;
  double prev_f = f(lo);
  const double llo = log_spaced ? std::log(lo) : lo;
  const double lhi = log_spaced ? std::log(hi) : hi;
  for (int i = 1; i < n; ++i) {
    const double t = llo + (lhi - llo) * static_cast<double>(i) / (n - 1);
    const double x = log_spaced ? std::exp(t) : t;
    const double fx = f(x);
    if (prev_f == 0.0)
      brackets.emplace_back(prev_x, prev_x);
    else if (!std::isnan(fx) && (prev_f < 0.0) != (fx < 0.0))
      brackets.emplace_back(prev_x, x);
    prev_x = x;
    prev_f = fx;
  }
  if (prev_f == 0.0) brackets.emplace_back(prev_x, prev_x);
  return brackets;
}

/// Golden-section maximization of a unimodal (concave) function on [lo, hi].
/// Returns the abscissa of the maximum to absolute tolerance xtol.
template <class F>
double golden_max(F&& f, double lo, double hi, double xtol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

/// Central finite difference (f(x+h) - f(x-h)) / 2h.
template <class F>
double central_diff(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Relative deviation of the central difference from a supplied analytic
/// derivative value.
template <class F>
double fd_relative_error(F&& f, double x, double h, double analytic) {
  const double fd = central_diff(f, x, h);
  const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-300});
  return std::abs(fd - analytic) / scale;
}

}  // namespace hetnet::num
