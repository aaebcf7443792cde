#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "hetnet/core_model.hpp"
#include "hetnet/monopoly.hpp"
#include "hetnet/numerics.hpp"
#include "hetnet/parallel.hpp"

// Brute-force checks used by the tests and the `verify` subcommand. These
// deliberately share nothing with the closed-form solvers beyond the demand
// primitives, so agreement is evidence rather than tautology.
namespace hetnet::oracle {

/// Exhaustive single-provider optimum: scans bw_small over a uniform grid on
/// [floor, total_bw] and returns the best point. Uses the separate-service
/// objective when density > 1 and the pooled one otherwise, mirroring the
/// service structure the closed forms assume.
inline double grid_argmax_monopoly(const MarketParams& params, double total_bw,
                                   double floor, double density,
                                   Objective objective,
                                   std::size_t grid_points,
                                   unsigned threads = 1) {
  params.validate();
  if (grid_points < 100)
    throw std::invalid_argument("grid_argmax_monopoly: grid_points >= 100");
  if (!(floor >= 0.0) || floor > total_bw)
    throw std::invalid_argument("grid_argmax_monopoly: floor in [0, total_bw]");
  const double a = params.alpha;
  const auto value = [&](double bs) {
    if (density > 1.0) {
      const double cm = (total_bw - bs) * params.r0;
      const double cs = density * bs * params.r0;
      const double income = tier_income(cm, params.n_m, a) +
                            tier_income(cs, params.n_f, a);
      return objective == Objective::revenue ? income : income / (1.0 - a);
    }
    const double c = (total_bw - bs + density * bs) * params.r0;
    const double income = tier_income(c, params.n_m + params.n_f, a);
    return objective == Objective::revenue ? income : income / (1.0 - a);
  };
  const std::size_t n = grid_points;
  std::vector<double> vals(n);
  parallel_for(n, threads, [&](std::size_t i) {
    vals[i] = value(floor + (total_bw - floor) * static_cast<double>(i) / (n - 1));
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (vals[i] > vals[best]) best = i;
  return floor + (total_bw - floor) * static_cast<double>(best) / (n - 1);
}

struct DeviationCheck {
  bool holds = false;
  double worst_gain = 0.0;  ///< best relative revenue gain over all deviations
};

/// Definitional equilibrium test: scans unilateral small-bandwidth deviations
/// for every provider over a uniform grid and reports the largest relative
/// revenue improvement found. Separate service, pooled clearing prices.
inline DeviationCheck no_deviation_check(const MarketParams& params,
                                         std::span<const double> total_bws,
                                         std::span<const double> floors,
                                         std::span<const double> smalls,
                                         double density,
                                         std::size_t grid_points,
                                         unsigned threads = 1) {
  params.validate();
  if (grid_points < 100)
    throw std::invalid_argument("no_deviation_check: grid_points >= 100");
  const std::size_t n = total_bws.size();
  if (floors.size() != n || smalls.size() != n)
    throw std::invalid_argument("no_deviation_check: span sizes differ");
  const double a = params.alpha;
  const auto revenue_of = [&](std::size_t i, double own_small) {
    double cs = density * own_small * params.r0;
    double cm = (total_bws[i] - own_small) * params.r0;
    const double own_cs = cs, own_cm = cm;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      cs += density * smalls[j] * params.r0;
      cm += (total_bws[j] - smalls[j]) * params.r0;
    }
    double rev = 0.0;
    if (own_cm > 0.0 && cm > 0.0)
      rev += std::pow(cm / params.n_m, -a) * own_cm;
    if (own_cs > 0.0 && cs > 0.0)
      rev += std::pow(cs / params.n_f, -a) * own_cs;
    return rev;
  };

  DeviationCheck check;
  for (std::size_t i = 0; i < n; ++i) {
    const double base = revenue_of(i, smalls[i]);
    std::vector<double> gains(grid_points);
    parallel_for(grid_points, threads, [&](std::size_t k) {
      const double x = floors[i] + (total_bws[i] - floors[i]) *
                                       static_cast<double>(k) /
                                       (grid_points - 1);
      gains[k] = (revenue_of(i, x) - base) / std::max(std::abs(base), 1e-300);
    });
    for (double g : gains) check.worst_gain = std::max(check.worst_gain, g);
  }
  check.holds = check.worst_gain <= 1e-6;
  return check;
}

/// Central-difference check of an analytic derivative; returns the relative
/// error.
template <class F>
double fd_derivative_check(F&& fn, double x, double h, double analytic) {
  return num::fd_relative_error(fn, x, h, analytic);
}

}  // namespace hetnet::oracle
