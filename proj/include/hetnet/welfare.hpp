#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hetnet/core_model.hpp"
#include "hetnet/duopoly.hpp"
#include "hetnet/investment_game.hpp"
#include "hetnet/monopoly.hpp"
#include "hetnet/numerics.hpp"
#include "hetnet/parallel.hpp"

namespace hetnet {

/// Sum utility of a separate-service market at given aggregate macro/small
/// bandwidths. A tier with zero capacity contributes nothing: its users go
/// unserved rather than clearing at an unbounded price.
inline double separate_welfare(const MarketParams& params, double macro_bw,
                               double small_bw, double density) {
  return tier_utility_sum(macro_bw * params.r0, params.n_m, params.alpha) +
         tier_utility_sum(density * small_bw * params.r0, params.n_f,
                          params.alpha);
}

/// True when the floors force more total small-cell bandwidth than the
/// unconstrained equilibrium would choose, which is exactly when welfare is
/// lost relative to the unrestricted market.
inline bool loss_condition(const MarketParams& params,
                           std::span<const double> total_bws,
                           std::span<const double> floors, double density) {
  params.validate();
  if (!(density > 1.0))
    throw std::invalid_argument("loss_condition: density must be > 1");
  if (total_bws.size() != floors.size())
    throw std::invalid_argument("loss_condition: totals and floors sizes differ");
  double sum_bw = 0.0, sum_floor = 0.0;
  for (double b : total_bws) sum_bw += b;
  for (double f : floors) sum_floor += f;
  return interior_small_share(params, density) * sum_bw < sum_floor;
}

/// Guaranteed lower bound on equilibrium welfare under floors relative to the
/// unrestricted optimum: (eps n_f / (eps n_f + n_m))^alpha. Attained when
/// every provider is forced to put all bandwidth into small cells.
inline double ratio_bound(const MarketParams& params, double density) {
  params.validate();
  if (!(density > 1.0))
    throw std::invalid_argument("ratio_bound: density must be > 1");
  return std::pow(interior_small_share(params, density), params.alpha);
}

/// Amount of small-cell-only spectrum beyond which welfare loss is
/// unavoidable for any split: T = (B1o + B2o) eps n_f / n_m.
inline double new_band_threshold(const MarketParams& params, double legacy_bw_1,
                                 double legacy_bw_2, double density) {
  params.validate();
  if (!(density > 1.0))
    throw std::invalid_argument("new_band_threshold: density must be > 1");
  if (!(legacy_bw_1 >= 0.0) || !(legacy_bw_2 >= 0.0))
    throw std::invalid_argument("new_band_threshold: legacy bandwidth >= 0");
  return (legacy_bw_1 + legacy_bw_2) * density_gain(density, params.alpha) *
         params.n_f / params.n_m;
}

/// A regulator hands out `new_bw_total` of small-cell-only spectrum on top of
/// the providers' freely usable legacy bands. The split becomes each
/// provider's small-cell floor; effective totals are legacy + split.
struct NewBandScenario {
  double legacy_bw_1 = 0.0;
  double legacy_bw_2 = 0.0;
  double new_bw_total = 0.0;
  double split_1 = 0.0;
  double split_2 = 0.0;

  void validate() const {
    if (!(legacy_bw_1 > 0.0) || !(legacy_bw_2 > 0.0))
      throw std::invalid_argument(
          "NewBandScenario: legacy bandwidths must be > 0");
    if (!(new_bw_total >= 0.0))
      throw std::invalid_argument("NewBandScenario: new_bw_total must be >= 0");
    if (!(split_1 >= 0.0) || !(split_2 >= 0.0) || split_1 > new_bw_total ||
        std::abs(split_1 + split_2 - new_bw_total) >
            1e-12 * std::max(1.0, new_bw_total))
      throw std::invalid_argument(
          "NewBandScenario: split components must be >= 0 and sum to "
          "new_bw_total");
  }

  double total_1() const { return legacy_bw_1 + split_1; }
  double total_2() const { return legacy_bw_2 + split_2; }
};

struct WelfareComparison {
  double sw_unrestricted_opt = 0.0;  ///< optimum (= equilibrium) w/o floors
  double sw_restricted_opt = 0.0;    ///< planner optimum under the floors
  double sw_restricted_ne = 0.0;     ///< equilibrium welfare under the floors
  double threshold_t = 0.0;
  /// Interval of split_1 values that attain the unrestricted optimum; empty
  /// when the new band exceeds the threshold.
  std::optional<std::pair<double, double>> optimal_window;
};

/// Compares the three welfare scenarios for one bandwidth split. The planner
/// optimum only depends on the total small-cell bandwidth (welfare is concave
/// in it), so it sits at the larger of the unconstrained total and the summed
/// floors.
inline WelfareComparison three_scenario_welfare(const MarketParams& params,
                                                const NewBandScenario& scenario,
                                                double density) {
  params.validate();
  scenario.validate();
  if (!(density > 1.0))
    throw std::invalid_argument("three_scenario_welfare: density must be > 1");

  const double b1 = scenario.total_1();
  const double b2 = scenario.total_2();
  const double sum_bw = b1 + b2;
  const double share = interior_small_share(params, density);
  const double small_unconstrained = share * sum_bw;

  WelfareComparison cmp;
  cmp.sw_unrestricted_opt = separate_welfare(
      params, sum_bw - small_unconstrained, small_unconstrained, density);
  const double small_opt =
      std::max(small_unconstrained, scenario.split_1 + scenario.split_2);
  cmp.sw_restricted_opt =
      separate_welfare(params, sum_bw - small_opt, small_opt, density);

  const EquilibriumReport ne = constrained_ne(
      params, b1, b2, scenario.split_1, scenario.split_2, density);
  cmp.sw_restricted_ne = separate_welfare(
      params, sum_bw - ne.total_small_bw, ne.total_small_bw, density);

  cmp.threshold_t =
      new_band_threshold(params, scenario.legacy_bw_1, scenario.legacy_bw_2,
                         density);
  const double b = scenario.new_bw_total;
  if (b <= cmp.threshold_t * (1.0 + tol::kEq)) {
    const double gain = density_gain(density, params.alpha);
    const double lo =
        std::max(0.0, b - scenario.legacy_bw_2 * gain * params.n_f / params.n_m);
    const double hi =
        std::min(b, scenario.legacy_bw_1 * gain * params.n_f / params.n_m);
    cmp.optimal_window = std::make_pair(lo, hi);
  }
  return cmp;
}

struct SplitSweepPoint {
  double split_1 = 0.0;
  double sw_unrestricted_opt = 0.0;
  double sw_restricted_opt = 0.0;
  double sw_restricted_ne = 0.0;
};

/// Evaluates the three welfare scenarios along split_1 in [0, new_bw_total].
inline std::vector<SplitSweepPoint> sweep_split(const MarketParams& params,
                                                double legacy_bw_1,
                                                double legacy_bw_2,
                                                double new_bw_total,
                                                double density,
                                                std::size_t steps,
                                                unsigned threads = 1) {
  if (steps < 2) throw std::invalid_argument("sweep_split: steps must be >= 2");
  std::vector<SplitSweepPoint> points(steps);
  parallel_for(steps, threads, [&](std::size_t k) {
    const double b1n =
        new_bw_total * static_cast<double>(k) / (steps - 1);
    NewBandScenario sc{legacy_bw_1, legacy_bw_2, new_bw_total, b1n,
                       new_bw_total - b1n};
    const auto cmp = three_scenario_welfare(params, sc, density);
    points[k] = {b1n, cmp.sw_unrestricted_opt, cmp.sw_restricted_opt,
                 cmp.sw_restricted_ne};
  });
  return points;
}

enum class SpStrategy { revenue_max, welfare_max };

struct BinaryGameWelfare {
  double sw_both_invest = 0.0;
  double sw_one_invests = 0.0;  ///< IN and NI coincide by symmetry
  double sw_none_invest = 0.0;
  Allocation one_investor_alloc;
};

namespace detail {

// Welfare of the one-investor profile as a function of the investor's
// small-cell bandwidth, gross of deployment cost. Below the rate-equalizing
// point the tiers clear separately; above it the market pools at one rate.
// The two pieces join smoothly, so the whole curve is concave.
inline double one_investor_welfare_gross(const MarketParams& p, double bandwidth,
                                         double density0, double x) {
  const double boundary = 2.0 * bandwidth * p.n_f /
                          (density0 * p.n_m + p.n_f);
  if (x <= boundary) {
    return separate_welfare(p, 2.0 * bandwidth - x, x, density0);
  }
  const double c_total = (2.0 * bandwidth + (density0 - 1.0) * x) * p.r0;
  return tier_utility_sum(c_total, p.n_m + p.n_f, p.alpha);
}

}  // namespace detail

/// Social welfare of each investment profile at the bandwidth allocations the
/// given strategy induces. Under welfare maximization the lone investor's
/// split is found by golden-section search (no closed form); the two-investor
/// and no-investor profiles induce the same allocations under either
/// strategy.
inline BinaryGameWelfare binary_game_welfare(const MarketParams& params,
                                             double bandwidth, double density0,
                                             double invest_cost,
                                             SpStrategy strategy) {
  detail::require_symmetric_game(params, bandwidth, density0);
  if (!(invest_cost >= 0.0))
    throw std::invalid_argument("binary_game_welfare: invest_cost must be >= 0");
  BinaryGameWelfare out;

  const double share = interior_small_share(params, density0);
  const double small_both = 2.0 * bandwidth * share;
  out.sw_both_invest =
      separate_welfare(params, 2.0 * bandwidth - small_both, small_both,
                       density0) -
      2.0 * density0 * invest_cost;

  out.sw_none_invest = tier_utility_sum(2.0 * bandwidth * params.r0,
                                        params.n_m + params.n_f, params.alpha);

  double x;
  if (strategy == SpStrategy::revenue_max) {
    x = payoff_one_invests(params, bandwidth, density0, invest_cost)
            .investor_alloc.bw_small;
  } else {
    x = num::golden_max(
        [&](double t) {
          return detail::one_investor_welfare_gross(params, bandwidth, density0,
                                                    t);
        },
        0.0, bandwidth, 1e-10 * bandwidth);
  }
  out.one_investor_alloc = {bandwidth - x, x};
  out.sw_one_invests =
      detail::one_investor_welfare_gross(params, bandwidth, density0, x) -
      density0 * invest_cost;
  return out;
}

}  // namespace hetnet
