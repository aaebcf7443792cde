#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "hetnet/core_model.hpp"
#include "hetnet/numerics.hpp"

namespace hetnet {

enum class Objective { revenue, welfare };

enum class ServiceStructure { separate, mixed, macro_only };

/// Density-dependent capacity advantage of small cells over macro cells:
/// eps = density^(1/alpha - 1). Greater than 1 exactly when density > 1.
/// Overflows to +inf for extreme curvature; prefer the log/ratio forms below
/// wherever eps enters a ratio or a product.
inline double density_gain(double density, double alpha) {
  return std::pow(density, 1.0 / alpha - 1.0);
}

/// log(n_f * density^(1/alpha-1) + n_m), evaluated so that an overflowing
/// power degrades to a clean underflow instead of inf/NaN. Requires
/// density > 1.
inline double log_served_gain(const MarketParams& p, double density) {
  const double ex = (1.0 / p.alpha - 1.0) * std::log(density);
  return std::log(p.n_f) + ex + std::log1p(p.n_m / p.n_f * std::exp(-ex));
}

/// Share of the total bandwidth that an unconstrained provider sends to small
/// cells when they are worth deploying: eps n_f / (eps n_f + n_m), computed
/// as 1 / (1 + (n_m/n_f) density^-(1/alpha-1)) so extreme curvatures saturate
/// at 1 instead of producing inf/inf.
inline double interior_small_share(const MarketParams& p, double density) {
  const double inv_gain = std::pow(density, -(1.0 / p.alpha - 1.0));
  return 1.0 / (1.0 + p.n_m / p.n_f * inv_gain);
}

struct MonopolySolution {
  Allocation alloc;
  std::optional<double> price_macro;
  std::optional<double> price_small;
  double density = 0.0;
  double objective_value = 0.0;
  ServiceStructure service_structure = ServiceStructure::separate;
  bool binding_floor = false;
};

struct InvestmentSolution {
  double density_opt = 0.0;  ///< 0, or a stationary density > 1
  double objective_value = 0.0;
  std::vector<std::pair<double, double>> stationary_candidates;
  double no_invest_threshold = 0.0;  ///< cost at/above which staying out wins
};

namespace detail {

// Income (revenue gross of deployment cost) of a single provider running
// separate service with split (B - bs, bs), under market-clearing prices.
inline double monopoly_separate_income(const MarketParams& p, double total_bw,
                                       double bw_small, double density) {
  const double cm = (total_bw - bw_small) * p.r0;
  const double cs = density * bw_small * p.r0;
  return tier_income(cm, p.n_m, p.alpha) + tier_income(cs, p.n_f, p.alpha);
}

inline double monopoly_separate_utility(const MarketParams& p, double total_bw,
                                        double bw_small, double density) {
  const double cm = (total_bw - bw_small) * p.r0;
  const double cs = density * bw_small * p.r0;
  return tier_utility_sum(cm, p.n_m, p.alpha) +
         tier_utility_sum(cs, p.n_f, p.alpha);
}

// Gross income as a function of deployment density at the induced optimal
// split: (B R0)^(1-a) (n_m + eps n_f)^a. The gain term is exponentiated in
// log space; the result itself stays finite (it grows like density^(1-a)).
inline double invest_income(const MarketParams& p, double total_bw,
                            double density) {
  return std::pow(total_bw * p.r0, 1.0 - p.alpha) *
         std::exp(p.alpha * log_served_gain(p, density));
}

// Density derivative of invest_income (the stationarity left-hand side for
// revenue); the welfare analogue drops the (1 - alpha) factor.
inline double invest_stationarity_lhs(const MarketParams& p, double total_bw,
                                      double density, Objective objective) {
  const double a = p.alpha;
  const double fac = objective == Objective::revenue ? 1.0 - a : 1.0;
  return std::exp(std::log(p.n_f * fac) +
                  (1.0 - a) * std::log(total_bw * p.r0) +
                  (1.0 / a - 2.0) * std::log(density) +
                  (a - 1.0) * log_served_gain(p, density));
}

inline double invest_objective(const MarketParams& p, double total_bw,
                               double density, double invest_cost,
                               Objective objective) {
  double value;
  if (density == 0.0) {
    value = std::pow(total_bw * p.r0, 1.0 - p.alpha) *
            std::pow(p.n_m + p.n_f, p.alpha);
  } else {
    value = invest_income(p, total_bw, density);
  }
  if (objective == Objective::welfare) value /= (1.0 - p.alpha);
  return value - invest_cost * density;
}

}  // namespace detail

/// Revenue/welfare-optimal bandwidth split for one provider with deployed
/// small cells (density > 1) and a small-cell floor. The unconstrained
/// optimum is kept whenever it satisfies the floor; otherwise the provider
/// sits exactly at the floor. Both objectives yield the same split.
inline MonopolySolution constrained_allocation(const MarketParams& params,
                                               double total_bw, double floor,
                                               double density,
                                               Objective objective) {
  params.validate();
  ProviderConfig owner{total_bw, floor, density};
  owner.validate();
  if (!(density > 1.0))
    throw std::invalid_argument(
        "constrained_allocation: density must be > 1; use "
        "allocation_given_density for density <= 1");

  MonopolySolution sol;
  sol.density = density;
  sol.service_structure = ServiceStructure::separate;
  const double interior = interior_small_share(params, density) * total_bw;
  if (floor <= interior + tol::kFloorSlack * total_bw) {
    sol.alloc = {total_bw - interior, interior};
    sol.binding_floor = false;
  } else {
    sol.alloc = {total_bw - floor, floor};
    sol.binding_floor = true;
  }
  const double cm = sol.alloc.capacity_macro(params);
  const double cs = sol.alloc.capacity_small(params, density);
  if (cm > 0.0) sol.price_macro = market_clearing_price(cm, params.n_m, params.alpha);
  if (cs > 0.0) sol.price_small = market_clearing_price(cs, params.n_f, params.alpha);
  sol.objective_value =
      objective == Objective::revenue
          ? detail::monopoly_separate_income(params, total_bw,
                                             sol.alloc.bw_small, density)
          : detail::monopoly_separate_utility(params, total_bw,
                                              sol.alloc.bw_small, density);
  return sol;
}

/// Optimal split and prices for a provider with no floor but a given
/// deployment density. For density > 1 the provider runs separate service at
/// the interior split; for density <= 1 all bandwidth goes to macro cells and
/// the whole population shares one rate. Revenue is net of density * I_S.
inline MonopolySolution allocation_given_density(const MarketParams& params,
                                                 double total_bw,
                                                 double density,
                                                 double invest_cost) {
  params.validate();
  ProviderConfig owner{total_bw, 0.0, density};
  owner.validate();
  if (!(invest_cost >= 0.0))
    throw std::invalid_argument(
        "allocation_given_density: invest_cost must be >= 0");

  MonopolySolution sol;
  sol.density = density;
  if (density > 1.0) {
    const double bs = interior_small_share(params, density) * total_bw;
    sol.alloc = {total_bw - bs, bs};
    sol.service_structure = ServiceStructure::separate;
    sol.price_macro = market_clearing_price(sol.alloc.capacity_macro(params),
                                            params.n_m, params.alpha);
    sol.price_small = market_clearing_price(
        sol.alloc.capacity_small(params, density), params.n_f, params.alpha);
    sol.objective_value =
        detail::monopoly_separate_income(params, total_bw, bs, density) -
        density * invest_cost;
  } else {
    sol.alloc = {total_bw, 0.0};
    sol.service_structure = ServiceStructure::macro_only;
    sol.price_macro = market_clearing_price(
        total_bw * params.r0, params.n_m + params.n_f, params.alpha);
    sol.price_small = std::nullopt;  // not offered
    sol.objective_value = tier_income(total_bw * params.r0,
                                      params.n_m + params.n_f, params.alpha) -
                          density * invest_cost;
  }
  return sol;
}

/// Curvature value below which the income curve is convex-then-concave in the
/// density (two stationary points become possible), together with the cost
/// threshold at/above which the stationarity equation has no solution and
/// staying out of small cells is optimal.
inline std::pair<double, double> no_invest_threshold(const MarketParams& params,
                                                     double total_bw) {
  params.validate();
  if (!(total_bw > 0.0))
    throw std::invalid_argument("no_invest_threshold: total_bw must be > 0");
  const double nf = params.n_f, nm = params.n_m;
  // (n_f + n_m)(1 - 2a) = n_f (1 - a)^2 has one root in (0, 1/2).
  const double alpha0 = num::bisect(
      [&](double a) { return (nf + nm) * (1.0 - 2.0 * a) - nf * (1.0 - a) * (1.0 - a); },
      1e-12, 0.5, 1e-14);
  const double a = params.alpha;
  double threshold;
  if (a >= alpha0) {
    threshold = nf * (1.0 - a) * std::pow(total_bw * params.r0, 1.0 - a) *
                std::pow(nf + nm, a - 1.0);
  } else {
    // Peak of the stationarity curve sits at lambda0 solving
    // (n_f + n_m lambda^(1 - 1/a))(1 - 2a) = n_f (1 - a)^2.
    const double target = nf * (1.0 - a) * (1.0 - a);
    const double lam0 = num::bisect(
        [&](double lam) {
          return (nf + nm * std::pow(lam, 1.0 - 1.0 / a)) * (1.0 - 2.0 * a) -
                 target;
        },
        1.0 + 1e-12, 1e12, 1e-13);
    threshold =
        detail::invest_stationarity_lhs(params, total_bw, lam0, Objective::revenue);
  }
  return {alpha0, threshold};
}

/// Optimal small-cell deployment density under a per-unit-density cost.
/// Collects every stationary density above 1 (the stationarity curve can rise
/// then fall for small curvature, so up to two roots), compares each against
/// staying out, and reports the best. density_cap bounds the search; when the
/// objective is still rising there (only possible at negligible cost) the cap
/// itself is kept as a candidate. The break-even cost does not depend on
/// invest_cost, so sweeps may skip recomputing it (the field is then NaN).
inline InvestmentSolution optimal_investment(const MarketParams& params,
                                             double total_bw,
                                             double invest_cost,
                                             Objective objective,
                                             double density_cap = 1e6,
                                             bool compute_break_even = true) {
  params.validate();
  if (!(total_bw > 0.0))
    throw std::invalid_argument("optimal_investment: total_bw must be > 0");
  if (!(invest_cost >= 0.0))
    throw std::invalid_argument("optimal_investment: invest_cost must be >= 0");
  if (!(density_cap > 1.0 + 1e-9))
    throw std::invalid_argument("optimal_investment: density_cap must be > 1");

  InvestmentSolution sol;
  const auto stationarity = [&](double lam) {
    return detail::invest_stationarity_lhs(params, total_bw, lam, objective) -
           invest_cost;
  };
  std::vector<double> candidates;
  const double lo = 1.0 + 1e-9;
  for (const auto& [blo, bhi] :
       num::sign_change_brackets(stationarity, lo, density_cap, 512, true)) {
    candidates.push_back(blo == bhi ? blo
                                    : num::bisect(stationarity, blo, bhi, 1e-10));
  }
  if (stationarity(density_cap) > 0.0) candidates.push_back(density_cap);

  double best_density = 0.0;
  double best_value =
      detail::invest_objective(params, total_bw, 0.0, invest_cost, objective);
  sol.stationary_candidates.emplace_back(0.0, best_value);
  for (double lam : candidates) {
    const double v =
        detail::invest_objective(params, total_bw, lam, invest_cost, objective);
    sol.stationary_candidates.emplace_back(lam, v);
    if (v > best_value) {
      best_value = v;
      best_density = lam;
    }
  }
  sol.density_opt = best_density;
  sol.objective_value = best_value;

  if (!compute_break_even) {
    sol.no_invest_threshold = std::numeric_limits<double>::quiet_NaN();
    return sol;
  }
  // Exact break-even cost: the boundary of the set of costs where some
  // stationary density beats staying out. Above the sufficient-condition
  // threshold no stationary point exists at all.
  const double ceiling = no_invest_threshold(params, total_bw).second /
                         (objective == Objective::welfare ? 1.0 - params.alpha
                                                          : 1.0);
  double be_lo = 0.0, be_hi = ceiling;
  for (int i = 0; i < 100 && be_hi - be_lo > 1e-10 * std::max(1.0, be_hi); ++i) {
    const double mid = 0.5 * (be_lo + be_hi);
    const auto g = [&](double lam) {
      return detail::invest_stationarity_lhs(params, total_bw, lam, objective) -
             mid;
    };
    double best = detail::invest_objective(params, total_bw, 0.0, mid, objective);
    bool invests = false;
    for (const auto& [blo, bhi] :
         num::sign_change_brackets(g, lo, density_cap, 512, true)) {
      const double lam = blo == bhi ? blo : num::bisect(g, blo, bhi, 1e-10);
      if (detail::invest_objective(params, total_bw, lam, mid, objective) > best)
        invests = true;
    }
    if (!invests && g(density_cap) > 0.0 &&
        detail::invest_objective(params, total_bw, density_cap, mid, objective) >
            best)
      invests = true;
    if (invests)
      be_lo = mid;
    else
      be_hi = mid;
  }
  sol.no_invest_threshold = 0.5 * (be_lo + be_hi);
  return sol;
}

}  // namespace hetnet
