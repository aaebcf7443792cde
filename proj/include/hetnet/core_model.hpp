#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetnet {

/// Raised when a numerical routine fails in a way that indicates a bug or an
/// ill-posed instance (bracket failure, non-convergent iteration). Input
/// validation problems use std::invalid_argument instead.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace tol {
// Tolerance policy shared across the library: relative 1e-9 for
// equality-style invariants, 1e-8 for market-clearing residuals, and an
// absolute slack of 1e-12 * total bandwidth for floor comparisons.
inline constexpr double kEq = 1e-9;
inline constexpr double kClearing = 1e-8;
inline constexpr double kFloorSlack = 1e-12;
inline constexpr double kAlphaMargin = 1e-6;
}  // namespace tol

/// Market-wide environment: utility curvature, spectral efficiency and the
/// densities of the two user populations.
struct MarketParams {
  double alpha;  ///< utility curvature, in [1e-6, 1 - 1e-6]
  double r0;     ///< rate per unit bandwidth
  double n_m;    ///< mobile-user density (macro-only users)
  double n_f;    ///< fixed-user density (may use either tier)

  void validate() const {
    if (!(alpha >= tol::kAlphaMargin) || !(alpha <= 1.0 - tol::kAlphaMargin))
      throw std::invalid_argument(
          "MarketParams.alpha: must lie in [1e-6, 1 - 1e-6]");
    if (!(r0 > 0.0)) throw std::invalid_argument("MarketParams.r0: must be > 0");
    if (!(n_m > 0.0))
      throw std::invalid_argument("MarketParams.n_m: must be > 0");
    if (!(n_f > 0.0))
      throw std::invalid_argument("MarketParams.n_f: must be > 0");
  }
};

/// Per-provider endowment: licensed bandwidth, the regulatory small-cell
/// floor, and the deployed small-cell density (small cells per macro cell).
struct ProviderConfig {
  double total_bw;
  double small_floor = 0.0;
  double density = 0.0;

  void validate() const {
    if (!(total_bw > 0.0))
      throw std::invalid_argument("ProviderConfig.total_bw: must be > 0");
    if (!(small_floor >= 0.0) || small_floor > total_bw * (1.0 + tol::kEq))
      throw std::invalid_argument(
          "ProviderConfig.small_floor: must lie in [0, total_bw]");
    if (!(density >= 0.0))
      throw std::invalid_argument("ProviderConfig.density: must be >= 0");
  }
};

/// A provider's bandwidth split. Capacities are derived: the macro tier
/// carries bw_macro * r0, the small tier density * bw_small * r0.
struct Allocation {
  double bw_macro = 0.0;
  double bw_small = 0.0;

  double total() const { return bw_macro + bw_small; }

  void validate_against(const ProviderConfig& owner) const {
    if (!(bw_macro >= 0.0) || !(bw_small >= 0.0))
      throw std::invalid_argument("Allocation: bandwidths must be >= 0");
    if (total() > owner.total_bw * (1.0 + tol::kEq))
      throw std::invalid_argument(
          "Allocation: bw_macro + bw_small exceeds the provider's total_bw");
  }

  double capacity_macro(const MarketParams& p) const { return bw_macro * p.r0; }
  double capacity_small(const MarketParams& p, double density) const {
    return density * bw_small * p.r0;
  }
};

enum class ServiceMode { separate, mixed };

// ---------------------------------------------------------------------------
// alpha-fair primitives
// ---------------------------------------------------------------------------

/// u(r) = r^(1-alpha) / (1-alpha); u(0) = 0.
inline double utility(double r, double alpha) {
  if (r == 0.0) return 0.0;
  return std::pow(r, 1.0 - alpha) / (1.0 - alpha);
}

/// u'(r) = r^(-alpha).
inline double marginal_utility(double r, double alpha) {
  return std::pow(r, -alpha);
}

/// u''(r) = -alpha * r^(-alpha-1).
inline double second_utility(double r, double alpha) {
  return -alpha * std::pow(r, -alpha - 1.0);
}

/// Rate demanded by one user facing price p: D(p) = (1/p)^(1/alpha).
inline double demand(double p, double alpha) {
  if (!(p > 0.0)) throw std::invalid_argument("demand: price must be positive");
  return std::pow(1.0 / p, 1.0 / alpha);
}

/// Best attainable net payoff u(D(p)) - p D(p) = alpha/(1-alpha) p^(1-1/alpha).
inline double net_payoff(double p, double alpha) {
  if (!(p > 0.0))
    throw std::invalid_argument("net_payoff: price must be positive");
  return alpha / (1.0 - alpha) * std::pow(p, 1.0 - 1.0 / alpha);
}

/// Price equalizing total demand and supply: p = (capacity/user_mass)^(-alpha).
inline double market_clearing_price(double capacity, double user_mass,
                                    double alpha) {
  if (!(user_mass > 0.0))
    throw std::invalid_argument("market_clearing_price: user_mass must be > 0");
  if (!(capacity > 0.0))
    throw std::invalid_argument("market_clearing_price: no supply");
  return std::pow(capacity / user_mass, -alpha);
}

// Clearing-tier accounting in power form. Income p*C = C^(1-a) K^a and sum
// utility K u(C/K) = C^(1-a) K^a / (1-a); both vanish continuously at C = 0,
// which models a tier that is not offered (its users go unserved).
inline double tier_income(double capacity, double user_mass, double alpha) {
  if (capacity <= 0.0) return 0.0;
  return std::pow(capacity, 1.0 - alpha) * std::pow(user_mass, alpha);
}

inline double tier_utility_sum(double capacity, double user_mass,
                               double alpha) {
  return tier_income(capacity, user_mass, alpha) / (1.0 - alpha);
}

// ---------------------------------------------------------------------------
// Full-profile market outcome
// ---------------------------------------------------------------------------

/// Clearing prices, per-user rates, served masses, per-provider net revenue
/// and aggregate welfare for one bandwidth-allocation profile. Prices are
/// pooled per tier; a provider-tier with zero capacity is "not offered" and
/// carries no price.
struct MarketOutcome {
  std::vector<std::optional<double>> price_macro;
  std::vector<std::optional<double>> price_small;
  double rate_macro = 0.0;  ///< per-user macro rate (pooled); mixed: common rate
  double rate_small = 0.0;  ///< per-user small rate (pooled); mixed: common rate
  std::vector<double> mass_macro;
  std::vector<double> mass_small;
  std::vector<double> revenue;  ///< net of density * invest cost
  double welfare = 0.0;
};

/// Evaluates the market at a fixed allocation profile under pooled
/// market-clearing prices.
///
/// separate: small cells serve the fixed users, macro cells the mobile users,
/// each tier clearing on its own pooled capacity. mixed: all capacity serves
/// all users at one common rate, masses filling in proportion to capacity.
inline MarketOutcome profile_outcome(const MarketParams& params,
                                     const std::vector<ProviderConfig>& providers,
                                     const std::vector<Allocation>& allocs,
                                     const std::vector<double>& invest_costs,
                                     ServiceMode mode) {
  params.validate();
  const std::size_t n = providers.size();
  if (allocs.size() != n || (!invest_costs.empty() && invest_costs.size() != n))
    throw std::invalid_argument(
        "profile_outcome: providers, allocs and invest_costs sizes differ");
  double c_macro = 0.0, c_small = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    providers[i].validate();
    allocs[i].validate_against(providers[i]);
    c_macro += allocs[i].capacity_macro(params);
    c_small += allocs[i].capacity_small(params, providers[i].density);
  }

  MarketOutcome out;
  out.price_macro.resize(n);
  out.price_small.resize(n);
  out.mass_macro.assign(n, 0.0);
  out.mass_small.assign(n, 0.0);
  out.revenue.assign(n, 0.0);

  const double a = params.alpha;
  double invest_total = 0.0;

  if (mode == ServiceMode::separate) {
    if (c_macro <= 0.0 && params.n_m > 0.0)
      throw SolverError(
          "profile_outcome: macro tier has zero capacity but positive mobile "
          "user mass");
    if (c_small <= 0.0 && params.n_f > 0.0)
      throw SolverError(
          "profile_outcome: small tier has zero capacity but positive fixed "
          "user mass");
    out.rate_macro = c_macro / params.n_m;
    out.rate_small = c_small / params.n_f;
    const double p_m = market_clearing_price(c_macro, params.n_m, a);
    const double p_s = market_clearing_price(c_small, params.n_f, a);
    for (std::size_t i = 0; i < n; ++i) {
      const double cm = allocs[i].capacity_macro(params);
      const double cs = allocs[i].capacity_small(params, providers[i].density);
      if (cm > 0.0) out.price_macro[i] = p_m;
      if (cs > 0.0) out.price_small[i] = p_s;
      out.mass_macro[i] = cm / out.rate_macro;
      out.mass_small[i] = cs / out.rate_small;
      const double cost =
          invest_costs.empty() ? 0.0 : providers[i].density * invest_costs[i];
      out.revenue[i] = p_m * cm + p_s * cs - cost;
      invest_total += cost;
    }
    out.welfare = tier_utility_sum(c_macro, params.n_m, a) +
                  tier_utility_sum(c_small, params.n_f, a) - invest_total;
  } else {
    const double c_total = c_macro + c_small;
    const double users = params.n_m + params.n_f;
    if (c_total <= 0.0)
      throw SolverError(
          "profile_outcome: zero total capacity with positive user mass");
    const double rate = c_total / users;
    out.rate_macro = rate;
    out.rate_small = rate;
    const double p = market_clearing_price(c_total, users, a);
    for (std::size_t i = 0; i < n; ++i) {
      const double cm = allocs[i].capacity_macro(params);
      const double cs = allocs[i].capacity_small(params, providers[i].density);
      if (cm > 0.0) out.price_macro[i] = p;
      if (cs > 0.0) out.price_small[i] = p;
      out.mass_macro[i] = cm / rate;
      out.mass_small[i] = cs / rate;
      const double cost =
          invest_costs.empty() ? 0.0 : providers[i].density * invest_costs[i];
      out.revenue[i] = p * (cm + cs) - cost;
      invest_total += cost;
    }
    out.welfare = tier_utility_sum(c_total, users, a) - invest_total;
  }
  return out;
}

}  // namespace hetnet
