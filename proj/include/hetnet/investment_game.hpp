#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hetnet/core_model.hpp"
#include "hetnet/monopoly.hpp"
#include "hetnet/numerics.hpp"

namespace hetnet {

/// Strategy profile of the binary invest-or-not game, first letter = SP 1.
enum class InvestProfile { II, IN, NI, NN };

inline const char* to_string(InvestProfile p) {
  switch (p) {
    case InvestProfile::II: return "II";
    case InvestProfile::IN: return "IN";
    case InvestProfile::NI: return "NI";
    case InvestProfile::NN: return "NN";
  }
  return "?";
}

enum class GameRegion { both_invest, one_invests, none_invest, mixed_or_none };

inline const char* to_string(GameRegion r) {
  switch (r) {
    case GameRegion::both_invest: return "both_invest";
    case GameRegion::one_invests: return "one_invests";
    case GameRegion::none_invest: return "none_invest";
    case GameRegion::mixed_or_none: return "mixed_or_none";
  }
  return "?";
}

struct OneInvestorOutcome {
  double s_investor = 0.0;   ///< net of deployment cost
  double s_bystander = 0.0;
  Allocation investor_alloc;
  bool separate_service = true;
};

struct ProfileDetail {
  std::array<Allocation, 2> allocs;
  std::optional<double> price_macro;
  std::optional<double> price_small;
};

struct BinaryGame {
  double bandwidth = 0.0;  ///< common per-provider bandwidth (symmetric game)
  double invest_density = 0.0;
  double invest_cost = 0.0;
  /// payoffs[a1][a2] with 0 = invest, 1 = stay out; .first is SP 1's revenue.
  std::array<std::array<std::pair<double, double>, 2>, 2> payoffs{};
  std::array<std::array<ProfileDetail, 2>, 2> details{};

  const std::pair<double, double>& payoff(InvestProfile p) const {
    switch (p) {
      case InvestProfile::II: return payoffs[0][0];
      case InvestProfile::IN: return payoffs[0][1];
      case InvestProfile::NI: return payoffs[1][0];
      default: return payoffs[1][1];
    }
  }
};

struct GameEquilibria {
  std::vector<InvestProfile> pure_ne;  ///< deviation-proof profiles, ties included
  GameRegion region_label = GameRegion::mixed_or_none;
};

namespace detail {

inline void require_symmetric_game(const MarketParams& params, double bandwidth,
                                   double density0) {
  params.validate();
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("investment game: bandwidth must be > 0");
  if (!(density0 > 1.0))
    throw std::invalid_argument("investment game: density0 must be > 1");
}

}  // namespace detail

/// Per-provider revenue when both symmetric providers deploy at density0:
/// 2^(-a) (B R0)^(1-a) (eps0 n_f + n_m)^a - density0 * I_S each.
inline std::pair<double, double> payoff_both_invest(const MarketParams& params,
                                                    double bandwidth,
                                                    double density0,
                                                    double invest_cost) {
  detail::require_symmetric_game(params, bandwidth, density0);
  if (!(invest_cost >= 0.0))
    throw std::invalid_argument("payoff_both_invest: invest_cost must be >= 0");
  const double a = params.alpha;
  const double s = std::pow(2.0, -a) * std::pow(bandwidth * params.r0, 1.0 - a) *
                       std::exp(a * log_served_gain(params, density0)) -
                   density0 * invest_cost;
  return {s, s};
}

/// Per-provider revenue when neither provider deploys: a single pooled macro
/// market over the whole population, constant in the deployment cost.
inline std::pair<double, double> payoff_none_invest(const MarketParams& params,
                                                    double bandwidth) {
  params.validate();
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("payoff_none_invest: bandwidth must be > 0");
  const double a = params.alpha;
  const double s = std::pow(2.0, -a) * std::pow(bandwidth * params.r0, 1.0 - a) *
                   std::pow(params.n_m + params.n_f, a);
  return {s, s};
}

/// Revenues when exactly one provider deploys. With n_f > density0 * n_m the
/// investor keeps separate service and its small-cell bandwidth solves a
/// one-dimensional stationarity equation (clipped at B); otherwise it moves
/// all bandwidth to small cells and the market pools at a common rate.
inline OneInvestorOutcome payoff_one_invests(const MarketParams& params,
                                             double bandwidth, double density0,
                                             double invest_cost) {
  detail::require_symmetric_game(params, bandwidth, density0);
  if (!(invest_cost >= 0.0))
    throw std::invalid_argument("payoff_one_invests: invest_cost must be >= 0");
  const double a = params.alpha;
  const double r0 = params.r0;
  const double b = bandwidth;
  OneInvestorOutcome out;
  if (params.n_f > density0 * params.n_m) {
    out.separate_service = true;
    // Marginal macro revenue (left) equals marginal small revenue (right);
    // the left side increases in x and the right side decreases, so a single
    // crossing exists in (0, 2B).
    const auto foc = [&](double x) {
      const double rm = (2.0 * b - x) * r0 / params.n_m;
      const double lhs = std::pow(rm, -a) +
                         a * b * r0 / ((1.0 - a) * params.n_m) *
                             std::pow(rm, -a - 1.0);
      const double rhs =
          density0 * std::pow(density0 * x * r0 / params.n_f, -a);
      return lhs - rhs;
    };
    const double eps_x = 1e-9 * b;
    double root = 2.0 * b;  // falls back to the clip when no crossing is found
    const auto brackets =
        num::sign_change_brackets(foc, eps_x, 2.0 * b - eps_x, 512, false);
    if (!brackets.empty()) {
      const auto& [lo, hi] = brackets.front();
      root = lo == hi ? lo : num::bisect(foc, lo, hi, 1e-13);
    } else if (foc(2.0 * b - eps_x) < 0.0) {
      throw SolverError(
          "payoff_one_invests: stationarity bracket failure in the "
          "separate-service branch");
    }
    const double x = std::min(root, b);
    const double rm = (2.0 * b - x) * r0 / params.n_m;
    const double rs = density0 * x * r0 / params.n_f;
    out.investor_alloc = {b - x, x};
    out.s_investor = density0 * x * r0 * std::pow(rs, -a) +
                     (b - x) * r0 * std::pow(rm, -a) - density0 * invest_cost;
    out.s_bystander = b * r0 * std::pow(rm, -a);
  } else {
    out.separate_service = false;
    out.investor_alloc = {0.0, b};
    const double rate =
        (density0 + 1.0) * b * r0 / (params.n_m + params.n_f);
    const double p = std::pow(rate, -a);
    out.s_investor = density0 * b * r0 * p - density0 * invest_cost;
    out.s_bystander = b * r0 * p;
  }
  return out;
}

/// Builds the 2x2 payoff matrix and enumerates its pure equilibria by the two
/// unilateral deviation checks per profile (ties count as equilibria).
inline std::pair<BinaryGame, GameEquilibria> solve_binary_game(
    const MarketParams& params, double bandwidth, double density0,
    double invest_cost) {
  detail::require_symmetric_game(params, bandwidth, density0);
  BinaryGame game;
  game.bandwidth = bandwidth;
  game.invest_density = density0;
  game.invest_cost = invest_cost;

  const auto both = payoff_both_invest(params, bandwidth, density0, invest_cost);
  const auto none = payoff_none_invest(params, bandwidth);
  const auto one = payoff_one_invests(params, bandwidth, density0, invest_cost);
  game.payoffs[0][0] = both;
  game.payoffs[1][1] = none;
  game.payoffs[0][1] = {one.s_investor, one.s_bystander};
  game.payoffs[1][0] = {one.s_bystander, one.s_investor};

  const double share = interior_small_share(params, density0);
  const Allocation invested{bandwidth * (1.0 - share), bandwidth * share};
  const Allocation idle{bandwidth, 0.0};
  game.details[0][0].allocs = {invested, invested};
  game.details[1][1].allocs = {idle, idle};
  game.details[0][1].allocs = {one.investor_alloc, idle};
  game.details[1][0].allocs = {idle, one.investor_alloc};
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2) {
      auto& det = game.details[a1][a2];
      const double cs =
          (det.allocs[0].bw_small + det.allocs[1].bw_small) * density0 *
          params.r0;
      const double cm =
          (det.allocs[0].bw_macro + det.allocs[1].bw_macro) * params.r0;
      const bool pooled = (a1 != a2) && params.n_f <= density0 * params.n_m;
      if (a1 == 1 && a2 == 1) {
        det.price_macro =
            market_clearing_price(cm, params.n_m + params.n_f, params.alpha);
      } else if (pooled) {
        const double p = market_clearing_price(
            cm + cs, params.n_m + params.n_f, params.alpha);
        if (cm > 0.0) det.price_macro = p;
        det.price_small = p;
      } else {
        if (cm > 0.0)
          det.price_macro =
              market_clearing_price(cm, params.n_m, params.alpha);
        if (cs > 0.0)
          det.price_small =
              market_clearing_price(cs, params.n_f, params.alpha);
      }
    }

  GameEquilibria eq;
  const double tie = 1e-9;
  const auto is_ne = [&](int a1, int a2) {
    const double s1 = game.payoffs[a1][a2].first;
    const double s2 = game.payoffs[a1][a2].second;
    return s1 >= game.payoffs[1 - a1][a2].first - tie &&
           s2 >= game.payoffs[a1][1 - a2].second - tie;
  };
  if (is_ne(0, 0)) eq.pure_ne.push_back(InvestProfile::II);
  if (is_ne(0, 1)) eq.pure_ne.push_back(InvestProfile::IN);
  if (is_ne(1, 0)) eq.pure_ne.push_back(InvestProfile::NI);
  if (is_ne(1, 1)) eq.pure_ne.push_back(InvestProfile::NN);

  const auto has = [&](InvestProfile p) {
    for (auto q : eq.pure_ne)
      if (q == p) return true;
    return false;
  };
  if (has(InvestProfile::II))
    eq.region_label = GameRegion::both_invest;
  else if (has(InvestProfile::IN) || has(InvestProfile::NI))
    eq.region_label = GameRegion::one_invests;
  else if (has(InvestProfile::NN))
    eq.region_label = GameRegion::none_invest;
  else
    eq.region_label = GameRegion::mixed_or_none;
  return {game, eq};
}

struct CostSweepPoint {
  double invest_cost = 0.0;
  double s_both = 0.0;
  double s_none = 0.0;
  double s_investor = 0.0;
  double s_bystander = 0.0;
  std::vector<InvestProfile> pure_ne;
  GameRegion region_label = GameRegion::mixed_or_none;
};

struct CostSweep {
  std::vector<CostSweepPoint> points;
  /// Costs where the equilibrium set changes, located by bisection on the
  /// relevant payoff differences (empty entries when the crossing lies
  /// outside the swept range).
  std::optional<double> boundary_both_to_one;
  std::optional<double> boundary_one_to_none;
};

/// Sweeps the deployment cost and reports payoffs, equilibria, and the two
/// region boundary costs.
inline CostSweep sweep_regions(const MarketParams& params, double bandwidth,
                               double density0, double cost_lo, double cost_hi,
                               std::size_t steps) {
  detail::require_symmetric_game(params, bandwidth, density0);
  if (steps < 2)
    throw std::invalid_argument("sweep_regions: steps must be >= 2");
  if (!(cost_lo >= 0.0) || !(cost_hi > cost_lo))
    throw std::invalid_argument("sweep_regions: need 0 <= cost_lo < cost_hi");
  CostSweep sweep;
  sweep.points.resize(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double cost =
        cost_lo + (cost_hi - cost_lo) * static_cast<double>(k) / (steps - 1);
    auto [game, eq] = solve_binary_game(params, bandwidth, density0, cost);
    auto& pt = sweep.points[k];
    pt.invest_cost = cost;
    pt.s_both = game.payoffs[0][0].first;
    pt.s_none = game.payoffs[1][1].first;
    pt.s_investor = game.payoffs[0][1].first;
    pt.s_bystander = game.payoffs[0][1].second;
    pt.pure_ne = std::move(eq.pure_ne);
    pt.region_label = eq.region_label;
  }
  // Both-invest stops being deviation-proof where its payoff crosses the
  // bystander's; the lone investor drops out where its payoff crosses the
  // no-deployment level. Both payoffs are affine in the cost.
  const auto diff_both = [&](double cost) {
    return payoff_both_invest(params, bandwidth, density0, cost).first -
           payoff_one_invests(params, bandwidth, density0, cost).s_bystander;
  };
  const auto diff_one = [&](double cost) {
    return payoff_one_invests(params, bandwidth, density0, cost).s_investor -
           payoff_none_invest(params, bandwidth).first;
  };
  if (diff_both(cost_lo) > 0.0 && diff_both(cost_hi) < 0.0)
    sweep.boundary_both_to_one = num::bisect(diff_both, cost_lo, cost_hi, 1e-12);
  if (diff_one(cost_lo) > 0.0 && diff_one(cost_hi) < 0.0)
    sweep.boundary_one_to_none = num::bisect(diff_one, cost_lo, cost_hi, 1e-12);
  return sweep;
}

}  // namespace hetnet
