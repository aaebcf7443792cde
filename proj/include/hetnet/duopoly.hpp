#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hetnet/core_model.hpp"
#include "hetnet/monopoly.hpp"
#include "hetnet/numerics.hpp"
#include "hetnet/parallel.hpp"

namespace hetnet {

/// Which floors bind at the two-provider equilibrium, following the region
/// taxonomy of the constrained bandwidth game: A = no floor binds, B = both
/// floors exceed the unconstrained equilibrium, C = exactly one does; the
/// I/II suffix tells whether both providers sit at their floors or one runs
/// strictly above.
enum class Region { A, B_I, B_II, C_I, C_II };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::A: return "A";
    case Region::B_I: return "B_I";
    case Region::B_II: return "B_II";
    case Region::C_I: return "C_I";
    case Region::C_II: return "C_II";
  }
  return "?";
}

struct EquilibriumReport {
  std::array<Allocation, 2> allocs;
  std::optional<double> price_macro;  ///< pooled clearing price, absent if tier empty
  std::optional<double> price_small;
  Region region = Region::A;
  std::array<double, 2> kkt_residuals{};  ///< own-bandwidth revenue derivative D_i
  double total_small_bw = 0.0;
};

/// Unconstrained two-provider equilibrium split: each provider sends the
/// interior share of its own bandwidth to small cells.
inline std::array<Allocation, 2> unconstrained_ne(const MarketParams& params,
                                                  double total_bw_1,
                                                  double total_bw_2,
                                                  double density) {
  params.validate();
  if (!(density > 1.0))
    throw std::invalid_argument("unconstrained_ne: density must be > 1");
  const double share = interior_small_share(params, density);
  const double s1 = share * total_bw_1;
  const double s2 = share * total_bw_2;
  return {Allocation{total_bw_1 - s1, s1}, Allocation{total_bw_2 - s2, s2}};
}

namespace detail {

// Own-bandwidth derivative of provider revenue under pooled separate-service
// clearing, in the normalized form
//   D_i = lam u'(R_S) + lam^2 (B_iS r0 / n_f) u''(R_S)
//         - u'(R_M) - (B_iM r0 / n_m) u''(R_M),
// i.e. dS_i/dB_iS divided by r0. Limit conventions keep bisection valid at
// the corners: an empty pooled small tier gives +inf (first unit of small
// bandwidth has unbounded marginal value), an empty pooled macro tier -inf.
inline double own_marginal_revenue(const MarketParams& p,
                                   const Allocation& own,
                                   const Allocation& opp, double density) {
  const double a = p.alpha;
  const double cs = (own.bw_small + opp.bw_small) * density * p.r0;
  const double cm = (own.bw_macro + opp.bw_macro) * p.r0;
  if (cs <= 0.0) return std::numeric_limits<double>::infinity();
  if (cm <= 0.0) return -std::numeric_limits<double>::infinity();
  const double rs = cs / p.n_f;
  const double rm = cm / p.n_m;
  return density * marginal_utility(rs, a) +
         density * density * (own.bw_small * p.r0 / p.n_f) *
             second_utility(rs, a) -
         marginal_utility(rm, a) -
         (own.bw_macro * p.r0 / p.n_m) * second_utility(rm, a);
}

// Ties at D_i = 0 count as "at the floor", keeping region labels
// deterministic on case boundaries.
inline constexpr double kKktTieTol = 1e-12;

// argmax of provider i's revenue over its own small bandwidth in
// [floor, total], the opponent held fixed. Revenue is strictly concave, so
// D_i is decreasing and the sign at the interval ends decides the corners.
inline double best_response_impl(const MarketParams& p, double own_total,
                                 double own_floor, double opp_total,
                                 double opp_small, double density) {
  const Allocation opp{opp_total - opp_small, opp_small};
  const auto d = [&](double x) {
    return own_marginal_revenue(p, Allocation{own_total - x, x}, opp, density);
  };
  if (d(own_floor) <= 0.0) return own_floor;
  if (d(own_total) >= 0.0) return own_total;
  return num::bisect(d, own_floor, own_total, 1e-13);
}

}  // namespace detail

/// Marginal revenue D_i of the provider owning `own` with respect to its own
/// small-cell bandwidth, pooled rates over both providers.
inline double marginal_revenue(const MarketParams& params, const Allocation& own,
                               const Allocation& opp, double density) {
  params.validate();
  if (!(density > 1.0))
    throw std::invalid_argument("marginal_revenue: density must be > 1");
  if ((own.bw_small + opp.bw_small) * density <= 0.0 ||
      own.bw_macro + opp.bw_macro <= 0.0)
    throw std::invalid_argument(
        "marginal_revenue: zero pooled capacity in a tier");
  return detail::own_marginal_revenue(params, own, opp, density);
}

/// Revenue-maximizing own small-cell bandwidth against a fixed opponent.
inline double best_response(const MarketParams& params, double own_total,
                            double own_floor, double opp_total,
                            double opp_small, double density) {
  params.validate();
  if (!(density > 1.0))
    throw std::invalid_argument("best_response: density must be > 1");
  if (!(own_floor >= 0.0) || own_floor > own_total)
    throw std::invalid_argument("best_response: floor must lie in [0, total]");
  return detail::best_response_impl(params, own_total, own_floor, opp_total,
                                    opp_small, density);
}

/// Nash equilibrium of the two-provider bandwidth game under small-cell
/// floors, via constructive case analysis on which floors the unconstrained
/// equilibrium violates. The result is re-verified by damped best-response
/// iteration; disagreement raises SolverError.
inline EquilibriumReport constrained_ne(const MarketParams& params,
                                        double total_bw_1, double total_bw_2,
                                        double floor_1, double floor_2,
                                        double density) {
  params.validate();
  if (!(density > 1.0))
    throw std::invalid_argument("constrained_ne: density must be > 1");
  const std::array<double, 2> total{total_bw_1, total_bw_2};
  const std::array<double, 2> floor{floor_1, floor_2};
  for (int i = 0; i < 2; ++i) {
    if (!(total[i] > 0.0))
      throw std::invalid_argument("constrained_ne: total bandwidth must be > 0");
    if (!(floor[i] >= 0.0) || floor[i] > total[i] * (1.0 + tol::kEq))
      throw std::invalid_argument(
          "constrained_ne: floor must lie in [0, total bandwidth]");
  }

  const double share = interior_small_share(params, density);
  const std::array<double, 2> unconstrained{share * total[0], share * total[1]};
  const std::array<bool, 2> violated{
      floor[0] > unconstrained[0] + tol::kFloorSlack * total[0],
      floor[1] > unconstrained[1] + tol::kFloorSlack * total[1]};

  const auto d_at = [&](int i, double s_own, double s_opp) {
    const Allocation own{total[i] - s_own, s_own};
    const Allocation opp{total[1 - i] - s_opp, s_opp};
    return detail::own_marginal_revenue(params, own, opp, density);
  };
  // Solves D_i = 0 for provider i with the opponent pinned at s_opp; only
  // called when D_i > 0 at the floor.
  const auto interior_of = [&](int i, double s_opp) {
    const auto d = [&](double x) { return d_at(i, x, s_opp); };
    if (d(total[i]) >= 0.0) return total[i];
    return num::bisect(d, floor[i], total[i], 1e-13);
  };

  std::array<double, 2> small{};
  Region region;
  if (!violated[0] && !violated[1]) {
    small = unconstrained;
    region = Region::A;
  } else {
    const bool both = violated[0] && violated[1];
    const double d1 = d_at(0, floor[0], floor[1]);
    const double d2 = d_at(1, floor[1], floor[0]);
    if (d1 <= detail::kKktTieTol && d2 <= detail::kKktTieTol) {
      small = floor;
      region = both ? Region::B_I : Region::C_I;
    } else {
      // Exactly one provider runs above its floor; uniqueness of the
      // equilibrium guarantees a single consistent assignment, so try the
      // provider whose floor constraint is slack first.
      small = floor;
      region = both ? Region::B_II : Region::C_II;
      bool resolved = false;
      std::array<int, 2> order = d1 > d2 ? std::array<int, 2>{0, 1}
                                         : std::array<int, 2>{1, 0};
      if (!both) order = violated[0] ? std::array<int, 2>{1, 0}
                                     : std::array<int, 2>{0, 1};
      for (int k = 0; k < 2 && !resolved; ++k) {
        const int i = order[k];
        if (d_at(i, floor[i], floor[1 - i]) <= detail::kKktTieTol) continue;
        const double xi = interior_of(i, floor[1 - i]);
        const double dj = d_at(1 - i, floor[1 - i], xi);
        if (dj <= detail::kKktTieTol) {
          small[i] = xi;
          small[1 - i] = floor[1 - i];
          resolved = true;
        }
      }
      if (!resolved)
        throw SolverError(
            "constrained_ne: no case candidate satisfies the stationarity "
            "conditions");
    }
  }

  // Damped best-response cross-check, seeded at the constructive answer.
  {
    std::array<double, 2> x = small;
    const double span = std::max(total[0], total[1]);
    const double conv_tol = 1e-9 * span;
    bool converged = false;
    for (int it = 0; it < 10000; ++it) {
      const double b0 = detail::best_response_impl(params, total[0], floor[0],
                                                   total[1], x[1], density);
      const double b1 = detail::best_response_impl(params, total[1], floor[1],
                                                   total[0], x[0], density);
      const double delta =
          std::max(std::abs(b0 - x[0]), std::abs(b1 - x[1]));
      x[0] = 0.5 * (x[0] + b0);
      x[1] = 0.5 * (x[1] + b1);
      if (delta <= conv_tol) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw SolverError("constrained_ne: best-response iteration failed to converge");
    if (std::abs(x[0] - small[0]) > 1e-6 * span ||
        std::abs(x[1] - small[1]) > 1e-6 * span)
      throw SolverError(
          "constrained_ne: case analysis disagrees with best-response iteration");
  }

  EquilibriumReport rep;
  rep.allocs = {Allocation{total[0] - small[0], small[0]},
                Allocation{total[1] - small[1], small[1]}};
  rep.region = region;
  rep.kkt_residuals = {d_at(0, small[0], small[1]), d_at(1, small[1], small[0])};
  rep.total_small_bw = small[0] + small[1];
  const double cs = (small[0] + small[1]) * density * params.r0;
  const double cm = (total[0] - small[0] + total[1] - small[1]) * params.r0;
  if (cm > 0.0)
    rep.price_macro = market_clearing_price(cm, params.n_m, params.alpha);
  if (cs > 0.0)
    rep.price_small = market_clearing_price(cs, params.n_f, params.alpha);
  return rep;
}

struct RegionMap {
  std::vector<double> floors_1;  ///< axis values, both inclusive of 0 and B_i
  std::vector<double> floors_2;
  std::vector<Region> labels;  ///< labels[i1 * floors_2.size() + i2]

  Region at(std::size_t i1, std::size_t i2) const {
    return labels[i1 * floors_2.size() + i2];
  }
};

/// Classifies the equilibrium region over a dense floor grid covering
/// [0, B_1] x [0, B_2]. Cells are independent, so the grid is evaluated on
/// `threads` workers.
inline RegionMap region_map(const MarketParams& params, double total_bw_1,
                            double total_bw_2, double density,
                            std::size_t resolution, unsigned threads = 1) {
  if (resolution < 2)
    throw std::invalid_argument("region_map: resolution must be >= 2");
  RegionMap map;
  map.floors_1.resize(resolution);
  map.floors_2.resize(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    map.floors_1[i] = total_bw_1 * static_cast<double>(i) / (resolution - 1);
    map.floors_2[i] = total_bw_2 * static_cast<double>(i) / (resolution - 1);
  }
  map.labels.resize(resolution * resolution);
  parallel_for(resolution * resolution, threads, [&](std::size_t idx) {
    const std::size_t i1 = idx / resolution;
    const std::size_t i2 = idx % resolution;
    map.labels[idx] = constrained_ne(params, total_bw_1, total_bw_2,
                                     map.floors_1[i1], map.floors_2[i2], density)
                          .region;
  });
  return map;
}

}  // namespace hetnet
