#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "hetnet/duopoly.hpp"
#include "hetnet/oracle.hpp"
#include "test_helpers.hpp"

using namespace hetnet;
using testutil::rel_close;
using testutil::uniform;

namespace {

// Demo instance used throughout: equal user densities, one provider with
// twice the bandwidth of the other.
const MarketParams kDemo{0.5, 50, 50, 50};
constexpr double kB1 = 2.0, kB2 = 1.0, kLam = 2.0;

double duopoly_revenue(const MarketParams& p, double own_total, double own_small,
                       double opp_total, double opp_small, double density) {
  const double cs = (own_small + opp_small) * density * p.r0;
  const double cm = (own_total - own_small + opp_total - opp_small) * p.r0;
  double rev = 0.0;
  if (cm > 0.0 && own_total - own_small > 0.0)
    rev += std::pow(cm / p.n_m, -p.alpha) * (own_total - own_small) * p.r0;
  if (cs > 0.0 && own_small > 0.0)
    rev += std::pow(cs / p.n_f, -p.alpha) * own_small * density * p.r0;
  return rev;
}

// KKT sanity for one provider given the equilibrium marginal revenue value.
bool kkt_ok(double small, double floor, double total, double d) {
  const double slack = 1e-9 * total;
  if (small <= floor + slack) return d <= 1e-8;
  if (small >= total - slack) return d >= -1e-8;
  return std::abs(d) <= 1e-8;
}

}  // namespace

TEST_CASE("unconstrained equilibrium split anchors") {
  const auto ne = unconstrained_ne(kDemo, kB1, kB2, kLam);
  REQUIRE(rel_close(ne[0].bw_small, 4.0 / 3.0, 1e-12));
  REQUIRE(rel_close(ne[1].bw_small, 2.0 / 3.0, 1e-12));
  REQUIRE(std::abs(ne[0].bw_small - 1.34) < 1e-2);
  REQUIRE(std::abs(ne[1].bw_small - 0.67) < 1e-2);
  REQUIRE_THROWS_AS(unconstrained_ne(kDemo, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("equal bandwidths produce identical splits") {
  const auto ne = unconstrained_ne(kDemo, 1.7, 1.7, 3.0);
  REQUIRE(ne[0].bw_small == ne[1].bw_small);
  REQUIRE(ne[0].bw_macro == ne[1].bw_macro);
}

TEST_CASE("marginal revenue vanishes at the unconstrained equilibrium") {
  const auto ne = unconstrained_ne(kDemo, kB1, kB2, kLam);
  REQUIRE(std::abs(marginal_revenue(kDemo, ne[0], ne[1], kLam)) < 1e-9);
  REQUIRE(std::abs(marginal_revenue(kDemo, ne[1], ne[0], kLam)) < 1e-9);
}

TEST_CASE("marginal revenue matches its explicit floor-point expansion") {
  // both providers pinned at floors above the unconstrained split
  const double f1 = 1.5, f2 = 0.9;
  const Allocation a1{kB1 - f1, f1}, a2{kB2 - f2, f2};
  const double rs0 = kLam * (f1 + f2) * kDemo.r0 / kDemo.n_f;
  const double rm0 = (kB1 - f1 + kB2 - f2) * kDemo.r0 / kDemo.n_m;
  const double a = kDemo.alpha;
  const auto expanded = [&](double fs, double bi) {
    return kLam * std::pow(rs0, -a) - std::pow(rm0, -a) -
           a * kLam * kLam * fs * kDemo.r0 / kDemo.n_f * std::pow(rs0, -a - 1.0) +
           a * (bi - fs) * kDemo.r0 / kDemo.n_m * std::pow(rm0, -a - 1.0);
  };
  REQUIRE(rel_close(marginal_revenue(kDemo, a1, a2, kLam), expanded(f1, kB1),
                    1e-12));
  REQUIRE(rel_close(marginal_revenue(kDemo, a2, a1, kLam), expanded(f2, kB2),
                    1e-12));
}

TEST_CASE("marginal revenue agrees with finite differences of revenue") {
  std::mt19937 rng(606);
  for (int k = 0; k < 100; ++k) {
    MarketParams p{uniform(rng, 0.15, 0.85), uniform(rng, 5, 80),
                   uniform(rng, 20, 150), uniform(rng, 20, 150)};
    const double b1 = uniform(rng, 0.5, 4.0), b2 = uniform(rng, 0.5, 4.0);
    const double lam = uniform(rng, 1.1, 6.0);
    const double s1 = uniform(rng, 0.1 * b1, 0.9 * b1);
    const double s2 = uniform(rng, 0.1 * b2, 0.9 * b2);
    const Allocation own{b1 - s1, s1}, opp{b2 - s2, s2};
    // dS/d(bw_small) carries the rate-per-bandwidth factor
    const double analytic = p.r0 * marginal_revenue(p, own, opp, lam);
    const double err = oracle::fd_derivative_check(
        [&](double x) { return duopoly_revenue(p, b1, x, b2, s2, lam); }, s1,
        1e-6, analytic);
    REQUIRE(err < 1e-4);
  }
}

TEST_CASE("marginal revenue rejects an empty pooled tier") {
  REQUIRE_THROWS_AS(
      marginal_revenue(kDemo, Allocation{1.0, 0.0}, Allocation{1.0, 0.0}, 2.0),
      std::invalid_argument);
  REQUIRE_THROWS_AS(
      marginal_revenue(kDemo, Allocation{0.0, 1.0}, Allocation{0.0, 1.0}, 2.0),
      std::invalid_argument);
}

TEST_CASE("best response is a fixed point at the equilibrium") {
  const auto ne = unconstrained_ne(kDemo, kB1, kB2, kLam);
  const double br =
      best_response(kDemo, kB1, 0.0, kB2, ne[1].bw_small, kLam);
  REQUIRE(rel_close(br, ne[0].bw_small, 1e-9));
}

TEST_CASE("best response sticks to a floor that dominates the interior") {
  // opponent floods small cells; a floor above the sagging interior response binds
  const double br = best_response(kDemo, kB1, 1.8, kB2, kB2, kLam);
  const Allocation own{kB1 - 1.8, 1.8}, opp{0.0, kB2};
  REQUIRE(marginal_revenue(kDemo, own, opp, kLam) < 0.0);
  REQUIRE(br == 1.8);
}

TEST_CASE("best response matches the exhaustive grid") {
  std::mt19937 rng(707);
  for (int k = 0; k < 10; ++k) {
    MarketParams p{uniform(rng, 0.2, 0.8), uniform(rng, 5, 80),
                   uniform(rng, 20, 150), uniform(rng, 20, 150)};
    const double b1 = uniform(rng, 0.5, 4.0), b2 = uniform(rng, 0.5, 4.0);
    const double lam = uniform(rng, 1.1, 6.0);
    const double floor = uniform(rng, 0.0, 0.7 * b1);
    const double s2 = uniform(rng, 0.05 * b2, 0.95 * b2);
    const double br = best_response(p, b1, floor, b2, s2, lam);
    std::size_t n = 100000;
    double best_x = floor, best_v = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = floor + (b1 - floor) * static_cast<double>(i) / (n - 1);
      const double v = duopoly_revenue(p, b1, x, b2, s2, lam);
      if (v > best_v) {
        best_v = v;
        best_x = x;
      }
    }
    REQUIRE(std::abs(br - best_x) <= 1e-5 * b1);
  }
}

TEST_CASE("slack floors reproduce the unconstrained equilibrium") {
  const auto rep = constrained_ne(kDemo, kB1, kB2, 0.0, 0.0, kLam);
  REQUIRE(rep.region == Region::A);
  REQUIRE(rel_close(rep.allocs[0].bw_small, 4.0 / 3.0, 1e-12));
  REQUIRE(rel_close(rep.allocs[1].bw_small, 2.0 / 3.0, 1e-12));
  // floors exactly at the unconstrained split still report region A
  const auto edge = constrained_ne(kDemo, kB1, kB2, 4.0 / 3.0, 2.0 / 3.0, kLam);
  REQUIRE(edge.region == Region::A);
  REQUIRE(rel_close(edge.allocs[0].bw_small, 4.0 / 3.0, 1e-12));
}

TEST_CASE("floors at the full bands pin both providers") {
  const auto rep = constrained_ne(kDemo, kB1, kB2, kB1, kB2, kLam);
  REQUIRE(rep.region == Region::B_I);
  REQUIRE(rep.allocs[0].bw_small == kB1);
  REQUIRE(rep.allocs[1].bw_small == kB2);
  REQUIRE_FALSE(rep.price_macro.has_value());
  REQUIRE(rep.kkt_residuals[0] <= 1e-8);
  REQUIRE(rep.kkt_residuals[1] <= 1e-8);
}

TEST_CASE("both floors binding on the demo instance") {
  const auto rep = constrained_ne(kDemo, kB1, kB2, 1.5, 0.9, kLam);
  REQUIRE(rep.region == Region::B_I);
  REQUIRE(rep.allocs[0].bw_small == 1.5);
  REQUIRE(rep.allocs[1].bw_small == 0.9);
  const std::array<double, 2> totals{kB1, kB2}, floors{1.5, 0.9},
      smalls{rep.allocs[0].bw_small, rep.allocs[1].bw_small};
  const auto check =
      oracle::no_deviation_check(kDemo, totals, floors, smalls, kLam, 2000);
  REQUIRE(check.holds);
}

TEST_CASE("single binding floor leaves the rival interior") {
  // push provider 2 well above its split while provider 1 stays slack
  const auto rep = constrained_ne(kDemo, kB1, kB2, 0.0, 0.95, kLam);
  REQUIRE(rep.region == Region::C_II);
  REQUIRE(rep.allocs[1].bw_small == 0.95);
  REQUIRE(kkt_ok(rep.allocs[0].bw_small, 0.0, kB1, rep.kkt_residuals[0]));
  REQUIRE(kkt_ok(rep.allocs[1].bw_small, 0.95, kB2, rep.kkt_residuals[1]));
  // the slack provider re-optimizes to an interior stationary point; here it
  // drifts up with the pooled small tier rather than shading down
  REQUIRE(rep.allocs[0].bw_small > 0.0);
  REQUIRE(std::abs(rep.kkt_residuals[0]) <= 1e-8);
  REQUIRE(rel_close(rep.allocs[0].bw_small, 1.3744343171, 1e-6));
  REQUIRE(rep.total_small_bw >=
          interior_small_share(kDemo, kLam) * (kB1 + kB2) - 1e-9);
}

TEST_CASE("a floor below the free split can drag the rival to its own floor") {
  // provider 1 forced high; provider 2's slack floor just under its free
  // split ends up binding from below
  const auto rep = constrained_ne(kDemo, kB1, kB2, 1.5, 0.65, kLam);
  REQUIRE(rep.region == Region::C_I);
  REQUIRE(rep.allocs[0].bw_small == 1.5);
  REQUIRE(rep.allocs[1].bw_small == 0.65);
  REQUIRE(rep.kkt_residuals[0] <= 1e-8);
  REQUIRE(rep.kkt_residuals[1] <= 1e-8);
}

TEST_CASE("constrained equilibria satisfy stationarity and beat deviations") {
  std::mt19937 rng(808);
  for (int k = 0; k < 60; ++k) {
    MarketParams p{uniform(rng, 0.15, 0.85), uniform(rng, 5, 80),
                   uniform(rng, 20, 150), uniform(rng, 20, 150)};
    const double b1 = uniform(rng, 0.5, 4.0), b2 = uniform(rng, 0.5, 4.0);
    const double lam = uniform(rng, 1.1, 6.0);
    const double f1 = uniform(rng, 0.0, b1), f2 = uniform(rng, 0.0, b2);
    const auto rep = constrained_ne(p, b1, b2, f1, f2, lam);
    REQUIRE(kkt_ok(rep.allocs[0].bw_small, f1, b1, rep.kkt_residuals[0]));
    REQUIRE(kkt_ok(rep.allocs[1].bw_small, f2, b2, rep.kkt_residuals[1]));
    const std::array<double, 2> totals{b1, b2}, floors{f1, f2},
        smalls{rep.allocs[0].bw_small, rep.allocs[1].bw_small};
    const auto check =
        oracle::no_deviation_check(p, totals, floors, smalls, lam, 400);
    REQUIRE(check.holds);
  }
}

TEST_CASE("floors never reduce the total small-cell band") {
  std::mt19937 rng(909);
  for (int k = 0; k < 120; ++k) {
    MarketParams p{uniform(rng, 0.15, 0.85), uniform(rng, 5, 80),
                   uniform(rng, 20, 150), uniform(rng, 20, 150)};
    const double b1 = uniform(rng, 0.5, 4.0), b2 = uniform(rng, 0.5, 4.0);
    const double lam = uniform(rng, 1.1, 6.0);
    const double f1 = uniform(rng, 0.0, b1), f2 = uniform(rng, 0.0, b2);
    const auto rep = constrained_ne(p, b1, b2, f1, f2, lam);
    const double unconstrained_total =
        interior_small_share(p, lam) * (b1 + b2);
    REQUIRE(rep.total_small_bw >= unconstrained_total - 1e-9);
  }
}

TEST_CASE("damped best-response iteration lands on one allocation") {
  std::mt19937 rng(1010);
  const double f1 = 1.5, f2 = 0.2;
  std::vector<std::array<double, 2>> limits;
  for (int s = 0; s < 8; ++s) {
    std::array<double, 2> x{uniform(rng, f1, kB1), uniform(rng, f2, kB2)};
    for (int it = 0; it < 5000; ++it) {
      const double b0 = best_response(kDemo, kB1, f1, kB2, x[1], kLam);
      const double b1r = best_response(kDemo, kB2, f2, kB1, x[0], kLam);
      const double delta = std::max(std::abs(b0 - x[0]), std::abs(b1r - x[1]));
      x[0] = 0.5 * (x[0] + b0);
      x[1] = 0.5 * (x[1] + b1r);
      if (delta < 1e-12) break;
    }
    limits.push_back(x);
  }
  for (const auto& x : limits) {
    REQUIRE(std::abs(x[0] - limits[0][0]) < 1e-7);
    REQUIRE(std::abs(x[1] - limits[0][1]) < 1e-7);
  }
  const auto rep = constrained_ne(kDemo, kB1, kB2, f1, f2, kLam);
  REQUIRE(std::abs(rep.allocs[0].bw_small - limits[0][0]) < 1e-6);
  REQUIRE(std::abs(rep.allocs[1].bw_small - limits[0][1]) < 1e-6);
}

TEST_CASE("region map corners and rectangle structure") {
  const std::size_t n = 21;
  const auto map = region_map(kDemo, kB1, kB2, kLam, n, 2);
  REQUIRE(map.at(0, 0) == Region::A);
  REQUIRE(map.at(n - 1, n - 1) == Region::B_I);
  // the no-binding region is exactly the rectangle below the free splits
  const double v1 = 4.0 / 3.0, v2 = 2.0 / 3.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const bool inside = map.floors_1[i] <= v1 + 1e-12 &&
                          map.floors_2[j] <= v2 + 1e-12;
      REQUIRE((map.at(i, j) == Region::A) == inside);
    }
}

TEST_CASE("region map blobs are connected once split by the pinned provider") {
  // The bare one-binds labels cover two mirror-image wings (either provider
  // can be the pinned one), so connectivity only holds after tagging each
  // cell with which floors bind. The unconstrained-region rectangle check
  // above covers the monotone-boundary claim.
  const std::size_t n = 21;
  const auto map = region_map(kDemo, kB1, kB2, kLam, n, 2);
  std::vector<int> refined(n * n);
  std::set<int> present;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto rep = constrained_ne(kDemo, kB1, kB2, map.floors_1[i],
                                      map.floors_2[j], kLam);
      const bool at1 =
          rep.allocs[0].bw_small <= map.floors_1[i] + 1e-9 * kB1;
      const bool at2 =
          rep.allocs[1].bw_small <= map.floors_2[j] + 1e-9 * kB2;
      refined[i * n + j] =
          static_cast<int>(rep.region) * 4 + (at1 ? 2 : 0) + (at2 ? 1 : 0);
      present.insert(refined[i * n + j]);
    }
  std::vector<int> comp(n * n, -1);
  int ncomp = 0;
  for (std::size_t start = 0; start < n * n; ++start) {
    if (comp[start] != -1) continue;
    const int lab = refined[start];
    std::vector<std::size_t> stack{start};
    comp[start] = ncomp;
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const std::size_t i = cur / n, j = cur % n;
      const std::size_t nbrs[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
      for (const auto& nb : nbrs) {
        if (nb[0] >= n || nb[1] >= n) continue;
        const std::size_t idx = nb[0] * n + nb[1];
        if (comp[idx] == -1 && refined[idx] == lab) {
          comp[idx] = ncomp;
          stack.push_back(idx);
        }
      }
    }
    ++ncomp;
  }
  REQUIRE(ncomp == static_cast<int>(present.size()));
}

TEST_CASE("constrained equilibrium validates its inputs") {
  REQUIRE_THROWS_AS(constrained_ne(kDemo, kB1, kB2, 0.0, 0.0, 0.9),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(constrained_ne(kDemo, kB1, kB2, 3.0, 0.0, kLam),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(region_map(kDemo, kB1, kB2, kLam, 1), std::invalid_argument);
}
