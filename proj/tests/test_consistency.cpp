#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "hetnet/hetnet.hpp"
#include "test_helpers.hpp"

using namespace hetnet;
using testutil::rel_close;
using testutil::uniform;

// Cross-module agreement: every closed-form payoff must reproduce what the
// generic profile accounting computes at the induced allocations. Any
// transcription drift in one of the formulas shows up here.

TEST_CASE("joint-deployment payoffs equal the profile accounting") {
  std::mt19937 rng(9001);
  for (int k = 0; k < 50; ++k) {
    const MarketParams p{uniform(rng, 0.1, 0.9), uniform(rng, 1, 100),
                         uniform(rng, 10, 200), uniform(rng, 10, 200)};
    const double b = uniform(rng, 0.3, 4.0);
    const double lam0 = uniform(rng, 1.1, 6.0);
    const double cost = uniform(rng, 0.0, 10.0);
    const auto [game, eq] = solve_binary_game(p, b, lam0, cost);

    const std::vector<ProviderConfig> both{{b, 0.0, lam0}, {b, 0.0, lam0}};
    const auto out_ii =
        profile_outcome(p, both, {game.details[0][0].allocs[0],
                                  game.details[0][0].allocs[1]},
                        {cost, cost}, ServiceMode::separate);
    REQUIRE(rel_close(out_ii.revenue[0], game.payoffs[0][0].first, 1e-12));
    REQUIRE(rel_close(out_ii.revenue[1], game.payoffs[0][0].second, 1e-12));

    const std::vector<ProviderConfig> none{{b, 0.0, 0.0}, {b, 0.0, 0.0}};
    const auto out_nn = profile_outcome(
        p, none, {Allocation{b, 0.0}, Allocation{b, 0.0}}, {0.0, 0.0},
        ServiceMode::mixed);
    REQUIRE(rel_close(out_nn.revenue[0], game.payoffs[1][1].first, 1e-12));
    (void)eq;
  }
}

TEST_CASE("lone-investor payoffs equal the profile accounting in both regimes") {
  std::mt19937 rng(9002);
  for (int k = 0; k < 50; ++k) {
    const MarketParams p{uniform(rng, 0.1, 0.9), uniform(rng, 1, 100),
                         uniform(rng, 10, 200), uniform(rng, 10, 200)};
    const double b = uniform(rng, 0.3, 4.0);
    const double lam0 = uniform(rng, 1.1, 6.0);
    const double cost = uniform(rng, 0.0, 10.0);
    const auto one = payoff_one_invests(p, b, lam0, cost);
    const std::vector<ProviderConfig> prov{{b, 0.0, lam0}, {b, 0.0, 0.0}};
    const std::vector<Allocation> allocs{one.investor_alloc, Allocation{b, 0.0}};
    const auto mode =
        one.separate_service ? ServiceMode::separate : ServiceMode::mixed;
    const auto out = profile_outcome(p, prov, allocs, {cost, 0.0}, mode);
    REQUIRE(rel_close(out.revenue[0], one.s_investor, 1e-12));
    REQUIRE(rel_close(out.revenue[1], one.s_bystander, 1e-12));
  }
}

TEST_CASE("single-provider solutions equal the profile accounting") {
  std::mt19937 rng(9003);
  for (int k = 0; k < 50; ++k) {
    const MarketParams p{uniform(rng, 0.1, 0.9), uniform(rng, 1, 100),
                         uniform(rng, 10, 200), uniform(rng, 10, 200)};
    const double b = uniform(rng, 0.3, 4.0);
    const double lam = uniform(rng, 1.1, 6.0);
    const double floor = uniform(rng, 0.0, 0.95 * b);
    const auto rev = constrained_allocation(p, b, floor, lam, Objective::revenue);
    const auto sw = constrained_allocation(p, b, floor, lam, Objective::welfare);
    const std::vector<ProviderConfig> prov{{b, floor, lam}};
    const auto out = profile_outcome(p, prov, {rev.alloc}, {},
                                     ServiceMode::separate);
    REQUIRE(rel_close(out.revenue[0], rev.objective_value, 1e-12));
    REQUIRE(rel_close(out.welfare, sw.objective_value, 1e-12));
    REQUIRE(rel_close(*out.price_macro[0], *rev.price_macro, 1e-12));
    REQUIRE(rel_close(*out.price_small[0], *rev.price_small, 1e-12));
  }
}

TEST_CASE("equilibrium reports agree with the profile accounting") {
  std::mt19937 rng(9004);
  for (int k = 0; k < 50; ++k) {
    const MarketParams p{uniform(rng, 0.1, 0.9), uniform(rng, 1, 100),
                         uniform(rng, 10, 200), uniform(rng, 10, 200)};
    const double b1 = uniform(rng, 0.3, 4.0), b2 = uniform(rng, 0.3, 4.0);
    const double lam = uniform(rng, 1.1, 6.0);
    const double f1 = uniform(rng, 0.0, 0.95 * b1);
    const double f2 = uniform(rng, 0.0, 0.95 * b2);
    const auto rep = constrained_ne(p, b1, b2, f1, f2, lam);
    if (rep.total_small_bw >= b1 + b2 - 1e-12) continue;  // empty macro tier
    const std::vector<ProviderConfig> prov{{b1, f1, lam}, {b2, f2, lam}};
    const auto out = profile_outcome(p, prov, {rep.allocs[0], rep.allocs[1]},
                                     {}, ServiceMode::separate);
    REQUIRE(rel_close(*rep.price_macro, *out.price_macro[0], 1e-12));
    REQUIRE(rel_close(*rep.price_small, *out.price_small[0], 1e-12));
    const double sw = separate_welfare(p, b1 + b2 - rep.total_small_bw,
                                       rep.total_small_bw, lam);
    REQUIRE(rel_close(sw, out.welfare, 1e-12));
  }
}

TEST_CASE("welfare-game profiles equal the profile accounting") {
  const MarketParams p{0.7, 50, 40, 100};
  const double b = 1.0, lam0 = 2.0, cost = 4.0;
  const auto w = binary_game_welfare(p, b, lam0, cost, SpStrategy::revenue_max);
  const double share = interior_small_share(p, lam0);
  const std::vector<ProviderConfig> both{{b, 0.0, lam0}, {b, 0.0, lam0}};
  const std::vector<Allocation> ii{{b * (1 - share), b * share},
                                   {b * (1 - share), b * share}};
  const auto out_ii =
      profile_outcome(p, both, ii, {cost, cost}, ServiceMode::separate);
  REQUIRE(rel_close(out_ii.welfare, w.sw_both_invest, 1e-12));

  const std::vector<ProviderConfig> none{{b, 0.0, 0.0}, {b, 0.0, 0.0}};
  const auto out_nn = profile_outcome(
      p, none, {Allocation{b, 0.0}, Allocation{b, 0.0}}, {}, ServiceMode::mixed);
  REQUIRE(rel_close(out_nn.welfare, w.sw_none_invest, 1e-12));

  const std::vector<ProviderConfig> one{{b, 0.0, lam0}, {b, 0.0, 0.0}};
  const auto out_in = profile_outcome(
      p, one, {w.one_investor_alloc, Allocation{b, 0.0}}, {cost, 0.0},
      ServiceMode::separate);
  REQUIRE(rel_close(out_in.welfare, w.sw_one_invests, 1e-12));
}
