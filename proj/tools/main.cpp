// Command-line front end: scenario JSON in, human-readable summary on stdout,
// CSV sweeps on request. One subcommand per experiment family; see README.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hetnet/hetnet.hpp"
#include "scenario.hpp"

namespace {

using namespace hetnet;
using cli::Scenario;
using cli::ScenarioError;

unsigned sweep_threads() {
  if (const char* env = std::getenv("HETNET_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ScenarioError("HETNET_THREADS: must be a positive integer");
    return resolve_threads(static_cast<unsigned>(v));
  }
  return resolve_threads(0);
}

struct CostRange {
  double lo = 0.0, hi = 0.0, step = 0.0;
  std::size_t count() const {
    return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  }
};

CostRange parse_cost_range(const std::string& text) {
  CostRange r;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.step) || c1 != ':' || c2 != ':' ||
      !in.eof())
    throw ScenarioError("--sweep-cost: expected LO:HI:STEP");
  if (!(r.step > 0.0) || !(r.hi > r.lo) || !(r.lo >= 0.0))
    throw ScenarioError("--sweep-cost: need 0 <= LO < HI and STEP > 0");
  return r;
}

std::string opt_price(const std::optional<double>& p) {
  return p ? csv::field(*p) : std::string("not offered");
}

std::string opt_price_csv(const std::optional<double>& p) {
  return p ? csv::field(*p) : std::string();
}

/// Writes header + rows to `path`; returns a short confirmation line.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("output: cannot open '" + path + "' for writing");
  out << header << '\n';
  for (const auto& r : rows) out << r << '\n';
  std::cout << "wrote " << rows.size() << " rows to " << path << "\n";
}

std::optional<std::string> effective_out(const Scenario& sc,
                                         const std::string& flag_out) {
  if (!flag_out.empty()) return flag_out;
  if (sc.output && sc.output->path) return *sc.output->path;
  return std::nullopt;
}

Objective parse_objective(const std::string& name) {
  if (name == "revenue") return Objective::revenue;
  if (name == "welfare") return Objective::welfare;
  throw ScenarioError("--objective: must be 'revenue' or 'welfare'");
}

const char* to_string(ServiceStructure s) {
  switch (s) {
    case ServiceStructure::separate: return "separate";
    case ServiceStructure::mixed: return "mixed";
    case ServiceStructure::macro_only: return "macro_only";
  }
  return "?";
}

std::string ne_set_string(const std::vector<InvestProfile>& ne) {
  if (ne.empty()) return "none";
  std::string out;
  for (const auto& p : ne) {
    if (!out.empty()) out += ';';
    out += to_string(p);
  }
  return out;
}

// ---------------------------------------------------------------------------

int run_monopoly_alloc(const Scenario& sc, const std::string& objective_name,
                       const std::string& out_flag) {
  const auto& p = cli::need_market(sc);
  const auto& prov = cli::need_provider(sc, 0);
  const Objective obj = parse_objective(objective_name);
  MonopolySolution sol;
  if (prov.small_floor > 0.0) {
    // floored regime: deployment is sunk, any investment.i_s is ignored
    if (!(prov.density > 1.0))
      throw ScenarioError(
          "providers[0].small_floor: a small-cell floor needs density > 1");
    sol = constrained_allocation(p, prov.total_bw, prov.small_floor,
                                 prov.density, obj);
  } else {
    const double cost =
        sc.investment && sc.investment->i_s ? *sc.investment->i_s : 0.0;
    sol = allocation_given_density(p, prov.total_bw, prov.density, cost);
  }
  std::cout << "single-provider optimal split (" << objective_name << ")\n"
            << "  bw_macro      " << csv::field(sol.alloc.bw_macro) << "\n"
            << "  bw_small      " << csv::field(sol.alloc.bw_small) << "\n"
            << "  price_macro   " << opt_price(sol.price_macro) << "\n"
            << "  price_small   " << opt_price(sol.price_small) << "\n"
            << "  service       " << to_string(sol.service_structure) << "\n"
            << "  binding_floor " << (sol.binding_floor ? "yes" : "no") << "\n"
            << "  objective     " << csv::field(sol.objective_value) << "\n";
  if (const auto path = effective_out(sc, out_flag)) {
    std::vector<std::string> rows;
    rows.push_back(csv::field(sol.alloc.bw_macro) + "," +
                   csv::field(sol.alloc.bw_small) + "," +
                   opt_price_csv(sol.price_macro) + "," +
                   opt_price_csv(sol.price_small) + "," +
                   csv::field(sol.density) + "," +
                   csv::field(sol.objective_value) + "," +
                   to_string(sol.service_structure) + "," +
                   (sol.binding_floor ? "true" : "false"));
    write_csv(*path,
              "bw_macro,bw_small,price_macro,price_small,density,"
              "objective_value,service,binding_floor",
              rows);
  }
  return 0;
}

int run_monopoly_invest(const Scenario& sc, const std::string& objective_name,
                        const std::string& sweep, const std::string& out_flag) {
  const auto& p = cli::need_market(sc);
  const auto& prov = cli::need_provider(sc, 0);
  const Objective obj = parse_objective(objective_name);
  const auto [alpha0, sufficient] = no_invest_threshold(p, prov.total_bw);
  if (!sweep.empty()) {
    const CostRange range = parse_cost_range(sweep);
    const std::size_t n = range.count();
    // break-even does not vary with the swept cost; compute it once
    const double break_even =
        optimal_investment(p, prov.total_bw, range.lo, obj).no_invest_threshold;
    std::vector<std::string> rows(n);
    parallel_for(n, sweep_threads(), [&](std::size_t i) {
      const double cost = range.lo + range.step * static_cast<double>(i);
      const auto sol =
          optimal_investment(p, prov.total_bw, cost, obj, 1e6, false);
      rows[i] = csv::field(cost) + "," + csv::field(sol.density_opt) + "," +
                csv::field(sol.objective_value);
    });
    std::cout << "deployment-density sweep over unit cost [" << range.lo << ", "
              << range.hi << "] step " << range.step << " (" << objective_name
              << ")\n"
              << "  curvature knee alpha0      " << csv::field(alpha0) << "\n"
              << "  sufficient no-invest cost  " << csv::field(sufficient)
              << "\n"
              << "  break-even cost            " << csv::field(break_even)
              << "\n";
    if (const auto path = effective_out(sc, out_flag))
      write_csv(*path, "i_s,density_opt,objective_value", rows);
    else
      std::cout << "  (pass --out or output.path to store the sweep)\n";
    return 0;
  }
  const double cost = cli::need_investment_cost(sc);
  const auto sol = optimal_investment(p, prov.total_bw, cost, obj);
  std::cout << "single-provider deployment choice (" << objective_name << ")\n"
            << "  i_s                        " << csv::field(cost) << "\n"
            << "  density_opt                " << csv::field(sol.density_opt)
            << "\n"
            << "  objective                  "
            << csv::field(sol.objective_value) << "\n"
            << "  break-even cost            "
            << csv::field(sol.no_invest_threshold) << "\n"
            << "  sufficient no-invest cost  " << csv::field(sufficient) << "\n"
            << "  curvature knee alpha0      " << csv::field(alpha0) << "\n"
            << "  stationary candidates (density, objective):\n";
  for (const auto& [lam, v] : sol.stationary_candidates)
    std::cout << "    " << csv::field(lam) << "  " << csv::field(v) << "\n";
  if (const auto path = effective_out(sc, out_flag)) {
    std::vector<std::string> rows{
        csv::field(cost) + "," + csv::field(sol.density_opt) + "," +
        csv::field(sol.objective_value) + "," +
        csv::field(sol.no_invest_threshold)};
    write_csv(*path, "i_s,density_opt,objective_value,break_even_cost", rows);
  }
  return 0;
}

int run_duopoly_ne(const Scenario& sc, const std::string& out_flag) {
  const auto& p = cli::need_market(sc);
  const double density = cli::need_shared_density(sc);
  const auto& p1 = sc.providers[0];
  const auto& p2 = sc.providers[1];
  const auto rep = constrained_ne(p, p1.total_bw, p2.total_bw, p1.small_floor,
                                  p2.small_floor, density);
  std::cout << "two-provider equilibrium under small-cell floors\n"
            << "  region         " << to_string(rep.region) << "\n"
            << "  price_macro    " << opt_price(rep.price_macro) << "\n"
            << "  price_small    " << opt_price(rep.price_small) << "\n"
            << "  total_small_bw " << csv::field(rep.total_small_bw) << "\n";
  for (int i = 0; i < 2; ++i) {
    std::cout << "  provider " << (i + 1) << ": bw_macro "
              << csv::field(rep.allocs[i].bw_macro) << ", bw_small "
              << csv::field(rep.allocs[i].bw_small) << ", stationarity "
              << csv::field(rep.kkt_residuals[i]) << "\n";
  }
  if (const auto path = effective_out(sc, out_flag)) {
    std::vector<std::string> rows;
    for (int i = 0; i < 2; ++i) {
      const auto& prov = i == 0 ? p1 : p2;
      rows.push_back(std::to_string(i + 1) + "," + csv::field(prov.total_bw) +
                     "," + csv::field(prov.small_floor) + "," +
                     csv::field(rep.allocs[i].bw_macro) + "," +
                     csv::field(rep.allocs[i].bw_small) + "," +
                     csv::field(rep.kkt_residuals[i]) + "," +
                     to_string(rep.region));
    }
    write_csv(*path,
              "provider,total_bw,small_floor,bw_macro,bw_small,kkt_residual,"
              "region",
              rows);
  }
  return 0;
}

int run_region_map(const Scenario& sc, std::size_t grid,
                   const std::string& out_flag) {
  const auto& p = cli::need_market(sc);
  const double density = cli::need_shared_density(sc);
  const auto map = region_map(p, sc.providers[0].total_bw,
                              sc.providers[1].total_bw, density, grid,
                              sweep_threads());
  std::size_t count_a = 0;
  for (const auto r : map.labels)
    if (r == Region::A) ++count_a;
  std::cout << "equilibrium region map on a " << grid << "x" << grid
            << " floor grid\n"
            << "  unconstrained-region cells " << count_a << " of "
            << map.labels.size() << "\n";
  if (const auto path = effective_out(sc, out_flag)) {
    std::vector<std::string> rows;
    rows.reserve(map.labels.size());
    for (std::size_t i = 0; i < map.floors_1.size(); ++i)
      for (std::size_t j = 0; j < map.floors_2.size(); ++j)
        rows.push_back(csv::field(map.floors_1[i]) + "," +
                       csv::field(map.floors_2[j]) + "," +
                       to_string(map.at(i, j)));
    write_csv(*path, "floor1,floor2,region_label", rows);
  } else {
    std::cout << "  (pass --out or output.path to store the grid)\n";
  }
  return 0;
}

double symmetric_bandwidth(const Scenario& sc) {
  const auto& p1 = cli::need_provider(sc, 0);
  if (sc.providers.size() > 1 &&
      sc.providers[1].total_bw != p1.total_bw)
    throw ScenarioError(
        "providers: the binary investment game is symmetric; both providers "
        "must have the same total_bw");
  return p1.total_bw;
}

int run_invest_game(const Scenario& sc, const std::string& sweep,
                    const std::string& out_flag) {
  const auto& p = cli::need_market(sc);
  const double b = symmetric_bandwidth(sc);
  const double lambda0 = cli::need_lambda0(sc);
  if (!sweep.empty()) {
    const CostRange range = parse_cost_range(sweep);
    const auto result = sweep_regions(p, b, lambda0, range.lo, range.hi,
                                      range.count());
    std::cout << "binary investment game sweep over unit cost [" << range.lo
              << ", " << range.hi << "] step " << range.step << "\n";
    if (result.boundary_both_to_one)
      std::cout << "  boundary both->one  "
                << csv::field(*result.boundary_both_to_one) << "\n";
    if (result.boundary_one_to_none)
      std::cout << "  boundary one->none  "
                << csv::field(*result.boundary_one_to_none) << "\n";
    if (const auto path = effective_out(sc, out_flag)) {
      std::vector<std::string> rows;
      rows.reserve(result.points.size());
      for (const auto& pt : result.points)
        rows.push_back(csv::field(pt.invest_cost) + "," +
                       csv::field(pt.s_both) + "," + csv::field(pt.s_none) +
                       "," + csv::field(pt.s_investor) + "," +
                       csv::field(pt.s_bystander) + "," +
                       ne_set_string(pt.pure_ne));
      write_csv(*path, "i_s,s_both,s_none,s_investor,s_bystander,ne_set", rows);
    }
    return 0;
  }
  const double cost = cli::need_investment_cost(sc);
  const auto [game, eq] = solve_binary_game(p, b, lambda0, cost);
  std::cout << "binary investment game at i_s = " << csv::field(cost) << "\n"
            << "  payoff both invest   " << csv::field(game.payoffs[0][0].first)
            << "\n"
            << "  payoff lone investor "
            << csv::field(game.payoffs[0][1].first) << "\n"
            << "  payoff bystander     "
            << csv::field(game.payoffs[0][1].second) << "\n"
            << "  payoff none invest   "
            << csv::field(game.payoffs[1][1].first) << "\n"
            << "  pure equilibria      " << ne_set_string(eq.pure_ne) << "\n"
            << "  region               " << to_string(eq.region_label) << "\n";
  if (const auto path = effective_out(sc, out_flag)) {
    std::vector<std::string> rows{
        csv::field(cost) + "," + csv::field(game.payoffs[0][0].first) + "," +
        csv::field(game.payoffs[1][1].first) + "," +
        csv::field(game.payoffs[0][1].first) + "," +
        csv::field(game.payoffs[0][1].second) + "," + ne_set_string(eq.pure_ne)};
    write_csv(*path, "i_s,s_both,s_none,s_investor,s_bystander,ne_set", rows);
  }
  return 0;
}

int run_welfare_newband(const Scenario& sc, const std::string& out_flag) {
  const auto& p = cli::need_market(sc);
  const double density = cli::need_shared_density(sc);
  const auto& nb = cli::need_new_band(sc);
  if (nb.split) {
    NewBandScenario scenario{nb.b1_legacy, nb.b2_legacy, nb.b_new, *nb.split,
                             nb.b_new - *nb.split};
    const auto cmp = three_scenario_welfare(p, scenario, density);
    std::cout << "new-band welfare comparison at split_1 = "
              << csv::field(*nb.split) << "\n"
              << "  threshold T        " << csv::field(cmp.threshold_t) << "\n"
              << "  sw unrestricted    " << csv::field(cmp.sw_unrestricted_opt)
              << "\n"
              << "  sw planner w/floor " << csv::field(cmp.sw_restricted_opt)
              << "\n"
              << "  sw equilibrium     " << csv::field(cmp.sw_restricted_ne)
              << "\n";
    if (cmp.optimal_window)
      std::cout << "  lossless window    [" << csv::field(cmp.optimal_window->first)
                << ", " << csv::field(cmp.optimal_window->second) << "]\n";
    else
      std::cout << "  lossless window    none (band above threshold)\n";
    if (const auto path = effective_out(sc, out_flag)) {
      std::vector<std::string> rows{csv::field(*nb.split) + "," +
                                    csv::field(cmp.sw_unrestricted_opt) + "," +
                                    csv::field(cmp.sw_restricted_opt) + "," +
                                    csv::field(cmp.sw_restricted_ne)};
      write_csv(*path, "b1n,sw_wo,sw_w_opt,sw_w_ne", rows);
    }
    return 0;
  }
  if (!nb.sweep)
    throw ScenarioError("new_band: either 'split' or 'sweep' is required");
  const std::size_t steps = static_cast<std::size_t>(*nb.sweep);
  const auto points = sweep_split(p, nb.b1_legacy, nb.b2_legacy, nb.b_new,
                                  density, steps, sweep_threads());
  const double t = new_band_threshold(p, nb.b1_legacy, nb.b2_legacy, density);
  std::size_t lossless = 0;
  for (const auto& pt : points)
    if (std::abs(pt.sw_restricted_ne - pt.sw_unrestricted_opt) <=
        1e-9 * pt.sw_unrestricted_opt)
      ++lossless;
  std::cout << "new-band welfare sweep, " << steps << " splits of b_new = "
            << csv::field(nb.b_new) << "\n"
            << "  threshold T     " << csv::field(t) << "\n"
            << "  lossless splits " << lossless << " of " << steps << "\n";
  if (const auto path = effective_out(sc, out_flag)) {
    std::vector<std::string> rows;
    rows.reserve(points.size());
    for (const auto& pt : points)
      rows.push_back(csv::field(pt.split_1) + "," +
                     csv::field(pt.sw_unrestricted_opt) + "," +
                     csv::field(pt.sw_restricted_opt) + "," +
                     csv::field(pt.sw_restricted_ne));
    write_csv(*path, "b1n,sw_wo,sw_w_opt,sw_w_ne", rows);
  }
  return 0;
}

int run_welfare_game(const Scenario& sc, const std::string& strategy_name,
                     const std::string& sweep, const std::string& out_flag) {
  const auto& p = cli::need_market(sc);
  const double b = symmetric_bandwidth(sc);
  const double lambda0 = cli::need_lambda0(sc);
  SpStrategy strategy;
  if (strategy_name == "revenue")
    strategy = SpStrategy::revenue_max;
  else if (strategy_name == "welfare")
    strategy = SpStrategy::welfare_max;
  else
    throw ScenarioError("--strategy: must be 'revenue' or 'welfare'");

  const auto emit = [&](double cost, std::vector<std::string>* rows) {
    const auto w = binary_game_welfare(p, b, lambda0, cost, strategy);
    if (rows) {
      rows->push_back(csv::field(cost) + ",both_invest," +
                      csv::field(w.sw_both_invest));
      rows->push_back(csv::field(cost) + ",one_invests," +
                      csv::field(w.sw_one_invests));
      rows->push_back(csv::field(cost) + ",none_invest," +
                      csv::field(w.sw_none_invest));
    }
    return w;
  };

  if (!sweep.empty()) {
    const CostRange range = parse_cost_range(sweep);
    const std::size_t n = range.count();
    std::vector<std::string> rows;
    rows.reserve(3 * n);
    for (std::size_t i = 0; i < n; ++i)
      emit(range.lo + range.step * static_cast<double>(i), &rows);
    std::cout << "welfare sweep of the binary game (" << strategy_name
              << "-seeking providers), cost [" << range.lo << ", " << range.hi
              << "] step " << range.step << "\n";
    if (const auto path = effective_out(sc, out_flag))
      write_csv(*path, "i_s,profile,sw", rows);
    else
      std::cout << "  (pass --out or output.path to store the sweep)\n";
    return 0;
  }
  const double cost = cli::need_investment_cost(sc);
  const auto w = emit(cost, nullptr);
  std::cout << "binary-game welfare at i_s = " << csv::field(cost) << " ("
            << strategy_name << "-seeking providers)\n"
            << "  both invest  " << csv::field(w.sw_both_invest) << "\n"
            << "  one invests  " << csv::field(w.sw_one_invests) << "\n"
            << "  none invest  " << csv::field(w.sw_none_invest) << "\n"
            << "  lone investor bw_small "
            << csv::field(w.one_investor_alloc.bw_small) << "\n";
  if (const auto path = effective_out(sc, out_flag)) {
    std::vector<std::string> rows;
    emit(cost, &rows);
    write_csv(*path, "i_s,profile,sw", rows);
  }
  return 0;
}

int run_verify(const Scenario& sc, std::size_t grid_points) {
  const auto& p = cli::need_market(sc);
  bool all_ok = true;
  const auto report = [&](const std::string& name, bool ok,
                          const std::string& detail) {
    all_ok = all_ok && ok;
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
  };

  if (!sc.providers.empty()) {
    const auto& prov = sc.providers[0];
    if (prov.density > 1.0) {
      const auto sol = constrained_allocation(p, prov.total_bw, prov.small_floor,
                                              prov.density, Objective::revenue);
      const double grid = oracle::grid_argmax_monopoly(
          p, prov.total_bw, prov.small_floor, prov.density, Objective::revenue,
          grid_points, sweep_threads());
      const double step =
          (prov.total_bw - prov.small_floor) / (grid_points - 1);
      report("single-provider split matches grid argmax",
             std::abs(sol.alloc.bw_small - grid) <= step + 1e-12,
             "closed form " + csv::field(sol.alloc.bw_small) + ", grid " +
                 csv::field(grid));
      const double err = oracle::fd_derivative_check(
          [&](double lam) {
            return allocation_given_density(p, prov.total_bw, lam, 0.0)
                .objective_value;
          },
          prov.density + 0.5, 1e-6 * prov.density,
          detail::invest_stationarity_lhs(p, prov.total_bw, prov.density + 0.5,
                                          Objective::revenue));
      report("deployment stationarity curve matches finite differences",
             err < 1e-4, "relative error " + csv::field(err));
    } else {
      const double grid = oracle::grid_argmax_monopoly(
          p, prov.total_bw, 0.0, prov.density, Objective::revenue, grid_points,
          sweep_threads());
      report("shallow deployment keeps all bandwidth in macro cells",
             grid <= prov.total_bw / (grid_points - 1) + 1e-12,
             "grid argmax " + csv::field(grid));
    }
  }

  if (sc.providers.size() >= 2 && sc.providers[0].density > 1.0) {
    const double density = cli::need_shared_density(sc);
    const auto& p1 = sc.providers[0];
    const auto& p2 = sc.providers[1];
    const auto free_ne = unconstrained_ne(p, p1.total_bw, p2.total_bw, density);
    const std::vector<double> totals{p1.total_bw, p2.total_bw};
    const std::vector<double> zeros{0.0, 0.0};
    const std::vector<double> at_ne{free_ne[0].bw_small, free_ne[1].bw_small};
    const auto free_check = oracle::no_deviation_check(
        p, totals, zeros, at_ne, density, 2000, sweep_threads());
    report("unconstrained equilibrium defeats unilateral deviations",
           free_check.holds, "worst gain " + csv::field(free_check.worst_gain));

    const auto rep = constrained_ne(p, p1.total_bw, p2.total_bw, p1.small_floor,
                                    p2.small_floor, density);
    const std::vector<double> floors{p1.small_floor, p2.small_floor};
    const std::vector<double> smalls{rep.allocs[0].bw_small,
                                     rep.allocs[1].bw_small};
    const auto floored = oracle::no_deviation_check(p, totals, floors, smalls,
                                                    density, 2000,
                                                    sweep_threads());
    bool kkt = true;
    for (int i = 0; i < 2; ++i) {
      const double f = floors[i], b = totals[i], s = smalls[i],
                   d = rep.kkt_residuals[i];
      if (s <= f + 1e-9 * b)
        kkt = kkt && d <= 1e-8;
      else if (s >= b - 1e-9 * b)
        kkt = kkt && d >= -1e-8;
      else
        kkt = kkt && std::abs(d) <= 1e-8;
    }
    report("floored equilibrium satisfies stationarity", kkt,
           "residuals " + csv::field(rep.kkt_residuals[0]) + ", " +
               csv::field(rep.kkt_residuals[1]));
    report("floored equilibrium defeats unilateral deviations", floored.holds,
           "worst gain " + csv::field(floored.worst_gain));
  }

  if (sc.investment && sc.investment->lambda0 && !sc.providers.empty() &&
      *sc.investment->lambda0 > 1.0) {
    const double lambda0 = *sc.investment->lambda0;
    const double b = sc.providers[0].total_bw;
    const auto one = payoff_one_invests(p, b, lambda0, 0.0);
    if (one.separate_service) {
      const double a = p.alpha;
      double best_x = 0.0, best_v = -1.0;
      for (std::size_t i = 1; i < grid_points; ++i) {
        const double x = b * static_cast<double>(i) / (grid_points - 1);
        const double rm = (2.0 * b - x) * p.r0 / p.n_m;
        const double rs = lambda0 * x * p.r0 / p.n_f;
        const double v = lambda0 * x * p.r0 * std::pow(rs, -a) +
                         (b - x) * p.r0 * std::pow(rm, -a);
        if (v > best_v) {
          best_v = v;
          best_x = x;
        }
      }
      report("lone-investor split matches grid argmax",
             std::abs(one.investor_alloc.bw_small - best_x) <=
                 b / (grid_points - 1) + 1e-12,
             "closed form " + csv::field(one.investor_alloc.bw_small) +
                 ", grid " + csv::field(best_x));
    } else {
      report("lone investor floods small cells",
             one.investor_alloc.bw_small == b, "");
    }
  }

  std::cout << (all_ok ? "verification passed" : "verification FAILED") << "\n";
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "hetnet - pricing, bandwidth-partition and investment equilibria for a "
      "two-tier wireless market.\n"
      "Scenario files are JSON; see the scenarios/ directory and README for "
      "the schema. All CSV floats use 12 significant digits and identical "
      "inputs produce byte-identical files."};
  app.require_subcommand(1);

  std::string scenario_path, out_flag, objective = "revenue",
                             strategy = "revenue", sweep;
  std::size_t grid = 41;
  std::size_t verify_grid = 100000;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "scenario JSON file")
        ->required();
    cmd->add_option("--out", out_flag,
                    "write CSV here (overrides output.path in the scenario)");
  };

  auto* alloc = app.add_subcommand(
      "monopoly-alloc",
      "Single-provider optimal bandwidth split and prices.\n"
      "CSV: bw_macro,bw_small,price_macro,price_small,density,"
      "objective_value,service,binding_floor");
  add_common(alloc);
  alloc->add_option("--objective", objective, "revenue|welfare");

  auto* invest = app.add_subcommand(
      "monopoly-invest",
      "Single-provider small-cell deployment choice under a unit cost.\n"
      "CSV (single): i_s,density_opt,objective_value,break_even_cost\n"
      "CSV (sweep):  i_s,density_opt,objective_value");
  add_common(invest);
  invest->add_option("--objective", objective, "revenue|welfare");
  invest->add_option("--sweep-cost", sweep, "LO:HI:STEP cost sweep");

  auto* duo = app.add_subcommand(
      "duopoly-ne",
      "Two-provider equilibrium under the scenario's small-cell floors.\n"
      "CSV: provider,total_bw,small_floor,bw_macro,bw_small,kkt_residual,"
      "region");
  add_common(duo);

  auto* rmap = app.add_subcommand(
      "region-map",
      "Equilibrium region label over a floor grid.\n"
      "CSV: floor1,floor2,region_label");
  add_common(rmap);
  rmap->add_option("--grid", grid, "grid points per axis (default 41)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{4096}));

  auto* game = app.add_subcommand(
      "invest-game",
      "Binary invest-or-not game between two symmetric providers.\n"
      "CSV: i_s,s_both,s_none,s_investor,s_bystander,ne_set");
  add_common(game);
  game->add_option("--sweep-cost", sweep, "LO:HI:STEP cost sweep");

  auto* newband = app.add_subcommand(
      "welfare-newband",
      "Welfare impact of a small-cell-only band split between two "
      "providers.\nCSV: b1n,sw_wo,sw_w_opt,sw_w_ne");
  add_common(newband);

  auto* wgame = app.add_subcommand(
      "welfare-game",
      "Welfare of each binary-game profile under revenue- or "
      "welfare-seeking providers.\nCSV: i_s,profile,sw");
  add_common(wgame);
  wgame->add_option("--strategy", strategy, "revenue|welfare");
  wgame->add_option("--sweep-cost", sweep, "LO:HI:STEP cost sweep");

  auto* verify = app.add_subcommand(
      "verify",
      "Run the brute-force oracle suite against the scenario's parameters.");
  add_common(verify);
  verify
      ->add_option("--grid", verify_grid,
                   "oracle grid points (default 100000)")
      ->check(CLI::Range(std::size_t{100}, std::size_t{10000000}));

  CLI11_PARSE(app, argc, argv);

  try {
    const Scenario sc = hetnet::cli::load_scenario(scenario_path);
    if (alloc->parsed()) return run_monopoly_alloc(sc, objective, out_flag);
    if (invest->parsed())
      return run_monopoly_invest(sc, objective, sweep, out_flag);
    if (duo->parsed()) return run_duopoly_ne(sc, out_flag);
    if (rmap->parsed()) return run_region_map(sc, grid, out_flag);
    if (game->parsed()) return run_invest_game(sc, sweep, out_flag);
    if (newband->parsed()) return run_welfare_newband(sc, out_flag);
    if (wgame->parsed()) return run_welfare_game(sc, strategy, sweep, out_flag);
    if (verify->parsed()) return run_verify(sc, verify_grid);
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const hetnet::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
