#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetnet/core_model.hpp"

namespace hetnet::cli {

/// Scenario file problem: bad syntax, unknown keys, missing or out-of-range
/// fields. Mapped to exit code 2.
struct ScenarioError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvestmentSection {
  std::optional<double> i_s;
  std::optional<double> lambda0;
};

struct NewBandSection {
  double b1_legacy = 0.0;
  double b2_legacy = 0.0;
  double b_new = 0.0;
  std::optional<double> split;     ///< split_1; the rest goes to provider 2
  std::optional<long long> sweep;  ///< grid points along split_1
};

struct OutputSection {
  std::string format = "csv";
  std::optional<std::string> path;
};

/// Parsed and schema-checked scenario document. Sections beyond `market` are
/// optional here; each subcommand demands the ones it needs.
struct Scenario {
  MarketParams market{};
  std::vector<ProviderConfig> providers;
  std::optional<InvestmentSection> investment;
  std::optional<NewBandSection> new_band;
  std::optional<OutputSection> output;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& where,
                                const std::set<std::string>& known) {
  for (const auto& item : obj.items()) {
    if (!known.count(item.key()))
      throw ScenarioError(where + ": unknown key '" + item.key() + "'");
  }
}

inline double require_number(const json& obj, const std::string& where,
                             const std::string& key) {
  if (!obj.contains(key))
    throw ScenarioError(where + "." + key + ": missing required field");
  if (!obj[key].is_number())
    throw ScenarioError(where + "." + key + ": must be a number");
  return obj[key].get<double>();
}

inline std::optional<double> optional_number(const json& obj,
                                             const std::string& where,
                                             const std::string& key) {
  if (!obj.contains(key)) return std::nullopt;
  if (!obj[key].is_number())
    throw ScenarioError(where + "." + key + ": must be a number");
  return obj[key].get<double>();
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& j) {
  using detail::optional_number;
  using detail::require_number;
  if (!j.is_object()) throw ScenarioError("scenario: top level must be an object");
  detail::reject_unknown_keys(
      j, "scenario", {"market", "providers", "investment", "new_band", "output"});

  Scenario sc;
  if (!j.contains("market"))
    throw ScenarioError("market: missing required section");
  {
    const auto& m = j["market"];
    if (!m.is_object()) throw ScenarioError("market: must be an object");
    detail::reject_unknown_keys(m, "market", {"alpha", "r0", "n_m", "n_f"});
    sc.market.alpha = require_number(m, "market", "alpha");
    sc.market.r0 = require_number(m, "market", "r0");
    sc.market.n_m = require_number(m, "market", "n_m");
    sc.market.n_f = require_number(m, "market", "n_f");
    try {
      sc.market.validate();
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(e.what());
    }
  }

  if (j.contains("providers")) {
    const auto& arr = j["providers"];
    if (!arr.is_array()) throw ScenarioError("providers: must be an array");
    int idx = 0;
    for (const auto& p : arr) {
      const std::string where = "providers[" + std::to_string(idx) + "]";
      if (!p.is_object()) throw ScenarioError(where + ": must be an object");
      detail::reject_unknown_keys(p, where,
                                  {"total_bw", "small_floor", "density"});
      ProviderConfig cfg;
      cfg.total_bw = require_number(p, where, "total_bw");
      cfg.small_floor = optional_number(p, where, "small_floor").value_or(0.0);
      cfg.density = optional_number(p, where, "density").value_or(0.0);
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw ScenarioError(where + ": " + e.what());
      }
      sc.providers.push_back(cfg);
      ++idx;
    }
  }

  if (j.contains("investment")) {
    const auto& inv = j["investment"];
    if (!inv.is_object()) throw ScenarioError("investment: must be an object");
    detail::reject_unknown_keys(inv, "investment", {"i_s", "lambda0"});
    InvestmentSection s;
    s.i_s = optional_number(inv, "investment", "i_s");
    s.lambda0 = optional_number(inv, "investment", "lambda0");
    if (s.i_s && *s.i_s < 0.0)
      throw ScenarioError("investment.i_s: must be >= 0");
    sc.investment = s;
  }

  if (j.contains("new_band")) {
    const auto& nb = j["new_band"];
    if (!nb.is_object()) throw ScenarioError("new_band: must be an object");
    detail::reject_unknown_keys(
        nb, "new_band", {"b1_legacy", "b2_legacy", "b_new", "split", "sweep"});
    NewBandSection s;
    s.b1_legacy = require_number(nb, "new_band", "b1_legacy");
    s.b2_legacy = require_number(nb, "new_band", "b2_legacy");
    s.b_new = require_number(nb, "new_band", "b_new");
    s.split = optional_number(nb, "new_band", "split");
    if (nb.contains("sweep")) {
      if (!nb["sweep"].is_number_integer())
        throw ScenarioError("new_band.sweep: must be an integer");
      s.sweep = nb["sweep"].get<long long>();
      if (*s.sweep < 2) throw ScenarioError("new_band.sweep: must be >= 2");
    }
    if (s.split && s.sweep)
      throw ScenarioError("new_band: give either 'split' or 'sweep', not both");
    if (s.split && (*s.split < 0.0 || *s.split > s.b_new))
      throw ScenarioError("new_band.split: must lie in [0, b_new]");
    sc.new_band = s;
  }

  if (j.contains("output")) {
    const auto& out = j["output"];
    if (!out.is_object()) throw ScenarioError("output: must be an object");
    detail::reject_unknown_keys(out, "output", {"format", "path"});
    OutputSection s;
    if (out.contains("format")) {
      if (!out["format"].is_string())
        throw ScenarioError("output.format: must be a string");
      s.format = out["format"].get<std::string>();
      if (s.format != "csv")
        throw ScenarioError("output.format: only 'csv' is supported");
    }
    if (out.contains("path")) {
      if (!out["path"].is_string())
        throw ScenarioError("output.path: must be a string");
      s.path = out["path"].get<std::string>();
    }
    sc.output = s;
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("scenario: cannot open file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("scenario: JSON parse error in '" + path +
                        "': " + e.what());
  }
  return parse_scenario(j);
}

// Per-subcommand requirements.

inline const MarketParams& need_market(const Scenario& sc) { return sc.market; }

inline const ProviderConfig& need_provider(const Scenario& sc, std::size_t i) {
  if (sc.providers.size() <= i)
    throw ScenarioError("providers: at least " + std::to_string(i + 1) +
                        " provider(s) required for this subcommand");
  return sc.providers[i];
}

inline double need_shared_density(const Scenario& sc) {
  need_provider(sc, 1);
  if (sc.providers[0].density != sc.providers[1].density)
    throw ScenarioError(
        "providers: both providers must share the same density for the "
        "two-provider game");
  return sc.providers[0].density;
}

inline double need_investment_cost(const Scenario& sc) {
  if (!sc.investment || !sc.investment->i_s)
    throw ScenarioError("investment.i_s: missing required field");
  return *sc.investment->i_s;
}

inline double need_lambda0(const Scenario& sc) {
  if (!sc.investment || !sc.investment->lambda0)
    throw ScenarioError("investment.lambda0: missing required field");
  return *sc.investment->lambda0;
}

inline const NewBandSection& need_new_band(const Scenario& sc) {
  if (!sc.new_band) throw ScenarioError("new_band: missing required section");
  return *sc.new_band;
}

}  // namespace hetnet::cli
