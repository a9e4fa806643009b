#pragma once

/**
 * @file config.hpp
 * @brief JSON run configuration: strict parsing (unknown keys are errors,
 *        reported with their JSON path), serialization, and construction of
 *        the problem it describes.
 */

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnp/errors.hpp"
#include "pnp/field.hpp"
#include "pnp/grid.hpp"
#include "pnp/mms.hpp"
#include "pnp/newton.hpp"
#include "pnp/problem.hpp"
#include "pnp/timestepper.hpp"

namespace pnp {

using json = nlohmann::json;

/// A named scalar field with its parameters, e.g.
/// {"type": "sin_pi_x", "amplitude": -1}.
struct FieldSpec {
  std::string type = "constant";
  json params = json{{"value", 0.0}};

  static FieldSpec constant(double v) { return {"constant", json{{"value", v}}}; }
};

struct SpeciesConfig {
  double valence = 1.0;
  FieldSpec initial = FieldSpec::constant(1.0);
  bool has_source = false;
  FieldSpec source;
};

struct RunConfig {
  std::string experiment = "closed_cell";
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  int nx = 32, ny = 32;
  double kappa = 1.0;
  std::vector<SpeciesConfig> species;
  FieldSpec v_left, v_right, sigma_bottom, sigma_top, rho_f;
  TimeControls time;
  SolverKind solver = SolverKind::Newton;
  NewtonOptions newton;
  InvariantChecks checks;
  /// Grid sizes N (N x N cells) for the accuracy and solver sweeps.
  std::vector<int> grids;
  /// How dt follows h in sweeps: "fixed", "h2" or "h_over_10".
  std::string dt_rule = "fixed";
  std::vector<double> omegas;
  bool omega_zero_control = false;
  std::vector<double> snapshot_times;
  /// Uniform reference step of the adaptive comparison.
  double uniform_dt = 0.0;
  double charge_split = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& path)
{
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' at " + path);
}

inline const json& child(const json& j, const std::string& key, const std::string& path)
{
  if (!j.contains(key)) throw ConfigError("missing key '" + key + "' at " + path);
  return j.at(key);
}

template <class T>
T get(const json& j, const std::string& key, const std::string& path)
{
  if (!j.contains(key)) throw ConfigError("missing key '" + key + "' at " + path);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "' at " + path + ": " + e.what());
  }
}

inline const std::set<std::string>& field_params(const std::string& type, const std::string& path)
{
  static const std::map<std::string, std::set<std::string>> known = {
      {"constant", {"value"}},
      {"sin_pi_x", {"amplitude"}},
      {"square_wave", {"breakpoints", "levels"}},
      {"charge_then_sine", {"hold", "level", "omega"}},
      {"mms_potential", {}},
      {"mms_concentration", {}},
      {"mms_fixed_charge", {}},
      {"mms_source", {"valence"}},
  };
  const auto it = known.find(type);
  if (it == known.end()) throw ConfigError("unknown field type '" + type + "' at " + path);
  return it->second;
}

inline FieldSpec parse_field(const json& j, const std::string& path)
{
  if (!j.is_object()) throw ConfigError(path + ": expected a field object");
  FieldSpec f;
  f.type = get<std::string>(j, "type", path);
  std::set<std::string> allowed = field_params(f.type, path);
  allowed.insert("type");
  check_keys(j, allowed, path);
  f.params = json::object();
  for (const auto& key : field_params(f.type, path)) {
    if (!j.contains(key)) throw ConfigError("missing key '" + key + "' at " + path);
    f.params[key] = j.at(key);
  }
  if (f.type == "square_wave") {
    const auto bp = get<std::vector<double>>(j, "breakpoints", path);
    const auto lv = get<std::vector<double>>(j, "levels", path);
    if (lv.size() != bp.size() + 1)
      throw ConfigError(path + ": square_wave needs one more level than breakpoints");
    for (std::size_t i = 1; i < bp.size(); ++i)
      if (!(bp[i] > bp[i - 1])) throw ConfigError(path + ": breakpoints must increase");
  } else {
    for (const auto& [key, value] : f.params.items())
      if (!value.is_number()) throw ConfigError(path + "/" + key + ": expected a number");
  }
  return f;
}

inline json field_to_json(const FieldSpec& f)
{
  json j = f.params;
  j["type"] = f.type;
  return j;
}

inline const char* solver_name(SolverKind k)
{
  return k == SolverKind::Newton ? "newton" : "fixed-point";
}

}  // namespace detail

inline SolverKind parse_solver_kind(const std::string& s)
{
  if (s == "newton") return SolverKind::Newton;
  if (s == "fixed-point" || s == "fixed_point") return SolverKind::FixedPoint;
  throw ConfigError("unknown solver '" + s + "' (expected newton or fixed-point)");
}

/// Builds the callable for a field spec; kappa enters the manufactured charge.
inline Field make_field(const FieldSpec& f, double kappa)
{
  const json& p = f.params;
  if (f.type == "constant") return Field::constant(p.at("value").get<double>());
  if (f.type == "sin_pi_x") {
    const double a = p.at("amplitude").get<double>();
    return Field([a](double, double x, double) { return a * std::sin(std::numbers::pi * x); },
                 false);
  }
  if (f.type == "square_wave") {
    // Level k holds on [breakpoints[k-1], breakpoints[k]); the last level
    // persists past the final breakpoint.
    const auto bp = p.at("breakpoints").get<std::vector<double>>();
    const auto lv = p.at("levels").get<std::vector<double>>();
    return Field(
        [bp, lv](double t, double, double) {
          std::size_t k = 0;
          while (k < bp.size() && t >= bp[k]) ++k;
          return lv[k];
        },
        true);
  }
  if (f.type == "charge_then_sine") {
    const double hold = p.at("hold").get<double>(), level = p.at("level").get<double>();
    const double w = p.at("omega").get<double>();
    return Field([=](double t, double, double) { return t < hold ? level : std::sin(w * t); },
                 true);
  }
  if (f.type == "mms_potential") return Field(mms::potential, true);
  if (f.type == "mms_concentration") return Field(mms::concentration, true);
  if (f.type == "mms_fixed_charge")
    return Field([kappa](double t, double x, double y) { return mms::fixed_charge(t, x, y, kappa); },
                 true);
  if (f.type == "mms_source") {
    const double q = p.at("valence").get<double>();
    return Field([q](double t, double x, double y) { return mms::source(t, x, y, q); }, true);
  }
  throw ConfigError("unknown field type '" + f.type + "'");
}

inline RunConfig parse_config(const json& j)
{
  using namespace detail;
  check_keys(j, {"experiment", "domain", "grid", "kappa", "species", "potential", "time", "solver",
                 "checks", "sweep", "seed"},
             "/");
  RunConfig c;
  c.experiment = get<std::string>(j, "experiment", "/");
  static const std::set<std::string> experiments = {"mms", "closed_cell", "switching", "ac",
                                                    "compare"};
  if (!experiments.count(c.experiment))
    throw ConfigError("unknown experiment '" + c.experiment + "' at /experiment");

  const json& dom = child(j, "domain", "/");
  check_keys(dom, {"x", "y"}, "/domain");
  const auto xs = get<std::vector<double>>(dom, "x", "/domain");
  const auto ys = get<std::vector<double>>(dom, "y", "/domain");
  if (xs.size() != 2 || ys.size() != 2 || !(xs[1] > xs[0]) || !(ys[1] > ys[0]))
    throw ConfigError("/domain: x and y must be increasing [lo, hi] pairs");
  c.x0 = xs[0], c.x1 = xs[1], c.y0 = ys[0], c.y1 = ys[1];

  const json& grid = child(j, "grid", "/");
  check_keys(grid, {"nx", "ny"}, "/grid");
  c.nx = get<int>(grid, "nx", "/grid");
  c.ny = get<int>(grid, "ny", "/grid");
  if (c.nx < 1 || c.ny < 1) throw ConfigError("/grid: nx and ny must be positive");

  c.kappa = get<double>(j, "kappa", "/");
  if (!(c.kappa > 0.0)) throw ConfigError("/kappa: must be positive");

  const json& sp = child(j, "species", "/");
  if (!sp.is_array() || sp.empty()) throw ConfigError("/species: expected a nonempty array");
  for (std::size_t l = 0; l < sp.size(); ++l) {
    const std::string path = "/species/" + std::to_string(l);
    check_keys(sp[l], {"valence", "initial", "source"}, path);
    SpeciesConfig s;
    s.valence = get<double>(sp[l], "valence", path);
    s.initial = parse_field(child(sp[l], "initial", path), path + "/initial");
    if (sp[l].contains("source")) {
      s.has_source = true;
      s.source = parse_field(sp[l].at("source"), path + "/source");
    }
    c.species.push_back(std::move(s));
  }

  const json& pot = child(j, "potential", "/");
  check_keys(pot, {"left", "right", "sigma_bottom", "sigma_top", "fixed_charge"}, "/potential");
  c.v_left = parse_field(child(pot, "left", "/potential"), "/potential/left");
  c.v_right = parse_field(child(pot, "right", "/potential"), "/potential/right");
  c.sigma_bottom = parse_field(child(pot, "sigma_bottom", "/potential"), "/potential/sigma_bottom");
  c.sigma_top = parse_field(child(pot, "sigma_top", "/potential"), "/potential/sigma_top");
  c.rho_f = parse_field(child(pot, "fixed_charge", "/potential"), "/potential/fixed_charge");

  const json& tm = child(j, "time", "/");
  check_keys(tm, {"mode", "dt", "dt_min", "dt_max", "alpha", "t_end"}, "/time");
  const auto mode = get<std::string>(tm, "mode", "/time");
  if (mode == "uniform")
    c.time.mode = StepMode::Uniform;
  else if (mode == "adaptive")
    c.time.mode = StepMode::Adaptive;
  else
    throw ConfigError("/time/mode: expected uniform or adaptive");
  c.time.dt = get<double>(tm, "dt", "/time");
  c.time.dt_min = get<double>(tm, "dt_min", "/time");
  c.time.dt_max = get<double>(tm, "dt_max", "/time");
  c.time.alpha = get<double>(tm, "alpha", "/time");
  c.time.t_end = get<double>(tm, "t_end", "/time");
  try {
    c.time.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("/time: ") + e.what());
  }

  const json& so = child(j, "solver", "/");
  check_keys(so, {"kind", "tol", "max_newton", "max_fixed_point", "inner_rel_tol",
                  "concentration_rel_tol"},
             "/solver");
  c.solver = parse_solver_kind(get<std::string>(so, "kind", "/solver"));
  c.newton.tol = get<double>(so, "tol", "/solver");
  c.newton.max_newton = get<int>(so, "max_newton", "/solver");
  c.newton.max_fixed_point = get<int>(so, "max_fixed_point", "/solver");
  c.newton.inner_rel_tol = get<double>(so, "inner_rel_tol", "/solver");
  c.newton.concentration_rel_tol = get<double>(so, "concentration_rel_tol", "/solver");

  const json& ck = child(j, "checks", "/");
  check_keys(ck, {"mass", "mass_rel_tol", "energy", "energy_tol"}, "/checks");
  c.checks.mass = get<bool>(ck, "mass", "/checks");
  c.checks.mass_rel_tol = get<double>(ck, "mass_rel_tol", "/checks");
  c.checks.energy = get<bool>(ck, "energy", "/checks");
  c.checks.energy_tol = get<double>(ck, "energy_tol", "/checks");

  const json& sw = child(j, "sweep", "/");
  check_keys(sw, {"grids", "dt_rule", "omegas", "omega_zero_control", "snapshot_times",
                  "uniform_dt", "charge_split"},
             "/sweep");
  c.grids = get<std::vector<int>>(sw, "grids", "/sweep");
  c.dt_rule = get<std::string>(sw, "dt_rule", "/sweep");
  if (c.dt_rule != "fixed" && c.dt_rule != "h2" && c.dt_rule != "h_over_10")
    throw ConfigError("/sweep/dt_rule: expected fixed, h2 or h_over_10");
  c.omegas = get<std::vector<double>>(sw, "omegas", "/sweep");
  c.omega_zero_control = get<bool>(sw, "omega_zero_control", "/sweep");
  c.snapshot_times = get<std::vector<double>>(sw, "snapshot_times", "/sweep");
  c.uniform_dt = get<double>(sw, "uniform_dt", "/sweep");
  c.charge_split = get<double>(sw, "charge_split", "/sweep");

  c.seed = get<std::uint64_t>(j, "seed", "/");
  return c;
}

inline json to_json(const RunConfig& c)
{
  using detail::field_to_json;
  json species = json::array();
  for (const auto& s : c.species) {
    json js{{"valence", s.valence}, {"initial", field_to_json(s.initial)}};
    if (s.has_source) js["source"] = field_to_json(s.source);
    species.push_back(js);
  }
  return json{
      {"experiment", c.experiment},
      {"domain", {{"x", {c.x0, c.x1}}, {"y", {c.y0, c.y1}}}},
      {"grid", {{"nx", c.nx}, {"ny", c.ny}}},
      {"kappa", c.kappa},
      {"species", species},
      {"potential",
       {{"left", field_to_json(c.v_left)},
        {"right", field_to_json(c.v_right)},
        {"sigma_bottom", field_to_json(c.sigma_bottom)},
        {"sigma_top", field_to_json(c.sigma_top)},
        {"fixed_charge", field_to_json(c.rho_f)}}},
      {"time",
       {{"mode", c.time.mode == StepMode::Uniform ? "uniform" : "adaptive"},
        {"dt", c.time.dt},
        {"dt_min", c.time.dt_min},
        {"dt_max", c.time.dt_max},
        {"alpha", c.time.alpha},
        {"t_end", c.time.t_end}}},
      {"solver",
       {{"kind", detail::solver_name(c.solver)},
        {"tol", c.newton.tol},
        {"max_newton", c.newton.max_newton},
        {"max_fixed_point", c.newton.max_fixed_point},
        {"inner_rel_tol", c.newton.inner_rel_tol},
        {"concentration_rel_tol", c.newton.concentration_rel_tol}}},
      {"checks",
       {{"mass", c.checks.mass},
        {"mass_rel_tol", c.checks.mass_rel_tol},
        {"energy", c.checks.energy},
        {"energy_tol", c.checks.energy_tol}}},
      {"sweep",
       {{"grids", c.grids},
        {"dt_rule", c.dt_rule},
        {"omegas", c.omegas},
        {"omega_zero_control", c.omega_zero_control},
        {"snapshot_times", c.snapshot_times},
        {"uniform_dt", c.uniform_dt},
        {"charge_split", c.charge_split}}},
      {"seed", c.seed},
  };
}

inline RunConfig parse_config_text(const std::string& text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

inline RunConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// The problem described by a config, on an nx x ny grid.
inline PnpProblem build_problem(const RunConfig& c, int nx, int ny)
{
  PnpProblem p{{Grid2D::uniform(c.x0, c.x1, c.y0, c.y1, nx, ny)}, {}};
  p.poisson.kappa = c.kappa;
  p.poisson.v_left = make_field(c.v_left, c.kappa);
  p.poisson.v_right = make_field(c.v_right, c.kappa);
  p.poisson.sigma_bottom = make_field(c.sigma_bottom, c.kappa);
  p.poisson.sigma_top = make_field(c.sigma_top, c.kappa);
  p.poisson.rho_f = make_field(c.rho_f, c.kappa);
  for (const auto& s : c.species) {
    SpeciesSpec sp;
    sp.valence = s.valence;
    sp.initial = make_field(s.initial, c.kappa);
    sp.has_source = s.has_source;
    if (s.has_source) sp.source = make_field(s.source, c.kappa);
    p.species.push_back(std::move(sp));
  }
  return p;
}

inline PnpProblem build_problem(const RunConfig& c) { return build_problem(c, c.nx, c.ny); }

}  // namespace pnp
