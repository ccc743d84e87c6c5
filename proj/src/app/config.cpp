#include "rydsim/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace rydsim::app {

namespace {

const std::set<std::string> kScenarios{"excite-sin", "excite-two-step", "cz-electronic", "cz-nuclear",
                                       "cz-tensor",  "cz-cross",        "levels",        "sweep"};

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError("'" + where + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, std::optional<T>& out, const std::string& where) {
  if (!node[key]) return;
  T v{};
  read(node, key, v, where);
  out = v;
}

void read_params(const YAML::Node& n, PhysicsParams& p) {
  check_keys(n, "params",
             {"Delta", "delta", "kappa1", "eta", "eta_prime", "zeta", "Lambda", "Omega0", "N", "deexcitation",
              "compensation", "Omega_p", "delta_p"});
  read(n, "Delta", p.Delta, "params");
  read(n, "delta", p.delta, "params");
  read(n, "kappa1", p.kappa1, "params");
  read(n, "eta", p.eta, "params");
  read(n, "eta_prime", p.eta_prime, "params");
  read(n, "zeta", p.zeta, "params");
  read(n, "Lambda", p.Lambda, "params");
  read(n, "Omega0", p.Omega0, "params");
  read(n, "N", p.N, "params");
  read(n, "deexcitation", p.deexcitation, "params");
  read(n, "compensation", p.compensation, "params");
  read(n, "Omega_p", p.Omega_p, "params");
  read(n, "delta_p", p.delta_p, "params");
}

void read_levels(const YAML::Node& n, LevelsConfig& l) {
  check_keys(n, "levels",
             {"I", "J", "A_mhz", "B_mhz", "nstar_ref", "nstar_new", "g_J", "g_I", "fields_gauss", "n", "A_prime_ghz",
              "O_nn", "Delta_ST_ghz", "separation_ghz", "gap_ghz", "singlet_fraction"});
  read(n, "I", l.I, "levels");
  read(n, "J", l.J, "levels");
  read(n, "A_mhz", l.A_mhz, "levels");
  read(n, "B_mhz", l.B_mhz, "levels");
  read(n, "nstar_ref", l.nstar_ref, "levels");
  read(n, "nstar_new", l.nstar_new, "levels");
  read(n, "g_J", l.g_J, "levels");
  read(n, "g_I", l.g_I, "levels");
  read(n, "fields_gauss", l.fields_gauss, "levels");
  read(n, "n", l.n, "levels");
  read(n, "A_prime_ghz", l.A_prime_ghz, "levels");
  read(n, "O_nn", l.O_nn, "levels");
  read(n, "Delta_ST_ghz", l.Delta_ST_ghz, "levels");
  read(n, "separation_ghz", l.separation_ghz, "levels");
  read(n, "gap_ghz", l.gap_ghz, "levels");
  read(n, "singlet_fraction", l.singlet_fraction, "levels");
}

void read_sweep(const YAML::Node& n, SweepConfig& s) {
  check_keys(n, "sweep", {"scenario", "parameter", "values", "range"});
  read(n, "scenario", s.scenario, "sweep");
  read(n, "parameter", s.parameter, "sweep");
  read(n, "values", s.values, "sweep");
  if (n["range"]) {
    const auto r = n["range"];
    check_keys(r, "sweep.range", {"start", "stop", "count"});
    double a = 0, b = 0;
    long count = 0;
    read(r, "start", a, "sweep.range");
    read(r, "stop", b, "sweep.range");
    read(r, "count", count, "sweep.range");
    if (count < 1 || count > 100000) throw ConfigError("sweep count must lie in 1..100000");
    if (!s.values.empty()) throw ConfigError("sweep takes either values or range, not both");
    for (long i = 0; i < count; ++i)
      s.values.push_back(count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
}

bool positive(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML parse error: ") + e.what());
  }
  ScenarioConfig c;
  check_keys(root, "config",
             {"scenario", "method", "name", "two_kappa0_mhz", "params", "blockade", "budget", "drive", "levels", "sweep"});
  read(root, "scenario", c.scenario, "config");
  read(root, "method", c.method, "config");
  read(root, "name", c.name, "config");
  read(root, "two_kappa0_mhz", c.two_kappa0_mhz, "config");
  if (root["params"]) read_params(root["params"], c.params);
  if (root["blockade"]) {
    check_keys(root["blockade"], "blockade", {"mode", "V_mhz"});
    read(root["blockade"], "mode", c.blockade.mode, "blockade");
    read(root["blockade"], "V_mhz", c.blockade.V_mhz, "blockade");
  }
  if (root["budget"]) {
    check_keys(root["budget"], "budget", {"tau_us", "V_mhz"});
    read(root["budget"], "tau_us", c.budget.tau_us, "budget");
    read(root["budget"], "V_mhz", c.budget.V_mhz, "budget");
  }
  if (root["drive"]) {
    check_keys(root["drive"], "drive", {"kind", "cases", "samples", "mix_angle"});
    read(root["drive"], "kind", c.drive.kind, "drive");
    read(root["drive"], "cases", c.drive.cases, "drive");
    read(root["drive"], "samples", c.drive.samples, "drive");
    read(root["drive"], "mix_angle", c.drive.mix_angle, "drive");
  }
  if (root["levels"]) read_levels(root["levels"], c.levels);
  if (root["sweep"]) read_sweep(root["sweep"], c.sweep);
  if (c.name.empty()) c.name = c.scenario;
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ScenarioConfig& c) {
  if (!kScenarios.count(c.scenario)) throw ConfigError("unknown scenario '" + c.scenario + "'");
  if (!positive(c.two_kappa0_mhz)) throw ConfigError("two_kappa0_mhz must be positive");
  const auto& p = c.params;
  if (!positive(p.delta)) throw ConfigError("params.delta must be positive");
  if (!std::isfinite(p.Delta) || p.Delta <= 0.0) throw ConfigError("params.Delta must be positive");
  if (p.kappa1 && !positive(*p.kappa1)) throw ConfigError("params.kappa1 must be positive");
  if (!positive(p.eta) || !positive(p.eta_prime) || !positive(p.zeta) || !positive(p.Lambda))
    throw ConfigError("coupling factors must be positive");
  if (p.Omega0 && !positive(*p.Omega0)) throw ConfigError("params.Omega0 must be positive");
  if (p.N && *p.N < 1) throw ConfigError("params.N must be >= 1");
  if (!p.deexcitation.empty() && p.deexcitation != "none" && p.deexcitation != "envelope" && p.deexcitation != "full")
    throw ConfigError("params.deexcitation must be none, envelope or full");
  if (p.compensation != "idealized" && p.compensation != "explicit" && p.compensation != "none")
    throw ConfigError("params.compensation must be idealized, explicit or none");
  if (p.compensation == "explicit" && (!positive(p.Omega_p) || !positive(p.delta_p)))
    throw ConfigError("explicit compensation needs positive Omega_p and delta_p");
  if (c.blockade.mode != "perfect" && c.blockade.mode != "finite") throw ConfigError("blockade.mode must be perfect or finite");
  if (c.blockade.mode == "finite" && !positive(c.blockade.V_mhz)) throw ConfigError("finite blockade needs V_mhz > 0");
  if (c.budget.tau_us < 0.0 || c.budget.V_mhz < 0.0) throw ConfigError("budget values must be non-negative");
  if (c.drive.kind != "two-field" && c.drive.kind != "single-field") throw ConfigError("drive.kind must be two-field or single-field");
  for (const auto& k : c.drive.cases)
    if (k != "resonant-sine" && k != "detuned-sine" && k != "detuned-rectangular")
      throw ConfigError("unknown drive case '" + k + "'");
  if (c.drive.samples < 2 || c.drive.samples > 100000) throw ConfigError("drive.samples must lie in 2..100000");

  const std::string& m = c.method;
  const std::string base = c.scenario == "sweep" ? c.sweep.scenario : c.scenario;
  if (base == "cz-electronic" && !m.empty() && m != "sinusoidal" && m != "two-step")
    throw ConfigError("cz-electronic method must be sinusoidal or two-step");
  if ((base == "cz-nuclear" || base == "cz-cross") && !m.empty() && m != "sinusoidal" && m != "rectangular")
    throw ConfigError(base + " method must be sinusoidal or rectangular");
  if (c.scenario == "sweep") {
    if (!kScenarios.count(c.sweep.scenario) || c.sweep.scenario == "sweep" || c.sweep.scenario == "levels")
      throw ConfigError("sweep.scenario must name a simulation scenario");
    if (c.sweep.values.empty() || c.sweep.values.size() > 100000) throw ConfigError("sweep needs 1..100000 values");
    ScenarioConfig probe = c;
    set_parameter(probe, c.sweep.parameter, c.sweep.values.front());
  }
}

void set_parameter(ScenarioConfig& c, const std::string& name, double v) {
  auto& p = c.params;
  if (name == "Delta") p.Delta = v;
  else if (name == "delta") p.delta = v;
  else if (name == "kappa1") p.kappa1 = v;
  else if (name == "eta") p.eta = v;
  else if (name == "eta_prime") p.eta_prime = v;
  else if (name == "zeta") p.zeta = v;
  else if (name == "Lambda") p.Lambda = v;
  else if (name == "Omega0") p.Omega0 = v;
  else if (name == "V_mhz") { c.blockade.V_mhz = v; c.budget.V_mhz = v; }
  else if (name == "tau_us") c.budget.tau_us = v;
  else if (name == "two_kappa0_mhz") c.two_kappa0_mhz = v;
  else throw ConfigError("parameter '" + name + "' cannot be swept");
}

}  // namespace rydsim::app
