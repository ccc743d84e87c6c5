#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rydsim::app {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rates are dimensionless, in units of 2 kappa_0; two_kappa0_mhz fixes the physical scale.
struct PhysicsParams {
  double Delta = 10.0;
  double delta = 0.1;
  std::optional<double> kappa1;  // default kappa_0 = 0.5
  double eta = 1.0;
  double eta_prime = 1.0;
  double zeta = 1.0;
  double Lambda = 1.0;
  std::optional<double> Omega0;  // rectangular hint
  std::optional<int> N;
  std::string deexcitation;      // empty: method default
  std::string compensation = "idealized";
  double Omega_p = 0.0;
  double delta_p = 0.0;
};

struct BlockadeConfig {
  std::string mode = "perfect";
  double V_mhz = 0.0;
};

struct BudgetConfig {
  double tau_us = 0.0;
  double V_mhz = 0.0;
};

struct DriveConfig {
  std::string kind = "two-field";  // two-field | single-field
  std::vector<std::string> cases;  // resonant-sine, detuned-sine, detuned-rectangular
  int samples = 200;
  double mix_angle = 0.7853981633974483;  // two-step input cos a |0> + sin a |1>
};

struct LevelsConfig {
  double I = 4.5;
  double J = 1.0;
  double A_mhz = -3.4;
  double B_mhz = 39.0;
  double nstar_ref = 5.0;
  double nstar_new = 6.0;
  double g_J = 1.0;
  double g_I = 0.0;
  std::vector<double> fields_gauss{0.0, 2.5, 5.0, 7.5, 10.0};
  int n = 70;
  double A_prime_ghz = -1.0;
  double O_nn = 0.98;
  std::optional<double> Delta_ST_ghz;  // calibrated when absent
  double separation_ghz = 5.28;
  double gap_ghz = 1.27;
  double singlet_fraction = 0.67;
};

struct SweepConfig {
  std::string scenario;
  std::string parameter;
  std::vector<double> values;
};

struct ScenarioConfig {
  std::string scenario;
  std::string method;
  std::string name;
  double two_kappa0_mhz = 1.4;
  PhysicsParams params;
  BlockadeConfig blockade;
  BudgetConfig budget;
  DriveConfig drive;
  LevelsConfig levels;
  SweepConfig sweep;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
void validate(const ScenarioConfig& c);
// Applies a sweep value to a named parameter ("Delta", "delta", "V_mhz", ...).
void set_parameter(ScenarioConfig& c, const std::string& name, double value);

}  // namespace rydsim::app
