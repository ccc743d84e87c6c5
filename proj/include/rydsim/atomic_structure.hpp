#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace rydsim {

namespace constants {
inline constexpr double mu_B = 9.2740100783e-24;   // J/T
inline constexpr double hbar = 1.054571817e-34;    // J s
inline constexpr double mu_N = 5.0507837461e-27;   // J/T
inline constexpr double gauss = 1e-4;              // T
inline constexpr double two_pi = 6.283185307179586;
}  // namespace constants

struct HyperfineModel {
  double A_hfs = 0.0;  // rad/s
  double B_hfs = 0.0;  // rad/s
  double I = 4.5;
  double J = 1.0;
  double F = 4.5;
  double m_F = 0.5;
  double g_J = 1.0;
  double g_I = 0.0;    // nuclear Zeeman term off unless set
  double mu_B = constants::mu_B;
  double mu_n = -1.0924 * constants::mu_N;
  double B_field = 0.0;  // T

  void validate() const;
};

// I.J for the coupled state |I J F>.
double hyperfine_k(double I, double J, double F);
double hyperfine_shift(const HyperfineModel& m);
std::pair<double, double> scale_hyperfine_constants(double A_ref, double B_ref, double nstar_ref, double nstar_new);
double effective_g_factor(const HyperfineModel& m);
// Weak-field level energy; refuses fields above 10 G where F stops being a good quantum number.
double zeeman_level(const HyperfineModel& m);

struct LevelRow {
  std::string state_label;
  double F = 0.0;
  double m_F = 0.0;
  double B_gauss = 0.0;
  double energy_MHz = 0.0;  // energy / (2 pi) in MHz
};

// All (F, m_F) substates of `base` (I, J, constants) at each field value.
std::vector<LevelRow> level_diagram(const HyperfineModel& base, const std::vector<double>& B_gauss);
void write_level_csv(std::ostream& os, const std::vector<LevelRow>& rows);
// Largest minus smallest energy among rows at the given field, rad/s.
double level_spread(const std::vector<LevelRow>& rows, double B_gauss);

struct RydbergManifoldModel {
  int n = 70;
  double A_prime = 0.0;   // rad/s
  double O_nn = 0.98;
  double Delta_ST = 0.0;  // rad/s, triplet minus singlet
  double I = 4.5;

  void validate() const;
};

struct ManifoldLevel {
  std::string label;
  double F = 0.0;
  double energy = 0.0;            // rad/s relative to the unperturbed singlet
  double singlet_fraction = 0.0;
};

struct SManifold {
  // mixed (singlet-like), mixed (triplet-like), triplet F=I+1, triplet F=I-1
  std::array<ManifoldLevel, 4> levels;
  double separation = 0.0;    // between the two mixed states
  double gap = 0.0;           // upper mixed state above triplet F=I-1
  double upper_singlet_fraction = 0.0;
};

SManifold rydberg_s_manifold(const RydbergManifoldModel& m);

struct ManifoldTargets {
  double separation = constants::two_pi * 5.28e9;
  double gap = constants::two_pi * 1.27e9;
  double singlet_fraction = 0.67;
};

// Delta_ST minimizing the relative squared misfit to the targets.
double calibrate_singlet_triplet_splitting(double A_prime, double O_nn, double I, const ManifoldTargets& t = {});

double zeeman_splitting_rydberg(double g_eff, double B_tesla);

// Differential Zeeman shift of the 1S0 - 3P0 clock transition, 0.11 kHz/G per unit m_F, in Hz.
double clock_zeeman_shift_hz(double B_gauss, double m_F);

}  // namespace rydsim
