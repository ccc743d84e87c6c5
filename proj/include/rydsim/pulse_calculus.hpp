#pragma once

#include <optional>
#include <utility>

#include "rydsim/quantum_core.hpp"

namespace rydsim {

struct SinPulseParams {
  double kappa = 0.0;      // kappa_0, rad/s
  double delta_env = 0.0;  // envelope frequency, rad/s
  double Delta = 0.0;      // splitting between the two Rydberg transitions, rad/s
  Complex eta{1.0, 0.0};
  double kappa1 = 0.0;     // kappa_1; 0 means equal to kappa

  void validate() const;
  double kappa_1() const { return kappa1 > 0.0 ? kappa1 : kappa; }
  // False once Delta/delta drops below 10 and the adiabatic picture gets shaky.
  bool in_far_detuned_regime() const { return std::abs(Delta) >= 10.0 * delta_env; }
};

struct RectPulseParams {
  double Omega0 = 0.0;
  double Delta = 0.0;
  Complex eta{1.0, 0.0};
  Complex eta_prime{1.0, 0.0};
  double zeta = 1.0;
  double Lambda = 1.0;
  int N = 1;
  int N_prime = 1;

  void validate() const;
  // sqrt(|eta|^2 Omega0^2 + Delta^2) == 2 N Omega0 within rel_tol.
  bool matched(double rel_tol = 1e-9) const;
  // Rabi frequency of the second two-step field, matched with the same N.
  double Omega1() const;
};

struct CompensationParams {
  double Omega_p = 0.0;
  double delta_p = 0.0;
  double t_pc = 0.0;
  long N_comp = 0;   // the integer multiple of 2 pi absorbed by the target
  long cycles = 0;   // complete detuned cycles, t_pc * Omega_bar / (2 pi)
  double Theta = 0.0;
  double Omega_bar = 0.0;
  double residual = 0.0;
};

// Wraps to (-pi, pi].
double wrap_phase(double phi);

std::pair<double, double> sin_amplitudes(const SinPulseParams& p, double t);

double sin_pulse_duration(double kappa, double delta_env, double angle);

double detuned_cycle_phase(int N, double Delta, double Omega, double eta_abs = 1.0);

// N_override pins N; N_prime_override forces N' != N (unvalidated physics).
RectPulseParams match_generalized_rabi(Complex eta, Complex eta_prime, double zeta, double Delta,
                                       double Omega0_hint, std::optional<int> N_override = std::nullopt,
                                       std::optional<int> N_prime_override = std::nullopt);

// Phase acquired per complete blue-detuned cycle.
double compensation_cycle_phase(double Omega_p, double delta_p);

CompensationParams compensation_plan(double phi2, double Omega_p, double delta_p, double residual_tol = 5e-4);

// Small Omega_p/delta_p estimate of the compensation time for a given N_comp.
double compensation_time_estimate(double phi2, double Omega_p, double delta_p, long N_comp);

}  // namespace rydsim
