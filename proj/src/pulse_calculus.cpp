#include "rydsim/pulse_calculus.hpp"

#include <cmath>
#include <iostream>
#include <string>

namespace rydsim {

void SinPulseParams::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be positive");
  if (!(delta_env > 0.0) || !std::isfinite(delta_env)) throw std::invalid_argument("delta_env must be positive");
  if (!std::isfinite(Delta)) throw std::invalid_argument("Delta must be finite");
  if (kappa1 < 0.0) throw std::invalid_argument("kappa1 must be positive");
  if (std::abs(eta) == 0.0) throw std::invalid_argument("eta must be nonzero");
}

void RectPulseParams::validate() const {
  if (!(Omega0 > 0.0) || !std::isfinite(Omega0)) throw std::invalid_argument("Omega0 must be positive");
  if (N < 1 || N_prime < 1) throw std::invalid_argument("N must be >= 1");
  if (Delta == 0.0 || !std::isfinite(Delta)) throw std::invalid_argument("Delta must be nonzero");
  if (std::abs(eta) == 0.0 || std::abs(eta_prime) == 0.0 || zeta == 0.0)
    throw std::invalid_argument("coupling factors must be nonzero");
  if (!(Lambda > 0.0)) throw std::invalid_argument("Lambda must be positive");
}

bool RectPulseParams::matched(double rel_tol) const {
  const double e = std::abs(eta);
  const double lhs = std::sqrt(e * e * Omega0 * Omega0 + Delta * Delta);
  return std::abs(lhs - 2.0 * N * Omega0) <= rel_tol * 2.0 * N * Omega0;
}

double RectPulseParams::Omega1() const {
  const double e = std::abs(eta);
  const double r = 4.0 * N * N - 1.0 / (e * e);
  if (r <= 0.0) throw std::invalid_argument("no matched second-step Rabi frequency for this eta and N");
  return std::abs(Delta) / std::sqrt(r);
}

double wrap_phase(double phi) {
  double r = std::remainder(phi, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

std::pair<double, double> sin_amplitudes(const SinPulseParams& p, double t) {
  const double A = p.kappa * (1.0 - std::cos(p.delta_env * t)) / p.delta_env;
  return {std::cos(A), std::sin(A)};
}

double sin_pulse_duration(double kappa, double delta_env, double angle) {
  if (!(kappa > 0.0) || !(delta_env > 0.0)) throw std::invalid_argument("kappa and delta_env must be positive");
  if (!(angle > 0.0 && angle <= kPi)) throw std::domain_error("pulse angle must lie in (0, pi]");
  const double x = 1.0 - angle * delta_env / kappa;
  if (x < -1.0) throw std::domain_error("pulse angle unreachable: angle * delta / kappa exceeds 2");
  return std::acos(x) / delta_env;
}

double detuned_cycle_phase(int N, double Delta, double Omega, double eta_abs) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (Delta == 0.0) throw std::invalid_argument("detuned cycle needs Delta != 0");
  if (!(Omega > 0.0)) throw std::invalid_argument("Omega must be positive");
  const double gen = std::sqrt(eta_abs * eta_abs * Omega * Omega + Delta * Delta);
  if (std::abs(gen - 2.0 * N * Omega) > 1e-6 * 2.0 * N * Omega)
    throw std::invalid_argument("unmatched generalized Rabi frequency; call match_generalized_rabi first");
  return wrap_phase(-(N + Delta / (2.0 * Omega)) * kPi);
}

RectPulseParams match_generalized_rabi(Complex eta, Complex eta_prime, double zeta, double Delta,
                                       double Omega0_hint, std::optional<int> N_override,
                                       std::optional<int> N_prime_override) {
  if (Delta == 0.0 || !std::isfinite(Delta)) throw std::invalid_argument("Delta must be nonzero");
  if (!(Omega0_hint > 0.0)) throw std::invalid_argument("Omega0 hint must be positive");
  const double e = std::abs(eta), ep = std::abs(eta_prime);
  if (e == 0.0 || ep == 0.0 || zeta == 0.0) throw std::invalid_argument("coupling factors must be nonzero");
  const double D = std::abs(Delta);
  auto omega_for = [&](int n) { return D / std::sqrt(4.0 * n * n - e * e); };
  auto feasible = [&](int n) { return n >= 1 && 4.0 * n * n > e * e; };

  int N = 0;
  if (N_override) {
    N = *N_override;
    if (!feasible(N)) throw std::invalid_argument("requested N cannot satisfy the matching condition");
  } else {
    const double nstar = std::sqrt(e * e * Omega0_hint * Omega0_hint + D * D) / (2.0 * Omega0_hint);
    int lo = std::max(1, static_cast<int>(std::floor(nstar)));
    while (!feasible(lo)) ++lo;
    const int hi = std::max(lo + 1, static_cast<int>(std::ceil(nstar)));
    const double dlo = std::abs(omega_for(lo) - Omega0_hint), dhi = std::abs(omega_for(hi) - Omega0_hint);
    N = dhi < dlo ? hi : lo;
  }

  RectPulseParams p;
  p.Delta = Delta;
  p.eta = eta;
  p.eta_prime = eta_prime;
  p.zeta = zeta;
  p.N = N;
  p.Omega0 = omega_for(N);
  p.N_prime = N_prime_override.value_or(N);
  if (p.N_prime == N) {
    const double rad = Delta * Delta + p.Omega0 * p.Omega0 * (e * e - ep * ep);
    if (rad <= 0.0) throw std::invalid_argument("negative radicand in Lambda matching");
    p.Lambda = std::abs(zeta * Delta) / std::sqrt(rad);
  } else {
    const double r = 4.0 * p.N_prime * p.N_prime - ep * ep;
    if (p.N_prime < 1 || r <= 0.0) throw std::invalid_argument("requested N' cannot be matched");
    p.Lambda = std::abs(zeta * Delta) / (p.Omega0 * std::sqrt(r));
  }
  return p;
}

double compensation_cycle_phase(double Omega_p, double delta_p) {
  const double bar = std::hypot(Omega_p, delta_p);
  return -(1.0 + delta_p / bar) * kPi;
}

CompensationParams compensation_plan(double phi2, double Omega_p, double delta_p, double residual_tol) {
  if (!(delta_p > 0.0)) throw std::invalid_argument("compensation detuning must be blue (delta_p > 0)");
  if (!(Omega_p > 0.0)) throw std::invalid_argument("compensation Rabi frequency must be positive");
  if (Omega_p / delta_p > 0.2) throw std::invalid_argument("|Omega_p/delta_p| must not exceed 0.2");
  CompensationParams c;
  c.Omega_p = Omega_p;
  c.delta_p = delta_p;
  c.Omega_bar = std::hypot(Omega_p, delta_p);
  c.Theta = compensation_cycle_phase(Omega_p, delta_p);
  const double target = 4.0 * phi2;

  // Already a multiple of 2 pi: nothing to do.
  const double wrapped = wrap_phase(target);
  if (std::abs(wrapped) <= residual_tol) {
    c.N_comp = std::lround(-(target - wrapped) / (2.0 * kPi));
    c.residual = std::abs(wrapped);
    return c;
  }
  for (long n = 1; n <= 1000000; ++n) {
    const double mstar = -(target + 2.0 * kPi * static_cast<double>(n)) / c.Theta;
    if (mstar < 0.5) continue;
    const long m = std::lround(mstar);
    const double res = std::abs(target + c.Theta * static_cast<double>(m) + 2.0 * kPi * static_cast<double>(n));
    if (res <= residual_tol) {
      c.N_comp = n;
      c.cycles = m;
      c.t_pc = 2.0 * kPi * static_cast<double>(m) / c.Omega_bar;
      c.residual = res;
      return c;
    }
  }
  throw std::domain_error("no compensation cycle count within 1e6 meets the residual tolerance");
}

double compensation_time_estimate(double phi2, double Omega_p, double delta_p, long N_comp) {
  const double bar = std::hypot(Omega_p, delta_p);
  const double d2 = delta_p * delta_p;
  return 8.0 * d2 * (2.0 * phi2 + kPi * static_cast<double>(N_comp)) / ((4.0 * d2 - Omega_p * Omega_p) * bar);
}

}  // namespace rydsim
