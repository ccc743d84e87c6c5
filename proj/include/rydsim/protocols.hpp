#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rydsim/pulse_calculus.hpp"
#include "rydsim/quantum_core.hpp"

namespace rydsim {

enum class Envelope { rectangular, sine };

// How a deexcitation pulse relates to the excitation pulse it undoes.
// envelope: sin(delta (T - t)); full: the whole coupling evaluated at T - t, carrier included.
enum class Reversal { none, envelope, full };

struct CouplingFactors {
  Complex eta{1.0, 0.0};
  Complex eta_prime{1.0, 0.0};
  double zeta = 1.0;
  double Lambda = 1.0;
};

// One laser field acting on one transition of one atom.
// Omega(s) = amplitude * f(s) * exp(i (phase + detuning * s)), with f = 2i sin(delta_env s) for the
// sine envelope and 1 (optionally ramped) for the rectangle; <upper|H|lower> = Omega / 2.
struct DriveTerm {
  Level lower;
  Level upper;
  Envelope envelope = Envelope::rectangular;
  double amplitude = 0.0;
  double delta_env = 0.0;
  double detuning = 0.0;
  double phase = 0.0;
  Reversal reversal = Reversal::none;
  double t_on = 0.0;   // window inside the segment
  double t_off = 0.0;
  double ramp = 0.0;   // cosine on/off ramp length for rectangles

  Complex coupling(double tau) const;
  bool operator==(const DriveTerm&) const = default;
};

struct PulseSegment {
  Atom atom = Atom::control;
  double duration = 0.0;
  std::vector<DriveTerm> drives;
  std::string label;

  std::vector<HamiltonianTerm> hamiltonian_terms(double t_start) const;
  bool operator==(const PulseSegment&) const = default;
};

struct PulseSchedule {
  std::vector<PulseSegment> segments;
  std::string frame = "interaction";

  double total_duration() const;
  PulseSchedule& append(const PulseSchedule& other);
  void validate() const;
  bool operator==(const PulseSchedule&) const = default;
};

struct ExcitationOptions {
  Atom atom = Atom::control;
  Electronic ground = Electronic::g;
  Electronic rydberg = Electronic::r;
  double rabi_phase = 0.0;
  Reversal reversal = Reversal::none;
  double ramp = 0.0;
  std::string label;
};

struct NuclearExcitationOptions {
  Atom atom = Atom::control;
  int resonant_nuclear = 0;
  bool electronic_superposition = true;  // also drive the clock manifold c -> R
  double clock_offset = 0.0;             // start of the c-manifold drive inside the segment
  double rabi_phase = 0.0;
  Reversal reversal = Reversal::none;
  double ramp = 0.0;
  std::string label;
};

// Two simultaneous sine-envelope fields resonant with n=0 and n=1; each also drives the other
// nuclear transition, with factor eta (1/eta) and carrier detuning +Delta (-Delta).
PulseSchedule build_sin_excitation(const SinPulseParams& p, double angle, const ExcitationOptions& o = {});

// Single field on one two-level transition, sine or rectangular; used for the inversion and leakage checks.
PulseSchedule build_single_field_drive(Envelope env, double kappa, double delta_env, double detuning,
                                       double duration, const ExcitationOptions& o = {});

PulseSchedule build_two_step_excitation(const RectPulseParams& p, const ExcitationOptions& o = {});
// Steps (c) and (d) with Rabi phase 2 phi + o.rabi_phase.
PulseSchedule build_two_step_deexcitation(const RectPulseParams& p, double phi, const ExcitationOptions& o = {});

// pi pulse on the resonant nuclear state of both electronic manifolds.
PulseSchedule build_nuclear_excitation(const RectPulseParams& p, const NuclearExcitationOptions& o = {});
PulseSchedule build_nuclear_excitation(const SinPulseParams& p, const CouplingFactors& f, double angle,
                                       const NuclearExcitationOptions& o = {});

// Blue-detuned drives g -> p and c -> P on the listed levels, the clock one scaled by zeta.
PulseSchedule build_compensation(const CompensationParams& c, Atom atom, const std::vector<Level>& lowers,
                                 double zeta = 1.0, const std::string& label = "compensation");

// Structural check: every drive keeps the nuclear tag of its levels.
bool preserves_nuclear_labels(const PulseSchedule& s);
// Structural check: no drive couples g and c directly.
bool preserves_electronic_labels(const PulseSchedule& s);

nlohmann::json to_json(const PulseSchedule& s);
PulseSchedule schedule_from_json(const nlohmann::json& j);

std::string to_string(Envelope e);
std::string to_string(Reversal r);
Reversal parse_reversal(const std::string& s);

}  // namespace rydsim
