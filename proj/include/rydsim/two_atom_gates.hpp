#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rydsim/protocols.hpp"

namespace rydsim {

struct BlockadeModel {
  enum class Mode { perfect, finite };
  Mode mode = Mode::perfect;
  double V = 0.0;  // rad/s, finite mode only

  static BlockadeModel perfect() { return {}; }
  static BlockadeModel finite(double V) { return {Mode::finite, V}; }
  void validate() const;
};

struct GateOptions {
  double tol = 1e-10;
  bool parallel = true;  // OpenMP over the 16 input columns
  int threads = 0;       // 0: OpenMP default
  bool record_trajectories = false;
  bool target_pulse = true;  // drop the target step to probe blocked evolution
};

struct GateResult {
  std::string label;
  std::string ordering;                 // e.g. "|ce te> (x) |cn tn>"
  std::vector<std::string> input_labels;
  Eigen::MatrixXcd matrix;              // computational block, columns = inputs
  Eigen::MatrixXcd ideal;
  double dwell = 0.0;                   // seconds, averaged over inputs
  std::vector<double> dwell_per_input;
  std::vector<double> leakage;          // 1 - |column|^2
  std::vector<std::vector<std::pair<double, double>>> trajectories;  // (t, summed Rydberg population)
  double phase = 0.0;                   // detuned-cycle phase removed by compensation, if any
  double duration = 0.0;
};

// A gate to simulate: both atoms' level sets, the schedule and the 16 inputs in matrix order.
struct GateProgram {
  std::string label;
  std::string ordering;
  std::vector<Level> control_levels;
  std::vector<Level> target_levels;
  std::vector<std::pair<Level, Level>> inputs;
  PulseSchedule schedule;
  Eigen::MatrixXcd ideal;
  std::vector<Complex> column_phases;  // idealized compensation, one per input (empty: none)
  double phase = 0.0;
};

GateResult simulate_gate(const GateProgram& program, const BlockadeModel& blockade, const GateOptions& options = {});
// Reference path: same physics, one column after another.
GateResult simulate_gate_serial(const GateProgram& program, const BlockadeModel& blockade,
                                const GateOptions& options = {});

enum class ElectronicMethod { sinusoidal, two_step };
enum class NuclearMethod { sinusoidal, rectangular };
enum class Compensation { idealized, explicit_drive, none };

struct ElectronicGateParams {
  ElectronicMethod method = ElectronicMethod::sinusoidal;
  SinPulseParams sin;
  RectPulseParams rect;
  Reversal deexcitation = Reversal::full;  // sinusoidal control deexcitation
};

struct NuclearGateParams {
  NuclearMethod method = NuclearMethod::sinusoidal;
  SinPulseParams sin;
  CouplingFactors couplings;
  RectPulseParams rect;
  Compensation compensation = Compensation::idealized;
  double Omega_p = 0.0;  // explicit compensation drive
  double delta_p = 0.0;
  Reversal deexcitation = Reversal::envelope;  // sinusoidal control deexcitation
};

// Index helpers for the two orderings: electronic-major and nuclear-major.
inline int electronic_major_index(int ce, int te, int cn, int tn) { return 8 * ce + 4 * te + 2 * cn + tn; }
inline int nuclear_major_index(int ce, int te, int cn, int tn) { return 8 * cn + 4 * tn + 2 * ce + te; }

Eigen::MatrixXcd ideal_cz_electronic();
Eigen::MatrixXcd ideal_cz_nuclear();
Eigen::MatrixXcd ideal_cz_cross();
// Permutation P with P(e-major <- n-major): M_e = P M_n P^T.
Eigen::MatrixXd nuclear_to_electronic_order();

// Phase a detuned nuclear partner picks up during one sinusoidal excitation pulse (numerical).
double sin_detuned_phase(const SinPulseParams& p, double angle, int resonant_nuclear, double tol = 1e-10);

GateProgram program_cz_electronic(const ElectronicGateParams& p, const GateOptions& options = {});
GateProgram program_cz_nuclear(const NuclearGateParams& p, const GateOptions& options = {});
GateProgram program_cz_cross(const NuclearGateParams& p, const GateOptions& options = {});

GateResult run_cz_electronic(const ElectronicGateParams& p, const BlockadeModel& b, const GateOptions& o = {});
GateResult run_cz_nuclear(const NuclearGateParams& p, const BlockadeModel& b, const GateOptions& o = {});
GateResult run_cz_cross(const NuclearGateParams& p, const BlockadeModel& b, const GateOptions& o = {});

struct TensorGateResult {
  GateResult electronic;
  GateResult nuclear;
  GateResult composite;  // electronic-major ordering
};

// Electronic C_Z followed by nuclear C_Z (or the reverse).
TensorGateResult run_cz_tensor(const ElectronicGateParams& pe, const NuclearGateParams& pn, const BlockadeModel& b,
                               const GateOptions& o = {}, bool nuclear_first = false);

enum class SingleAtomKind { nuclear_phase, nuclear_raman, electronic_phase, electronic_transfer, intra_atom_cz };

struct SingleAtomParams {
  double angle = kPi;      // target phase, Raman rotation angle or transfer angle
  double Omega_p = 0.0;    // phase drives
  double delta_p = 0.0;
  double zeta = 1.0;
  double Omega_R = 0.0;    // effective Raman Rabi frequency
  double raman_phase = 0.0;
  double kappa = 0.0;      // electronic transfer, sinusoidal
  double delta_env = 0.0;
  double B_gauss = 0.0;
  double tol = 1e-10;
  // Planned residual for the phase drives; kept below 1e-3 to leave room for integration error.
  double phase_tol = 5e-4;
};

struct SingleAtomGate {
  SingleAtomKind kind;
  Eigen::Matrix4cd matrix;  // basis |0e0n>, |0e1n>, |1e0n>, |1e1n>
  Eigen::Matrix4cd ideal;
  double duration = 0.0;
  double fidelity = 0.0;
  CompensationParams plan;  // phase drives only
};

SingleAtomGate single_atom_ops(SingleAtomKind kind, const SingleAtomParams& p);
SingleAtomKind parse_single_atom_kind(const std::string& s);

nlohmann::json to_json(const GateResult& r);

}  // namespace rydsim
