#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rydsim {

using Complex = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

// Thrown when the integrator or a drive produces non-finite or non-Hermitian data.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// g: ground 1S0, c: clock 3P0, r/R: Rydberg levels reached from g/c,
// p/P: auxiliary compensation levels reached from g/c.
enum class Electronic { g, c, r, R, p, P };

enum class Atom { control, target };

struct Level {
  Electronic electronic = Electronic::g;
  int nuclear = 0;

  bool operator==(const Level&) const = default;
};

bool is_rydberg(Electronic e);
inline bool is_rydberg(const Level& l) { return is_rydberg(l.electronic); }
std::string to_string(Electronic e);
std::string to_string(Atom a);
std::string to_string(const Level& l);
Level parse_level(std::string_view label);
Atom parse_atom(std::string_view name);

inline constexpr std::size_t kMaxBasisSize = 4096;

// Ordered list of (possibly multi-atom) product levels with rotating-frame energies.
class LevelBasis {
 public:
  LevelBasis(Atom atom, std::vector<Level> levels, std::vector<double> frame_energies = {});

  // Product basis of two single- or multi-atom bases; `keep` filters joint levels.
  static LevelBasis product(const LevelBasis& a, const LevelBasis& b,
                            const std::function<bool(const std::vector<Level>&)>& keep = {});

  std::size_t size() const { return labels_.size(); }
  std::size_t atom_count() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  // Level of `atom` in joint state i.
  const Level& level(std::size_t i, std::size_t atom_slot = 0) const;
  std::vector<Level> levels(std::size_t i) const;
  std::optional<std::size_t> atom_slot(Atom a) const;
  const std::string& label(std::size_t i) const { return labels_[i]; }
  std::optional<std::size_t> find(const std::vector<Level>& levels) const;
  std::size_t index_of(std::string_view label) const;
  double frame_energy(std::size_t i) const { return frame_[i]; }
  const std::vector<double>& frame_energies() const { return frame_; }
  // Number of atoms in a Rydberg level for joint state i.
  int rydberg_count(std::size_t i) const;

  LevelBasis with_frame_energies(std::vector<double> energies) const;

  bool operator==(const LevelBasis& o) const;

 private:
  LevelBasis() = default;
  void finalize();

  std::vector<Atom> atoms_;
  std::vector<Level> flat_;
  std::vector<double> frame_;
  std::vector<std::string> labels_;
};

using BasisPtr = std::shared_ptr<const LevelBasis>;

class QuantumState {
 public:
  QuantumState(BasisPtr basis, Eigen::VectorXcd amplitudes);
  static QuantumState basis_state(BasisPtr basis, std::size_t index);
  static QuantumState basis_state(BasisPtr basis, std::string_view label);

  const LevelBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const Eigen::VectorXcd& amplitudes() const { return amp_; }
  Complex amplitude(std::string_view label) const;
  double norm() const { return amp_.norm(); }

 private:
  BasisPtr basis_;
  Eigen::VectorXcd amp_;
};

// <upper|H|lower> = amplitude(t); Hermitian partner added automatically.
// lower == upper denotes a real diagonal energy.
struct HamiltonianTerm {
  std::string name;
  Atom atom = Atom::control;
  Level lower;
  Level upper;
  std::function<Complex(double)> amplitude;
  // Absolute times where the amplitude may jump; integration restarts there.
  std::vector<double> breakpoints;
};

// Samples one of the integrator's accepted steps.
using StepObserver = std::function<void(double t, const Eigen::VectorXcd& amplitudes)>;

struct PropagateOptions {
  double tol = 1e-10;
  // Per-level weights w_i; the propagator returns integral of sum_i w_i |psi_i|^2 dt.
  std::vector<double> dwell_weights;
  StepObserver observer;
};

struct Propagation {
  QuantumState state;
  double weighted_dwell = 0.0;
  std::size_t steps = 0;
};

Propagation propagate_tracked(const QuantumState& state, const std::vector<HamiltonianTerm>& terms,
                              double t0, double t1, const PropagateOptions& options = {});

QuantumState propagate(const QuantumState& state, const std::vector<HamiltonianTerm>& terms,
                       double t0, double t1, double tol = 1e-10);

// Dense H(t) for the given terms; used by property checks and diagnostics.
Eigen::MatrixXcd assemble_hamiltonian(const LevelBasis& basis,
                                      const std::vector<HamiltonianTerm>& terms, double t);

Complex overlap(const QuantumState& a, const QuantumState& b);

QuantumState tensor_product(const QuantumState& a, const QuantumState& b);

}  // namespace rydsim
