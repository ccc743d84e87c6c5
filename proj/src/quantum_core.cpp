#include "rydsim/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace rydsim {

namespace ode = boost::numeric::odeint;

bool is_rydberg(Electronic e) { return e == Electronic::r || e == Electronic::R; }

std::string to_string(Electronic e) {
  switch (e) {
    case Electronic::g: return "g";
    case Electronic::c: return "c";
    case Electronic::r: return "r";
    case Electronic::R: return "R";
    case Electronic::p: return "p";
    case Electronic::P: return "P";
  }
  return "?";
}

std::string to_string(Atom a) { return a == Atom::control ? "control" : "target"; }

std::string to_string(const Level& l) { return to_string(l.electronic) + std::to_string(l.nuclear); }

Level parse_level(std::string_view label) {
  if (label.size() != 2) throw std::invalid_argument("bad level label '" + std::string(label) + "'");
  Level l;
  switch (label[0]) {
    case 'g': l.electronic = Electronic::g; break;
    case 'c': l.electronic = Electronic::c; break;
    case 'r': l.electronic = Electronic::r; break;
    case 'R': l.electronic = Electronic::R; break;
    case 'p': l.electronic = Electronic::p; break;
    case 'P': l.electronic = Electronic::P; break;
    default: throw std::invalid_argument("bad level label '" + std::string(label) + "'");
  }
  if (label[1] != '0' && label[1] != '1')
    throw std::invalid_argument("bad nuclear tag in '" + std::string(label) + "'");
  l.nuclear = label[1] - '0';
  return l;
}

Atom parse_atom(std::string_view name) {
  if (name == "control") return Atom::control;
  if (name == "target") return Atom::target;
  throw std::invalid_argument("unknown atom '" + std::string(name) + "'");
}

LevelBasis::LevelBasis(Atom atom, std::vector<Level> levels, std::vector<double> frame_energies)
    : atoms_{atom}, flat_(std::move(levels)), frame_(std::move(frame_energies)) {
  if (frame_.empty()) frame_.assign(flat_.size(), 0.0);
  finalize();
}

void LevelBasis::finalize() {
  const std::size_t n = atoms_.empty() ? 0 : flat_.size() / atoms_.size();
  if (n > kMaxBasisSize) throw std::length_error("basis exceeds 4096 levels");
  if (frame_.size() != n) throw std::invalid_argument("frame energy count does not match basis size");
  for (double e : frame_)
    if (!std::isfinite(e)) throw std::invalid_argument("non-finite frame energy");
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    for (std::size_t j = i + 1; j < atoms_.size(); ++j)
      if (atoms_[i] == atoms_[j]) throw std::invalid_argument("atom appears twice in basis");
  labels_.clear();
  labels_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      if (k) s += ',';
      s += to_string(flat_[i * atoms_.size() + k]);
    }
    labels_.push_back(std::move(s));
  }
  auto sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("duplicate level labels in basis");
}

LevelBasis LevelBasis::product(const LevelBasis& a, const LevelBasis& b,
                               const std::function<bool(const std::vector<Level>&)>& keep) {
  LevelBasis out;
  out.atoms_ = a.atoms_;
  out.atoms_.insert(out.atoms_.end(), b.atoms_.begin(), b.atoms_.end());
  if (a.size() * b.size() > kMaxBasisSize && !keep)
    throw std::length_error("basis exceeds 4096 levels");
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto joint = a.levels(i);
      auto lb = b.levels(j);
      joint.insert(joint.end(), lb.begin(), lb.end());
      if (keep && !keep(joint)) continue;
      out.flat_.insert(out.flat_.end(), joint.begin(), joint.end());
      out.frame_.push_back(a.frame_[i] + b.frame_[j]);
    }
  }
  out.finalize();
  return out;
}

const Level& LevelBasis::level(std::size_t i, std::size_t atom_slot) const {
  return flat_[i * atoms_.size() + atom_slot];
}

std::vector<Level> LevelBasis::levels(std::size_t i) const {
  auto first = flat_.begin() + static_cast<std::ptrdiff_t>(i * atoms_.size());
  return {first, first + static_cast<std::ptrdiff_t>(atoms_.size())};
}

std::optional<std::size_t> LevelBasis::atom_slot(Atom a) const {
  for (std::size_t k = 0; k < atoms_.size(); ++k)
    if (atoms_[k] == a) return k;
  return std::nullopt;
}

std::optional<std::size_t> LevelBasis::find(const std::vector<Level>& levels) const {
  if (levels.size() != atoms_.size()) return std::nullopt;
  for (std::size_t i = 0; i < size(); ++i)
    if (std::equal(levels.begin(), levels.end(), flat_.begin() + static_cast<std::ptrdiff_t>(i * atoms_.size())))
      return i;
  return std::nullopt;
}

std::size_t LevelBasis::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  throw std::invalid_argument("level '" + std::string(label) + "' not in basis");
}

int LevelBasis::rydberg_count(std::size_t i) const {
  int n = 0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) n += is_rydberg(level(i, k)) ? 1 : 0;
  return n;
}

LevelBasis LevelBasis::with_frame_energies(std::vector<double> energies) const {
  LevelBasis out = *this;
  out.frame_ = std::move(energies);
  out.finalize();
  return out;
}

bool LevelBasis::operator==(const LevelBasis& o) const {
  return atoms_ == o.atoms_ && flat_ == o.flat_ && frame_ == o.frame_;
}

QuantumState::QuantumState(BasisPtr basis, Eigen::VectorXcd amplitudes)
    : basis_(std::move(basis)), amp_(std::move(amplitudes)) {
  if (!basis_) throw std::invalid_argument("state needs a basis");
  if (static_cast<std::size_t>(amp_.size()) != basis_->size())
    throw std::invalid_argument("amplitude count does not match basis size");
}

QuantumState QuantumState::basis_state(BasisPtr basis, std::size_t index) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return QuantumState(std::move(basis), std::move(v));
}

QuantumState QuantumState::basis_state(BasisPtr basis, std::string_view label) {
  const auto i = basis->index_of(label);
  return basis_state(std::move(basis), i);
}

Complex QuantumState::amplitude(std::string_view label) const {
  return amp_(static_cast<Eigen::Index>(basis_->index_of(label)));
}

namespace {

struct CompiledTerm {
  const HamiltonianTerm* term;
  bool diagonal;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (upper, lower)
};

std::vector<CompiledTerm> compile(const LevelBasis& basis, const std::vector<HamiltonianTerm>& terms) {
  std::vector<CompiledTerm> out;
  out.reserve(terms.size());
  for (const auto& term : terms) {
    if (!term.amplitude) throw std::invalid_argument("term '" + term.name + "' has no amplitude function");
    const auto slot = basis.atom_slot(term.atom);
    if (!slot)
      throw std::invalid_argument("term '" + term.name + "' addresses " + to_string(term.atom) +
                                  " atom absent from basis");
    CompiledTerm c{&term, term.lower == term.upper, {}};
    bool has_lower = false, has_upper = false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const Level& l = basis.level(i, *slot);
      has_upper = has_upper || l == term.upper;
      if (!(l == term.lower)) continue;
      has_lower = true;
      auto joint = basis.levels(i);
      joint[*slot] = term.upper;
      if (auto j = basis.find(joint)) c.pairs.emplace_back(*j, i);
    }
    if (!has_lower || !has_upper)
      throw std::invalid_argument("term '" + term.name + "' references level not in basis");
    out.push_back(std::move(c));
  }
  return out;
}

Complex evaluate(const CompiledTerm& c, double t) {
  const Complex a = c.term->amplitude(t);
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
    throw NumericalError("non-finite amplitude from term '" + c.term->name + "'");
  if (c.diagonal && std::abs(a.imag()) > 1e-12 * std::max(1.0, std::abs(a.real())))
    throw NumericalError("non-Hermitian diagonal from term '" + c.term->name + "'");
  return a;
}

}  // namespace

Eigen::MatrixXcd assemble_hamiltonian(const LevelBasis& basis, const std::vector<HamiltonianTerm>& terms,
                                      double t) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = basis.frame_energy(static_cast<std::size_t>(i));
  for (const auto& c : compile(basis, terms)) {
    const Complex a = evaluate(c, t);
    for (auto [up, lo] : c.pairs) {
      const auto u = static_cast<Eigen::Index>(up), l = static_cast<Eigen::Index>(lo);
      if (c.diagonal) {
        h(u, u) += a.real();
      } else {
        h(u, l) += a;
        h(l, u) += std::conj(a);
      }
    }
  }
  return h;
}

Propagation propagate_tracked(const QuantumState& state, const std::vector<HamiltonianTerm>& terms,
                              double t0, double t1, const PropagateOptions& options) {
  if (!(t1 >= t0)) throw std::invalid_argument("propagate requires t1 >= t0");
  if (!(options.tol > 0.0 && options.tol <= 1e-4)) throw std::invalid_argument("tol must lie in (0, 1e-4]");
  const LevelBasis& basis = state.basis();
  const std::size_t n = basis.size();
  const bool track = !options.dwell_weights.empty();
  if (track && options.dwell_weights.size() != n)
    throw std::invalid_argument("dwell weight count does not match basis size");
  const auto compiled = compile(basis, terms);
  if (t1 == t0) return {state, 0.0, 0};

  using St = std::vector<Complex>;
  const double span = t1 - t0;
  St y(n + (track ? 1 : 0));
  for (std::size_t i = 0; i < n; ++i) y[i] = state.amplitudes()(static_cast<Eigen::Index>(i));

  std::vector<Complex> a(compiled.size());
  const Complex mi(0.0, -1.0);
  // Stage times are kept strictly inside the current piece at interior breakpoints, so a drive
  // switching on or off there is seen from the correct side.
  double lo_clamp = t0, hi_clamp = t1;
  auto rhs = [&](const St& x, St& dx, double t_raw) {
    const double t = std::clamp(t_raw, lo_clamp, hi_clamp);
    for (std::size_t k = 0; k < compiled.size(); ++k) a[k] = evaluate(compiled[k], t);
    for (std::size_t i = 0; i < n; ++i) dx[i] = basis.frame_energy(i) * x[i];
    for (std::size_t k = 0; k < compiled.size(); ++k) {
      const auto& c = compiled[k];
      if (a[k] == 0.0) continue;
      if (c.diagonal) {
        for (auto [up, lo] : c.pairs) dx[up] += a[k].real() * x[up];
      } else {
        const Complex ac = std::conj(a[k]);
        for (auto [up, lo] : c.pairs) {
          dx[up] += a[k] * x[lo];
          dx[lo] += ac * x[up];
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) dx[i] *= mi;
    if (track) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += options.dwell_weights[i] * std::norm(x[i]);
      dx[n] = s / span;
    }
  };

  Eigen::VectorXcd buf;
  auto obs = [&](const St& x, double t) {
    if (!options.observer) return;
    buf.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) buf(static_cast<Eigen::Index>(i)) = x[i];
    options.observer(t, buf);
  };

  std::vector<double> cuts{t0, t1};
  for (const auto& term : terms)
    for (double b : term.breakpoints)
      if (b > t0 && b < t1) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [span](double x, double z) { return z - x <= 1e-12 * span; }), cuts.end());
  cuts.back() = t1;

  auto stepper = ode::make_controlled(options.tol, options.tol, ode::runge_kutta_fehlberg78<St>());
  std::size_t steps = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double pa = cuts[k], pb = cuts[k + 1];
    const double nudge = 1e-9 * (pb - pa) + 1e-13 * std::max(std::abs(pa), std::abs(pb));
    lo_clamp = k == 0 ? pa : pa + nudge;
    hi_clamp = k + 2 == cuts.size() ? pb : pb - nudge;
    steps += ode::integrate_adaptive(stepper, rhs, y, pa, pb, (pb - pa) * 1e-3, obs);
  }

  Eigen::VectorXcd out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i].real()) || !std::isfinite(y[i].imag()))
      throw NumericalError("propagation produced a non-finite amplitude on level " + basis.label(i));
    out(static_cast<Eigen::Index>(i)) = y[i];
  }
  // Unresolved fast oscillations can fool the error controller; the norm catches them.
  const double drift = std::abs(out.norm() - state.amplitudes().norm());
  if (drift > std::max(1e-6, options.tol * (100.0 + static_cast<double>(steps))))
    throw NumericalError("propagation lost unitarity (norm drift " + std::to_string(drift) + ")" +
                         (terms.empty() ? std::string() : " under term '" + terms.front().name + "'"));
  return {QuantumState(state.basis_ptr(), std::move(out)), track ? y[n].real() * span : 0.0, steps};
}

QuantumState propagate(const QuantumState& state, const std::vector<HamiltonianTerm>& terms, double t0,
                       double t1, double tol) {
  PropagateOptions o;
  o.tol = tol;
  return propagate_tracked(state, terms, t0, t1, o).state;
}

Complex overlap(const QuantumState& a, const QuantumState& b) {
  if (a.basis_ptr() != b.basis_ptr() && !(a.basis() == b.basis()))
    throw std::invalid_argument("overlap of states on different bases");
  return a.amplitudes().dot(b.amplitudes());
}

QuantumState tensor_product(const QuantumState& a, const QuantumState& b) {
  for (Atom x : a.basis().atoms())
    for (Atom y : b.basis().atoms())
      if (x == y) throw std::invalid_argument("tensor product of states sharing an atom");
  if (a.basis().size() * b.basis().size() > kMaxBasisSize)
    throw std::length_error("tensor product exceeds 4096 levels");
  auto basis = std::make_shared<const LevelBasis>(LevelBasis::product(a.basis(), b.basis()));
  Eigen::VectorXcd v(static_cast<Eigen::Index>(basis->size()));
  const auto nb = b.amplitudes().size();
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i)
    for (Eigen::Index j = 0; j < nb; ++j) v(i * nb + j) = a.amplitudes()(i) * b.amplitudes()(j);
  return QuantumState(std::move(basis), std::move(v));
}

}  // namespace rydsim
