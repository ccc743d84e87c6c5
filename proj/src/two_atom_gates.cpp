#include "rydsim/two_atom_gates.hpp"

#include <cmath>
#include <exception>

#include <omp.h>

#include "rydsim/atomic_structure.hpp"
#include "rydsim/fidelity_budget.hpp"

namespace rydsim {

void BlockadeModel::validate() const {
  if (mode == Mode::finite && !(V > 0.0 && std::isfinite(V)))
    throw std::invalid_argument("finite blockade needs V > 0");
}

namespace {

using E = Electronic;

std::vector<Level> levels_of(std::initializer_list<E> tags) {
  std::vector<Level> out;
  for (E e : tags)
    for (int n : {0, 1}) out.push_back({e, n});
  return out;
}

struct Column {
  Eigen::VectorXcd amplitudes;
  double dwell = 0.0;
  std::vector<std::pair<double, double>> trajectory;
};

struct Prepared {
  BasisPtr basis;
  std::vector<double> weights;
  std::vector<std::size_t> input_index;
  std::vector<std::vector<HamiltonianTerm>> terms;
  std::vector<std::pair<double, double>> spans;
};

Prepared prepare(const GateProgram& g, const BlockadeModel& b, const GateOptions& o) {
  b.validate();
  g.schedule.validate();
  if (g.inputs.size() != 16) throw std::invalid_argument("gate programs need 16 inputs");
  LevelBasis ca(Atom::control, g.control_levels), ta(Atom::target, g.target_levels);
  auto keep = [&](const std::vector<Level>& joint) {
    if (b.mode == BlockadeModel::Mode::finite) return true;
    return !(is_rydberg(joint[0]) && is_rydberg(joint[1]));
  };
  LevelBasis joint = LevelBasis::product(ca, ta, keep);
  if (b.mode == BlockadeModel::Mode::finite) {
    std::vector<double> fe(joint.size(), 0.0);
    for (std::size_t i = 0; i < joint.size(); ++i)
      if (joint.rydberg_count(i) == 2) fe[i] = b.V;
    joint = joint.with_frame_energies(std::move(fe));
  }
  Prepared p;
  p.basis = std::make_shared<const LevelBasis>(std::move(joint));
  p.weights.resize(p.basis->size());
  for (std::size_t i = 0; i < p.basis->size(); ++i) p.weights[i] = p.basis->rydberg_count(i);
  for (const auto& [c, t] : g.inputs) {
    auto idx = p.basis->find({c, t});
    if (!idx) throw std::invalid_argument("gate input " + to_string(c) + "," + to_string(t) + " not in basis");
    p.input_index.push_back(*idx);
  }
  double t = 0.0;
  for (const auto& seg : g.schedule.segments) {
    if (!o.target_pulse && seg.atom == Atom::target) continue;
    p.terms.push_back(seg.hamiltonian_terms(t));
    p.spans.emplace_back(t, t + seg.duration);
    t += seg.duration;
  }
  return p;
}

Column run_column(const Prepared& p, std::size_t k, const GateOptions& o) {
  Column col;
  QuantumState psi = QuantumState::basis_state(p.basis, p.input_index[k]);
  PropagateOptions po;
  po.tol = o.tol;
  po.dwell_weights = p.weights;
  if (o.record_trajectories) {
    po.observer = [&](double t, const Eigen::VectorXcd& a) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < a.size(); ++i) s += p.weights[static_cast<std::size_t>(i)] * std::norm(a(i));
      col.trajectory.emplace_back(t, s);
    };
  }
  for (std::size_t s = 0; s < p.terms.size(); ++s) {
    auto r = propagate_tracked(psi, p.terms[s], p.spans[s].first, p.spans[s].second, po);
    col.dwell += r.weighted_dwell;
    psi = std::move(r.state);
  }
  col.amplitudes = psi.amplitudes();
  return col;
}

GateResult assemble(const GateProgram& g, const Prepared& p, std::vector<Column>& cols) {
  GateResult r;
  r.label = g.label;
  r.ordering = g.ordering;
  r.ideal = g.ideal;
  r.phase = g.phase;
  r.duration = g.schedule.total_duration();
  r.matrix = Eigen::MatrixXcd::Zero(16, 16);
  for (std::size_t k = 0; k < 16; ++k) {
    const Complex ph = g.column_phases.empty() ? Complex(1.0) : g.column_phases[k];
    for (std::size_t j = 0; j < 16; ++j)
      r.matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          ph * cols[k].amplitudes(static_cast<Eigen::Index>(p.input_index[j]));
    r.leakage.push_back(std::max(0.0, 1.0 - r.matrix.col(static_cast<Eigen::Index>(k)).squaredNorm()));
    r.dwell_per_input.push_back(cols[k].dwell);
    r.dwell += cols[k].dwell / 16.0;
    r.trajectories.push_back(std::move(cols[k].trajectory));
    r.input_labels.push_back(to_string(g.inputs[k].first) + "," + to_string(g.inputs[k].second));
  }
  return r;
}

}  // namespace

GateResult simulate_gate_serial(const GateProgram& program, const BlockadeModel& blockade, const GateOptions& options) {
  const Prepared p = prepare(program, blockade, options);
  std::vector<Column> cols(16);
  for (std::size_t k = 0; k < 16; ++k) cols[k] = run_column(p, k, options);
  return assemble(program, p, cols);
}

GateResult simulate_gate(const GateProgram& program, const BlockadeModel& blockade, const GateOptions& options) {
  if (!options.parallel) return simulate_gate_serial(program, blockade, options);
  const Prepared p = prepare(program, blockade, options);
  std::vector<Column> cols(16);
  std::exception_ptr err;
  const int nt = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (int k = 0; k < 16; ++k) {
    try {
      cols[static_cast<std::size_t>(k)] = run_column(p, static_cast<std::size_t>(k), options);
    } catch (...) {
#pragma omp critical(rydsim_gate_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return assemble(program, p, cols);
}

Eigen::MatrixXcd ideal_cz_electronic() {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(16, 16);
  for (int k = 0; k < 16; ++k) u(k, k) = k >= 12 ? 1.0 : -1.0;
  return u;
}

Eigen::MatrixXcd ideal_cz_nuclear() { return ideal_cz_electronic(); }

Eigen::MatrixXcd ideal_cz_cross() {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(16, 16);
  for (int ce = 0; ce < 2; ++ce)
    for (int te = 0; te < 2; ++te)
      for (int cn = 0; cn < 2; ++cn)
        for (int tn = 0; tn < 2; ++tn) {
          const int k = electronic_major_index(ce, te, cn, tn);
          u(k, k) = (ce == 1 && tn == 1) ? -1.0 : 1.0;
        }
  return u;
}

Eigen::MatrixXd nuclear_to_electronic_order() {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(16, 16);
  for (int ce = 0; ce < 2; ++ce)
    for (int te = 0; te < 2; ++te)
      for (int cn = 0; cn < 2; ++cn)
        for (int tn = 0; tn < 2; ++tn) P(electronic_major_index(ce, te, cn, tn), nuclear_major_index(ce, te, cn, tn)) = 1.0;
  return P;
}

namespace {

std::vector<std::pair<Level, Level>> inputs_in_order(bool nuclear_major) {
  std::vector<std::pair<Level, Level>> in(16);
  for (int ce = 0; ce < 2; ++ce)
    for (int te = 0; te < 2; ++te)
      for (int cn = 0; cn < 2; ++cn)
        for (int tn = 0; tn < 2; ++tn) {
          const int k = nuclear_major ? nuclear_major_index(ce, te, cn, tn) : electronic_major_index(ce, te, cn, tn);
          in[static_cast<std::size_t>(k)] = {Level{ce ? E::c : E::g, cn}, Level{te ? E::c : E::g, tn}};
        }
  return in;
}

std::vector<Complex> phases_where(bool nuclear_major, double phase,
                                  const std::function<bool(int, int, int, int)>& pick) {
  std::vector<Complex> ph(16, 1.0);
  for (int ce = 0; ce < 2; ++ce)
    for (int te = 0; te < 2; ++te)
      for (int cn = 0; cn < 2; ++cn)
        for (int tn = 0; tn < 2; ++tn)
          if (pick(ce, te, cn, tn)) {
            const int k = nuclear_major ? nuclear_major_index(ce, te, cn, tn) : electronic_major_index(ce, te, cn, tn);
            ph[static_cast<std::size_t>(k)] = std::polar(1.0, phase);
          }
  return ph;
}

const char* kElectronicOrder = "|ce te> (x) |cn tn>";
const char* kNuclearOrder = "|cn tn> (x) |ce te>";

}  // namespace

double sin_detuned_phase(const SinPulseParams& p, double angle, int resonant_nuclear, double tol) {
  NuclearExcitationOptions o;
  o.resonant_nuclear = resonant_nuclear;
  o.electronic_superposition = false;
  auto sched = build_nuclear_excitation(p, CouplingFactors{p.eta, p.eta, 1.0, 1.0}, angle, o);
  auto basis = std::make_shared<const LevelBasis>(Atom::control, levels_of({E::g, E::r}));
  const int m = 1 - resonant_nuclear;
  auto psi = QuantumState::basis_state(basis, "g" + std::to_string(m));
  const auto& seg = sched.segments.front();
  psi = propagate(psi, seg.hamiltonian_terms(0.0), 0.0, seg.duration, tol);
  return std::arg(psi.amplitude("g" + std::to_string(m)));
}

GateProgram program_cz_electronic(const ElectronicGateParams& p, const GateOptions&) {
  GateProgram g;
  g.ordering = kElectronicOrder;
  g.control_levels = g.target_levels = levels_of({E::g, E::c, E::r});
  g.inputs = inputs_in_order(false);
  g.ideal = ideal_cz_electronic();
  ExcitationOptions oc, ot;
  oc.atom = Atom::control;
  ot.atom = Atom::target;
  if (p.method == ElectronicMethod::sinusoidal) {
    g.label = "cz-electronic-sinusoidal";
    oc.label = "control-excite";
    g.schedule.append(build_sin_excitation(p.sin, kPi / 2, oc));
    ot.label = "target-2pi";
    g.schedule.append(build_sin_excitation(p.sin, kPi, ot));
    oc.label = "control-deexcite";
    oc.reversal = p.deexcitation;
    g.schedule.append(build_sin_excitation(p.sin, kPi / 2, oc));
  } else {
    g.label = "cz-electronic-two-step";
    const double phi = detuned_cycle_phase(p.rect.N, p.rect.Delta, p.rect.Omega0, std::abs(p.rect.eta));
    g.phase = phi;
    oc.label = "control";
    ot.label = "target";
    g.schedule.append(build_two_step_excitation(p.rect, oc));
    g.schedule.append(build_two_step_excitation(p.rect, ot));
    g.schedule.append(build_two_step_deexcitation(p.rect, phi, ot));
    g.schedule.append(build_two_step_deexcitation(p.rect, phi, oc));
  }
  return g;
}

GateProgram program_cz_nuclear(const NuclearGateParams& p, const GateOptions& o) {
  GateProgram g;
  g.ordering = kNuclearOrder;
  g.control_levels = g.target_levels = levels_of({E::g, E::c, E::r, E::R});
  g.inputs = inputs_in_order(true);
  g.ideal = ideal_cz_nuclear();
  NuclearExcitationOptions oc, ot;
  oc.atom = Atom::control;
  ot.atom = Atom::target;
  double phi = 0.0;
  if (p.method == NuclearMethod::sinusoidal) {
    g.label = "cz-nuclear-sinusoidal";
    SinPulseParams sp = p.sin;
    sp.eta = p.couplings.eta;
    phi = sin_detuned_phase(sp, kPi / 2, 0, o.tol);
    auto step = [&](NuclearExcitationOptions opt) { return build_nuclear_excitation(sp, p.couplings, kPi / 2, opt); };
    oc.label = "control-excite";
    g.schedule.append(step(oc));
    ot.label = "target-1";
    g.schedule.append(step(ot));
    ot.label = "target-2";
    ot.rabi_phase = -2.0 * phi;
    g.schedule.append(step(ot));
    oc.label = "control-deexcite";
    oc.reversal = p.deexcitation;
    g.schedule.append(step(oc));
  } else {
    g.label = "cz-nuclear-rectangular";
    const auto& rp = p.rect;
    if (!rp.matched(1e-9)) throw std::invalid_argument("rectangular nuclear gate needs matched parameters");
    phi = detuned_cycle_phase(rp.N, rp.Delta, rp.Omega0, std::abs(rp.eta));
    oc.label = "control-excite";
    g.schedule.append(build_nuclear_excitation(rp, oc));
    ot.label = "target-1";
    g.schedule.append(build_nuclear_excitation(rp, ot));
    ot.label = "target-2";
    ot.rabi_phase = -2.0 * phi;
    g.schedule.append(build_nuclear_excitation(rp, ot));
    oc.label = "control-deexcite";
    g.schedule.append(build_nuclear_excitation(rp, oc));
  }
  g.phase = phi;
  switch (p.compensation) {
    case Compensation::idealized:
      g.column_phases = phases_where(true, -4.0 * phi, [](int, int, int cn, int) { return cn == 1; });
      break;
    case Compensation::explicit_drive: {
      const auto plan = compensation_plan(phi, p.Omega_p, p.delta_p);
      g.control_levels.push_back({E::p, 1});
      g.control_levels.push_back({E::P, 1});
      const double zeta = p.method == NuclearMethod::sinusoidal ? p.couplings.zeta : p.rect.zeta;
      g.schedule.append(build_compensation(plan, Atom::control, {Level{E::g, 1}, Level{E::c, 1}}, zeta));
      break;
    }
    case Compensation::none:
      break;
  }
  return g;
}

GateProgram program_cz_cross(const NuclearGateParams& p, const GateOptions& o) {
  GateProgram g;
  g.ordering = kElectronicOrder;
  g.control_levels = levels_of({E::g, E::c, E::r});
  g.target_levels = levels_of({E::g, E::c, E::r, E::R});
  g.inputs = inputs_in_order(false);
  g.ideal = ideal_cz_cross();
  ExcitationOptions oc;
  oc.atom = Atom::control;
  NuclearExcitationOptions ot;
  ot.atom = Atom::target;
  ot.resonant_nuclear = 1;
  double phi = 0.0;
  if (p.method == NuclearMethod::sinusoidal) {
    g.label = "cz-cross-sinusoidal";
    SinPulseParams sp = p.sin;
    sp.eta = p.couplings.eta;
    phi = sin_detuned_phase(sp, kPi / 2, 1, o.tol);
    oc.label = "control-excite";
    g.schedule.append(build_sin_excitation(sp, kPi / 2, oc));
    ot.label = "target-1";
    g.schedule.append(build_nuclear_excitation(sp, p.couplings, kPi / 2, ot));
    ot.label = "target-2";
    ot.rabi_phase = -2.0 * phi;
    g.schedule.append(build_nuclear_excitation(sp, p.couplings, kPi / 2, ot));
    oc.label = "control-deexcite";
    oc.reversal = Reversal::full;
    oc.rabi_phase = kPi;
    g.schedule.append(build_sin_excitation(sp, kPi / 2, oc));
  } else {
    g.label = "cz-cross-rectangular";
    const auto& rp = p.rect;
    const double phic = detuned_cycle_phase(rp.N, rp.Delta, rp.Omega0, std::abs(rp.eta));
    phi = detuned_cycle_phase(rp.N, -rp.Delta, rp.Omega0, 1.0 / std::abs(rp.eta));
    oc.label = "control";
    g.schedule.append(build_two_step_excitation(rp, oc));
    ot.label = "target-1";
    g.schedule.append(build_nuclear_excitation(rp, ot));
    ot.label = "target-2";
    ot.rabi_phase = -2.0 * phi;
    g.schedule.append(build_nuclear_excitation(rp, ot));
    oc.rabi_phase = kPi;
    g.schedule.append(build_two_step_deexcitation(rp, phic, oc));
  }
  g.phase = phi;
  if (p.compensation == Compensation::idealized)
    g.column_phases = phases_where(false, -2.0 * phi, [](int ce, int, int, int) { return ce == 1; });
  else if (p.compensation == Compensation::explicit_drive)
    throw std::invalid_argument("cross gate supports idealized or no compensation only");
  return g;
}

GateResult run_cz_electronic(const ElectronicGateParams& p, const BlockadeModel& b, const GateOptions& o) {
  return simulate_gate(program_cz_electronic(p, o), b, o);
}

GateResult run_cz_nuclear(const NuclearGateParams& p, const BlockadeModel& b, const GateOptions& o) {
  return simulate_gate(program_cz_nuclear(p, o), b, o);
}

GateResult run_cz_cross(const NuclearGateParams& p, const BlockadeModel& b, const GateOptions& o) {
  return simulate_gate(program_cz_cross(p, o), b, o);
}

TensorGateResult run_cz_tensor(const ElectronicGateParams& pe, const NuclearGateParams& pn, const BlockadeModel& b,
                               const GateOptions& o, bool nuclear_first) {
  TensorGateResult t;
  t.electronic = run_cz_electronic(pe, b, o);
  t.nuclear = run_cz_nuclear(pn, b, o);
  const Eigen::MatrixXcd P = nuclear_to_electronic_order().cast<Complex>();
  const Eigen::MatrixXcd un = P * t.nuclear.matrix * P.transpose();
  const Eigen::MatrixXcd in = P * t.nuclear.ideal * P.transpose();
  GateResult& c = t.composite;
  c.label = nuclear_first ? "cz-tensor-nuclear-first" : "cz-tensor";
  c.ordering = kElectronicOrder;
  c.input_labels = t.electronic.input_labels;
  c.matrix = nuclear_first ? Eigen::MatrixXcd(t.electronic.matrix * un) : Eigen::MatrixXcd(un * t.electronic.matrix);
  c.ideal = nuclear_first ? Eigen::MatrixXcd(t.electronic.ideal * in) : Eigen::MatrixXcd(in * t.electronic.ideal);
  c.dwell = t.electronic.dwell + t.nuclear.dwell;
  c.duration = t.electronic.duration + t.nuclear.duration;
  for (Eigen::Index k = 0; k < 16; ++k) c.leakage.push_back(std::max(0.0, 1.0 - c.matrix.col(k).squaredNorm()));
  return t;
}

SingleAtomKind parse_single_atom_kind(const std::string& s) {
  if (s == "nuclear-phase") return SingleAtomKind::nuclear_phase;
  if (s == "nuclear-raman") return SingleAtomKind::nuclear_raman;
  if (s == "electronic-phase") return SingleAtomKind::electronic_phase;
  if (s == "electronic-transfer") return SingleAtomKind::electronic_transfer;
  if (s == "intra-atom-cz") return SingleAtomKind::intra_atom_cz;
  throw std::invalid_argument("unknown single-atom operation '" + s + "'");
}

SingleAtomGate single_atom_ops(SingleAtomKind kind, const SingleAtomParams& p) {
  SingleAtomGate out;
  out.kind = kind;
  std::vector<Level> levels = levels_of({E::g, E::c});
  const std::vector<Level> comp = levels;  // g0 g1 c0 c1
  PulseSchedule sched;
  Eigen::Matrix4cd ideal = Eigen::Matrix4cd::Identity();

  auto phase_drive = [&](const std::vector<Level>& lowers, double theta) {
    out.plan = compensation_plan(-theta / 4.0, p.Omega_p, p.delta_p, p.phase_tol);
    for (const Level& l : lowers) levels.push_back({l.electronic == E::g ? E::p : E::P, l.nuclear});
    sched = build_compensation(out.plan, Atom::control, lowers, p.zeta, "phase-drive");
    for (const Level& l : lowers) {
      const auto k = static_cast<Eigen::Index>(std::find(comp.begin(), comp.end(), l) - comp.begin());
      ideal(k, k) = std::polar(1.0, theta);
    }
  };

  switch (kind) {
    case SingleAtomKind::nuclear_phase:
      phase_drive({{E::g, 1}, {E::c, 1}}, p.angle);
      break;
    case SingleAtomKind::electronic_phase:
      phase_drive({{E::c, 0}, {E::c, 1}}, p.angle);
      break;
    case SingleAtomKind::intra_atom_cz:
      phase_drive({{E::c, 1}}, kPi);
      break;
    case SingleAtomKind::nuclear_raman: {
      if (!(p.Omega_R > 0.0)) throw std::invalid_argument("Raman Rabi frequency must be positive");
      const double T = p.angle / p.Omega_R;
      PulseSegment seg;
      seg.atom = Atom::control;
      seg.duration = T;
      seg.label = "raman";
      for (E e : {E::g, E::c}) {
        DriveTerm d;
        d.lower = {e, 0};
        d.upper = {e, 1};
        d.amplitude = p.Omega_R;
        d.phase = p.raman_phase;
        d.t_off = T;
        seg.drives.push_back(d);
      }
      sched.segments.push_back(seg);
      const double c = std::cos(p.angle / 2), s = std::sin(p.angle / 2);
      Eigen::Matrix2cd r;
      r << c, Complex(0, -1) * std::polar(1.0, -p.raman_phase) * s, Complex(0, -1) * std::polar(1.0, p.raman_phase) * s, c;
      ideal.setZero();
      ideal.block<2, 2>(0, 0) = r;
      ideal.block<2, 2>(2, 2) = r;
      break;
    }
    case SingleAtomKind::electronic_transfer: {
      SinPulseParams sp;
      sp.kappa = p.kappa;
      sp.delta_env = p.delta_env;
      sp.Delta = 2.0 * kPi * (clock_zeeman_shift_hz(p.B_gauss, 1.0) - clock_zeeman_shift_hz(p.B_gauss, 0.0));
      ExcitationOptions eo;
      eo.ground = E::g;
      eo.rydberg = E::c;
      eo.label = "transfer";
      sched = build_sin_excitation(sp, p.angle, eo);
      const double c = std::cos(p.angle), s = std::sin(p.angle);
      ideal << c, 0, -s, 0,
               0, c, 0, -s,
               s, 0, c, 0,
               0, s, 0, c;
      break;
    }
  }

  auto basis = std::make_shared<const LevelBasis>(Atom::control, levels);
  for (std::size_t k = 0; k < 4; ++k) {
    auto psi = QuantumState::basis_state(basis, k);
    double t = 0.0;
    for (const auto& seg : sched.segments) {
      psi = propagate(psi, seg.hamiltonian_terms(t), t, t + seg.duration, p.tol);
      t += seg.duration;
    }
    for (std::size_t j = 0; j < 4; ++j)
      out.matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = psi.amplitudes()(static_cast<Eigen::Index>(j));
    out.duration = t;
  }
  out.ideal = ideal;
  out.fidelity = average_fidelity(out.ideal, out.matrix);
  return out;
}

nlohmann::json to_json(const GateResult& r) {
  nlohmann::json m = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < r.matrix.cols(); ++j) m.push_back({r.matrix(i, j).real(), r.matrix(i, j).imag()});
  return {{"label", r.label},
          {"ordering", r.ordering},
          {"inputs", r.input_labels},
          {"matrix", m},
          {"dwell_s", r.dwell},
          {"dwell_per_input_s", r.dwell_per_input},
          {"leakage", r.leakage},
          {"phase", r.phase},
          {"duration_s", r.duration}};
}

}  // namespace rydsim
