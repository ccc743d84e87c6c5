#include "rydsim/app/runner.hpp"

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "rydsim/atomic_structure.hpp"
#include "rydsim/fidelity_budget.hpp"
#include "rydsim/two_atom_gates.hpp"

namespace rydsim::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Units {
  double rate;  // 2 kappa_0 in rad/s
  double time;  // 2 pi / (2 kappa_0) in s
  explicit Units(const ScenarioConfig& c)
      : rate(constants::two_pi * c.two_kappa0_mhz * 1e6), time(constants::two_pi / rate) {}
};

SinPulseParams sin_params(const ScenarioConfig& c) {
  const Units u(c);
  SinPulseParams p;
  p.kappa = 0.5 * u.rate;
  p.delta_env = c.params.delta * u.rate;
  p.Delta = c.params.Delta * u.rate;
  p.eta = c.params.eta;
  p.kappa1 = c.params.kappa1 ? *c.params.kappa1 * u.rate : 0.0;
  return p;
}

CouplingFactors couplings(const ScenarioConfig& c) {
  return {c.params.eta, c.params.eta_prime, c.params.zeta, c.params.Lambda};
}

RectPulseParams rect_params(const ScenarioConfig& c) {
  const Units u(c);
  const double D = c.params.Delta * u.rate;
  const double hint = c.params.Omega0 ? *c.params.Omega0 * u.rate : D / std::sqrt(3.0);
  return match_generalized_rabi(c.params.eta, c.params.eta_prime, c.params.zeta, D, hint, c.params.N);
}

BlockadeModel blockade(const ScenarioConfig& c) {
  if (c.blockade.mode == "finite") return BlockadeModel::finite(constants::two_pi * c.blockade.V_mhz * 1e6);
  return BlockadeModel::perfect();
}

BudgetInputs budget_inputs(const ScenarioConfig& c) {
  const Units u(c);
  BudgetInputs b;
  b.tau = c.budget.tau_us * 1e-6;
  b.kappa0 = 0.5 * u.rate;
  b.V = c.budget.V_mhz > 0.0 ? constants::two_pi * c.budget.V_mhz * 1e6 : 0.0;
  b.Delta = c.params.Delta * u.rate;
  b.delta_env = c.params.delta * u.rate;
  return b;
}

ElectronicGateParams electronic_params(const ScenarioConfig& c) {
  ElectronicGateParams p;
  const bool two_step = c.method == "two-step" || c.method == "rectangular";
  p.method = two_step ? ElectronicMethod::two_step : ElectronicMethod::sinusoidal;
  if (two_step)
    p.rect = rect_params(c);
  else
    p.sin = sin_params(c);
  if (!c.params.deexcitation.empty()) p.deexcitation = parse_reversal(c.params.deexcitation);
  return p;
}

NuclearGateParams nuclear_params(const ScenarioConfig& c) {
  NuclearGateParams p;
  const bool rect = c.method == "rectangular" || c.method == "two-step";
  p.method = rect ? NuclearMethod::rectangular : NuclearMethod::sinusoidal;
  if (rect)
    p.rect = rect_params(c);
  else
    p.sin = sin_params(c);
  p.couplings = couplings(c);
  if (c.params.compensation == "explicit") {
    const Units u(c);
    p.compensation = Compensation::explicit_drive;
    p.Omega_p = c.params.Omega_p * u.rate;
    p.delta_p = c.params.delta_p * u.rate;
  } else if (c.params.compensation == "none") {
    p.compensation = Compensation::none;
  }
  if (!c.params.deexcitation.empty()) p.deexcitation = parse_reversal(c.params.deexcitation);
  return p;
}

json stamp(json j) {
  j["generator"] = kVersion;
  return j;
}

void write_text(const fs::path& path, const std::string& text, RunReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("failed writing output '" + path.string() + "'");
  report.files.push_back(path);
}

void write_json(const fs::path& path, const json& j, RunReport& report) { write_text(path, j.dump(2) + "\n", report); }

// Uniformly sampled propagation of one input through a schedule.
struct Series {
  std::vector<double> t;
  std::vector<Eigen::VectorXcd> psi;
};

Series sample(const QuantumState& in, const PulseSchedule& s, int samples, double tol) {
  Series out;
  const double T = s.total_duration();
  std::vector<double> seg_start;
  double acc = 0.0;
  for (const auto& seg : s.segments) {
    seg_start.push_back(acc);
    acc += seg.duration;
  }
  QuantumState psi = in;
  out.t.push_back(0.0);
  out.psi.push_back(psi.amplitudes());
  double t = 0.0;
  std::size_t k = 0;
  for (int i = 1; i < samples; ++i) {
    const double target = i == samples - 1 ? T : T * i / (samples - 1);
    while (t < target) {
      while (k + 1 < s.segments.size() && t >= seg_start[k] + s.segments[k].duration) ++k;
      const double seg_end = seg_start[k] + s.segments[k].duration;
      const double stop = k + 1 == s.segments.size() ? target : std::min(target, seg_end);
      psi = propagate(psi, s.segments[k].hamiltonian_terms(seg_start[k]), t, stop, tol);
      t = stop;
      if (k + 1 == s.segments.size()) break;
    }
    out.t.push_back(target);
    out.psi.push_back(psi.amplitudes());
  }
  return out;
}

void emit_series(const fs::path& stem, const LevelBasis& basis, const Series& s, const RunOptions& o, RunReport& r) {
  if (o.format == "json") {
    json j;
    j["generator"] = kVersion;
    j["t_us"] = json::array();
    for (double t : s.t) j["t_us"].push_back(t * 1e6);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      json pop = json::array(), arg = json::array();
      for (const auto& v : s.psi) {
        pop.push_back(std::norm(v(static_cast<Eigen::Index>(i))));
        arg.push_back(std::arg(v(static_cast<Eigen::Index>(i))));
      }
      j["P_" + basis.label(i)] = pop;
      j["arg_" + basis.label(i)] = arg;
    }
    write_json(fs::path(stem.string() + ".json"), j, r);
    return;
  }
  std::ostringstream os;
  os << "t_us";
  for (std::size_t i = 0; i < basis.size(); ++i) os << ",P_" << basis.label(i);
  for (std::size_t i = 0; i < basis.size(); ++i) os << ",arg_" << basis.label(i);
  os << '\n' << std::setprecision(12);
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    os << s.t[k] * 1e6;
    for (std::size_t i = 0; i < basis.size(); ++i) os << ',' << std::norm(s.psi[k](static_cast<Eigen::Index>(i)));
    for (std::size_t i = 0; i < basis.size(); ++i) os << ',' << std::arg(s.psi[k](static_cast<Eigen::Index>(i)));
    os << '\n';
  }
  write_text(fs::path(stem.string() + ".csv"), os.str(), r);
}

std::vector<Level> levels_gr() { return {{Electronic::g, 0}, {Electronic::g, 1}, {Electronic::r, 0}, {Electronic::r, 1}}; }

json run_excite_sin(const ScenarioConfig& c, const RunOptions& o, RunReport& r, bool write) {
  const Units u(c);
  json summary;
  if (c.drive.kind == "two-field") {
    const auto p = sin_params(c);
    const auto sched = build_sin_excitation(p, kPi / 2);
    auto basis = std::make_shared<const LevelBasis>(Atom::control, levels_gr());
    for (int n : {0, 1}) {
      const std::string g = "g" + std::to_string(n), ry = "r" + std::to_string(n);
      const auto s = sample(QuantumState::basis_state(basis, g), sched, c.drive.samples, o.tol);
      const auto& last = s.psi.back();
      const Complex a = last(static_cast<Eigen::Index>(basis->index_of(ry)));
      summary["population_" + ry] = std::norm(a);
      summary["phase_" + ry + "_pi"] = std::arg(a) / kPi;
      if (write) emit_series(o.out_dir / (c.name + "_" + g), *basis, s, o, r);
    }
    summary["duration_units"] = sched.total_duration() / u.time;
    return summary;
  }
  std::vector<std::string> cases = c.drive.cases;
  if (cases.empty()) cases = {"resonant-sine", "detuned-sine", "detuned-rectangular"};
  const double kappa = 0.5 * u.rate, delta = c.params.delta * u.rate;
  const double T = sin_pulse_duration(kappa, delta, kPi / 2);
  auto basis = std::make_shared<const LevelBasis>(Atom::control, std::vector<Level>{{Electronic::g, 0}, {Electronic::r, 0}});
  for (const auto& name : cases) {
    const bool detuned = name != "resonant-sine";
    const Envelope env = name == "detuned-rectangular" ? Envelope::rectangular : Envelope::sine;
    const auto sched = build_single_field_drive(env, kappa, delta, detuned ? c.params.Delta * u.rate : 0.0, T);
    const auto s = sample(QuantumState::basis_state(basis, "g0"), sched, c.drive.samples, o.tol);
    const auto& last = s.psi.back();
    summary[name + "_ground_population"] = std::norm(last(0));
    summary[name + "_rydberg_population"] = std::norm(last(1));
    summary[name + "_ground_phase_pi"] = std::arg(last(0)) / kPi;
    if (write) emit_series(o.out_dir / (c.name + "_" + name), *basis, s, o, r);
  }
  summary["duration_units"] = T / u.time;
  return summary;
}

json run_excite_two_step(const ScenarioConfig& c, const RunOptions& o, RunReport& r, bool write) {
  const auto p = rect_params(c);
  const double phi = detuned_cycle_phase(p.N, p.Delta, p.Omega0, std::abs(p.eta));
  const auto exc = build_two_step_excitation(p);
  auto full = exc;
  full.append(build_two_step_deexcitation(p, phi));
  auto basis = std::make_shared<const LevelBasis>(Atom::control, levels_gr());
  const double a = c.drive.mix_angle;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(0) = std::cos(a);
  v(1) = std::sin(a);
  const QuantumState in(basis, v);
  QuantumState mid = in;
  double t = 0.0;
  for (const auto& seg : exc.segments) {
    mid = propagate(mid, seg.hamiltonian_terms(t), t, t + seg.duration, o.tol);
    t += seg.duration;
  }
  Eigen::VectorXcd ev = Eigen::VectorXcd::Zero(4);
  const Complex pre = Complex(0, -1) * std::polar(1.0, phi);
  ev(2) = pre * std::cos(a);
  ev(3) = pre * std::sin(a);
  const QuantumState expected(basis, ev);
  const auto s = sample(in, full, c.drive.samples, o.tol);
  const QuantumState out(basis, s.psi.back());
  const Complex rt = overlap(in, out);
  json summary;
  summary["N"] = p.N;
  summary["Omega0_units"] = p.Omega0 / Units(c).rate;
  summary["phi_pi"] = phi / kPi;
  summary["excitation_fidelity"] = std::norm(overlap(expected, mid));
  summary["round_trip_re"] = rt.real();
  summary["round_trip_im"] = rt.imag();
  if (write) emit_series(o.out_dir / c.name, *basis, s, o, r);
  return summary;
}

GateOptions gate_options(const RunOptions& o, bool nested) {
  GateOptions g;
  g.tol = o.tol;
  g.parallel = !nested && o.jobs > 1;
  g.threads = o.jobs;
  return g;
}

json budget_summary(const ErrorBudget& b, const GateResult& g, double time_unit) {
  json j = to_json(b);
  j["dwell_units"] = g.dwell / time_unit;
  j["phase_rad"] = g.phase;
  return j;
}

json run_gate(const ScenarioConfig& c, const RunOptions& o, RunReport& r, bool write, bool nested) {
  const Units u(c);
  const auto go = gate_options(o, nested);
  const auto b = blockade(c);
  const auto bi = budget_inputs(c);
  if (c.scenario == "cz-tensor") {
    auto pe_cfg = c;
    if (pe_cfg.params.deexcitation.empty()) pe_cfg.params.deexcitation = "full";
    auto pn_cfg = c;
    if (pn_cfg.params.deexcitation.empty()) pn_cfg.params.deexcitation = "envelope";
    const auto t = run_cz_tensor(electronic_params(pe_cfg), nuclear_params(pn_cfg), b, go);
    const auto be = assemble_budget(t.electronic, t.electronic.ideal, bi);
    const auto bn = assemble_budget(t.nuclear, t.nuclear.ideal, bi);
    const auto cb = compose_budgets(be, bn, t.composite);
    json j = to_json(cb);
    j["electronic"]["dwell_units"] = t.electronic.dwell / u.time;
    j["nuclear"]["dwell_units"] = t.nuclear.dwell / u.time;
    if (write) {
      write_json(o.out_dir / (c.name + "_gate.json"), stamp(to_json(t.composite)), r);
      write_json(o.out_dir / (c.name + "_budget.json"), stamp(j), r);
    }
    return json{{"fidelity", cb.product_fidelity},
                {"E_ro_electronic", be.E_ro},
                {"E_ro_nuclear", bn.E_ro},
                {"intrinsic_fidelity_composed", cb.simulated_fidelity}};
  }
  GateResult g;
  if (c.scenario == "cz-electronic")
    g = run_cz_electronic(electronic_params(c), b, go);
  else if (c.scenario == "cz-nuclear")
    g = run_cz_nuclear(nuclear_params(c), b, go);
  else
    g = run_cz_cross(nuclear_params(c), b, go);
  const auto bud = assemble_budget(g, g.ideal, bi);
  const json bj = budget_summary(bud, g, u.time);
  if (write) {
    write_json(o.out_dir / (c.name + "_gate.json"), stamp(to_json(g)), r);
    write_json(o.out_dir / (c.name + "_budget.json"), stamp(bj), r);
  }
  return json{{"E_ro", bud.E_ro},
              {"E_decay", bud.E_decay},
              {"E_bl", bud.E_bl},
              {"fidelity", bud.fidelity},
              {"dwell_units", g.dwell / u.time},
              {"phase_rad", g.phase}};
}

json run_levels(const ScenarioConfig& c, const RunOptions& o, RunReport& r, bool write) {
  const auto& l = c.levels;
  const double mhz = constants::two_pi * 1e6, ghz = constants::two_pi * 1e9;
  const auto [A, B] = scale_hyperfine_constants(l.A_mhz * mhz, l.B_mhz * mhz, l.nstar_ref, l.nstar_new);
  HyperfineModel m;
  m.A_hfs = A;
  m.B_hfs = B;
  m.I = l.I;
  m.J = l.J;
  m.g_J = l.g_J;
  m.g_I = l.g_I;
  const auto rows = level_diagram(m, l.fields_gauss);
  double spread = 0.0;
  for (double b : l.fields_gauss) spread = std::max(spread, level_spread(rows, b));
  RydbergManifoldModel rm;
  rm.n = l.n;
  rm.A_prime = l.A_prime_ghz * ghz;
  rm.O_nn = l.O_nn;
  rm.I = l.I;
  ManifoldTargets targets{l.separation_ghz * ghz, l.gap_ghz * ghz, l.singlet_fraction};
  rm.Delta_ST = l.Delta_ST_ghz ? *l.Delta_ST_ghz * ghz
                               : calibrate_singlet_triplet_splitting(rm.A_prime, rm.O_nn, rm.I, targets);
  const auto s = rydberg_s_manifold(rm);
  json summary{{"A_scaled_mhz", A / mhz},
               {"B_scaled_mhz", B / mhz},
               {"max_spread_mhz", spread / mhz},
               {"Delta_ST_ghz", rm.Delta_ST / ghz},
               {"separation_ghz", s.separation / ghz},
               {"gap_ghz", s.gap / ghz},
               {"upper_singlet_fraction", s.upper_singlet_fraction}};
  if (write) {
    std::ostringstream os;
    write_level_csv(os, rows);
    write_text(o.out_dir / (c.name + "_levels.csv"), os.str(), r);
    json man = summary;
    man["generator"] = kVersion;
    man["n"] = rm.n;
    man["calibrated"] = !l.Delta_ST_ghz.has_value();
    man["levels"] = json::array();
    for (const auto& lv : s.levels)
      man["levels"].push_back({{"label", lv.label}, {"F", lv.F}, {"energy_ghz", lv.energy / ghz}, {"singlet_fraction", lv.singlet_fraction}});
    write_json(o.out_dir / (c.name + "_manifold.json"), man, r);
  }
  return summary;
}

json run_single(const ScenarioConfig& c, const RunOptions& o, RunReport& r, bool write, bool nested) {
  const auto& s = c.scenario;
  if (s == "excite-sin") return run_excite_sin(c, o, r, write);
  if (s == "excite-two-step") return run_excite_two_step(c, o, r, write);
  if (s == "levels") return run_levels(c, o, r, write);
  return run_gate(c, o, r, write, nested);
}

json run_sweep(const ScenarioConfig& c, const RunOptions& o, RunReport& r) {
  const auto& sw = c.sweep;
  const int n = static_cast<int>(sw.values.size());
  std::vector<json> rows(static_cast<std::size_t>(n));
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, o.jobs))
  for (int i = 0; i < n; ++i) {
    try {
      ScenarioConfig pc = c;
      pc.scenario = sw.scenario;
      set_parameter(pc, sw.parameter, sw.values[static_cast<std::size_t>(i)]);
      validate(pc);
      RunReport dummy;
      rows[static_cast<std::size_t>(i)] = run_single(pc, o, dummy, false, true);
    } catch (...) {
#pragma omp critical(rydsim_sweep_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  std::vector<std::string> keys;
  for (auto it = rows.front().begin(); it != rows.front().end(); ++it)
    if (it.value().is_number()) keys.push_back(it.key());
  if (o.format == "json") {
    json j{{"generator", kVersion}, {"parameter", sw.parameter}, {"scenario", sw.scenario}, {"rows", json::array()}};
    for (int i = 0; i < n; ++i) {
      json row = rows[static_cast<std::size_t>(i)];
      row[sw.parameter] = sw.values[static_cast<std::size_t>(i)];
      j["rows"].push_back(row);
    }
    write_json(o.out_dir / (c.name + ".json"), j, r);
  } else {
    std::ostringstream os;
    os << sw.parameter;
    for (const auto& k : keys) os << ',' << k;
    os << '\n' << std::setprecision(12);
    for (int i = 0; i < n; ++i) {
      os << sw.values[static_cast<std::size_t>(i)];
      for (const auto& k : keys) os << ',' << rows[static_cast<std::size_t>(i)][k].get<double>();
      os << '\n';
    }
    write_text(o.out_dir / (c.name + ".csv"), os.str(), r);
  }
  json summary{{"parameter", sw.parameter}, {"rows", json::array()}};
  for (int i = 0; i < n; ++i) {
    json row = rows[static_cast<std::size_t>(i)];
    row["value"] = sw.values[static_cast<std::size_t>(i)];
    summary["rows"].push_back(row);
  }
  return summary;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  validate(config);
  if (!(options.tol > 0.0 && options.tol <= 1e-4)) throw ConfigError("--tol must lie in (0, 1e-4]");
  if (options.jobs < 1) throw ConfigError("--jobs must be >= 1");
  if (options.format != "csv" && options.format != "json") throw ConfigError("--format must be csv or json");
  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec || !fs::is_directory(options.out_dir))
    throw ConfigError("cannot create output directory '" + options.out_dir.string() + "'");
  RunReport report;
  try {
    if (config.scenario == "sweep")
      report.summary = run_sweep(config, options, report);
    else
      report.summary = run_single(config, options, report, true, false);
  } catch (const ConfigError&) {
    throw;
  } catch (const NumericalError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid parameters: ") + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("invalid parameters: ") + e.what());
  } catch (const std::length_error& e) {
    throw ConfigError(std::string("invalid parameters: ") + e.what());
  }
  return report;
}

int run_main(int argc, char** argv) {
  CLI::App cli{"Rydberg hyperentangling gate simulator"};
  std::string config_path, out_dir = ".", format = "csv";
  int jobs = 1;
  if (const char* env = std::getenv("RYDSIM_JOBS")) {
    try {
      jobs = std::stoi(env);
    } catch (...) {
      std::cerr << "error: RYDSIM_JOBS must be an integer\n";
      return 2;
    }
  }
  double tol = 1e-10;
  cli.add_option("--config", config_path, "Scenario config (YAML)")->required();
  cli.add_option("--out", out_dir, "Output directory");
  cli.add_option("--jobs", jobs, "Worker threads (default $RYDSIM_JOBS or 1)");
  cli.add_option("--tol", tol, "Integrator tolerance");
  cli.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    const auto cfg = load_config(config_path);
    RunOptions o;
    o.out_dir = out_dir;
    o.jobs = jobs;
    o.tol = tol;
    o.format = format;
    const auto report = run_scenario(cfg, o);
    std::cout << report.summary.dump(2) << '\n';
    for (const auto& f : report.files) std::cerr << "wrote " << f.string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace rydsim::app
