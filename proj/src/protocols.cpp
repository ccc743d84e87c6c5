#include "rydsim/protocols.hpp"

#include <algorithm>
#include <cmath>

namespace rydsim {

namespace {

double ramp_factor(double s, double w, double ramp) {
  if (ramp <= 0.0) return 1.0;
  const double r = std::min(ramp, 0.5 * w);
  auto rise = [&](double x) { const double v = std::sin(0.5 * kPi * x / r); return v * v; };
  if (s < r) return rise(s);
  if (s > w - r) return rise(w - s);
  return 1.0;
}

Level lvl(Electronic e, int n) { return Level{e, n}; }

DriveTerm drive(Level lo, Level up, Envelope env, double amp, double delta_env, double detuning,
                double phase, Reversal rev, double t_on, double t_off, double ramp = 0.0) {
  DriveTerm d;
  d.lower = lo;
  d.upper = up;
  d.envelope = env;
  d.amplitude = amp;
  d.delta_env = delta_env;
  d.detuning = detuning;
  d.phase = phase;
  d.reversal = rev;
  d.t_on = t_on;
  d.t_off = t_off;
  d.ramp = ramp;
  return d;
}

}  // namespace

Complex DriveTerm::coupling(double tau) const {
  const double w = t_off - t_on;
  if (tau < t_on || tau > t_off) return 0.0;
  const double s = std::clamp(tau - t_on, 0.0, w);
  const double se = reversal == Reversal::none ? s : w - s;
  const double sc = reversal == Reversal::full ? w - s : s;
  Complex f;
  if (envelope == Envelope::sine)
    f = Complex(0.0, 2.0 * std::sin(delta_env * se));
  else
    f = ramp_factor(se, w, ramp);
  const double arg = phase + detuning * sc;
  // Past 2^52 rad the carrier phase carries no information; report it as a numerical failure.
  if (std::abs(arg) > 4.5e15) return {std::nan(""), std::nan("")};
  return 0.5 * amplitude * f * std::polar(1.0, arg);
}

std::vector<HamiltonianTerm> PulseSegment::hamiltonian_terms(double t_start) const {
  std::vector<HamiltonianTerm> out;
  out.reserve(drives.size());
  for (std::size_t k = 0; k < drives.size(); ++k) {
    const DriveTerm d = drives[k];
    HamiltonianTerm h;
    h.name = (label.empty() ? std::string("segment") : label) + "[" + std::to_string(k) + "] " +
             to_string(d.lower) + "->" + to_string(d.upper);
    h.atom = atom;
    h.lower = d.lower;
    h.upper = d.upper;
    h.amplitude = [d, t_start](double t) {
      // Snap rounding noise from the absolute-to-relative shift onto the window edges.
      double tau = t - t_start;
      const double eps = 1e-15 * (std::abs(t) + std::abs(t_start) + d.t_off);
      if (std::abs(tau - d.t_on) <= eps) tau = d.t_on;
      if (std::abs(tau - d.t_off) <= eps) tau = d.t_off;
      return d.coupling(tau);
    };
    h.breakpoints = {t_start + d.t_on, t_start + d.t_off};
    out.push_back(std::move(h));
  }
  return out;
}

double PulseSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

PulseSchedule& PulseSchedule::append(const PulseSchedule& other) {
  segments.insert(segments.end(), other.segments.begin(), other.segments.end());
  return *this;
}

void PulseSchedule::validate() const {
  for (const auto& s : segments) {
    if (!(s.duration > 0.0) || !std::isfinite(s.duration))
      throw std::invalid_argument("segment '" + s.label + "' needs a positive finite duration");
    for (const auto& d : s.drives) {
      if (!(d.t_off >= d.t_on) || d.t_on < 0.0 || d.t_off > s.duration * (1.0 + 1e-12))
        throw std::invalid_argument("drive window outside segment '" + s.label + "'");
      if (d.amplitude < 0.0 || !std::isfinite(d.amplitude))
        throw std::invalid_argument("drive amplitude must be finite and non-negative");
    }
  }
}

PulseSchedule build_sin_excitation(const SinPulseParams& p, double angle, const ExcitationOptions& o) {
  p.validate();
  const double T = sin_pulse_duration(p.kappa, p.delta_env, angle);
  const double e = std::abs(p.eta), a = std::arg(p.eta);
  const double k0 = p.kappa, k1 = p.kappa_1();
  const auto g0 = lvl(o.ground, 0), g1 = lvl(o.ground, 1), r0 = lvl(o.rydberg, 0), r1 = lvl(o.rydberg, 1);
  PulseSegment seg;
  seg.atom = o.atom;
  seg.duration = T;
  seg.label = o.label.empty() ? "sin-excitation" : o.label;
  const auto S = Envelope::sine;
  seg.drives = {
      drive(g0, r0, S, k0, p.delta_env, 0.0, o.rabi_phase, o.reversal, 0.0, T),
      drive(g1, r1, S, e * k0, p.delta_env, p.Delta, o.rabi_phase + a, o.reversal, 0.0, T),
      drive(g1, r1, S, k1, p.delta_env, 0.0, o.rabi_phase, o.reversal, 0.0, T),
      drive(g0, r0, S, k1 / e, p.delta_env, -p.Delta, o.rabi_phase - a, o.reversal, 0.0, T),
  };
  PulseSchedule s;
  s.segments.push_back(std::move(seg));
  return s;
}

PulseSchedule build_single_field_drive(Envelope env, double kappa, double delta_env, double detuning,
                                       double duration, const ExcitationOptions& o) {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (env == Envelope::sine && !(delta_env > 0.0)) throw std::invalid_argument("delta_env must be positive");
  // Rectangles use Omega = 2 kappa so that both shapes share the same peak coupling.
  const double amp = env == Envelope::sine ? kappa : 2.0 * kappa;
  PulseSegment seg;
  seg.atom = o.atom;
  seg.duration = duration;
  seg.label = o.label.empty() ? "single-field" : o.label;
  seg.drives = {drive(lvl(o.ground, 0), lvl(o.rydberg, 0), env, amp, delta_env, detuning, o.rabi_phase,
                      o.reversal, 0.0, duration, o.ramp)};
  PulseSchedule s;
  s.segments.push_back(std::move(seg));
  s.validate();
  return s;
}

namespace {

void require_matched(const RectPulseParams& p) {
  p.validate();
  if (!p.matched(1e-9)) throw std::invalid_argument("rectangular pulse parameters are not matched");
}

PulseSegment step_a(const RectPulseParams& p, const ExcitationOptions& o, double phase, const std::string& label) {
  const double T = kPi / p.Omega0;
  const double e = std::abs(p.eta), a = std::arg(p.eta);
  const auto R = Envelope::rectangular;
  PulseSegment seg;
  seg.atom = o.atom;
  seg.duration = T;
  seg.label = label;
  seg.drives = {
      drive(lvl(o.ground, 0), lvl(o.rydberg, 0), R, p.Omega0, 0.0, 0.0, phase, Reversal::none, 0.0, T, o.ramp),
      drive(lvl(o.ground, 1), lvl(o.rydberg, 1), R, e * p.Omega0, 0.0, p.Delta, phase + a, Reversal::none, 0.0,
            T, o.ramp),
  };
  return seg;
}

PulseSegment step_b(const RectPulseParams& p, const ExcitationOptions& o, double phase, const std::string& label) {
  const double W = p.Omega1();
  const double T = kPi / W;
  const double e = std::abs(p.eta), a = std::arg(p.eta);
  const auto R = Envelope::rectangular;
  PulseSegment seg;
  seg.atom = o.atom;
  seg.duration = T;
  seg.label = label;
  seg.drives = {
      drive(lvl(o.ground, 1), lvl(o.rydberg, 1), R, W, 0.0, 0.0, phase, Reversal::none, 0.0, T, o.ramp),
      drive(lvl(o.ground, 0), lvl(o.rydberg, 0), R, W / e, 0.0, -p.Delta, phase - a, Reversal::none, 0.0, T,
            o.ramp),
  };
  return seg;
}

}  // namespace

PulseSchedule build_two_step_excitation(const RectPulseParams& p, const ExcitationOptions& o) {
  require_matched(p);
  const std::string base = o.label.empty() ? "two-step" : o.label;
  PulseSchedule s;
  s.segments.push_back(step_a(p, o, o.rabi_phase, base + "-a"));
  s.segments.push_back(step_b(p, o, o.rabi_phase, base + "-b"));
  return s;
}

PulseSchedule build_two_step_deexcitation(const RectPulseParams& p, double phi, const ExcitationOptions& o) {
  require_matched(p);
  const std::string base = o.label.empty() ? "two-step" : o.label;
  const double ph = 2.0 * phi + o.rabi_phase;
  PulseSchedule s;
  s.segments.push_back(step_b(p, o, ph, base + "-c"));
  s.segments.push_back(step_a(p, o, ph, base + "-d"));
  return s;
}

namespace {

// Drives for one electronic manifold: resonant on nuclear state n, detuned partner on 1-n.
void manifold_drives(std::vector<DriveTerm>& out, Electronic lo, Electronic up, int n, Envelope env,
                     double amp, double delta_env, double Delta, Complex eta, double phase, Reversal rev,
                     double t_on, double t_off, double ramp) {
  const double e = std::abs(eta), a = std::arg(eta);
  const int m = 1 - n;
  // Seen from n = 1 the partner sits at -Delta with the inverse factor.
  const double factor = n == 0 ? e : 1.0 / e;
  const double det = n == 0 ? Delta : -Delta;
  const double ph = n == 0 ? a : -a;
  out.push_back(drive(lvl(lo, n), lvl(up, n), env, amp, delta_env, 0.0, phase, rev, t_on, t_off, ramp));
  out.push_back(drive(lvl(lo, m), lvl(up, m), env, factor * amp, delta_env, det, phase + ph, rev, t_on, t_off, ramp));
}

void check_nuclear_options(const NuclearExcitationOptions& o) {
  if (o.resonant_nuclear != 0 && o.resonant_nuclear != 1)
    throw std::invalid_argument("resonant nuclear state must be 0 or 1");
  if (o.clock_offset < 0.0) throw std::invalid_argument("clock drive offset must be non-negative");
}

}  // namespace

PulseSchedule build_nuclear_excitation(const RectPulseParams& p, const NuclearExcitationOptions& o) {
  p.validate();
  check_nuclear_options(o);
  const double Tg = kPi / p.Omega0;
  const double Tc = kPi / (p.Lambda * p.Omega0);
  PulseSegment seg;
  seg.atom = o.atom;
  seg.label = o.label.empty() ? "nuclear-rect" : o.label;
  const auto R = Envelope::rectangular;
  manifold_drives(seg.drives, Electronic::g, Electronic::r, o.resonant_nuclear, R, p.Omega0, 0.0, p.Delta, p.eta,
                  o.rabi_phase, o.reversal, 0.0, Tg, o.ramp);
  seg.duration = Tg;
  if (o.electronic_superposition) {
    manifold_drives(seg.drives, Electronic::c, Electronic::R, o.resonant_nuclear, R, p.Lambda * p.Omega0, 0.0,
                    p.zeta * p.Delta, p.eta_prime, o.rabi_phase, o.reversal, o.clock_offset, o.clock_offset + Tc,
                    o.ramp);
    seg.duration = std::max(Tg, o.clock_offset + Tc);
  }
  PulseSchedule s;
  s.segments.push_back(std::move(seg));
  return s;
}

PulseSchedule build_nuclear_excitation(const SinPulseParams& p, const CouplingFactors& f, double angle,
                                       const NuclearExcitationOptions& o) {
  p.validate();
  check_nuclear_options(o);
  if (std::abs(f.eta_prime) == 0.0 || f.zeta == 0.0 || !(f.Lambda > 0.0))
    throw std::invalid_argument("coupling factors must be nonzero");
  const double Tg = sin_pulse_duration(p.kappa, p.delta_env, angle);
  PulseSegment seg;
  seg.atom = o.atom;
  seg.label = o.label.empty() ? "nuclear-sin" : o.label;
  const auto S = Envelope::sine;
  manifold_drives(seg.drives, Electronic::g, Electronic::r, o.resonant_nuclear, S, p.kappa, p.delta_env, p.Delta,
                  p.eta, o.rabi_phase, o.reversal, 0.0, Tg, 0.0);
  seg.duration = Tg;
  if (o.electronic_superposition) {
    const double kc = f.Lambda * p.kappa;
    const double Tc = sin_pulse_duration(kc, p.delta_env, angle);
    manifold_drives(seg.drives, Electronic::c, Electronic::R, o.resonant_nuclear, S, kc, p.delta_env,
                    f.zeta * p.Delta, f.eta_prime, o.rabi_phase, o.reversal, o.clock_offset, o.clock_offset + Tc,
                    0.0);
    seg.duration = std::max(Tg, o.clock_offset + Tc);
  }
  PulseSchedule s;
  s.segments.push_back(std::move(seg));
  return s;
}

PulseSchedule build_compensation(const CompensationParams& c, Atom atom, const std::vector<Level>& lowers,
                                 double zeta, const std::string& label) {
  if (zeta == 0.0) throw std::invalid_argument("zeta must be nonzero");
  PulseSchedule s;
  if (c.t_pc <= 0.0) return s;
  PulseSegment seg;
  seg.atom = atom;
  seg.label = label;
  seg.duration = 0.0;
  for (const Level& l : lowers) {
    double scale = 1.0;
    Electronic up;
    if (l.electronic == Electronic::g) {
      up = Electronic::p;
    } else if (l.electronic == Electronic::c) {
      up = Electronic::P;
      scale = std::abs(zeta);
    } else {
      throw std::invalid_argument("compensation drives start from g or c levels");
    }
    const double T = c.t_pc / scale;
    seg.drives.push_back(drive(l, lvl(up, l.nuclear), Envelope::rectangular, scale * c.Omega_p, 0.0,
                               scale * c.delta_p, 0.0, Reversal::none, 0.0, T));
    seg.duration = std::max(seg.duration, T);
  }
  s.segments.push_back(std::move(seg));
  return s;
}

bool preserves_nuclear_labels(const PulseSchedule& s) {
  for (const auto& seg : s.segments)
    for (const auto& d : seg.drives)
      if (d.lower.nuclear != d.upper.nuclear) return false;
  return true;
}

bool preserves_electronic_labels(const PulseSchedule& s) {
  auto qubit = [](Electronic e) { return e == Electronic::g || e == Electronic::c; };
  for (const auto& seg : s.segments)
    for (const auto& d : seg.drives)
      if (qubit(d.lower.electronic) && qubit(d.upper.electronic) && d.lower.electronic != d.upper.electronic)
        return false;
  return true;
}

std::string to_string(Envelope e) { return e == Envelope::sine ? "sine" : "rectangular"; }

std::string to_string(Reversal r) {
  switch (r) {
    case Reversal::none: return "none";
    case Reversal::envelope: return "envelope";
    case Reversal::full: return "full";
  }
  return "none";
}

Reversal parse_reversal(const std::string& s) {
  if (s == "none") return Reversal::none;
  if (s == "envelope") return Reversal::envelope;
  if (s == "full") return Reversal::full;
  throw std::invalid_argument("unknown reversal '" + s + "'");
}

nlohmann::json to_json(const PulseSchedule& s) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& seg : s.segments) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& d : seg.drives) {
      terms.push_back({{"lower", to_string(d.lower)},
                       {"upper", to_string(d.upper)},
                       {"envelope", to_string(d.envelope)},
                       {"amplitude", d.amplitude},
                       {"delta_env", d.delta_env},
                       {"detuning", d.detuning},
                       {"phase", d.phase},
                       {"reversal", to_string(d.reversal)},
                       {"t_on", d.t_on},
                       {"t_off", d.t_off},
                       {"ramp", d.ramp}});
    }
    segs.push_back({{"atom", to_string(seg.atom)}, {"duration", seg.duration}, {"label", seg.label}, {"terms", terms}});
  }
  return {{"frame", s.frame}, {"segments", segs}};
}

PulseSchedule schedule_from_json(const nlohmann::json& j) {
  PulseSchedule s;
  s.frame = j.at("frame").get<std::string>();
  for (const auto& js : j.at("segments")) {
    PulseSegment seg;
    seg.atom = parse_atom(js.at("atom").get<std::string>());
    seg.duration = js.at("duration").get<double>();
    seg.label = js.at("label").get<std::string>();
    for (const auto& jt : js.at("terms")) {
      DriveTerm d;
      d.lower = parse_level(jt.at("lower").get<std::string>());
      d.upper = parse_level(jt.at("upper").get<std::string>());
      const auto env = jt.at("envelope").get<std::string>();
      if (env != "sine" && env != "rectangular") throw std::invalid_argument("unknown envelope '" + env + "'");
      d.envelope = env == "sine" ? Envelope::sine : Envelope::rectangular;
      d.amplitude = jt.at("amplitude").get<double>();
      d.delta_env = jt.at("delta_env").get<double>();
      d.detuning = jt.at("detuning").get<double>();
      d.phase = jt.at("phase").get<double>();
      d.reversal = parse_reversal(jt.at("reversal").get<std::string>());
      d.t_on = jt.at("t_on").get<double>();
      d.t_off = jt.at("t_off").get<double>();
      d.ramp = jt.at("ramp").get<double>();
      seg.drives.push_back(d);
    }
    s.segments.push_back(std::move(seg));
  }
  s.validate();
  return s;
}

}  // namespace rydsim
