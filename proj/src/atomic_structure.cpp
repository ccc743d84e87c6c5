#include "rydsim/atomic_structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

namespace rydsim {

namespace {

bool half_integer(double x) { return std::abs(2.0 * x - std::round(2.0 * x)) < 1e-12; }

}  // namespace

void HyperfineModel::validate() const {
  if (!half_integer(I) || !half_integer(J) || !half_integer(F) || !half_integer(m_F) || I < 0 || J < 0)
    throw std::invalid_argument("angular momenta must be non-negative half-integers");
  if (F < std::abs(I - J) - 1e-12 || F > I + J + 1e-12) throw std::invalid_argument("F outside |I-J|..I+J");
  if (std::abs(m_F) > F + 1e-12 || !half_integer(F - m_F) || std::abs(std::round(F - m_F) - (F - m_F)) > 1e-12)
    throw std::invalid_argument("m_F must lie in -F..F in integer steps");
  if (!std::isfinite(A_hfs) || !std::isfinite(B_hfs) || !std::isfinite(B_field))
    throw std::invalid_argument("hyperfine constants and field must be finite");
}

double hyperfine_k(double I, double J, double F) { return 0.5 * (F * (F + 1) - I * (I + 1) - J * (J + 1)); }

double hyperfine_shift(const HyperfineModel& m) {
  m.validate();
  const double K = hyperfine_k(m.I, m.J, m.F);
  double e = m.A_hfs * K;
  if (m.I >= 1.0 && m.J >= 1.0 && m.B_hfs != 0.0) {
    const double I = m.I, J = m.J;
    e += m.B_hfs * (1.5 * K * (2 * K + 1) - I * J * (I + 1) * (J + 1)) / (2 * I * J * (2 * I - 1) * (2 * J - 1));
  }
  return e;
}

std::pair<double, double> scale_hyperfine_constants(double A_ref, double B_ref, double nstar_ref, double nstar_new) {
  if (!(nstar_ref > 0.0) || !(nstar_new > 0.0)) throw std::invalid_argument("effective quantum numbers must be positive");
  const double s = std::pow(nstar_ref / nstar_new, 3);
  return {A_ref * s, B_ref * s};
}

double effective_g_factor(const HyperfineModel& m) {
  if (m.F == 0.0) return 0.0;
  const double F = m.F, I = m.I, J = m.J;
  return m.g_J * (F * (F + 1) - I * (I + 1) + J * (J + 1)) / (2 * F * (F + 1));
}

double zeeman_level(const HyperfineModel& m) {
  if (std::abs(m.B_field) > 10.0 * constants::gauss * (1.0 + 1e-12))
    throw std::domain_error("weak-field Zeeman model needs |B| <= 10 G");
  double w = hyperfine_shift(m) + effective_g_factor(m) * m.m_F * m.mu_B * m.B_field / constants::hbar;
  if (m.g_I != 0.0 && m.F > 0.0) {
    // Projection of I_z onto F.
    const double F = m.F, I = m.I, J = m.J;
    const double iz = m.m_F * (F * (F + 1) + I * (I + 1) - J * (J + 1)) / (2 * F * (F + 1));
    w -= m.g_I * iz * m.mu_n * m.B_field / constants::hbar;
  }
  return w;
}

std::vector<LevelRow> level_diagram(const HyperfineModel& base, const std::vector<double>& B_gauss) {
  std::vector<LevelRow> rows;
  for (double b : B_gauss) {
    for (double F = std::abs(base.I - base.J); F <= base.I + base.J + 1e-9; F += 1.0) {
      for (double mf = -F; mf <= F + 1e-9; mf += 1.0) {
        HyperfineModel m = base;
        m.F = F;
        m.m_F = mf;
        m.B_field = b * constants::gauss;
        LevelRow r;
        r.F = F;
        r.m_F = mf;
        r.B_gauss = b;
        r.energy_MHz = zeeman_level(m) / constants::two_pi / 1e6;
        r.state_label = "F=" + std::to_string(static_cast<int>(std::lround(2 * F))) + "/2 mF=" +
                        std::to_string(static_cast<int>(std::lround(2 * mf))) + "/2";
        rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

void write_level_csv(std::ostream& os, const std::vector<LevelRow>& rows) {
  os << "state_label,F,m_F,B_gauss,energy_MHz\n";
  os.precision(12);
  for (const auto& r : rows) os << r.state_label << ',' << r.F << ',' << r.m_F << ',' << r.B_gauss << ',' << r.energy_MHz << '\n';
}

double level_spread(const std::vector<LevelRow>& rows, double B_gauss) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : rows) {
    if (std::abs(r.B_gauss - B_gauss) > 1e-12) continue;
    lo = std::min(lo, r.energy_MHz);
    hi = std::max(hi, r.energy_MHz);
  }
  if (!(hi >= lo)) throw std::invalid_argument("no levels at requested field");
  return (hi - lo) * 1e6 * constants::two_pi;
}

void RydbergManifoldModel::validate() const {
  if (std::abs(O_nn) > 1.0) throw std::invalid_argument("overlap must satisfy |O| <= 1");
  if (!half_integer(I) || I <= 0.0) throw std::invalid_argument("nuclear spin must be a positive half-integer");
  if (!std::isfinite(A_prime) || !std::isfinite(Delta_ST)) throw std::invalid_argument("manifold constants must be finite");
}

SManifold rydberg_s_manifold(const RydbergManifoldModel& m) {
  m.validate();
  const double I = m.I, A = m.A_prime;
  // 2x2 block over {singlet F=I, triplet F=I}.
  const double a = 0.0, d = m.Delta_ST - A / 2.0;
  const double b = 0.5 * A * std::sqrt(I * (I + 1)) * m.O_nn;
  const double mean = 0.5 * (a + d), half = 0.5 * (a - d);
  const double root = std::hypot(half, b);
  const double e_up = mean + root, e_dn = mean - root;
  // Singlet weight of the upper eigenvector: |v_s|^2 with (a - e_up) v_s + b v_t = 0.
  double f_up;
  if (b == 0.0) {
    f_up = a >= d ? 1.0 : 0.0;
  } else {
    const double vs = b, vt = e_up - a;
    f_up = vs * vs / (vs * vs + vt * vt);
  }
  const ManifoldLevel up{f_up >= 0.5 ? "n1S0,F=I" : "n3S1,F=I", I, e_up, f_up};
  const ManifoldLevel dn{f_up >= 0.5 ? "n3S1,F=I" : "n1S0,F=I", I, e_dn, 1.0 - f_up};
  SManifold s;
  const ManifoldLevel tp{"n3S1,F=I+1", I + 1, m.Delta_ST + A * I / 2.0, 0.0};
  const ManifoldLevel tm{"n3S1,F=I-1", I - 1, m.Delta_ST - A * (I + 1) / 2.0, 0.0};
  if (f_up >= 0.5)
    s.levels = {up, dn, tp, tm};
  else
    s.levels = {dn, up, tp, tm};
  s.separation = e_up - e_dn;
  s.gap = e_up - tm.energy;
  s.upper_singlet_fraction = f_up;
  return s;
}

double calibrate_singlet_triplet_splitting(double A_prime, double O_nn, double I, const ManifoldTargets& t) {
  auto misfit = [&](double dst) {
    RydbergManifoldModel m;
    m.A_prime = A_prime;
    m.O_nn = O_nn;
    m.I = I;
    m.Delta_ST = dst;
    const auto s = rydberg_s_manifold(m);
    const double r1 = s.separation / t.separation - 1.0;
    const double r2 = s.gap / t.gap - 1.0;
    const double r3 = s.upper_singlet_fraction / t.singlet_fraction - 1.0;
    return r1 * r1 + r2 * r2 + r3 * r3;
  };
  const double span = 10.0 * std::max({std::abs(A_prime), t.separation, t.gap});
  const auto r = boost::math::tools::brent_find_minima(misfit, -span, span, 40);
  return r.first;
}

double zeeman_splitting_rydberg(double g_eff, double B_tesla) { return g_eff * constants::mu_B * B_tesla / constants::hbar; }

double clock_zeeman_shift_hz(double B_gauss, double m_F) { return 0.11e3 * B_gauss * m_F; }

}  // namespace rydsim
