#pragma once

#include "rydsim/protocols.hpp"

namespace testing_support {

inline const double kUnit = 2 * rydsim::kPi * 1.4e6;  // 2 kappa_0
inline const double kTime = 2 * rydsim::kPi / kUnit;

inline rydsim::QuantumState run(const rydsim::QuantumState& in, const rydsim::PulseSchedule& s, double tol = 1e-10) {
  rydsim::QuantumState psi = in;
  double t = 0.0;
  for (const auto& seg : s.segments) {
    psi = rydsim::propagate(psi, seg.hamiltonian_terms(t), t, t + seg.duration, tol);
    t += seg.duration;
  }
  return psi;
}

inline rydsim::BasisPtr basis(rydsim::Atom atom, const std::vector<std::string>& labels) {
  std::vector<rydsim::Level> lv;
  for (const auto& l : labels) lv.push_back(rydsim::parse_level(l));
  return std::make_shared<const rydsim::LevelBasis>(atom, lv);
}

}  // namespace testing_support
