#include "rydsim/fidelity_budget.hpp"

#include <cmath>

namespace rydsim {

double average_fidelity(const Eigen::MatrixXcd& ideal, const Eigen::MatrixXcd& actual) {
  if (ideal.rows() != ideal.cols() || actual.rows() != ideal.rows() || actual.cols() != ideal.cols())
    throw std::invalid_argument("fidelity needs square matrices of equal size");
  const double d = static_cast<double>(ideal.rows());
  const Eigen::MatrixXcd m = ideal.adjoint() * actual;
  const double tr = std::norm(m.trace());
  const double tr2 = (m * m.adjoint()).trace().real();
  return (tr + tr2) / (d * (d + 1.0));
}

double decay_error(double dwell, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("Rydberg lifetime must be positive");
  return dwell / tau;
}

double blockade_error(double kappa0, double V, int blocked_input_count, int total_inputs) {
  if (V == 0.0) throw std::invalid_argument("blockade shift must be nonzero");
  if (total_inputs <= 0 || blocked_input_count < 0 || blocked_input_count > total_inputs)
    throw std::invalid_argument("bad blocked input count");
  if (std::isinf(V)) return 0.0;
  const double r = 2.0 * kappa0 / V;
  return static_cast<double>(blocked_input_count) / total_inputs * r * r;
}

ErrorBudget assemble_budget(const GateResult& result, const Eigen::MatrixXcd& ideal, const BudgetInputs& in) {
  ErrorBudget b;
  b.label = result.label;
  b.E_ro = std::max(0.0, 1.0 - average_fidelity(ideal, result.matrix));
  b.dwell = result.dwell;
  b.tau = in.tau;
  b.E_decay = in.tau > 0.0 ? decay_error(result.dwell, in.tau) : 0.0;
  b.E_bl = (in.V != 0.0 && std::isfinite(in.V)) ? blockade_error(in.kappa0, in.V, in.blocked_inputs, 16) : 0.0;
  b.fidelity = 1.0 - b.E_ro - b.E_decay - b.E_bl;
  b.kappa0 = in.kappa0;
  b.V = in.V;
  b.Delta = in.Delta;
  b.delta_env = in.delta_env;
  return b;
}

CompositeBudget compose_budgets(const ErrorBudget& electronic, const ErrorBudget& nuclear, const GateResult& composite) {
  CompositeBudget c;
  c.electronic = electronic;
  c.nuclear = nuclear;
  c.product_fidelity = electronic.fidelity * nuclear.fidelity;
  c.simulated_fidelity = average_fidelity(composite.ideal, composite.matrix);
  return c;
}

nlohmann::json to_json(const ErrorBudget& b) {
  return {{"label", b.label},
          {"E_ro", b.E_ro},
          {"E_decay", b.E_decay},
          {"E_bl", b.E_bl},
          {"fidelity", b.fidelity},
          {"tau_s", b.tau},
          {"dwell_s", b.dwell},
          {"inputs", {{"kappa0_rad_s", b.kappa0}, {"V_rad_s", b.V}, {"Delta_rad_s", b.Delta}, {"delta_rad_s", b.delta_env}}}};
}

nlohmann::json to_json(const CompositeBudget& b) {
  return {{"electronic", to_json(b.electronic)},
          {"nuclear", to_json(b.nuclear)},
          {"fidelity", b.product_fidelity},
          {"intrinsic_fidelity_composed", b.simulated_fidelity}};
}

}  // namespace rydsim
