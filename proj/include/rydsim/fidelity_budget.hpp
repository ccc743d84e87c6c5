#pragma once

#include <string>

#include "json.hpp"
#include "rydsim/two_atom_gates.hpp"

namespace rydsim {

// [|Tr(U^dag M)|^2 + Tr(U^dag M M^dag U)] / (d (d + 1)); a global phase on `actual` drops out, relative block phases do not.
double average_fidelity(const Eigen::MatrixXcd& ideal, const Eigen::MatrixXcd& actual);

double decay_error(double dwell, double tau);

double blockade_error(double kappa0, double V, int blocked_input_count = 4, int total_inputs = 16);

struct ErrorBudget {
  std::string label;
  double E_ro = 0.0;
  double E_decay = 0.0;
  double E_bl = 0.0;
  double fidelity = 1.0;
  double tau = 0.0;
  double dwell = 0.0;
  // Inputs echoed for provenance.
  double kappa0 = 0.0;
  double V = 0.0;
  double Delta = 0.0;
  double delta_env = 0.0;
};

struct BudgetInputs {
  double tau = 0.0;     // Rydberg lifetime, s
  double kappa0 = 0.0;  // rad/s
  double V = 0.0;       // rad/s, infinity or 0 for no blockade error
  double Delta = 0.0;
  double delta_env = 0.0;
  int blocked_inputs = 4;
};

ErrorBudget assemble_budget(const GateResult& result, const Eigen::MatrixXcd& ideal, const BudgetInputs& in);

struct CompositeBudget {
  ErrorBudget electronic;
  ErrorBudget nuclear;
  double product_fidelity = 0.0;
  double simulated_fidelity = 0.0;  // intrinsic fidelity of the composed matrix
};

CompositeBudget compose_budgets(const ErrorBudget& electronic, const ErrorBudget& nuclear,
                                const GateResult& composite);

nlohmann::json to_json(const ErrorBudget& b);
nlohmann::json to_json(const CompositeBudget& b);

}  // namespace rydsim
