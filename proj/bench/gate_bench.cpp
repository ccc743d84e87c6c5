// Serial versus OpenMP gate extraction timings.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "rydsim/two_atom_gates.hpp"

using namespace rydsim;
using Clock = std::chrono::steady_clock;

namespace {

const double kUnit = 2 * kPi * 1.4e6;

double best_of(int reps, const std::function<GateResult()>& f, GateResult& out) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    out = f();
    best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gate extraction benchmark"};
  int reps = 3, threads = omp_get_max_threads();
  double tol = 1e-10;
  app.add_option("--reps", reps, "Repetitions per case (best time is reported)")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads for the parallel path")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "Integrator tolerance");
  CLI11_PARSE(app, argc, argv);

  SinPulseParams sp{0.5 * kUnit, 0.1 * kUnit, 10 * kUnit};
  ElectronicGateParams pe;
  pe.sin = sp;
  NuclearGateParams pn;
  pn.sin = sp;
  NuclearGateParams pr;
  pr.method = NuclearMethod::rectangular;
  pr.rect = match_generalized_rabi(1.0, 1.0, 1.0, 10 * kUnit, 10 * kUnit / std::sqrt(3.0));

  struct Case {
    std::string name;
    std::function<GateResult(const GateOptions&)> run;
  };
  const std::vector<Case> cases{
      {"cz-electronic sin", [&](const GateOptions& o) { return run_cz_electronic(pe, BlockadeModel::perfect(), o); }},
      {"cz-electronic sin, V finite", [&](const GateOptions& o) { return run_cz_electronic(pe, BlockadeModel::finite(2 * kPi * 47e6), o); }},
      {"cz-nuclear sin", [&](const GateOptions& o) { return run_cz_nuclear(pn, BlockadeModel::perfect(), o); }},
      {"cz-nuclear rect", [&](const GateOptions& o) { return run_cz_nuclear(pr, BlockadeModel::perfect(), o); }},
  };

  std::printf("threads=%d reps=%d tol=%.1e\n", threads, reps, tol);
  std::printf("%-30s %12s %12s %8s %s\n", "case", "serial [s]", "openmp [s]", "speedup", "identical");
  for (const auto& c : cases) {
    GateOptions serial;
    serial.tol = tol;
    serial.parallel = false;
    GateOptions par = serial;
    par.parallel = true;
    par.threads = threads;
    GateResult a, b;
    const double ts = best_of(reps, [&] { return c.run(serial); }, a);
    const double tp = best_of(reps, [&] { return c.run(par); }, b);
    std::printf("%-30s %12.4f %12.4f %8.2f %s\n", c.name.c_str(), ts, tp, ts / tp, a.matrix == b.matrix ? "yes" : "NO");
  }
  return 0;
}
