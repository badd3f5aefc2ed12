#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catchup/solver.hpp"

namespace catchup {

// Moving-set sweeping process dx/dt in f(t, x) - N(C(t, x); x).
struct SweepingScenario {
  int dim = 0;
  SetMap moving_set;
  std::function<Vec(double, const Vec&)> f;
  double c_f = 0;
  double c_A = 0;  // minimal selections of a normal cone are 0; keep unless shifted
  double L1 = 0;   // Hausdorff drift in t
  double L2 = 0;   // Hausdorff feedback in the state slot; must be < 1
  double T = 1;
};

InclusionProblem sweeping_problem(const SweepingScenario& scenario);

// Lur'e block system
//   dx/dt = g(t, x) - B z,  z in F_{t, x}(C x - D z)
// reduced to dx/dt in f(t, x) - A_{t, x}(x) with A = C^T (F^{-1} + D)^{-1} C.
struct LureSystem {
  int n = 0, m = 0;
  std::function<Vec(double, const Vec&)> g;
  double c_g = 0;
  Mat B;  // n x m
  Mat C;  // m x n
  Mat D;  // m x m, D + D^T positive semidefinite
  OperatorHandle F;  // monotone family on R^m; its state slot carries the system state
  double L_F1 = 0, L_F2 = 0;
  std::optional<Mat> P;  // symmetry witness for B; identity when absent
  double T = 1;
};

struct Phi0Options {
  enum class Path { Auto, ForwardBackward, Exact };
  Path path = Path::Auto;
  double rho = 0;  // forward-backward step; 0 selects it automatically
  double tol = 1e-11;
  int max_iter = 5000;
};

struct Phi0Result {
  Vec z;
  double residual = 0;
  bool converged = false;
  bool in_range_component = false;  // z lies in rge(D + D^T) (up to tolerance)
  int iterations = 0;
};

// Solves z in F_{t, y}(C x - D z) and reports the rge(D + D^T) component.
Phi0Result phi0_solve(const LureSystem& sys, double t, const Vec& x, const Vec& y,
                      const Phi0Options& opts = {});

struct LureFitParams {
  Box state_box;          // empty => [-3, 3]^n
  double t_lo = 0;
  double t_hi = -1;       // < 0 => sys.T
  int nt = 5;
  int nx = 40;
  std::uint64_t seed = 2024;
  double margin = 1.05;   // safety factor on fitted growth constants
};

struct LureDerived {
  double c2 = 0;      // smallest positive eigenvalue of C^T C
  double c1_pos = 0;  // smallest positive eigenvalue of D + D^T (0 when none)
  double norm_C = 0;
  double L1p = 0, L2p = 0;  // transferred dis moduli |C| L_F / c2
  double beta1 = 0;         // fitted growth of the selection z(t, x, y)
  double c_A = 0, c_f = 0;
};

LureDerived lure_constants(const LureSystem& sys, const LureFitParams& params = {});

// Builds the reduced inclusion. Rejects L2' >= 1 (the equality boundary
// included) and rank-deficient C C^T. When B == C^T the dynamics reduce to g
// itself and the selection term is dropped exactly.
InclusionProblem lure_problem(const LureSystem& sys, const LureFitParams& params = {});

enum class CheckStatus { Pass, Fail, SampledPass, SampledFail, Info };

struct AssumptionEntry {
  std::string name;
  CheckStatus status = CheckStatus::Info;
  double value = 0;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionEntry> entries;
  LureDerived derived;
  bool all_passed() const;
  const AssumptionEntry* find(const std::string& name) const;
};

struct AssumptionCheckParams {
  Box state_box;  // empty => [-2, 2]^n
  double t_lo = 0, t_hi = 1;
  int nt = 4, nx = 24;
  std::uint64_t seed = 777;
  double tol = 1e-9;
  long dis_budget = 4000;
};

// Report-only diagnostics: structural checks (monotone D block, full-rank
// C C^T, kernel compatibility of B and C, transfer constant L2' < 1) plus
// sampled solvability / range membership / growth / dis transfer probes.
AssumptionReport check_assumptions(const LureSystem& sys,
                                   const AssumptionCheckParams& params = {});

}  // namespace catchup
