#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "catchup/operators.hpp"

namespace catchup {

// dx/dt in f(t, x) - A_{t, x}(x). `f` may be empty (treated as 0); c_f must
// satisfy |f(t, x)| <= c_f (1 + |x|) on the horizon.
struct InclusionProblem {
  int dim = 0;
  std::function<Vec(double, const Vec&)> f;
  OperatorHandle A;
  double c_f = 0;
  double T = 1;
};

// delta-parameterized constants of the scheme:
//   c1 = c_f + (1 + (4 delta + 1) c_A) / (4 delta) + (1 + delta) L1
//   m  = (2 |x0| + 2 c1 / lam) exp(6 c1 / lam),  lam = 1 - (1 + delta) L2
//   M  = c_f + c_A + (c_f + 2 c_A + 1)(|x0| + m)
// Requires (1 + delta) L2 < 1.
struct AprioriConstants {
  double delta = 1;
  double c1 = 0;
  double m = 0;
  double M = 0;
};

AprioriConstants apriori_bounds(const Vec& x0, double c_f, double c_A,
                                double L1, double L2, double delta = 1.0);
AprioriConstants apriori_bounds(const InclusionProblem& problem, const Vec& x0,
                                double delta = 1.0);
// Minimizes m over a log grid of admissible delta values.
AprioriConstants apriori_bounds_minimized(const Vec& x0, double c_f, double c_A,
                                          double L1, double L2, int grid_points = 121);

struct StepDiagnostics {
  double residual = 0;        // graph membership residual of the implicit step
  double selection_norm = 0;  // |(y - x1)/h|, the operator selection magnitude
};

struct StepResult {
  Vec state;
  Vec velocity;  // (x1 - x0)/h
  StepDiagnostics diag;
};

// One catching-up step: y = x + h f(t, x); x1 = J^h of A_{t+h, x} at y.
StepResult step(const InclusionProblem& problem, double t, const Vec& x, double h);

// x0 in dom A_{t0, x0}?
bool admissible(const InclusionProblem& problem, double t0, const Vec& x0,
                double tol = 1e-8);

struct SolveOptions {
  double delta = 1.0;            // delta for the step-size rule
  bool allow_large_step = false; // bypass h c1 < 1/2 (leaves the guaranteed regime)
  double residual_mu = 1.0;
  bool record_diagnostics = true;
};

enum class SolveStatus { Complete, Truncated };

struct Trajectory {
  double t0 = 0;
  double h = 0;
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> velocities;            // size states.size() - 1
  std::vector<StepDiagnostics> diagnostics;
  SolveStatus status = SolveStatus::Complete;
  std::string failure;       // resolvent failure description when truncated
  std::size_t last_valid = 0;

  double max_residual() const;
  double max_speed() const;
};

// Uniform-step catching-up over [t0, t0 + T]. Throws on inadmissible initial
// state, on (1 + delta) L2 >= 1, and on violation of the step rule unless
// allow_large_step. Resolvent failures truncate the trajectory instead.
Trajectory solve(const InclusionProblem& problem, double t0, const Vec& x0,
                 double h, const SolveOptions& opts = {});

struct ConvergenceRow {
  double h_coarse = 0, h_fine = 0;
  double gap = 0;    // sup over coarse grid of |x_coarse - x_fine|
  double ratio = 0;  // gap / previous gap (first row: 0)
};

struct ConvergenceReport {
  std::vector<double> h_list;
  std::vector<ConvergenceRow> rows;
  double extrapolated_gap = 0;  // last gap * r / (1 - r) when r < 1
  std::vector<Trajectory> trajectories;  // kept only on request

  bool gaps_decreasing() const;
  bool ratios_below(double cap) const;
};

// Runs the scheme for each h (descending), compares consecutive trajectories
// on the coarse grid. Steps must nest (each h an integer multiple of the
// next); runs execute on a bounded worker pool.
ConvergenceReport convergence_study(const InclusionProblem& problem, double t0,
                                    const Vec& x0, std::vector<double> h_list,
                                    const SolveOptions& opts = {},
                                    bool keep_trajectories = false,
                                    int threads = 0);

struct HypoProbeResult {
  double k_estimate = 0;      // max(0, worst_quotient)
  double worst_quotient = 0;  // max over pairs of -<e1 - e2, x1 - x2>/|x1 - x2|^2
  double t = 0;
  Vec x1, x2, eta1, eta2;
  long pairs = 0;
};

// Samples diagonal graph pairs (state = argument) of the realized operators
// over t_grid x (box cap M-ball) and estimates the hypo-monotonicity constant.
HypoProbeResult hypo_probe(const OperatorHandle& A, const std::vector<double>& t_grid,
                           const Box& box, double M, int samples_per_t,
                           std::uint64_t seed);

}  // namespace catchup
