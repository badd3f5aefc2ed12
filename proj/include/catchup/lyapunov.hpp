#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "catchup/solver.hpp"

namespace catchup {

// One subgradient-style generator (theta, xi): theta the time slot, xi the
// state slot. For proximal generators of V this is an element of the proximal
// subdifferential at (t, x); singular generators describe horizon directions.
struct SubdiffItem {
  double theta = 0;
  Vec xi;
};

using SubdiffMap = std::function<std::vector<SubdiffItem>(double, const Vec&)>;

// Candidate pair (V, W): target decay
//   exp(a (t - t0)) V(t, x(t)) + int_{t0}^t W(x(s)) ds <= V(t0, x0).
struct LyapunovPair {
  std::function<double(double, const Vec&)> V;  // may return +inf off-domain
  std::function<double(double, const Vec&)> W;  // empty => 0
  double a = 0;
  SubdiffMap proximal;  // optional generator oracle
  SubdiffMap singular;  // optional horizon oracle
  std::function<bool(double, const Vec&)> in_domain;  // empty => isfinite(V)

  double eval_V(double t, const Vec& x) const { return V(t, x); }
  double eval_W(double t, const Vec& x) const { return W ? W(t, x) : 0.0; }
  bool domain_ok(double t, const Vec& x) const {
    return in_domain ? in_domain(t, x) : std::isfinite(V(t, x));
  }
};

struct DecayReport {
  bool pass = false;
  double slack = 0;
  double v0 = 0;
  std::vector<double> composite;  // exp(a(t_j - t0)) V_j + trapezoid int W
  double max_increment = 0;       // max consecutive composite increase
  double max_violation = 0;       // max composite_j - v0
  std::optional<std::size_t> first_exit;  // first index outside dom V
};

// Checks the decay along a computed trajectory. slack < 0 selects the
// default 5 h. Exiting dom V fails the check and records the index.
DecayReport evaluate_pair_decay(const Trajectory& traj, const LyapunovPair& pair,
                                double slack = -1.0);

// f(t, x) - A_{t,x}(x) intersected with the M-ball. Exact (a box) when the
// operator exposes its image as a box; otherwise sampled.
struct VelocitySet {
  bool exact = false;
  bool nonempty = false;
  Box box;           // exact case: the box f - [image]
  double radius = 0;  // truncation radius
  Vec anchor;        // f - minimal selection (always a member when nonempty)
  std::vector<Vec> samples;

  // min <xi, v> over the truncated set; +inf when empty.
  double min_inner(const Vec& xi) const;
};

VelocitySet truncated_velocity_set(const InclusionProblem& problem, double t,
                                   const Vec& x, double M, int samples = 64,
                                   std::uint64_t seed = 1234);

struct ProximalReport {
  double residual = -kInf;  // max over proximal generators (vacuous: -inf)
  std::optional<double> singular_residual;
  bool velocity_exact = false;
  bool velocity_nonempty = false;
  std::size_t generators = 0;
};

// Pointwise criterion value
//   max over generators of  theta + min_{v} <xi, v> + a V(t,x) + W(x)
// with v ranging over the truncated velocity set; <= 0 certifies decay.
// Singular generators contribute theta + min <xi, v> only.
ProximalReport proximal_criterion(const LyapunovPair& pair,
                                  const InclusionProblem& problem, double t,
                                  const Vec& x, double M, int samples = 64,
                                  std::uint64_t seed = 1234);

}  // namespace catchup
