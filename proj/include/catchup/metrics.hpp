#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "catchup/operators.hpp"

namespace catchup {

// Exact Hausdorff distance. Supported pairs: interval/interval (unbounded
// directions must coincide; computed on finite endpoints), ball/ball, and
// bounded interval/polytope combinations (vertex enumeration). Mixed
// bounded/unbounded and remaining cross-kind pairs are rejected.
double hausdorff(const ConvexSet& s1, const ConvexSet& s2);

struct DisParams {
  Vec box_lo, box_hi;  // resolvent sweep box; defaults to [-4, 4]^dim
  std::vector<double> lambdas = {1e-2, 1e-1, 1.0};
  std::uint64_t seed = 12345;
  int anchors = 128;  // per-side anchor count (deterministic + seeded draws)
};

// Sampled lower bound of the Vladimirov pseudo-distance between two realized
// operators. Deterministic for a fixed seed; nondecreasing in the budget for
// a fixed seed and params (nested sample streams over fixed anchors).
struct DisEstimate {
  double lower_bound = 0;  // max(0, best_value)
  double best_value = 0;   // raw best sampled pair value (may be negative)
  long samples_used = 0;   // graph points drawn across both operators
  GraphPoint witness1, witness2;  // attain best_value
};

DisEstimate dis_estimate(const OperatorHandle& op1, double t1, const Vec& state1,
                         const OperatorHandle& op2, double t2, const Vec& state2,
                         long budget, DisParams params = {});

// lambda (1 + (4 delta + 1) f0norm) / (4 delta) + (1 + delta) dis
double resolvent_gap_bound(double lambda, double delta, double f0norm, double dis);

// b_n = alpha * exp(sum_{k<n} beta_k), n = 0..len(betas); dominates any
// u_n <= alpha + sum_{k<n} beta_k u_k with nonnegative data.
std::vector<double> discrete_gronwall_bound(double alpha, const std::vector<double>& betas);

// Bound for w^{1-alpha_exp}(t) along `grid`:
//   w0^{1-alpha_exp} exp(int_0^t a) + int_0^t exp(int_s^t a) b(s) ds
// with both integrals by trapezoid on the grid.
std::vector<double> continuous_gronwall_bound(double w0,
                                              const std::function<double(double)>& a,
                                              const std::function<double(double)>& b,
                                              double alpha_exp,
                                              const std::vector<double>& grid);

}  // namespace catchup
