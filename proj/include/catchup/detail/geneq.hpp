#pragma once

#include "catchup/operators.hpp"

namespace catchup::detail {

// One coordinate of a decomposable operator, for exact piecewise solves of
// z in F(w): Zero means F = {0}; Relay means gamma * Sign; Cone means
// N_{[a,b]}; Linear means w -> q w with q >= 0.
struct ScalarUnit {
  enum class Type { Zero, Relay, Cone, Linear };
  Type type = Type::Zero;
  double gamma = 0.0;
  double a = -kInf, b = kInf;
  double q = 0.0;
};

struct GenEqOptions {
  double rho = 0.0;      // 0 = auto from the symmetric part of D
  double tol = 1e-11;    // fixed-point tolerance
  int max_iter = 5000;
  bool force_fb = false;     // skip the exact piecewise path
  bool force_exact = false;  // error out if no exact path exists
};

struct GenEqResult {
  Vec z;               // returned selection (min-norm / range-projected when asked)
  Vec z_raw;           // solution before any projection
  double residual = 0; // graph membership residual of (u - D z, z) in F
  int iterations = 0;  // 0 on the exact path
  bool exact = false;
  bool converged = false;
  bool multi_valued = false;  // solution set known non-singleton (exact path)
  bool in_range = false;      // z lies in rge(D + D^T) within tolerance
};

// Solves z in F_{t,state}(u - D z) with D monotone. When `minimal` is set,
// returns the least-norm solution on the exact path and the rge(D + D^T)
// projection of the found solution on the iterative path; the projection is
// dropped (with in_range = false) if it breaks graph membership.
GenEqResult solve_generalized(const OperatorHandle& F, double t, const Vec& state,
                              const Vec& u, const Mat& D, bool minimal,
                              const GenEqOptions& opt = {});

// Exact per-coordinate solve of z in unit(u - d z), d >= 0. Returns false if
// the coordinate problem is infeasible.
bool solve_scalar_unit(const ScalarUnit& unit, double u, double d, bool minimal,
                       double& z_out, bool& multi_out);

}  // namespace catchup::detail
