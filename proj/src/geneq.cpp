#include "catchup/detail/geneq.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "catchup/detail/operator_impl.hpp"

namespace catchup::detail {

namespace {

bool is_diagonal(const Mat& D) {
  double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
  for (int i = 0; i < D.rows(); ++i)
    for (int j = 0; j < D.cols(); ++j)
      if (i != j && std::abs(D(i, j)) > 1e-14 * scale) return false;
  return true;
}

}  // namespace

bool solve_scalar_unit(const ScalarUnit& unit, double u, double d, bool minimal,
                       double& z_out, bool& multi_out) {
  multi_out = false;
  switch (unit.type) {
    case ScalarUnit::Type::Zero:
      z_out = 0.0;
      return true;
    case ScalarUnit::Type::Relay: {
      const double g = unit.gamma;
      if (d > 0) {
        z_out = std::min(std::max(u / d, -g), g);
        return true;
      }
      // solution set is gamma Sign(u)
      multi_out = (u == 0.0);
      if (u > 0)
        z_out = g;
      else if (u < 0)
        z_out = -g;
      else
        z_out = minimal ? 0.0 : 0.0;
      return true;
    }
    case ScalarUnit::Type::Cone: {
      const double a = unit.a, b = unit.b;
      if (d > 0) {
        if (std::isfinite(b) && u >= b)
          z_out = (u - b) / d;
        else if (std::isfinite(a) && u <= a)
          z_out = (u - a) / d;
        else
          z_out = 0.0;
        return true;
      }
      // z in N_{[a,b]}(u): feasible iff u lies in the interval
      if (u < a || u > b) return false;
      multi_out = (std::isfinite(a) && u == a) || (std::isfinite(b) && u == b);
      z_out = 0.0;  // least-norm element of any normal cone
      return true;
    }
    case ScalarUnit::Type::Linear: {
      // z = q (u - d z)
      z_out = unit.q * u / (1.0 + unit.q * d);
      return true;
    }
  }
  return false;
}

GenEqResult solve_generalized(const OperatorHandle& F, double t, const Vec& state,
                              const Vec& u, const Mat& D, bool minimal,
                              const GenEqOptions& opt) {
  const int m = static_cast<int>(u.size());
  if (F.dim() != m || D.rows() != m || D.cols() != m)
    throw std::invalid_argument("solve_generalized: dimension mismatch");
  GenEqResult res;
  const double res_tol = std::max(1e-9, 10.0 * opt.tol);

  // exact piecewise path: diagonal D over a coordinatewise-decomposable F
  if (!opt.force_fb && is_diagonal(D)) {
    std::vector<ScalarUnit> units;
    if (F.impl()->scalar_units(t, state, units) && static_cast<int>(units.size()) == m) {
      bool feasible = true;
      Vec z(m);
      bool multi = false;
      bool in_range = true;
      for (int i = 0; i < m; ++i) {
        double zi = 0.0;
        bool mi = false;
        double di = D(i, i);
        if (di < 0) { feasible = false; break; }
        if (!solve_scalar_unit(units[i], u[i], di, minimal, zi, mi)) {
          feasible = false;
          break;
        }
        z[i] = zi;
        multi = multi || mi;
        // rge(D + D^T) is coordinatewise {0} where d_i = 0, R otherwise
        if (di == 0.0 && std::abs(zi) > 1e-12) in_range = false;
      }
      if (feasible) {
        res.z = z;
        res.z_raw = z;
        res.exact = true;
        res.converged = true;
        res.multi_valued = multi;
        res.in_range = in_range;
        res.residual = F.graph_residual(t, state, {u - D * z, z}, 1.0);
        return res;
      }
      if (opt.force_exact) {
        res.z = Vec::Zero(m);
        res.z_raw = res.z;
        res.exact = true;
        res.converged = false;
        res.residual = kInf;
        return res;
      }
      // infeasible coordinatewise system: fall through to report via FB,
      // which will stall and flag non-convergence honestly
    }
  }
  if (opt.force_exact)
    throw std::invalid_argument("solve_generalized: no exact piecewise path for this operator");

  // forward-backward splitting on 0 in F^{-1}(z) + D z - u, with the backward
  // step expressed through the resolvent of F by Moreau's identity:
  // J^rho_{F^{-1}}(v) = v - rho J^{1/rho}_F(v / rho)
  Mat S = D + D.transpose();
  double rho = opt.rho;
  if (!(rho > 0)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    double smax = std::max(es.eigenvalues().maxCoeff(), 0.0);
    double skew = (D - D.transpose()).norm();
    double denom = smax + skew;
    rho = denom > 1e-14 ? 2.0 / denom : 1.0;
    rho = std::min(std::max(rho, 1e-6), 1e6);
  }

  Vec z = Vec::Zero(m);
  int it = 0;
  bool fixed_point = false;
  for (; it < opt.max_iter; ++it) {
    Vec v = z - rho * (D * z - u);
    Vec z_next = v - rho * F.resolvent(t, state, 1.0 / rho, v / rho);
    double gap = (z_next - z).norm();
    z = z_next;
    if (gap <= opt.tol * (1.0 + z.norm())) {
      fixed_point = true;
      ++it;
      break;
    }
  }
  res.iterations = it;
  res.z_raw = z;
  res.z = z;
  res.residual = F.graph_residual(t, state, {u - D * z, z}, 1.0);
  res.converged = fixed_point && res.residual <= res_tol;

  if (res.converged) {
    // least-norm selection: project onto rge(D + D^T); any solution projects
    // to the unique range solution when one exists, so membership of the
    // projected point certifies the selection
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    double cut = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Mat P = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i)
      if (std::abs(es.eigenvalues()[i]) > cut)
        P += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
    Vec zp = P * z;
    double rp = F.graph_residual(t, state, {u - D * zp, zp}, 1.0);
    if (rp <= res_tol) {
      if (minimal) {
        res.z = zp;
        res.residual = rp;
      }
      res.in_range = true;
    } else {
      res.in_range = (z - P * z).norm() <= 1e-9 * std::max(1.0, z.norm());
    }
  }
  return res;
}

}  // namespace catchup::detail
