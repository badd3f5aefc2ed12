#include "catchup/applications.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "catchup/detail/geneq.hpp"
#include "catchup/metrics.hpp"

namespace catchup {

namespace {

double spectral_norm(const Mat& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

// Smallest eigenvalue above a relative cut; 0 when all are below.
double smallest_positive_eig(const Mat& sym, double rel_cut = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  const Vec ev = es.eigenvalues();
  const double cut = rel_cut * std::max(1e-300, std::abs(ev[ev.size() - 1]));
  double best = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] > cut && (best == 0 || ev[i] < best)) best = ev[i];
  return best;
}

void validate_lure_shapes(const LureSystem& sys) {
  if (sys.n < 1 || sys.m < 1)
    throw std::invalid_argument("lure: n and m must be positive");
  if (sys.B.rows() != sys.n || sys.B.cols() != sys.m)
    throw std::invalid_argument("lure: B must be n x m");
  if (sys.C.rows() != sys.m || sys.C.cols() != sys.n)
    throw std::invalid_argument("lure: C must be m x n");
  if (sys.D.rows() != sys.m || sys.D.cols() != sys.m)
    throw std::invalid_argument("lure: D must be m x m");
  if (sys.F.dim() != sys.m)
    throw std::invalid_argument("lure: F must act on R^m");
  if (sys.P && (sys.P->rows() != sys.n || sys.P->cols() != sys.n))
    throw std::invalid_argument("lure: P must be n x n");
  const Mat S = sys.D + sys.D.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  const double scale = std::max(1.0, std::abs(es.eigenvalues().maxCoeff()));
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw std::invalid_argument("lure: D + D^T must be positive semidefinite");
}

struct FitContext {
  Box box;
  double t_lo, t_hi;
  int nt, nx;
  std::uint64_t seed;
  double margin;
};

FitContext resolve_fit(const LureSystem& sys, const LureFitParams& p) {
  FitContext c;
  if (p.state_box.lo.size() == 0) {
    c.box.lo = Vec::Constant(sys.n, -3.0);
    c.box.hi = Vec::Constant(sys.n, 3.0);
  } else {
    if (p.state_box.dim() != sys.n)
      throw std::invalid_argument("lure: fit box dimension mismatch");
    c.box = p.state_box;
  }
  c.t_lo = p.t_lo;
  c.t_hi = p.t_hi < 0 ? sys.T : p.t_hi;
  c.nt = std::max(1, p.nt);
  c.nx = std::max(1, p.nx);
  c.seed = p.seed;
  c.margin = p.margin;
  return c;
}

}  // namespace

InclusionProblem sweeping_problem(const SweepingScenario& scenario) {
  if (scenario.dim < 1)
    throw std::invalid_argument("sweeping_problem: dim must be positive");
  if (!scenario.moving_set)
    throw std::invalid_argument("sweeping_problem: moving_set is required");
  if (!(scenario.L2 >= 0) || scenario.L2 >= 1)
    throw std::invalid_argument(
        "sweeping_problem: state feedback modulus L2 must lie in [0, 1)");
  if (!(scenario.L1 >= 0) || !(scenario.c_A >= 0) || !(scenario.c_f >= 0))
    throw std::invalid_argument("sweeping_problem: constants must be nonnegative");
  InclusionProblem p;
  p.dim = scenario.dim;
  p.f = scenario.f;
  p.c_f = scenario.c_f;
  p.T = scenario.T;
  p.A = normal_cone(scenario.dim, scenario.moving_set,
                    OperatorConstants{scenario.c_A, scenario.L1, scenario.L2});
  return p;
}

Phi0Result phi0_solve(const LureSystem& sys, double t, const Vec& x, const Vec& y,
                      const Phi0Options& opts) {
  validate_lure_shapes(sys);
  if (x.size() != sys.n || y.size() != sys.n)
    throw std::invalid_argument("phi0_solve: state dimension mismatch");
  detail::GenEqOptions go;
  go.rho = opts.rho;
  go.tol = opts.tol;
  go.max_iter = opts.max_iter;
  go.force_fb = opts.path == Phi0Options::Path::ForwardBackward;
  go.force_exact = opts.path == Phi0Options::Path::Exact;
  const Vec u = sys.C * x;
  detail::GenEqResult r = detail::solve_generalized(sys.F, t, y, u, sys.D,
                                                    /*minimal=*/true, go);
  Phi0Result out;
  out.z = r.z;
  out.residual = r.residual;
  out.converged = r.converged;
  out.in_range_component = r.in_range;
  out.iterations = r.iterations;
  return out;
}

LureDerived lure_constants(const LureSystem& sys, const LureFitParams& params) {
  validate_lure_shapes(sys);
  if (!(sys.L_F1 >= 0) || !(sys.L_F2 >= 0) || !(sys.c_g >= 0))
    throw std::invalid_argument("lure_constants: constants must be nonnegative");
  const FitContext fit = resolve_fit(sys, params);

  LureDerived d;
  d.c2 = smallest_positive_eig(Mat(sys.C.transpose() * sys.C));
  d.c1_pos = smallest_positive_eig(Mat(sys.D + sys.D.transpose()));
  d.norm_C = spectral_norm(sys.C);
  if (d.c2 <= 0)
    throw std::invalid_argument("lure_constants: C^T C has no positive eigenvalue");
  d.L1p = d.norm_C * sys.L_F1 / d.c2;
  d.L2p = d.norm_C * sys.L_F2 / d.c2;

  std::mt19937_64 rng(fit.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double best = 0;
  long ok = 0;
  Phi0Options po;
  for (int it = 0; it < fit.nt; ++it) {
    const double t = fit.nt == 1 ? fit.t_lo
                                 : fit.t_lo + (fit.t_hi - fit.t_lo) * it / (fit.nt - 1);
    for (int ix = 0; ix < fit.nx; ++ix) {
      Vec x(sys.n), y(sys.n);
      for (int i = 0; i < sys.n; ++i) {
        x[i] = fit.box.lo[i] + (fit.box.hi[i] - fit.box.lo[i]) * unif(rng);
        y[i] = fit.box.lo[i] + (fit.box.hi[i] - fit.box.lo[i]) * unif(rng);
      }
      Phi0Result r = phi0_solve(sys, t, x, y, po);
      if (!r.converged) continue;
      ++ok;
      best = std::max(best, r.z.norm() / (1.0 + x.norm() + y.norm()));
    }
  }
  if (ok == 0)
    throw std::runtime_error(
        "lure_constants: selection solve failed at every fit sample");
  d.beta1 = fit.margin * best;
  d.c_A = 2.0 * d.norm_C * d.beta1;
  d.c_f = sys.c_g + 2.0 * spectral_norm(Mat(sys.B - sys.C.transpose())) * d.beta1;
  return d;
}

InclusionProblem lure_problem(const LureSystem& sys, const LureFitParams& params) {
  const LureDerived d = lure_constants(sys, params);

  const Mat CCt = sys.C * sys.C.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(CCt);
  const double emax = std::max(1.0, std::abs(es.eigenvalues().maxCoeff()));
  if (es.eigenvalues().minCoeff() <= 1e-12 * emax)
    throw std::invalid_argument("lure_problem: C C^T must have full rank");
  if (!(d.L2p < 1.0)) {
    std::ostringstream os;
    os << "lure_problem: transferred modulus L2' = " << d.L2p
       << " must be < 1 (the equality boundary is rejected)";
    throw std::invalid_argument(os.str());
  }

  InclusionProblem p;
  p.dim = sys.n;
  p.T = sys.T;
  p.c_f = d.c_f;
  p.A = lure_composed(sys.F, sys.C, sys.D)
            .with_constants(OperatorConstants{d.c_A, d.L1p, d.L2p});
  if (Mat(sys.B - sys.C.transpose()).isZero(0.0)) {
    p.f = sys.g;  // selection term vanishes identically
  } else {
    const Mat E = sys.B - sys.C.transpose();
    const LureSystem cap = sys;
    p.f = [cap, E](double t, const Vec& x) -> Vec {
      Phi0Options o;
      Phi0Result r = phi0_solve(cap, t, x, x, o);
      if (!r.converged)
        throw ResolventError("lure dynamics: selection solve did not converge");
      Vec gv = cap.g ? cap.g(t, x) : Vec(Vec::Zero(cap.n));
      return Vec(gv - E * r.z);
    };
  }
  return p;
}

bool AssumptionReport::all_passed() const {
  for (const auto& e : entries)
    if (e.status == CheckStatus::Fail || e.status == CheckStatus::SampledFail)
      return false;
  return true;
}

const AssumptionEntry* AssumptionReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

AssumptionReport check_assumptions(const LureSystem& sys,
                                   const AssumptionCheckParams& params) {
  if (sys.n < 1 || sys.m < 1 || sys.B.rows() != sys.n || sys.B.cols() != sys.m ||
      sys.C.rows() != sys.m || sys.C.cols() != sys.n || sys.D.rows() != sys.m ||
      sys.D.cols() != sys.m || sys.F.dim() != sys.m)
    throw std::invalid_argument("check_assumptions: inconsistent block shapes");

  AssumptionReport rep;
  auto add = [&rep](std::string name, CheckStatus st, double value, std::string detail) {
    rep.entries.push_back({std::move(name), st, value, std::move(detail)});
  };

  Box box = params.state_box;
  if (box.lo.size() == 0) {
    box.lo = Vec::Constant(sys.n, -2.0);
    box.hi = Vec::Constant(sys.n, 2.0);
  } else if (box.dim() != sys.n) {
    throw std::invalid_argument("check_assumptions: box dimension mismatch");
  }

  const Mat S = sys.D + sys.D.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> esS(S);
  const double s_scale = std::max(1.0, std::abs(esS.eigenvalues().maxCoeff()));
  const double s_min = esS.eigenvalues().minCoeff();
  add("D_monotone", s_min >= -params.tol * s_scale ? CheckStatus::Pass : CheckStatus::Fail,
      s_min, "smallest eigenvalue of D + D^T");

  const Mat CCt = sys.C * sys.C.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> esC(CCt);
  const double cct_min = esC.eigenvalues().minCoeff();
  const double cct_max = std::max(1.0, std::abs(esC.eigenvalues().maxCoeff()));
  add("CCt_full_rank",
      cct_min > 1e-12 * cct_max ? CheckStatus::Pass : CheckStatus::Fail, cct_min,
      "smallest eigenvalue of C C^T");

  const double c2 = smallest_positive_eig(Mat(sys.C.transpose() * sys.C));
  const double c1_pos = smallest_positive_eig(S);
  add("c2_smallest_positive", CheckStatus::Info, c2,
      "smallest positive eigenvalue of C^T C");
  add("c1_smallest_positive", CheckStatus::Info, c1_pos,
      "smallest positive eigenvalue of D + D^T (0 when the block vanishes)");

  const double norm_C = spectral_norm(sys.C);
  const double L2p = c2 > 0 ? norm_C * sys.L_F2 / c2 : kInf;
  {
    CheckStatus st = L2p < 1.0 ? CheckStatus::Pass : CheckStatus::Fail;
    std::string detail = "transferred modulus |C| L_F2 / c2";
    if (std::abs(L2p - 1.0) <= 1e-15) detail += " (equality boundary rejected)";
    add("L2_transfer", st, L2p, std::move(detail));
  }

  {
    const Mat P = sys.P ? *sys.P : Mat(Mat::Identity(sys.n, sys.n));
    const Mat E = P * sys.B - sys.C.transpose();  // n x m
    const double e_scale = std::max(1.0, spectral_norm(E));
    bool ok = true;
    double worst = 0;
    const double cut = 1e-10 * s_scale;
    for (int i = 0; i < esS.eigenvalues().size(); ++i) {
      if (std::abs(esS.eigenvalues()[i]) > cut) continue;
      const Vec v = esS.eigenvectors().col(i);
      const double r = (E * v).norm();
      worst = std::max(worst, r);
      if (r > params.tol * e_scale) ok = false;
    }
    add("kernel_inclusion", ok ? CheckStatus::Pass : CheckStatus::Fail, worst,
        "ker(D + D^T) must lie in ker(P B - C^T)");
  }

  // Sampled probes: solvability, range membership, growth of g.
  {
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    long solved = 0, in_range = 0, total = 0;
    double g_fit = 0;
    Phi0Options po;
    for (int it = 0; it < params.nt; ++it) {
      const double t = params.nt == 1
                           ? params.t_lo
                           : params.t_lo + (params.t_hi - params.t_lo) * it / (params.nt - 1);
      for (int ix = 0; ix < params.nx; ++ix) {
        Vec x(sys.n);
        for (int i = 0; i < sys.n; ++i)
          x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unif(rng);
        ++total;
        Phi0Result r = phi0_solve(sys, t, x, x, po);
        if (r.converged) {
          ++solved;
          if (r.in_range_component) ++in_range;
        }
        if (sys.g) g_fit = std::max(g_fit, sys.g(t, x).norm() / (1.0 + x.norm()));
      }
    }
    add("solvability", solved == total ? CheckStatus::SampledPass : CheckStatus::SampledFail,
        total ? static_cast<double>(solved) / total : 0.0,
        "fraction of sampled selection problems solved");
    add("range_condition",
        solved == in_range && solved > 0 ? CheckStatus::SampledPass
                                         : CheckStatus::SampledFail,
        solved ? static_cast<double>(in_range) / solved : 0.0,
        "fraction of solved samples with z in rge(D + D^T)");
    if (sys.g) {
      CheckStatus st = CheckStatus::Info;
      if (sys.c_g > 0)
        st = g_fit <= sys.c_g * (1.0 + 1e-7) ? CheckStatus::SampledPass
                                             : CheckStatus::SampledFail;
      add("growth_g", st, g_fit, "sampled sup |g(t,x)| / (1 + |x|)");
    }
  }

  // Transferred dis modulus probe on the composed operator.
  if (c2 > 0 && L2p < 1.0) {
    try {
      LureDerived d = lure_constants(sys);
      rep.derived = d;
      add("phi0_growth_beta1", CheckStatus::Info, d.beta1,
          "fitted growth of the selection");
      OperatorHandle A = lure_composed(sys.F, sys.C, sys.D);
      std::mt19937_64 rng(params.seed + 99);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      bool ok = true;
      double worst_excess = 0;
      for (int k = 0; k < 3; ++k) {
        Vec y1(sys.n), y2(sys.n);
        for (int i = 0; i < sys.n; ++i) {
          y1[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unif(rng);
          y2[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unif(rng);
        }
        const double t1 = params.t_lo;
        const double t2 = params.t_lo + (params.t_hi - params.t_lo) * (k + 1) / 3.0;
        DisParams dp;
        dp.seed = params.seed + 7 * k;
        DisEstimate est = dis_estimate(A, t1, y1, A, t2, y2, params.dis_budget, dp);
        const double bound =
            d.L1p * std::abs(t2 - t1) + d.L2p * (y2 - y1).norm();
        const double excess = est.lower_bound - bound;
        worst_excess = std::max(worst_excess, excess);
        if (excess > 1e-6 * (1.0 + bound)) ok = false;
      }
      add("dis_transfer", ok ? CheckStatus::SampledPass : CheckStatus::SampledFail,
          worst_excess, "sampled dis lower bound minus L1'|dt| + L2'|dy|");
    } catch (const std::exception& e) {
      add("dis_transfer", CheckStatus::Info, 0.0,
          std::string("probe skipped: ") + e.what());
    }
  }

  return rep;
}

}  // namespace catchup
