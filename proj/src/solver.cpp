#include "catchup/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace catchup {

namespace {

double growth_lambda(double L2, double delta) { return 1.0 - (1.0 + delta) * L2; }

void validate_constants(double c_f, double c_A, double L1, double L2, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("apriori: delta must be positive");
  if (!(c_f >= 0) || !(c_A >= 0) || !(L1 >= 0) || !(L2 >= 0))
    throw std::invalid_argument("apriori: constants must be nonnegative");
  if (!(growth_lambda(L2, delta) > 0)) {
    std::ostringstream os;
    os << "apriori: (1 + delta) L2 = " << (1.0 + delta) * L2 << " >= 1";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

AprioriConstants apriori_bounds(const Vec& x0, double c_f, double c_A,
                                double L1, double L2, double delta) {
  validate_constants(c_f, c_A, L1, L2, delta);
  AprioriConstants out;
  out.delta = delta;
  out.c1 = c_f + (1.0 + (4.0 * delta + 1.0) * c_A) / (4.0 * delta) +
           (1.0 + delta) * L1;
  const double lam = growth_lambda(L2, delta);
  out.m = (2.0 * x0.norm() + 2.0 * out.c1 / lam) * std::exp(6.0 * out.c1 / lam);
  out.M = c_f + c_A + (c_f + 2.0 * c_A + 1.0) * (x0.norm() + out.m);
  return out;
}

AprioriConstants apriori_bounds(const InclusionProblem& problem, const Vec& x0,
                                double delta) {
  const OperatorConstants& oc = problem.A.constants();
  return apriori_bounds(x0, problem.c_f, oc.c_A, oc.L1, oc.L2, delta);
}

AprioriConstants apriori_bounds_minimized(const Vec& x0, double c_f, double c_A,
                                          double L1, double L2, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("apriori: grid_points < 2");
  std::optional<AprioriConstants> best;
  for (int i = 0; i < grid_points; ++i) {
    const double e = -3.0 + 6.0 * i / (grid_points - 1);
    const double delta = std::pow(10.0, e);
    if (!(growth_lambda(L2, delta) > 0)) continue;
    AprioriConstants c = apriori_bounds(x0, c_f, c_A, L1, L2, delta);
    if (!best || c.m < best->m) best = c;
  }
  if (!best)
    throw std::invalid_argument("apriori: no admissible delta (L2 too large)");
  return *best;
}

bool admissible(const InclusionProblem& problem, double t0, const Vec& x0, double tol) {
  if (x0.size() != problem.dim || problem.A.dim() != problem.dim)
    throw std::invalid_argument("admissible: dimension mismatch");
  return problem.A.in_domain(t0, x0, x0, tol);
}

StepResult step(const InclusionProblem& problem, double t, const Vec& x, double h) {
  if (x.size() != problem.dim || problem.A.dim() != problem.dim)
    throw std::invalid_argument("step: dimension mismatch");
  if (!(h > 0)) throw std::invalid_argument("step: h must be positive");
  const Vec fv = problem.f ? problem.f(t, x) : Vec(Vec::Zero(problem.dim));
  const Vec y = x + h * fv;
  Vec x1 = problem.A.resolvent(t + h, x, h, y);
  StepResult r;
  r.velocity = (x1 - x) / h;
  const Vec sel = (y - x1) / h;
  r.diag.selection_norm = sel.norm();
  r.diag.residual = problem.A.graph_residual(t + h, x, GraphPoint{x1, sel}, 1.0);
  r.state = std::move(x1);
  return r;
}

double Trajectory::max_residual() const {
  double m = 0;
  for (const auto& d : diagnostics) m = std::max(m, d.residual);
  return m;
}

double Trajectory::max_speed() const {
  double m = 0;
  for (const auto& v : velocities) m = std::max(m, v.norm());
  return m;
}

Trajectory solve(const InclusionProblem& problem, double t0, const Vec& x0,
                 double h, const SolveOptions& opts) {
  if (!(h > 0)) throw std::invalid_argument("solve: h must be positive");
  if (!(problem.T > 0)) throw std::invalid_argument("solve: T must be positive");
  if (x0.size() != problem.dim)
    throw std::invalid_argument("solve: initial state dimension mismatch");
  if (!admissible(problem, t0, x0))
    throw std::invalid_argument("solve: initial state not in operator domain");

  const AprioriConstants ap = apriori_bounds(problem, x0, opts.delta);
  // Round the horizon to a whole number of steps (down when not exact).
  const double ratio = problem.T / h;
  long N = std::llround(ratio);
  if (std::abs(ratio - static_cast<double>(N)) > 1e-9 * std::max(1.0, ratio))
    N = static_cast<long>(std::ceil(ratio - 1e-12));
  N = std::max<long>(N, 1);
  const double h_eff = problem.T / static_cast<double>(N);
  if (!(h_eff * ap.c1 < 0.5) && !opts.allow_large_step) {
    std::ostringstream os;
    os << "solve: step rule violated, h * c1 = " << h_eff * ap.c1
       << " >= 0.5 (h = " << h_eff << ", c1 = " << ap.c1 << ")";
    throw std::invalid_argument(os.str());
  }

  Trajectory traj;
  traj.t0 = t0;
  traj.h = h_eff;
  traj.times.reserve(N + 1);
  traj.states.reserve(N + 1);
  traj.velocities.reserve(N);
  traj.times.push_back(t0);
  traj.states.push_back(x0);

  for (long i = 0; i < N; ++i) {
    const double t = t0 + static_cast<double>(i) * h_eff;
    const Vec& x = traj.states.back();
    Vec y, x1;
    try {
      const Vec fv = problem.f ? problem.f(t, x) : Vec(Vec::Zero(problem.dim));
      y = x + h_eff * fv;
      x1 = problem.A.resolvent(t + h_eff, x, h_eff, y);
    } catch (const ResolventError& e) {
      traj.status = SolveStatus::Truncated;
      traj.failure = e.what();
      break;
    }
    traj.velocities.push_back((x1 - x) / h_eff);
    if (opts.record_diagnostics) {
      StepDiagnostics d;
      const Vec sel = (y - x1) / h_eff;
      d.selection_norm = sel.norm();
      d.residual = problem.A.graph_residual(t + h_eff, x, GraphPoint{x1, sel},
                                            opts.residual_mu);
      traj.diagnostics.push_back(d);
    }
    traj.times.push_back(t0 + static_cast<double>(i + 1) * h_eff);
    traj.states.push_back(std::move(x1));
  }
  traj.last_valid = traj.states.size() - 1;
  return traj;
}

bool ConvergenceReport::gaps_decreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].gap < rows[i - 1].gap)) return false;
  return true;
}

bool ConvergenceReport::ratios_below(double cap) const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i - 1].gap == 0) continue;
    if (!(rows[i].ratio <= cap)) return false;
  }
  return true;
}

ConvergenceReport convergence_study(const InclusionProblem& problem, double t0,
                                    const Vec& x0, std::vector<double> h_list,
                                    const SolveOptions& opts, bool keep_trajectories,
                                    int threads) {
  if (h_list.empty()) throw std::invalid_argument("convergence_study: empty h list");
  for (double h : h_list)
    if (!(h > 0)) throw std::invalid_argument("convergence_study: h must be positive");
  std::sort(h_list.begin(), h_list.end(), std::greater<double>());
  h_list.erase(std::unique(h_list.begin(), h_list.end()), h_list.end());

  std::vector<long> strides(h_list.size() > 0 ? h_list.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < h_list.size(); ++i) {
    const double r = h_list[i] / h_list[i + 1];
    const long ri = std::llround(r);
    if (ri < 2 || std::abs(r - static_cast<double>(ri)) > 1e-6 * r)
      throw std::invalid_argument(
          "convergence_study: consecutive h values must nest (integer ratio)");
    strides[i] = ri;
  }

  const std::size_t n = h_list.size();
  std::vector<Trajectory> trajs(n);
  std::vector<std::exception_ptr> errors(n);
  int nthreads = threads > 0 ? threads
                             : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(n)));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        trajs[i] = solve(problem, t0, x0, h_list[i], opts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
  for (std::size_t i = 0; i < n; ++i)
    if (trajs[i].status != SolveStatus::Complete) {
      std::ostringstream os;
      os << "convergence_study: run with h = " << h_list[i]
         << " truncated: " << trajs[i].failure;
      throw std::runtime_error(os.str());
    }

  ConvergenceReport rep;
  rep.h_list = h_list;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Trajectory& coarse = trajs[i];
    const Trajectory& fine = trajs[i + 1];
    const long stride = strides[i];
    if (fine.states.size() != (coarse.states.size() - 1) * stride + 1)
      throw std::runtime_error("convergence_study: grid alignment failed");
    double gap = 0;
    for (std::size_t j = 0; j < coarse.states.size(); ++j)
      gap = std::max(gap, (coarse.states[j] - fine.states[j * stride]).norm());
    ConvergenceRow row;
    row.h_coarse = h_list[i];
    row.h_fine = h_list[i + 1];
    row.gap = gap;
    row.ratio = rep.rows.empty() || rep.rows.back().gap == 0
                    ? 0.0
                    : gap / rep.rows.back().gap;
    rep.rows.push_back(row);
  }
  rep.extrapolated_gap = std::numeric_limits<double>::quiet_NaN();
  if (rep.rows.size() >= 2) {
    const double r = rep.rows.back().ratio;
    if (r > 0 && r < 1) rep.extrapolated_gap = rep.rows.back().gap * r / (1.0 - r);
  }
  if (keep_trajectories) rep.trajectories = std::move(trajs);
  return rep;
}

HypoProbeResult hypo_probe(const OperatorHandle& A, const std::vector<double>& t_grid,
                           const Box& box, double M, int samples_per_t,
                           std::uint64_t seed) {
  if (t_grid.empty()) throw std::invalid_argument("hypo_probe: empty t grid");
  if (box.dim() != A.dim()) throw std::invalid_argument("hypo_probe: box dimension");
  if (!(M > 0)) throw std::invalid_argument("hypo_probe: M must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int d = A.dim();

  HypoProbeResult res;
  res.worst_quotient = -kInf;
  for (double t : t_grid) {
    std::vector<std::pair<Vec, Vec>> pool;  // diagonal graph points (x, eta)
    for (int s = 0; s < samples_per_t && pool.size() < 120; ++s) {
      Vec x(d);
      for (int i = 0; i < d; ++i) {
        const double lo = std::isfinite(box.lo[i]) ? box.lo[i] : -M;
        const double hi = std::isfinite(box.hi[i]) ? box.hi[i] : M;
        x[i] = lo + (hi - lo) * unif(rng);
      }
      if (x.norm() > M) continue;
      if (!A.in_domain(t, x, x, 1e-8)) continue;
      try {
        pool.emplace_back(x, A.minimal_norm(t, x, x));
      } catch (const std::exception&) {
      }
      for (int k = 0; k < 2; ++k) {
        try {
          pool.emplace_back(x, A.sample_image(t, x, x, rng));
        } catch (const std::exception&) {
        }
      }
    }
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        const Vec dx = pool[i].first - pool[j].first;
        const double n2 = dx.squaredNorm();
        if (n2 < 1e-18) continue;
        const double q = -(pool[i].second - pool[j].second).dot(dx) / n2;
        ++res.pairs;
        if (q > res.worst_quotient) {
          res.worst_quotient = q;
          res.t = t;
          res.x1 = pool[i].first;
          res.eta1 = pool[i].second;
          res.x2 = pool[j].first;
          res.eta2 = pool[j].second;
        }
      }
  }
  if (res.pairs == 0)
    throw std::runtime_error("hypo_probe: no admissible diagonal pairs sampled");
  res.k_estimate = std::max(0.0, res.worst_quotient);
  return res;
}

}  // namespace catchup
