#include "catchup/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace catchup {

DecayReport evaluate_pair_decay(const Trajectory& traj, const LyapunovPair& pair,
                                double slack) {
  if (!pair.V) throw std::invalid_argument("evaluate_pair_decay: pair has no V");
  if (traj.states.empty())
    throw std::invalid_argument("evaluate_pair_decay: empty trajectory");

  DecayReport rep;
  rep.slack = slack < 0 ? 5.0 * traj.h : slack;

  const double t0 = traj.times.front();
  rep.v0 = pair.eval_V(t0, traj.states.front());
  if (!std::isfinite(rep.v0) || !pair.domain_ok(t0, traj.states.front())) {
    rep.first_exit = 0;
    rep.pass = false;
    return rep;
  }

  double integral = 0;
  double w_prev = pair.eval_W(t0, traj.states.front());
  if (w_prev < -1e-9)
    throw std::invalid_argument("evaluate_pair_decay: W must be nonnegative");
  rep.composite.push_back(rep.v0);
  rep.max_violation = 0;
  for (std::size_t j = 1; j < traj.states.size(); ++j) {
    const double t = traj.times[j];
    const Vec& x = traj.states[j];
    const double vj = pair.eval_V(t, x);
    if (!std::isfinite(vj) || !pair.domain_ok(t, x)) {
      rep.first_exit = j;
      break;
    }
    const double wj = pair.eval_W(t, x);
    if (wj < -1e-9)
      throw std::invalid_argument("evaluate_pair_decay: W must be nonnegative");
    integral += 0.5 * (w_prev + wj) * (t - traj.times[j - 1]);
    w_prev = wj;
    const double comp = std::exp(pair.a * (t - t0)) * vj + integral;
    rep.max_increment = std::max(rep.max_increment, comp - rep.composite.back());
    rep.composite.push_back(comp);
    rep.max_violation = std::max(rep.max_violation, comp - rep.v0);
  }
  rep.pass = !rep.first_exit && rep.max_violation <= rep.slack &&
             rep.max_increment <= rep.slack;
  return rep;
}

double VelocitySet::min_inner(const Vec& xi) const {
  if (!nonempty) return kInf;
  if (exact) {
    Box b = box;
    return min_linear_over_box_ball(xi, b, radius);
  }
  double best = kInf;
  if (anchor.size() == xi.size() && anchor.norm() <= radius * (1 + 1e-12))
    best = xi.dot(anchor);
  for (const Vec& v : samples) best = std::min(best, xi.dot(v));
  return best;
}

VelocitySet truncated_velocity_set(const InclusionProblem& problem, double t,
                                   const Vec& x, double M, int samples,
                                   std::uint64_t seed) {
  if (x.size() != problem.dim)
    throw std::invalid_argument("truncated_velocity_set: dimension mismatch");
  if (!(M > 0)) throw std::invalid_argument("truncated_velocity_set: M <= 0");

  VelocitySet vs;
  vs.radius = M;
  const Vec fv = problem.f ? problem.f(t, x) : Vec(Vec::Zero(problem.dim));

  if (auto ib = problem.A.image_box(t, x, x)) {
    // velocities f - [lo, hi] = [f - hi, f - lo]
    vs.exact = true;
    vs.box.lo = fv - ib->hi;
    vs.box.hi = fv - ib->lo;
    vs.nonempty = vs.box.min_norm().norm() <= M * (1 + 1e-12);
  }
  try {
    vs.anchor = fv - problem.A.minimal_norm(t, x, x);
  } catch (const std::exception&) {
  }
  if (!vs.exact) {
    std::mt19937_64 rng(seed);
    for (int k = 0; k < samples; ++k) {
      try {
        Vec v = fv - problem.A.sample_image(t, x, x, rng);
        if (v.norm() <= M * (1 + 1e-12)) vs.samples.push_back(std::move(v));
      } catch (const std::exception&) {
      }
    }
    if (vs.anchor.size() == problem.dim && vs.anchor.norm() <= M * (1 + 1e-12))
      vs.nonempty = true;
    if (!vs.samples.empty()) vs.nonempty = true;
  }
  return vs;
}

ProximalReport proximal_criterion(const LyapunovPair& pair,
                                  const InclusionProblem& problem, double t,
                                  const Vec& x, double M, int samples,
                                  std::uint64_t seed) {
  if (!pair.proximal)
    throw std::invalid_argument("proximal_criterion: pair has no proximal oracle");

  ProximalReport rep;
  const VelocitySet vs = truncated_velocity_set(problem, t, x, M, samples, seed);
  rep.velocity_exact = vs.exact;
  rep.velocity_nonempty = vs.nonempty;

  const auto gens = pair.proximal(t, x);
  rep.generators = gens.size();
  if (!vs.nonempty) {
    rep.residual = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  const double vval = pair.eval_V(t, x);
  const double wval = pair.eval_W(t, x);
  for (const auto& g : gens) {
    if (g.xi.size() != x.size())
      throw std::invalid_argument("proximal_criterion: generator dimension");
    const double r = g.theta + vs.min_inner(g.xi) + pair.a * vval + wval;
    rep.residual = std::max(rep.residual, r);
  }
  if (pair.singular) {
    const auto sg = pair.singular(t, x);
    if (!sg.empty()) {
      double sr = -kInf;
      for (const auto& g : sg) sr = std::max(sr, g.theta + vs.min_inner(g.xi));
      rep.singular_residual = sr;
    }
  }
  return rep;
}

}  // namespace catchup
