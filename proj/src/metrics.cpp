#include "catchup/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace catchup {
namespace {

// sup_{x in I1} d(x, I2) for one coordinate, assuming matching recession.
double interval_oneway(double l1, double h1, double l2, double h2) {
  auto dist = [&](double p) { return std::max({0.0, l2 - p, p - h2}); };
  double s = 0;
  if (std::isfinite(l1)) s = std::max(s, dist(l1));
  if (std::isfinite(h1)) s = std::max(s, dist(h1));
  return s;
}

std::vector<Vec> corner_vertices(const ConvexSet& s) {
  if (s.kind() == SetKind::Polytope) return s.vertices();
  const Vec& lo = s.lower();
  const Vec& hi = s.upper();
  const int d = s.dim();
  std::vector<Vec> out;
  out.reserve(std::size_t{1} << d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    out.push_back(std::move(v));
  }
  return out;
}

double vertex_oneway(const ConvexSet& src, const ConvexSet& dst) {
  double s = 0;
  for (const Vec& v : corner_vertices(src)) s = std::max(s, dst.distance(v));
  return s;
}

}  // namespace

double hausdorff(const ConvexSet& s1, const ConvexSet& s2) {
  if (s1.dim() != s2.dim())
    throw std::invalid_argument("hausdorff: dimension mismatch");
  if (s1.bounded() != s2.bounded())
    throw std::invalid_argument("hausdorff: mixed bounded/unbounded sets");

  if (s1.kind() == SetKind::IntervalProduct && s2.kind() == SetKind::IntervalProduct) {
    double a2 = 0, b2 = 0;
    for (int i = 0; i < s1.dim(); ++i) {
      const double l1 = s1.lower()[i], h1 = s1.upper()[i];
      const double l2 = s2.lower()[i], h2 = s2.upper()[i];
      if (std::isinf(l1) != std::isinf(l2) || std::isinf(h1) != std::isinf(h2))
        throw std::invalid_argument("hausdorff: recession directions differ");
      const double a = interval_oneway(l1, h1, l2, h2);
      const double b = interval_oneway(l2, h2, l1, h1);
      a2 += a * a;
      b2 += b * b;
    }
    return std::sqrt(std::max(a2, b2));
  }

  if (s1.kind() == SetKind::Ball && s2.kind() == SetKind::Ball)
    return (s1.center() - s2.center()).norm() + std::abs(s1.radius() - s2.radius());

  const bool poly_or_box = [](const ConvexSet& s) {
    return s.kind() == SetKind::Polytope || s.kind() == SetKind::IntervalProduct;
  }(s1) && (s2.kind() == SetKind::Polytope || s2.kind() == SetKind::IntervalProduct);
  if (poly_or_box && s1.bounded())
    return std::max(vertex_oneway(s1, s2), vertex_oneway(s2, s1));

  throw std::invalid_argument("hausdorff: unsupported set pair");
}

namespace {

struct Anchor {
  Vec base, image;
  double image_norm;
};

double pair_value(const Vec& z1, const Vec& e1, double n1,
                  const Vec& z2, const Vec& e2, double n2) {
  return (e1 - e2).dot(z2 - z1) / (1.0 + n1 + n2);
}

// Resolvent sweep: (x, eta) with x = J_lambda(y), eta = (y - x)/lambda.
bool draw_graph_point(const OperatorHandle& op, double t, const Vec& state,
                      const Vec& y, double lambda, Anchor& out) {
  try {
    Vec x = op.resolvent(t, state, lambda, y);
    out.image = (y - x) / lambda;
    out.base = std::move(x);
    out.image_norm = out.image.norm();
    return true;
  } catch (const ResolventError&) {
    return false;
  }
}

std::vector<Anchor> build_anchors(const OperatorHandle& op, double t, const Vec& state,
                                  const Vec& lo, const Vec& hi,
                                  const std::vector<double>& lambdas,
                                  int count, std::uint64_t seed, long& draws) {
  const int d = op.dim();
  std::vector<Vec> probes;
  if (d <= 4) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      Vec v(d);
      for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? hi[i] : lo[i];
      probes.push_back(std::move(v));
    }
  } else {
    for (int i = 0; i < d; ++i) {
      Vec v = 0.5 * (lo + hi);
      v[i] = lo[i];
      probes.push_back(v);
      v[i] = hi[i];
      probes.push_back(std::move(v));
    }
  }
  probes.push_back(0.5 * (lo + hi));

  std::vector<Anchor> anchors;
  anchors.reserve(count);
  Anchor a;
  for (double lam : lambdas) {
    for (const Vec& y : probes) {
      if (static_cast<int>(anchors.size()) >= count) break;
      ++draws;
      if (draw_graph_point(op, t, state, y, lam, a)) anchors.push_back(a);
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t lam_at = 0;
  while (static_cast<int>(anchors.size()) < count) {
    Vec y(d);
    for (int i = 0; i < d; ++i) y[i] = lo[i] + (hi[i] - lo[i]) * unif(rng);
    const double lam = lambdas[lam_at++ % lambdas.size()];
    ++draws;
    if (draw_graph_point(op, t, state, y, lam, a)) anchors.push_back(a);
    if (draws > 16L * count) break;  // off-domain heavy operators: give up filling
  }
  return anchors;
}

}  // namespace

DisEstimate dis_estimate(const OperatorHandle& op1, double t1, const Vec& state1,
                         const OperatorHandle& op2, double t2, const Vec& state2,
                         long budget, DisParams params) {
  if (op1.dim() != op2.dim())
    throw std::invalid_argument("dis_estimate: dimension mismatch");
  const int d = op1.dim();
  if (budget < 8) throw std::invalid_argument("dis_estimate: budget too small");
  if (params.lambdas.empty())
    throw std::invalid_argument("dis_estimate: empty lambda palette");
  for (double lam : params.lambdas)
    if (!(lam > 0)) throw std::invalid_argument("dis_estimate: lambdas must be positive");
  if (params.box_lo.size() == 0) {
    params.box_lo = Vec::Constant(d, -4.0);
    params.box_hi = Vec::Constant(d, 4.0);
  }
  if (params.box_lo.size() != d || params.box_hi.size() != d ||
      !((params.box_hi - params.box_lo).array() > 0).all())
    throw std::invalid_argument("dis_estimate: bad sampling box");

  int per_side = std::min<long>(params.anchors, budget / 4);
  per_side = std::max(per_side, 2);

  long draws = 0;
  const auto a1 = build_anchors(op1, t1, state1, params.box_lo, params.box_hi,
                                params.lambdas, per_side, params.seed * 2 + 1, draws);
  const auto a2 = build_anchors(op2, t2, state2, params.box_lo, params.box_hi,
                                params.lambdas, per_side, params.seed * 2 + 2, draws);
  if (a1.empty() || a2.empty())
    throw std::runtime_error("dis_estimate: could not draw graph points");

  DisEstimate est;
  est.best_value = -kInf;
  auto consider = [&est](const Anchor& g1, const Anchor& g2) {
    const double v = pair_value(g1.base, g1.image, g1.image_norm,
                                g2.base, g2.image, g2.image_norm);
    if (v > est.best_value) {
      est.best_value = v;
      est.witness1 = {g1.base, g1.image};
      est.witness2 = {g2.base, g2.image};
    }
  };
  for (const Anchor& g1 : a1)
    for (const Anchor& g2 : a2) consider(g1, g2);

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Anchor fresh;
  std::size_t lam_at = 0;
  while (draws < budget) {
    const bool side1 = (draws % 2) == 0;
    Vec y(d);
    for (int i = 0; i < d; ++i)
      y[i] = params.box_lo[i] + (params.box_hi[i] - params.box_lo[i]) * unif(rng);
    const double lam = params.lambdas[lam_at++ % params.lambdas.size()];
    ++draws;
    const bool ok = side1 ? draw_graph_point(op1, t1, state1, y, lam, fresh)
                          : draw_graph_point(op2, t2, state2, y, lam, fresh);
    if (!ok) continue;
    if (side1)
      for (const Anchor& g2 : a2) consider(fresh, g2);
    else
      for (const Anchor& g1 : a1) consider(g1, fresh);
  }

  est.samples_used = draws;
  est.lower_bound = std::max(0.0, est.best_value);
  return est;
}

double resolvent_gap_bound(double lambda, double delta, double f0norm, double dis) {
  if (!(lambda >= 0) || !(delta > 0) || !(f0norm >= 0) || !(dis >= 0))
    throw std::invalid_argument("resolvent_gap_bound: bad arguments");
  return lambda * (1.0 + (4.0 * delta + 1.0) * f0norm) / (4.0 * delta) +
         (1.0 + delta) * dis;
}

std::vector<double> discrete_gronwall_bound(double alpha, const std::vector<double>& betas) {
  if (!(alpha >= 0)) throw std::invalid_argument("discrete_gronwall_bound: alpha < 0");
  for (double b : betas)
    if (!(b >= 0)) throw std::invalid_argument("discrete_gronwall_bound: beta < 0");
  std::vector<double> bound(betas.size() + 1);
  double acc = 0;
  bound[0] = alpha;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    acc += betas[k];
    bound[k + 1] = alpha * std::exp(acc);
  }
  return bound;
}

std::vector<double> continuous_gronwall_bound(double w0,
                                              const std::function<double(double)>& a,
                                              const std::function<double(double)>& b,
                                              double alpha_exp,
                                              const std::vector<double>& grid) {
  if (!(w0 >= 0)) throw std::invalid_argument("continuous_gronwall_bound: w0 < 0");
  if (!(alpha_exp >= 0) || !(alpha_exp < 1))
    throw std::invalid_argument("continuous_gronwall_bound: alpha_exp outside [0,1)");
  if (grid.empty()) throw std::invalid_argument("continuous_gronwall_bound: empty grid");
  for (std::size_t j = 1; j < grid.size(); ++j)
    if (!(grid[j] > grid[j - 1]))
      throw std::invalid_argument("continuous_gronwall_bound: grid not increasing");

  const double head = std::pow(w0, 1.0 - alpha_exp);
  std::vector<double> bound(grid.size());
  double A = 0;        // int_{t0}^{t} a
  double I = 0;        // int_{t0}^{t} exp(-A(s)) b(s) ds
  double a_prev = a(grid[0]);
  double g_prev = b(grid[0]);  // exp(-0) * b
  bound[0] = head;
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const double dt = grid[j] - grid[j - 1];
    const double a_cur = a(grid[j]);
    A += 0.5 * (a_prev + a_cur) * dt;
    const double g_cur = std::exp(-A) * b(grid[j]);
    I += 0.5 * (g_prev + g_cur) * dt;
    bound[j] = std::exp(A) * (head + I);
    a_prev = a_cur;
    g_prev = g_cur;
  }
  return bound;
}

}  // namespace catchup
