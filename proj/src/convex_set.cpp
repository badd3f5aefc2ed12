#include "catchup/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace catchup {

namespace {

bool finite(double v) { return std::isfinite(v); }

double interval_point_distance(double x, double lo, double hi) {
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0.0;
}

// sup_{x in [lo1,hi1]} d(x, [lo2,hi2]); assumes matching unbounded directions.
double interval_oneway(double lo1, double hi1, double lo2, double hi2) {
  double worst = 0.0;
  if (finite(lo1)) worst = std::max(worst, interval_point_distance(lo1, lo2, hi2));
  if (finite(hi1)) worst = std::max(worst, interval_point_distance(hi1, lo2, hi2));
  return worst;
}

}  // namespace

bool Box::bounded() const {
  for (int i = 0; i < dim(); ++i)
    if (!finite(lo[i]) || !finite(hi[i])) return false;
  return true;
}

bool Box::contains(const Vec& x, double tol) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  return true;
}

Vec Box::clamp(const Vec& x) const {
  Vec out = x;
  for (int i = 0; i < dim(); ++i) out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
  return out;
}

Vec Box::min_norm() const {
  Vec out(dim());
  for (int i = 0; i < dim(); ++i) {
    if (lo[i] > hi[i]) throw std::invalid_argument("Box::min_norm: empty box");
    out[i] = std::min(std::max(0.0, lo[i]), hi[i]);
  }
  return out;
}

ConvexSet ConvexSet::interval_product(Vec lo, Vec hi) {
  if (lo.size() != hi.size())
    throw std::invalid_argument("interval_product: lo/hi dimension mismatch");
  for (int i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i]))
      throw std::invalid_argument("interval_product: NaN endpoint");
    if (lo[i] > hi[i])
      throw std::invalid_argument("interval_product: empty interval (lo > hi)");
  }
  ConvexSet s;
  s.kind_ = SetKind::IntervalProduct;
  s.dim_ = static_cast<int>(lo.size());
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

ConvexSet ConvexSet::interval(double lo, double hi) {
  Vec l(1), h(1);
  l[0] = lo;
  h[0] = hi;
  return interval_product(std::move(l), std::move(h));
}

ConvexSet ConvexSet::ball(Vec center, double radius) {
  if (!(radius >= 0) || !finite(radius))
    throw std::invalid_argument("ball: radius must be finite and >= 0");
  ConvexSet s;
  s.kind_ = SetKind::Ball;
  s.dim_ = static_cast<int>(center.size());
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

ConvexSet ConvexSet::polytope(Mat A, Vec b) {
  if (A.rows() != b.size())
    throw std::invalid_argument("polytope: A rows must match b size");
  if (A.cols() < 1 || A.cols() > 8)
    throw std::invalid_argument("polytope: dimension must be in [1, 8]");
  if (A.rows() < 1 || A.rows() > 32)
    throw std::invalid_argument("polytope: facet count must be in [1, 32]");
  ConvexSet s;
  s.kind_ = SetKind::Polytope;
  s.dim_ = static_cast<int>(A.cols());
  s.A_ = std::move(A);
  s.b_ = std::move(b);
  // feasibility solve: the dual active-set projection of the origin either
  // yields a feasible point or blows up / stalls, which we report as empty
  Vec p;
  try {
    p = s.project_polytope(Vec::Zero(s.dim_));
  } catch (const std::exception&) {
    throw std::invalid_argument("polytope: infeasible halfspace system");
  }
  double scale = std::max(1.0, s.b_.cwiseAbs().maxCoeff());
  if (((s.A_ * p - s.b_).array() > 1e-7 * scale).any())
    throw std::invalid_argument("polytope: infeasible halfspace system");
  s.witness_ = p;
  return s;
}

bool ConvexSet::bounded() const {
  switch (kind_) {
    case SetKind::IntervalProduct:
      return Box{lo_, hi_}.bounded();
    case SetKind::Ball:
      return true;
    case SetKind::Polytope: {
      // bounded iff sup <d, x> finite along +-each axis; desk scale allows
      // answering with support LPs
      for (int i = 0; i < dim_; ++i) {
        Vec d = Vec::Zero(dim_);
        d[i] = 1.0;
        if (!finite(support(d))) return false;
        d[i] = -1.0;
        if (!finite(support(d))) return false;
      }
      return true;
    }
  }
  return false;
}

Vec ConvexSet::project(const Vec& y) const {
  if (y.size() != dim_) throw std::invalid_argument("project: dimension mismatch");
  switch (kind_) {
    case SetKind::IntervalProduct:
      return Box{lo_, hi_}.clamp(y);
    case SetKind::Ball: {
      Vec d = y - center_;
      double n = d.norm();
      if (n <= radius_) return y;
      return center_ + (radius_ / n) * d;
    }
    case SetKind::Polytope:
      return project_polytope(y);
  }
  throw std::logic_error("project: unreachable");
}

double ConvexSet::distance(const Vec& y) const { return (y - project(y)).norm(); }

bool ConvexSet::contains(const Vec& y, double tol) const {
  if (y.size() != dim_) return false;
  if (kind_ == SetKind::IntervalProduct) return Box{lo_, hi_}.contains(y, tol);
  if (kind_ == SetKind::Polytope)
    return ((A_ * y - b_).array() <= tol).all();
  return distance(y) <= tol;
}

double ConvexSet::support(const Vec& d) const {
  if (d.size() != dim_) throw std::invalid_argument("support: dimension mismatch");
  switch (kind_) {
    case SetKind::IntervalProduct: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        if (d[i] > 0) {
          if (!finite(hi_[i])) return kInf;
          s += d[i] * hi_[i];
        } else if (d[i] < 0) {
          if (!finite(lo_[i])) return kInf;
          s += d[i] * lo_[i];
        }
      }
      return s;
    }
    case SetKind::Ball:
      return d.dot(center_) + radius_ * d.norm();
    case SetKind::Polytope: {
      // sup over a polyhedron is attained at a vertex, on an unbounded face
      // (finite, vertexless direction), or is +inf. Two far-point projection
      // probes separate the finite cases from linear growth along d.
      double dn = d.norm();
      if (dn == 0.0) return 0.0;
      double scale = std::max({1.0, b_.cwiseAbs().maxCoeff(), witness_.cwiseAbs().maxCoeff()});
      double v1 = d.dot(project(witness_ + (1e6 * scale / dn) * d));
      double v2 = d.dot(project(witness_ + (1e12 * scale / dn) * d));
      if (v2 > v1 + 1e-6 * dn * scale) return kInf;
      double best = v2;
      for (const Vec& v : vertices()) best = std::max(best, d.dot(v));
      return best;
    }
  }
  throw std::logic_error("support: unreachable");
}

Vec ConvexSet::any_point() const {
  switch (kind_) {
    case SetKind::IntervalProduct: {
      Vec p(dim_);
      for (int i = 0; i < dim_; ++i) {
        if (finite(lo_[i]) && finite(hi_[i]))
          p[i] = 0.5 * (lo_[i] + hi_[i]);
        else if (finite(lo_[i]))
          p[i] = lo_[i];
        else if (finite(hi_[i]))
          p[i] = hi_[i];
        else
          p[i] = 0.0;
      }
      return p;
    }
    case SetKind::Ball:
      return center_;
    case SetKind::Polytope:
      return witness_;
  }
  throw std::logic_error("any_point: unreachable");
}

const Vec& ConvexSet::lower() const {
  if (kind_ != SetKind::IntervalProduct)
    throw std::logic_error("lower: not an interval product");
  return lo_;
}
const Vec& ConvexSet::upper() const {
  if (kind_ != SetKind::IntervalProduct)
    throw std::logic_error("upper: not an interval product");
  return hi_;
}
const Vec& ConvexSet::center() const {
  if (kind_ != SetKind::Ball) throw std::logic_error("center: not a ball");
  return center_;
}
double ConvexSet::radius() const {
  if (kind_ != SetKind::Ball) throw std::logic_error("radius: not a ball");
  return radius_;
}
const Mat& ConvexSet::facet_normals() const {
  if (kind_ != SetKind::Polytope) throw std::logic_error("facet_normals: not a polytope");
  return A_;
}
const Vec& ConvexSet::facet_offsets() const {
  if (kind_ != SetKind::Polytope) throw std::logic_error("facet_offsets: not a polytope");
  return b_;
}

Box ConvexSet::normal_box(const Vec& x, double tol) const {
  if (kind_ != SetKind::IntervalProduct)
    throw std::logic_error("normal_box: interval products only");
  Box out{Vec::Zero(dim_), Vec::Zero(dim_)};
  for (int i = 0; i < dim_; ++i) {
    double scale = std::max({1.0, std::abs(x[i])});
    if (x[i] < lo_[i] - tol * scale || x[i] > hi_[i] + tol * scale)
      throw std::domain_error("normal_box: point outside the set");
    bool at_lo = finite(lo_[i]) && x[i] <= lo_[i] + tol * scale;
    bool at_hi = finite(hi_[i]) && x[i] >= hi_[i] - tol * scale;
    out.lo[i] = at_lo ? -kInf : 0.0;
    out.hi[i] = at_hi ? kInf : 0.0;
  }
  return out;
}

Vec ConvexSet::normal_sample(const Vec& x, std::mt19937_64& rng, double scale,
                             double tol) const {
  std::exponential_distribution<double> mag(1.0 / std::max(scale, 1e-12));
  switch (kind_) {
    case SetKind::IntervalProduct: {
      Box nb = normal_box(x, tol);
      Vec out = Vec::Zero(dim_);
      for (int i = 0; i < dim_; ++i) {
        if (nb.hi[i] > 0 && nb.lo[i] < 0)
          out[i] = (rng() & 1) ? mag(rng) : -mag(rng);
        else if (nb.hi[i] > 0)
          out[i] = mag(rng);
        else if (nb.lo[i] < 0)
          out[i] = -mag(rng);
      }
      return out;
    }
    case SetKind::Ball: {
      Vec d = x - center_;
      double n = d.norm();
      if (n > radius_ + tol) throw std::domain_error("normal_sample: point outside the set");
      if (radius_ - n > tol || radius_ == 0.0) return Vec::Zero(dim_);
      return (mag(rng) / n) * d;
    }
    case SetKind::Polytope: {
      if (!contains(x, tol)) throw std::domain_error("normal_sample: point outside the set");
      Vec out = Vec::Zero(dim_);
      for (int k = 0; k < A_.rows(); ++k)
        if (A_.row(k).dot(x) >= b_[k] - tol * std::max(1.0, std::abs(b_[k])))
          out += mag(rng) * A_.row(k).transpose();
      return out;
    }
  }
  throw std::logic_error("normal_sample: unreachable");
}

// Dual active-set projection (Lawson-Hanson shape on the dual of the
// projection QP). Finite at desk scale; stalls are reported, not hidden.
Vec ConvexSet::project_polytope(const Vec& y) const {
  const int m = static_cast<int>(A_.rows());
  const double scale = std::max({1.0, y.cwiseAbs().maxCoeff(), b_.cwiseAbs().maxCoeff()});
  const double tol = 1e-11 * scale;

  std::vector<int> active;
  Vec mu = Vec::Zero(m);
  Vec x = y;
  const int max_outer = 60 * (m + 1);

  auto solve_on = [&](const std::vector<int>& W) -> Vec {
    // least-norm multipliers on W: (A_W A_W^T) mu_W = A_W y - b_W
    const int k = static_cast<int>(W.size());
    Mat AW(k, dim_);
    Vec rhs(k);
    for (int i = 0; i < k; ++i) {
      AW.row(i) = A_.row(W[i]);
      rhs[i] = A_.row(W[i]).dot(y) - b_[W[i]];
    }
    Mat G = AW * AW.transpose();
    return G.completeOrthogonalDecomposition().solve(rhs);
  };

  for (int outer = 0; outer < max_outer; ++outer) {
    // primal point for current multipliers
    x = y;
    for (size_t i = 0; i < active.size(); ++i)
      x -= mu[active[i]] * A_.row(active[i]).transpose();

    // most violated constraint
    int worst = -1;
    double worst_v = tol;
    for (int k = 0; k < m; ++k) {
      double v = A_.row(k).dot(x) - b_[k];
      if (v > worst_v && std::find(active.begin(), active.end(), k) == active.end()) {
        worst_v = v;
        worst = k;
      }
    }
    if (worst < 0) return x;  // feasible and complementary: done

    active.push_back(worst);
    // inner loop: restore nonnegativity of multipliers on the working set
    for (int inner = 0; inner < max_outer; ++inner) {
      Vec mu_hat = solve_on(active);
      bool ok = true;
      for (int i = 0; i < mu_hat.size(); ++i)
        if (mu_hat[i] < -tol) ok = false;
      if (ok) {
        for (size_t i = 0; i < active.size(); ++i) mu[active[i]] = std::max(0.0, mu_hat[i]);
        break;
      }
      // Lawson-Hanson step toward mu_hat, dropping the first blocking index
      double theta = 1.0;
      int drop = -1;
      for (size_t i = 0; i < active.size(); ++i) {
        if (mu_hat[i] < -tol) {
          double cur = mu[active[i]];
          double t = cur / std::max(cur - mu_hat[i], 1e-300);
          if (t < theta) {
            theta = t;
            drop = static_cast<int>(i);
          }
        }
      }
      if (drop < 0) throw std::runtime_error("project: active-set stall");
      for (size_t i = 0; i < active.size(); ++i)
        mu[active[i]] = mu[active[i]] + theta * (mu_hat[i] - mu[active[i]]);
      mu[active[drop]] = 0.0;
      active.erase(active.begin() + drop);
      if (active.empty()) break;
    }
    if (mu.cwiseAbs().maxCoeff() > 1e14 * scale)
      throw std::runtime_error("project: dual blow-up (empty polytope?)");
  }
  throw std::runtime_error("project: active-set iteration cap exceeded");
}

std::vector<Vec> ConvexSet::vertices() const {
  if (kind_ != SetKind::Polytope) throw std::logic_error("vertices: not a polytope");
  const int m = static_cast<int>(A_.rows());
  const int n = dim_;
  std::vector<Vec> verts;
  std::vector<int> idx(n);
  const double scale = std::max(1.0, b_.cwiseAbs().maxCoeff());
  // enumerate n-subsets of facets; desk scale keeps this small
  std::vector<int> comb(n);
  for (int i = 0; i < n; ++i) comb[i] = i;
  auto next_comb = [&]() -> bool {
    int i = n - 1;
    while (i >= 0 && comb[i] == m - n + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int j = i + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };
  if (m < n) return verts;
  long count = 0;
  do {
    if (++count > 400000) throw std::runtime_error("vertices: enumeration budget exceeded");
    Mat S(n, n);
    Vec r(n);
    for (int i = 0; i < n; ++i) {
      S.row(i) = A_.row(comb[i]);
      r[i] = b_[comb[i]];
    }
    Eigen::FullPivLU<Mat> lu(S);
    if (lu.rank() < n) continue;
    Vec v = lu.solve(r);
    if (((A_ * v - b_).array() <= 1e-8 * scale).all()) {
      bool dup = false;
      for (const Vec& w : verts)
        if ((w - v).norm() <= 1e-8 * scale) { dup = true; break; }
      if (!dup) verts.push_back(v);
    }
  } while (next_comb());
  return verts;
}

double min_linear_over_box_ball(const Vec& xi, const Box& box, double M) {
  const int n = box.dim();
  if (xi.size() != n) throw std::invalid_argument("min_linear_over_box_ball: dim mismatch");
  // feasibility: closest point of the box to the origin must lie in the ball
  Vec nearest = box.min_norm();
  if (nearest.norm() > M + 1e-12 * std::max(1.0, M)) return kInf;

  // try the box-only minimizer first
  bool box_min_finite = true;
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    double pick = xi[i] > 0 ? box.lo[i] : (xi[i] < 0 ? box.hi[i] : 0.0);
    if (xi[i] == 0.0) pick = std::min(std::max(0.0, box.lo[i]), box.hi[i]);
    if (!std::isfinite(pick)) { box_min_finite = false; break; }
    v[i] = pick;
  }
  if (box_min_finite && v.norm() <= M) return xi.dot(v);

  // ball binds: v_i(mu) = clamp(-xi_i / (2 mu), box_i); ||v(mu)|| decreasing
  auto v_of = [&](double mu) {
    Vec out(n);
    for (int i = 0; i < n; ++i) {
      double u = -xi[i] / (2.0 * mu);
      out[i] = std::min(std::max(u, box.lo[i]), box.hi[i]);
    }
    return out;
  };
  double lo = 1e-300, hi = 1.0;
  while (v_of(hi).norm() > M && hi < 1e300) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (v_of(mid).norm() > M)
      lo = mid;
    else
      hi = mid;
  }
  return xi.dot(v_of(hi));
}

}  // namespace catchup
