#include "catchup/operators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>

#include "catchup/detail/geneq.hpp"
#include "catchup/detail/operator_impl.hpp"

namespace catchup {
namespace detail {
namespace {

double soft_threshold(double y, double knee) {
  if (y > knee) return y - knee;
  if (y < -knee) return y + knee;
  return 0.0;
}

class NormalConeImpl final : public OperatorImpl {
 public:
  NormalConeImpl(int dim, SetMap map) : dim_(dim), map_(std::move(map)) {}

  int dim() const override { return dim_; }
  OpKind kind() const override { return OpKind::NormalCone; }

  Vec resolvent(double t, const Vec& s, double, const Vec& y) const override {
    return map_(t, s).project(y);
  }
  Vec minimal_norm(double t, const Vec& s, const Vec& x) const override {
    if (!map_(t, s).contains(x, 1e-8))
      throw std::domain_error("minimal_norm: point outside the cone domain");
    return Vec::Zero(dim_);
  }
  bool in_domain(double t, const Vec& s, const Vec& x, double tol) const override {
    return map_(t, s).contains(x, tol);
  }
  std::optional<Box> image_box(double t, const Vec& s, const Vec& x) const override {
    ConvexSet set = map_(t, s);
    if (set.kind() == SetKind::IntervalProduct) return set.normal_box(x);
    // {0} at strict interior points of ball/polytope domains
    if (set.kind() == SetKind::Ball) {
      if ((x - set.center()).norm() < set.radius() - 1e-9)
        return Box{Vec::Zero(dim_), Vec::Zero(dim_)};
      return std::nullopt;
    }
    const Mat& A = set.facet_normals();
    const Vec& b = set.facet_offsets();
    if (((A * x - b).array() < -1e-9).all())
      return Box{Vec::Zero(dim_), Vec::Zero(dim_)};
    return std::nullopt;
  }
  Vec sample_image(double t, const Vec& s, const Vec& x, std::mt19937_64& rng,
                   double scale) const override {
    return map_(t, s).normal_sample(x, rng, scale);
  }
  bool scalar_units(double t, const Vec& s, std::vector<ScalarUnit>& out) const override {
    ConvexSet set = map_(t, s);
    if (set.kind() != SetKind::IntervalProduct) return false;
    for (int i = 0; i < dim_; ++i) {
      ScalarUnit u;
      u.type = ScalarUnit::Type::Cone;
      u.a = set.lower()[i];
      u.b = set.upper()[i];
      out.push_back(u);
    }
    return true;
  }

 private:
  int dim_;
  SetMap map_;
};

class SignRelayImpl final : public OperatorImpl {
 public:
  SignRelayImpl(int dim, double gamma, std::vector<int> mask)
      : dim_(dim), gamma_(gamma), masked_(dim, 1) {
    if (!mask.empty()) {
      masked_.assign(dim, 0);
      for (int i : mask) {
        if (i < 0 || i >= dim) throw std::invalid_argument("sign_relay: mask index out of range");
        masked_[i] = 1;
      }
    }
  }

  int dim() const override { return dim_; }
  OpKind kind() const override { return OpKind::SignRelay; }

  Vec resolvent(double, const Vec&, double lambda, const Vec& y) const override {
    Vec out(dim_);
    for (int i = 0; i < dim_; ++i)
      out[i] = masked_[i] ? soft_threshold(y[i], lambda * gamma_) : y[i];
    return out;
  }
  Vec minimal_norm(double, const Vec&, const Vec& x) const override {
    Vec out = Vec::Zero(dim_);
    for (int i = 0; i < dim_; ++i)
      if (masked_[i] && x[i] != 0.0) out[i] = x[i] > 0 ? gamma_ : -gamma_;
    return out;
  }
  bool in_domain(double, const Vec&, const Vec&, double) const override { return true; }
  std::optional<Box> image_box(double, const Vec&, const Vec& x) const override {
    Box out{Vec::Zero(dim_), Vec::Zero(dim_)};
    for (int i = 0; i < dim_; ++i) {
      if (!masked_[i]) continue;
      if (x[i] > 0.0)
        out.lo[i] = out.hi[i] = gamma_;
      else if (x[i] < 0.0)
        out.lo[i] = out.hi[i] = -gamma_;
      else {
        out.lo[i] = -gamma_;
        out.hi[i] = gamma_;
      }
    }
    return out;
  }
  Vec sample_image(double, const Vec&, const Vec& x, std::mt19937_64& rng,
                   double) const override {
    std::uniform_real_distribution<double> unif(-gamma_, gamma_);
    Vec out = Vec::Zero(dim_);
    for (int i = 0; i < dim_; ++i) {
      if (!masked_[i]) continue;
      out[i] = x[i] == 0.0 ? unif(rng) : (x[i] > 0 ? gamma_ : -gamma_);
    }
    return out;
  }
  bool scalar_units(double, const Vec&, std::vector<ScalarUnit>& out) const override {
    for (int i = 0; i < dim_; ++i) {
      ScalarUnit u;
      if (masked_[i]) {
        u.type = ScalarUnit::Type::Relay;
        u.gamma = gamma_;
      } else {
        u.type = ScalarUnit::Type::Zero;
      }
      out.push_back(u);
    }
    return true;
  }

 private:
  int dim_;
  double gamma_;
  std::vector<int> masked_;
};

class LinearPsdImpl final : public OperatorImpl {
 public:
  explicit LinearPsdImpl(Mat M) : M_(std::move(M)) {}

  int dim() const override { return static_cast<int>(M_.rows()); }
  OpKind kind() const override { return OpKind::LinearPsd; }

  Vec resolvent(double, const Vec&, double lambda, const Vec& y) const override {
    if (M_.isZero(0.0)) return y;
    Mat K = Mat::Identity(dim(), dim()) + lambda * M_;
    return K.partialPivLu().solve(y);
  }
  Vec minimal_norm(double, const Vec&, const Vec& x) const override { return M_ * x; }
  bool in_domain(double, const Vec&, const Vec&, double) const override { return true; }
  std::optional<Box> image_box(double, const Vec&, const Vec& x) const override {
    Vec v = M_ * x;
    return Box{v, v};
  }
  Vec sample_image(double, const Vec&, const Vec& x, std::mt19937_64&, double) const override {
    return M_ * x;
  }
  bool scalar_units(double, const Vec&, std::vector<ScalarUnit>& out) const override {
    double scale = std::max(1.0, M_.cwiseAbs().maxCoeff());
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j)
        if (i != j && std::abs(M_(i, j)) > 1e-14 * scale) return false;
    for (int i = 0; i < dim(); ++i) {
      ScalarUnit u;
      u.type = ScalarUnit::Type::Linear;
      u.q = M_(i, i);
      out.push_back(u);
    }
    return true;
  }

 private:
  Mat M_;
};

class ShiftedImpl final : public OperatorImpl {
 public:
  ShiftedImpl(OperatorHandle base, double alpha) : base_(std::move(base)), alpha_(alpha) {}

  int dim() const override { return base_.dim(); }
  OpKind kind() const override { return OpKind::Shifted; }

  Vec shifted(const Vec& s, const Vec& v) const {
    if (s.size() != v.size())
      throw std::invalid_argument("shift_operator: state dimension must match argument");
    return v + alpha_ * s;
  }

  Vec resolvent(double t, const Vec& s, double lambda, const Vec& y) const override {
    return base_.resolvent(t, s, lambda, shifted(s, y)) - alpha_ * s;
  }
  Vec minimal_norm(double t, const Vec& s, const Vec& x) const override {
    return base_.minimal_norm(t, s, shifted(s, x));
  }
  bool in_domain(double t, const Vec& s, const Vec& x, double tol) const override {
    return base_.in_domain(t, s, shifted(s, x), tol);
  }
  std::optional<Box> image_box(double t, const Vec& s, const Vec& x) const override {
    return base_.image_box(t, s, shifted(s, x));
  }
  Vec sample_image(double t, const Vec& s, const Vec& x, std::mt19937_64& rng,
                   double scale) const override {
    return base_.sample_image(t, s, shifted(s, x), rng, scale);
  }

 private:
  OperatorHandle base_;
  double alpha_;
};

class DirectSumImpl final : public OperatorImpl {
 public:
  explicit DirectSumImpl(std::vector<OperatorHandle> blocks) : blocks_(std::move(blocks)) {
    offsets_.push_back(0);
    for (const auto& b : blocks_) offsets_.push_back(offsets_.back() + b.dim());
  }

  int dim() const override { return offsets_.back(); }
  OpKind kind() const override { return OpKind::DirectSum; }

  template <class Fn>
  Vec blockwise(const Vec& s, const Vec& v, Fn&& fn) const {
    if (s.size() != dim())
      throw std::invalid_argument("direct_sum: state dimension must match operator");
    Vec out(dim());
    for (size_t k = 0; k < blocks_.size(); ++k) {
      int off = offsets_[k], len = blocks_[k].dim();
      out.segment(off, len) = fn(blocks_[k], s.segment(off, len), v.segment(off, len));
    }
    return out;
  }

  Vec resolvent(double t, const Vec& s, double lambda, const Vec& y) const override {
    return blockwise(s, y, [&](const OperatorHandle& b, const Vec& sb, const Vec& yb) {
      return b.resolvent(t, sb, lambda, yb);
    });
  }
  Vec minimal_norm(double t, const Vec& s, const Vec& x) const override {
    return blockwise(s, x, [&](const OperatorHandle& b, const Vec& sb, const Vec& xb) {
      return b.minimal_norm(t, sb, xb);
    });
  }
  bool in_domain(double t, const Vec& s, const Vec& x, double tol) const override {
    if (s.size() != dim()) return false;
    for (size_t k = 0; k < blocks_.size(); ++k) {
      int off = offsets_[k], len = blocks_[k].dim();
      if (!blocks_[k].in_domain(t, s.segment(off, len), x.segment(off, len), tol))
        return false;
    }
    return true;
  }
  std::optional<Box> image_box(double t, const Vec& s, const Vec& x) const override {
    Box out{Vec(dim()), Vec(dim())};
    for (size_t k = 0; k < blocks_.size(); ++k) {
      int off = offsets_[k], len = blocks_[k].dim();
      auto bb = blocks_[k].image_box(t, s.segment(off, len), x.segment(off, len));
      if (!bb) return std::nullopt;
      out.lo.segment(off, len) = bb->lo;
      out.hi.segment(off, len) = bb->hi;
    }
    return out;
  }
  Vec sample_image(double t, const Vec& s, const Vec& x, std::mt19937_64& rng,
                   double scale) const override {
    return blockwise(s, x, [&](const OperatorHandle& b, const Vec& sb, const Vec& xb) {
      return b.sample_image(t, sb, xb, rng, scale);
    });
  }
  bool scalar_units(double t, const Vec& s, std::vector<ScalarUnit>& out) const override {
    if (s.size() != dim()) return false;
    for (size_t k = 0; k < blocks_.size(); ++k) {
      int off = offsets_[k], len = blocks_[k].dim();
      if (!blocks_[k].impl()->scalar_units(t, s.segment(off, len), out)) return false;
      (void)len;
    }
    return true;
  }

 private:
  std::vector<OperatorHandle> blocks_;
  std::vector<int> offsets_;
};

class LureComposedImpl final : public OperatorImpl {
 public:
  LureComposedImpl(OperatorHandle F, Mat C, Mat D)
      : F_(std::move(F)), C_(std::move(C)), D_(std::move(D)), Ct_(C_.transpose()) {
    S_ = D_ + D_.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> es(S_);
    s_max_ = es.eigenvalues().maxCoeff();
    s_min_ = es.eigenvalues().minCoeff();
  }

  int dim() const override { return static_cast<int>(C_.cols()); }
  OpKind kind() const override { return OpKind::LureComposed; }

  GenEqResult solve(double t, const Vec& s, const Vec& u, const Mat& D, bool minimal,
                    int max_iter = 5000) const {
    GenEqOptions opt;
    opt.tol = 1e-12;
    opt.max_iter = max_iter;
    return solve_generalized(F_, t, s, u, D, minimal, opt);
  }

  Vec resolvent(double t, const Vec& s, double lambda, const Vec& y) const override {
    Mat Dt = D_ + lambda * (C_ * Ct_);
    GenEqResult r = solve(t, s, C_ * y, Dt, false);
    if (!r.converged)
      throw ResolventError("lure resolvent: inner solve stalled (residual " +
                           std::to_string(r.residual) + ")");
    return y - lambda * (Ct_ * r.z);
  }
  Vec minimal_norm(double t, const Vec& s, const Vec& x) const override {
    GenEqResult r = solve(t, s, C_ * x, D_, true);
    if (!r.converged)
      throw std::domain_error("minimal_norm: composed operator has no value here");
    return Ct_ * r.z;
  }
  bool in_domain(double t, const Vec& s, const Vec& x, double) const override {
    try {
      return solve(t, s, C_ * x, D_, false).converged;
    } catch (const std::exception&) {
      return false;
    }
  }
  std::optional<Box> image_box(double t, const Vec& s, const Vec& x) const override {
    // the image is a singleton when D + D^T is positive definite
    if (s_min_ <= 1e-10 * std::max(1.0, s_max_)) return std::nullopt;
    GenEqResult r = solve(t, s, C_ * x, D_, false);
    if (!r.converged) return std::nullopt;
    Vec v = Ct_ * r.z;
    return Box{v, v};
  }
  Vec sample_image(double t, const Vec& s, const Vec& x, std::mt19937_64&,
                   double) const override {
    return minimal_norm(t, s, x);
  }

  const OperatorHandle& inner() const { return F_; }
  const Mat& C() const { return C_; }
  const Mat& D() const { return D_; }

 private:
  OperatorHandle F_;
  Mat C_, D_, Ct_, S_;
  double s_max_ = 0, s_min_ = 0;
};

}  // namespace
}  // namespace detail

int OperatorHandle::dim() const { return impl_->dim(); }
OpKind OperatorHandle::kind() const { return impl_->kind(); }

OperatorHandle OperatorHandle::with_constants(OperatorConstants c) const {
  return OperatorHandle(impl_, c);
}

Vec OperatorHandle::resolvent(double t, const Vec& state, double lambda, const Vec& y) const {
  if (!(lambda > 0)) throw std::invalid_argument("resolvent: lambda must be positive");
  if (y.size() != dim()) throw std::invalid_argument("resolvent: dimension mismatch");
  try {
    return impl_->resolvent(t, state, lambda, y);
  } catch (const ResolventError&) {
    throw;
  } catch (const std::exception& e) {
    throw ResolventError(e.what());
  }
}

Vec OperatorHandle::yosida(double t, const Vec& state, double lambda, const Vec& y) const {
  return (y - resolvent(t, state, lambda, y)) / lambda;
}

Vec OperatorHandle::minimal_norm(double t, const Vec& state, const Vec& x) const {
  if (x.size() != dim()) throw std::invalid_argument("minimal_norm: dimension mismatch");
  return impl_->minimal_norm(t, state, x);
}

bool OperatorHandle::in_domain(double t, const Vec& state, const Vec& x, double tol) const {
  if (x.size() != dim()) return false;
  return impl_->in_domain(t, state, x, tol);
}

std::optional<Box> OperatorHandle::image_box(double t, const Vec& state, const Vec& x) const {
  return impl_->image_box(t, state, x);
}

Vec OperatorHandle::sample_image(double t, const Vec& state, const Vec& x,
                                 std::mt19937_64& rng, double scale) const {
  return impl_->sample_image(t, state, x, rng, scale);
}

double OperatorHandle::graph_residual(double t, const Vec& state, const GraphPoint& pt,
                                      double mu) const {
  if (!(mu > 0)) throw std::invalid_argument("graph_residual: mu must be positive");
  Vec probe = pt.base + mu * pt.image;
  return (pt.base - resolvent(t, state, mu, probe)).norm();
}

OperatorHandle normal_cone(int dim, SetMap set_map, OperatorConstants c) {
  if (dim < 1) throw std::invalid_argument("normal_cone: dim must be positive");
  if (!set_map) throw std::invalid_argument("normal_cone: null set map");
  return OperatorHandle(std::make_shared<detail::NormalConeImpl>(dim, std::move(set_map)), c);
}

OperatorHandle normal_cone(ConvexSet fixed_set, OperatorConstants c) {
  int d = fixed_set.dim();
  auto set = std::make_shared<ConvexSet>(std::move(fixed_set));
  return normal_cone(d, [set](double, const Vec&) { return *set; }, c);
}

OperatorHandle sign_relay(int dim, double gamma, std::vector<int> mask) {
  if (dim < 1) throw std::invalid_argument("sign_relay: dim must be positive");
  if (!(gamma > 0)) throw std::invalid_argument("sign_relay: gamma must be positive");
  return OperatorHandle(std::make_shared<detail::SignRelayImpl>(dim, gamma, std::move(mask)));
}

OperatorHandle linear_psd(Mat M) {
  if (M.rows() != M.cols() || M.rows() < 1)
    throw std::invalid_argument("linear_psd: square matrix required");
  Mat S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw std::invalid_argument("linear_psd: M + M^T must be positive semidefinite");
  return OperatorHandle(std::make_shared<detail::LinearPsdImpl>(std::move(M)));
}

OperatorHandle zero_operator(int dim) { return linear_psd(Mat::Zero(dim, dim)); }

OperatorHandle shift_operator(OperatorHandle base, double alpha) {
  if (!base) throw std::invalid_argument("shift_operator: null base");
  if (!(alpha > -1.0)) throw std::invalid_argument("shift_operator: alpha must exceed -1");
  return OperatorHandle(std::make_shared<detail::ShiftedImpl>(std::move(base), alpha));
}

OperatorHandle direct_sum(std::vector<OperatorHandle> blocks) {
  if (blocks.empty()) throw std::invalid_argument("direct_sum: no blocks");
  for (const auto& b : blocks)
    if (!b) throw std::invalid_argument("direct_sum: null block");
  return OperatorHandle(std::make_shared<detail::DirectSumImpl>(std::move(blocks)));
}

OperatorHandle lure_composed(OperatorHandle F, Mat C, Mat D) {
  if (!F) throw std::invalid_argument("lure_composed: null inner operator");
  const int m = static_cast<int>(C.rows());
  if (F.dim() != m) throw std::invalid_argument("lure_composed: F dimension must match C rows");
  if (D.rows() != m || D.cols() != m)
    throw std::invalid_argument("lure_composed: D must be m x m");
  Mat S = D + D.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw std::invalid_argument("lure_composed: D must be monotone (D + D^T psd)");
  // C = I, D = 0: C^T (F^{-1} + 0)^{-1} C = F; keep the inner operator as is
  if (C.rows() == C.cols() && C.isIdentity(0.0) && D.isZero(0.0)) return F;
  return OperatorHandle(
      std::make_shared<detail::LureComposedImpl>(std::move(F), std::move(C), std::move(D)));
}

}  // namespace catchup
