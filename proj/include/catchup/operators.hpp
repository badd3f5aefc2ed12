#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "catchup/convex_set.hpp"

namespace catchup {

// A point of (or near) the graph of an operator: image in A(base).
struct GraphPoint {
  Vec base, image;
};

// Declared growth/drift constants of a state-dependent family A_{t,s}:
//   ||A^0_{t,s}(x)|| <= c_A (1 + ||x||)      on the domain
//   dis(A_{t,s}, A_{r,q}) <= L1 |t - r| + L2 ||s - q||,  L2 in [0, 1)
struct OperatorConstants {
  double c_A = 0.0;
  double L1 = 0.0;
  double L2 = 0.0;
};

enum class OpKind { NormalCone, SignRelay, LinearPsd, Shifted, DirectSum, LureComposed };

// Thrown when an (iterative) resolvent evaluation cannot produce a point
// within tolerance, e.g. an infeasible advanced set or a stalled inner solve.
class ResolventError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
class OperatorImpl;
struct ScalarUnit;
}  // namespace detail

// Handle to a state-dependent maximal monotone family A_{t,s}. All evaluation
// ops take the family index (t, state) explicitly; the handle itself is
// immutable and safe to share across threads.
class OperatorHandle {
 public:
  OperatorHandle() = default;

  int dim() const;
  OpKind kind() const;
  const OperatorConstants& constants() const { return constants_; }
  OperatorHandle with_constants(OperatorConstants c) const;

  // J_lambda(y) = (I + lambda A_{t,state})^{-1}(y); single-valued and
  // nonexpansive. lambda > 0.
  Vec resolvent(double t, const Vec& state, double lambda, const Vec& y) const;
  // Yosida approximation (y - J_lambda y) / lambda.
  Vec yosida(double t, const Vec& state, double lambda, const Vec& y) const;
  // Least-norm selection A^0_{t,state}(x); throws std::domain_error off-domain.
  Vec minimal_norm(double t, const Vec& state, const Vec& x) const;
  bool in_domain(double t, const Vec& state, const Vec& x, double tol = 1e-8) const;
  // Exact image A_{t,state}(x) as a coordinate box, when representable.
  std::optional<Box> image_box(double t, const Vec& state, const Vec& x) const;
  // Some element of A_{t,state}(x); randomized where the image is a set.
  Vec sample_image(double t, const Vec& state, const Vec& x, std::mt19937_64& rng,
                   double scale = 1.0) const;
  // || pt.base - J_mu(pt.base + mu pt.image) ||; zero iff pt lies on the graph.
  double graph_residual(double t, const Vec& state, const GraphPoint& pt,
                        double mu = 1.0) const;

  const detail::OperatorImpl* impl() const { return impl_.get(); }
  explicit operator bool() const { return static_cast<bool>(impl_); }

  explicit OperatorHandle(std::shared_ptr<const detail::OperatorImpl> impl,
                          OperatorConstants c = {})
      : impl_(std::move(impl)), constants_(c) {}

 private:
  std::shared_ptr<const detail::OperatorImpl> impl_;
  OperatorConstants constants_{};
};

using SetMap = std::function<ConvexSet(double t, const Vec& state)>;

// A_{t,s} = N_{C(t,s)}: resolvent is the projection onto the advanced set.
OperatorHandle normal_cone(int dim, SetMap set_map, OperatorConstants c = {});
OperatorHandle normal_cone(ConvexSet fixed_set, OperatorConstants c = {});

// Componentwise gamma * Sign(x_i) on masked coordinates (empty mask = all).
// Resolvent is the soft threshold with knee lambda * gamma.
OperatorHandle sign_relay(int dim, double gamma, std::vector<int> mask = {});

// A(x) = M x with M + M^T positive semidefinite.
OperatorHandle linear_psd(Mat M);
OperatorHandle zero_operator(int dim);

// A_{t,s}(y) = base_{t,s}(y + alpha s), alpha > -1. Resolvent by argument
// shift: J(y) = J_base(y + alpha s) - alpha s.
OperatorHandle shift_operator(OperatorHandle base, double alpha);

// Blockwise direct sum; both the argument and the state parameter are split
// by the same coordinate blocks (diagonal structure).
OperatorHandle direct_sum(std::vector<OperatorHandle> blocks);

// A_{t,s}(x) = C^T (F^{-1}_{t,s} + D)^{-1} (C x) with D monotone. The state
// parameter is forwarded to F unchanged. C = I, D = 0 simplifies to F itself
// at construction. Resolvent solves z in F(C y - (D + lambda C C^T) z) and
// returns y - lambda C^T z.
OperatorHandle lure_composed(OperatorHandle F, Mat C, Mat D);

}  // namespace catchup
