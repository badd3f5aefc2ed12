#pragma once

#include <Eigen/Dense>

#include <limits>
#include <memory>
#include <random>
#include <vector>

namespace catchup {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Coordinate box with +-inf endpoints allowed. Used both as a set description
// and as the exact image description of coordinatewise set-valued maps.
struct Box {
  Vec lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool bounded() const;
  bool contains(const Vec& x, double tol) const;
  Vec clamp(const Vec& x) const;
  // min-norm element; throws std::invalid_argument if empty (lo > hi somewhere)
  Vec min_norm() const;
};

enum class SetKind { IntervalProduct, Ball, Polytope };

// Closed convex set with exact projection and support queries.
// Interval products may be unbounded; balls and polytopes are finite-data.
// Polytopes are restricted to desk scale (dim <= 8, facets <= 32) and are
// feasibility-checked at construction.
class ConvexSet {
 public:
  static ConvexSet interval_product(Vec lo, Vec hi);
  static ConvexSet interval(double lo, double hi);  // 1-D convenience
  static ConvexSet ball(Vec center, double radius);
  // {x : A x <= b}, one row per facet
  static ConvexSet polytope(Mat A, Vec b);

  int dim() const { return dim_; }
  SetKind kind() const { return kind_; }
  bool bounded() const;

  Vec project(const Vec& y) const;
  double distance(const Vec& y) const;
  bool contains(const Vec& y, double tol = 1e-8) const;
  // sup_{x in K} <d, x>; may be +inf for unbounded sets
  double support(const Vec& d) const;
  // a point of the set (feasibility witness for polytopes)
  Vec any_point() const;

  // interval accessors (IntervalProduct only)
  const Vec& lower() const;
  const Vec& upper() const;
  // ball accessors
  const Vec& center() const;
  double radius() const;
  // polytope accessors
  const Mat& facet_normals() const;
  const Vec& facet_offsets() const;

  // Exact normal cone N(K, x) as a coordinate box. IntervalProduct only;
  // throws std::domain_error if x is outside K beyond tol.
  Box normal_box(const Vec& x, double tol = 1e-9) const;
  // A sample element of N(K, x) for any kind (0 at interior points); `scale`
  // controls the magnitude distribution of ray samples.
  Vec normal_sample(const Vec& x, std::mt19937_64& rng, double scale = 1.0,
                    double tol = 1e-9) const;

  // All vertices of a bounded polytope (active-set enumeration, desk scale).
  std::vector<Vec> vertices() const;

 private:
  ConvexSet() = default;

  SetKind kind_ = SetKind::IntervalProduct;
  int dim_ = 0;
  Vec lo_, hi_;      // interval
  Vec center_;       // ball
  double radius_ = 0;
  Mat A_;            // polytope
  Vec b_;
  Vec witness_;      // cached feasible point (polytope)

  Vec project_polytope(const Vec& y) const;
};

// min <xi, v> over (box intersect M-ball); exact up to bisection precision.
// Returns +inf if the intersection is empty. Entries of the box may be +-inf.
double min_linear_over_box_ball(const Vec& xi, const Box& box, double M);

}  // namespace catchup
