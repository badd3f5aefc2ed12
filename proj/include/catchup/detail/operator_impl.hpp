#pragma once

#include "catchup/detail/geneq.hpp"
#include "catchup/operators.hpp"

namespace catchup::detail {

class OperatorImpl {
 public:
  virtual ~OperatorImpl() = default;
  virtual int dim() const = 0;
  virtual OpKind kind() const = 0;
  virtual Vec resolvent(double t, const Vec& s, double lambda, const Vec& y) const = 0;
  virtual Vec minimal_norm(double t, const Vec& s, const Vec& x) const = 0;
  virtual bool in_domain(double t, const Vec& s, const Vec& x, double tol) const = 0;
  virtual std::optional<Box> image_box(double t, const Vec& s, const Vec& x) const = 0;
  virtual Vec sample_image(double t, const Vec& s, const Vec& x, std::mt19937_64& rng,
                           double scale) const = 0;
  // exact scalar decomposition of the realized operator, if one exists
  virtual bool scalar_units(double t, const Vec& s, std::vector<ScalarUnit>& out) const {
    (void)t;
    (void)s;
    (void)out;
    return false;
  }
};

}  // namespace catchup::detail
