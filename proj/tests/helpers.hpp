#pragma once

#include <random>

#include "catchup/convex_set.hpp"

namespace test_util {

inline catchup::Vec vec1(double a) {
  catchup::Vec v(1);
  v << a;
  return v;
}

inline catchup::Vec vec2(double a, double b) {
  catchup::Vec v(2);
  v << a, b;
  return v;
}

inline catchup::Vec vec3(double a, double b, double c) {
  catchup::Vec v(3);
  v << a, b, c;
  return v;
}

inline catchup::Vec uniform_vec(int dim, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  catchup::Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = u(rng);
  return v;
}

}  // namespace test_util
