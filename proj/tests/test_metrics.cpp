#include <doctest.h>

#include <cmath>
#include <random>

#include "catchup/metrics.hpp"
#include "helpers.hpp"

using namespace catchup;
using test_util::uniform_vec;
using test_util::vec1;
using test_util::vec2;
using test_util::vec3;

namespace {

// Independent Hausdorff oracle for bounded 2-D sets by dense mutual scans.
double grid_hausdorff(const ConvexSet& s1, const ConvexSet& s2, double lo, double hi,
                      int n) {
  const double step = (hi - lo) / n;
  double d12 = 0, d21 = 0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Vec p = vec2(lo + i * step, lo + j * step);
      if (s1.contains(p, 1e-9)) d12 = std::max(d12, s2.distance(p));
      if (s2.contains(p, 1e-9)) d21 = std::max(d21, s1.distance(p));
    }
  return std::max(d12, d21);
}

OperatorHandle interval_cone(double lo, double hi) {
  return normal_cone(ConvexSet::interval(lo, hi));
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("hausdorff frozen values") {
    CHECK(hausdorff(ConvexSet::interval(0, 1), ConvexSet::interval(0.5, 2)) ==
          doctest::Approx(1.0));
    CHECK(hausdorff(ConvexSet::interval(0, 1), ConvexSet::interval(0, 1)) ==
          doctest::Approx(0.0));
    CHECK(hausdorff(ConvexSet::ball(vec2(0, 0), 1.0), ConvexSet::ball(vec2(1, 0), 1.0)) ==
          doctest::Approx(1.0));
    CHECK(hausdorff(ConvexSet::ball(vec2(0, 0), 1.0), ConvexSet::ball(vec2(0, 0), 3.0)) ==
          doctest::Approx(2.0));
    // shifted unit squares: componentwise displacement, sup-norm geometry
    const auto sq1 = ConvexSet::interval_product(vec2(0, 0), vec2(1, 1));
    const auto sq2 = ConvexSet::interval_product(vec2(1, 0), vec2(2, 1));
    CHECK(hausdorff(sq1, sq2) == doctest::Approx(1.0));
  }

  TEST_CASE("hausdorff agrees with the grid oracle on random boxes") {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 12; ++k) {
      Vec lo1 = uniform_vec(2, rng, -1.5, 0.5);
      Vec hi1 = lo1 + uniform_vec(2, rng, 0.3, 1.8).cwiseAbs();
      Vec lo2 = uniform_vec(2, rng, -1.5, 0.5);
      Vec hi2 = lo2 + uniform_vec(2, rng, 0.3, 1.8).cwiseAbs();
      const auto s1 = ConvexSet::interval_product(lo1, hi1);
      const auto s2 = ConvexSet::interval_product(lo2, hi2);
      const double exact = hausdorff(s1, s2);
      const double grid = grid_hausdorff(s1, s2, -2.5, 3.0, 500);
      CHECK(exact == doctest::Approx(grid).epsilon(0.03));
      CHECK(exact >= grid - 1e-9);  // grid scan can only undershoot
    }
  }

  TEST_CASE("hausdorff covers bounded interval-polytope pairs") {
    Mat A(3, 2);
    A << 1, 1, -1, 0, 0, -1;
    const auto tri = ConvexSet::polytope(A, vec3(1, 0, 0));
    const auto sq = ConvexSet::interval_product(vec2(0, 0), vec2(1, 1));
    // farthest square point from the triangle is (1,1): distance sqrt(2)/2
    CHECK(hausdorff(sq, tri) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-9));
    CHECK(hausdorff(tri, sq) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-9));
    CHECK(hausdorff(sq, tri) == doctest::Approx(grid_hausdorff(sq, tri, -0.5, 1.5, 600))
                                    .epsilon(0.02));
  }

  TEST_CASE("hausdorff rejects mismatched recession directions") {
    const auto bounded = ConvexSet::interval(0, 1);
    const auto ray = ConvexSet::interval_product(vec1(0), vec1(kInf));
    CHECK_THROWS_AS(hausdorff(bounded, ray), std::invalid_argument);
    // matching unbounded directions are fine: offset rays
    const auto ray2 = ConvexSet::interval_product(vec1(2), vec1(kInf));
    CHECK(hausdorff(ray, ray2) == doctest::Approx(2.0));
    // bounded interval vs polytope is supported, unbounded interval is not
    Mat A(3, 2);
    A << 1, 1, -1, 0, 0, -1;
    const auto tri = ConvexSet::polytope(A, vec3(1, 0, 0));
    const auto halfplane = ConvexSet::interval_product(vec2(0, 0), vec2(kInf, 1));
    CHECK_THROWS_AS(hausdorff(halfplane, tri), std::invalid_argument);
  }

  TEST_CASE("resolvent gap bound frozen value") {
    CHECK(resolvent_gap_bound(0.1, 1.0, 2.0, 0.5) == doctest::Approx(1.275));
    CHECK(resolvent_gap_bound(0.0, 1.0, 7.0, 0.0) == doctest::Approx(0.0));
    // monotone in every argument
    CHECK(resolvent_gap_bound(0.2, 1.0, 2.0, 0.5) > 1.275);
    CHECK(resolvent_gap_bound(0.1, 1.0, 2.5, 0.5) > 1.275);
    CHECK(resolvent_gap_bound(0.1, 1.0, 2.0, 0.6) > 1.275);
  }

  TEST_CASE("resolvent gap bound dominates interval-cone resolvent gaps") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> ul(0.01, 1.0);
    for (int k = 0; k < 400; ++k) {
      const double a1 = std::uniform_real_distribution<double>(-2, 0)(rng);
      const double b1 = a1 + ul(rng) * 3;
      const double a2 = std::uniform_real_distribution<double>(-2, 0)(rng);
      const double b2 = a2 + ul(rng) * 3;
      const auto c1 = ConvexSet::interval(a1, b1);
      const auto c2 = ConvexSet::interval(a2, b2);
      const auto op2 = normal_cone(c2);
      const double dis = hausdorff(c1, c2);
      const double lambda = ul(rng);
      for (double delta : {0.5, 1.0, 2.0}) {
        // x in C1: minimal selection of N_{C1} vanishes, f0norm = 0
        const double x = a1 + (b1 - a1) * ul(rng);
        const double gap = std::abs(x - op2.resolvent(0, vec1(0), lambda, vec1(x))[0]);
        CHECK(gap <= resolvent_gap_bound(lambda, delta, 0.0, dis) + 1e-9);
      }
    }
  }

  TEST_CASE("dis estimate vanishes for identical operators") {
    const auto op = interval_cone(-1, 2);
    const auto est = dis_estimate(op, 0, vec1(0), op, 0, vec1(0), 4000);
    CHECK(est.lower_bound == doctest::Approx(0.0));
    CHECK(est.samples_used > 0);
  }

  TEST_CASE("dis estimate is deterministic and nondecreasing in the budget") {
    const auto op1 = interval_cone(0, 1);
    const auto op2 = interval_cone(0.5, 2);
    DisParams params;
    params.box_lo = vec1(-4);
    params.box_hi = vec1(4);
    const auto a = dis_estimate(op1, 0, vec1(0), op2, 0, vec1(0), 2000, params);
    const auto a2 = dis_estimate(op1, 0, vec1(0), op2, 0, vec1(0), 2000, params);
    CHECK(a.lower_bound == a2.lower_bound);  // determinism, bitwise
    const auto b = dis_estimate(op1, 0, vec1(0), op2, 0, vec1(0), 8000, params);
    const auto c = dis_estimate(op1, 0, vec1(0), op2, 0, vec1(0), 32000, params);
    CHECK(a.lower_bound <= b.lower_bound);
    CHECK(b.lower_bound <= c.lower_bound);
  }

  TEST_CASE("dis estimate brackets the hausdorff distance on interval cones") {
    const auto op1 = interval_cone(0, 1);
    const auto op2 = interval_cone(0.5, 2);
    const double dh = hausdorff(ConvexSet::interval(0, 1), ConvexSet::interval(0.5, 2));
    REQUIRE(dh == doctest::Approx(1.0));
    const auto est = dis_estimate(op1, 0, vec1(0), op2, 0, vec1(0), 100000);
    CHECK(est.lower_bound >= 0.9 * dh);
    CHECK(est.lower_bound <= dh + 1e-9);
    // witnesses lie on the respective graphs
    CHECK(op1.graph_residual(0, vec1(0), est.witness1, 1.0) <= 1e-8);
    CHECK(op2.graph_residual(0, vec1(0), est.witness2, 1.0) <= 1e-8);
  }

  TEST_CASE("dis estimate respects the hausdorff bound on random interval pairs") {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 6; ++k) {
      const double a1 = std::uniform_real_distribution<double>(-2, 0)(rng);
      const double b1 = a1 + std::uniform_real_distribution<double>(0.5, 2.5)(rng);
      const double a2 = std::uniform_real_distribution<double>(-2, 0)(rng);
      const double b2 = a2 + std::uniform_real_distribution<double>(0.5, 2.5)(rng);
      const double dh = hausdorff(ConvexSet::interval(a1, b1), ConvexSet::interval(a2, b2));
      const auto est = dis_estimate(interval_cone(a1, b1), 0, vec1(0),
                                    interval_cone(a2, b2), 0, vec1(0), 30000);
      CHECK(est.lower_bound <= dh + 1e-9);
      CHECK(est.lower_bound >= 0.8 * dh);  // looser floor at reduced budget
    }
  }

  TEST_CASE("dis estimate sees time drift through the state slot only when present") {
    // moving set [s, s + 1] indexed by the scalar state
    auto moving = normal_cone(1, [](double, const Vec& s) {
      return ConvexSet::interval(s[0], s[0] + 1.0);
    });
    const auto same = dis_estimate(moving, 0, vec1(0.3), moving, 0, vec1(0.3), 4000);
    CHECK(same.lower_bound == doctest::Approx(0.0));
    const auto apart = dis_estimate(moving, 0, vec1(0), moving, 0, vec1(0.75), 30000);
    CHECK(apart.lower_bound == doctest::Approx(0.75).epsilon(0.1));
    CHECK(apart.lower_bound <= 0.75 + 1e-9);
  }

  TEST_CASE("discrete gronwall frozen values and domination") {
    const auto b = discrete_gronwall_bound(2.0, {0.1, 0.2});
    REQUIRE(b.size() == 3);
    CHECK(b[0] == doctest::Approx(2.0));
    CHECK(b[1] == doctest::Approx(2.0 * std::exp(0.1)));
    CHECK(b[2] == doctest::Approx(2.0 * std::exp(0.3)));
    // extremal recursion u_n = alpha prod (1 + beta_k) stays below the bound
    std::mt19937_64 rng(24);
    for (int k = 0; k < 50; ++k) {
      const double alpha = std::uniform_real_distribution<double>(0, 3)(rng);
      std::vector<double> betas(12);
      for (auto& be : betas) be = std::uniform_real_distribution<double>(0, 0.4)(rng);
      const auto bound = discrete_gronwall_bound(alpha, betas);
      double u = alpha;
      for (std::size_t n = 0; n < betas.size(); ++n) {
        CHECK(u <= bound[n] + 1e-12);
        u *= 1.0 + betas[n];
      }
      CHECK(u <= bound.back() + 1e-12);
    }
    CHECK_THROWS_AS(discrete_gronwall_bound(-1.0, {0.1}), std::invalid_argument);
    CHECK_THROWS_AS(discrete_gronwall_bound(1.0, {-0.1}), std::invalid_argument);
  }

  TEST_CASE("continuous gronwall exact cases") {
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(i * 0.01);
    // a = c constant, b = 0: w0 exp(c t); trapezoid is exact for constants
    auto bound = continuous_gronwall_bound(
        2.0, [](double) { return 0.7; }, [](double) { return 0.0; }, 0.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(bound[i] == doctest::Approx(2.0 * std::exp(0.7 * grid[i])).epsilon(1e-12));
    // a = 0, b = 1: w0 + t
    bound = continuous_gronwall_bound(
        1.5, [](double) { return 0.0; }, [](double) { return 1.0; }, 0.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(bound[i] == doctest::Approx(1.5 + grid[i]).epsilon(1e-12));
  }

  TEST_CASE("continuous gronwall quadrature accuracy and exponent handling") {
    std::vector<double> grid;
    for (int i = 0; i <= 2000; ++i) grid.push_back(i * 5e-4);
    // a(s) = s, b = 1, closed form exp(t^2/2)(w0 + int_0^t exp(-s^2/2) ds)
    const auto bound = continuous_gronwall_bound(
        1.0, [](double s) { return s; }, [](double) { return 1.0; }, 0.0, grid);
    const double t = grid.back();
    double quad = 0;  // fine trapezoid of exp(-s^2/2)
    for (std::size_t i = 1; i < grid.size(); ++i)
      quad += 0.5 * (std::exp(-grid[i - 1] * grid[i - 1] / 2) +
                     std::exp(-grid[i] * grid[i] / 2)) *
              (grid[i] - grid[i - 1]);
    const double closed = std::exp(t * t / 2) * (1.0 + quad);
    CHECK(bound.back() == doctest::Approx(closed).epsilon(1e-6));
    // alpha exponent: the bound applies to w^{1 - alpha}; starting value transforms
    const auto root_bound = continuous_gronwall_bound(
        4.0, [](double) { return 0.0; }, [](double) { return 0.0; }, 0.5, grid);
    CHECK(root_bound.front() == doctest::Approx(2.0));  // 4^{1 - 0.5}
    CHECK_THROWS_AS(continuous_gronwall_bound(1.0, [](double) { return 0.0; },
                                              [](double) { return 0.0; }, 1.0, grid),
                    std::invalid_argument);
    CHECK_THROWS_AS(continuous_gronwall_bound(1.0, [](double) { return 0.0; },
                                              [](double) { return 0.0; }, 0.0,
                                              std::vector<double>{0.0, 0.0}),
                    std::invalid_argument);
  }
}
