#include <doctest.h>

#include <cmath>

#include "catchup/lyapunov.hpp"
#include "catchup/scenarios.hpp"
#include "helpers.hpp"

using namespace catchup;
using test_util::vec1;
using test_util::vec2;
using test_util::vec3;

namespace {

InclusionProblem scalar_decay() {
  InclusionProblem p;
  p.dim = 1;
  p.f = [](double, const Vec& x) { return Vec(-x); };
  p.A = zero_operator(1);
  p.c_f = 1.0;
  p.T = 2.0;
  return p;
}

LyapunovPair quadratic_pair() {
  LyapunovPair pair;
  pair.V = [](double, const Vec& x) { return 0.5 * x.squaredNorm(); };
  pair.proximal = [](double, const Vec& x) {
    return std::vector<SubdiffItem>{{0.0, x}};
  };
  return pair;
}

}  // namespace

TEST_SUITE("lyapunov") {
  TEST_CASE("decay passes along a contracting flow") {
    const auto traj = solve(scalar_decay(), 0.0, vec1(2.0), 1e-2);
    const auto rep = evaluate_pair_decay(traj, quadratic_pair());
    CHECK(rep.pass);
    CHECK(rep.v0 == doctest::Approx(2.0));
    CHECK(rep.slack == doctest::Approx(5e-2));  // default 5 h
    CHECK(rep.max_increment <= 0.0);
    CHECK(rep.max_violation <= 0.0);
    CHECK(!rep.first_exit);
    CHECK(rep.composite.size() == traj.states.size());
  }

  TEST_CASE("exponential weight and running cost enter the composite") {
    const auto traj = solve(scalar_decay(), 0.0, vec1(1.0), 1e-3);
    // d/dt (x^2/2) = -x^2: with W = x^2 the composite is conserved, so it
    // passes only through the slack; with a = 2 it is exactly conserved too.
    LyapunovPair with_w = quadratic_pair();
    with_w.W = [](double, const Vec& x) { return x.squaredNorm(); };
    auto rep = evaluate_pair_decay(traj, with_w);
    CHECK(rep.pass);
    CHECK(rep.max_violation <= rep.slack);
    CHECK(rep.max_violation >= -1e-3);  // conserved up to discretization

    LyapunovPair weighted = quadratic_pair();
    weighted.a = 2.0;
    rep = evaluate_pair_decay(traj, weighted);
    CHECK(rep.pass);
    CHECK(rep.max_violation <= rep.slack);
  }

  TEST_CASE("explicit slack overrides the default") {
    const auto traj = solve(scalar_decay(), 0.0, vec1(1.0), 1e-2);
    LyapunovPair inflate = quadratic_pair();
    inflate.a = 4.0;
    // composite e^{4t} x(t)^2/2 ~ e^{2t} grows: fails with zero slack
    const auto strict = evaluate_pair_decay(traj, inflate, 0.0);
    CHECK(!strict.pass);
    const auto loose = evaluate_pair_decay(traj, inflate, 1e9);
    CHECK(loose.pass);
  }

  TEST_CASE("leaving the domain fails and records the first exit") {
    InclusionProblem p;
    p.dim = 2;
    p.f = [](double, const Vec& x) { return vec2(0.0, x[1]); };
    p.A = zero_operator(2);
    p.c_f = 1.0;
    p.T = 2.0;
    const auto traj = solve(p, 0.0, vec2(0.0, 0.2), 1e-2);
    LyapunovPair pair;
    pair.V = [](double, const Vec& x) {
      return std::abs(x[1]) <= 0.3 ? x.squaredNorm() : kInf;
    };
    const auto rep = evaluate_pair_decay(traj, pair);
    CHECK(!rep.pass);
    REQUIRE(rep.first_exit);
    // x2(t) = 0.2 (1 + h)^k crosses 0.3 at k = ceil(log(1.5)/log(1.01)) = 41
    CHECK(*rep.first_exit == 41);
    CHECK(rep.composite.size() == *rep.first_exit);
  }

  TEST_CASE("truncated velocity set: exact box for relay dynamics") {
    InclusionProblem p;
    p.dim = 1;
    p.f = [](double, const Vec&) { return vec1(2.0); };
    p.A = sign_relay(1, 1.0);
    p.c_f = 2.0;
    const auto vs = truncated_velocity_set(p, 0.0, vec1(0.0), 10.0);
    REQUIRE(vs.exact);
    REQUIRE(vs.nonempty);
    // f - Sign(0) = 2 - [-1, 1] = [1, 3]
    CHECK(vs.box.lo[0] == doctest::Approx(1.0));
    CHECK(vs.box.hi[0] == doctest::Approx(3.0));
    CHECK(vs.min_inner(vec1(1.0)) == doctest::Approx(1.0));
    CHECK(vs.min_inner(vec1(-1.0)) == doctest::Approx(-3.0));
    // radius cap can empty the set
    const auto small = truncated_velocity_set(p, 0.0, vec1(0.0), 0.5);
    CHECK(!small.nonempty);
    CHECK(small.min_inner(vec1(1.0)) == kInf);
  }

  TEST_CASE("proximal criterion frozen value on the relay flow") {
    InclusionProblem p;
    p.dim = 1;
    p.A = sign_relay(1, 1.0);
    p.T = 1.0;
    // x = 0.5: velocity set { -1 }, generator xi = x: residual = -0.5
    const auto rep = proximal_criterion(quadratic_pair(), p, 0.0, vec1(0.5), 10.0);
    CHECK(rep.velocity_exact);
    CHECK(rep.velocity_nonempty);
    CHECK(rep.generators == 1);
    CHECK(rep.residual == doctest::Approx(-0.5));
    CHECK(!rep.singular_residual);
  }

  TEST_CASE("proximal criterion frozen value on the damped rotation scenario") {
    const auto bundle = example1_scenario();
    REQUIRE(bundle.pair);
    const auto rep = proximal_criterion(*bundle.pair, bundle.problem, 0.0,
                                        vec3(1.0, 1.0, 0.5), 50.0);
    // f = (-2, 0, 0.5), selection 1 on the third slot, xi = (2, 4, 1):
    // <xi, f - a> = -4 + 0 - 0.5
    CHECK(rep.residual == doctest::Approx(-4.5));
    CHECK(rep.velocity_nonempty);
  }

  TEST_CASE("singular generators bound horizon directions separately") {
    const auto bundle = example1_scenario();  // cap |x3| <= 1/p
    REQUIRE(bundle.pair);
    REQUIRE(bundle.pair->singular);
    // at the cap the singular rays (0, 0, r), r > 0 must check against the
    // velocity set; the third velocity component is p|x3| - 1 = -0.5 < 0
    const auto rep = proximal_criterion(*bundle.pair, bundle.problem, 0.0,
                                        vec3(0.5, 0.5, 1.0), 50.0);
    REQUIRE(rep.singular_residual);
    CHECK(*rep.singular_residual <= 0.0);
  }

  TEST_CASE("builtin scenario pairs certify their own trajectories") {
    for (const auto& name : {"builtin-example-1", "builtin-example-2"}) {
      const auto bundle = builtin_scenario(name);
      REQUIRE(bundle.pair);
      const auto traj = solve(bundle.problem, bundle.t0, bundle.x0, 1e-3,
                              SolveOptions{bundle.delta});
      const auto rep = evaluate_pair_decay(traj, *bundle.pair);
      CHECK(rep.pass);
      CHECK(rep.max_violation <= rep.slack);
    }
  }

  TEST_CASE("negative running cost is rejected") {
    const auto traj = solve(scalar_decay(), 0.0, vec1(1.0), 0.1);
    LyapunovPair bad = quadratic_pair();
    bad.W = [](double, const Vec& x) { return -x.squaredNorm(); };
    CHECK_THROWS_AS(evaluate_pair_decay(traj, bad), std::invalid_argument);
  }
}
