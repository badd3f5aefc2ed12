#include <doctest.h>

#include <cmath>
#include <random>

#include "catchup/applications.hpp"
#include "catchup/scenarios.hpp"
#include "helpers.hpp"

using namespace catchup;
using test_util::uniform_vec;
using test_util::vec1;
using test_util::vec2;

namespace {

LureSystem scalar_relay_system(double d) {
  LureSystem sys;
  sys.n = sys.m = 1;
  sys.B = Mat::Identity(1, 1);
  sys.C = Mat::Identity(1, 1);
  sys.D = Mat::Constant(1, 1, d);
  sys.F = sign_relay(1, 1.0);
  sys.g = [](double, const Vec& x) { return Vec(-x); };
  sys.c_g = 1.0;
  sys.T = 1.0;
  return sys;
}

}  // namespace

TEST_SUITE("applications") {
  TEST_CASE("sweeping front-end wraps the normal cone problem") {
    SweepingScenario sc;
    sc.dim = 1;
    sc.moving_set = [](double t, const Vec&) { return ConvexSet::interval(t, t + 1); };
    sc.L1 = 1.0;
    sc.T = 1.0;
    const auto p = sweeping_problem(sc);
    CHECK(p.dim == 1);
    CHECK(p.A.constants().L1 == doctest::Approx(1.0));
    SolveOptions opts;
    opts.allow_large_step = true;  // h c1 = 1.125 exceeds the guaranteed regime
    const auto traj = solve(p, 0.0, vec1(0.0), 0.5, opts);
    CHECK(traj.states[1][0] == doctest::Approx(0.5));
    // state feedback modulus at or above 1 is rejected
    SweepingScenario bad = sc;
    bad.L2 = 1.0;
    CHECK_THROWS_AS(sweeping_problem(bad), std::invalid_argument);
  }

  TEST_CASE("phi0 frozen scalar cases") {
    const auto sys = scalar_relay_system(1.0);
    // z in Sign(x - z): x = 2 -> z = 1; x = 0.5 -> z = 0.5
    auto r = phi0_solve(sys, 0.0, vec1(2.0), vec1(2.0));
    CHECK(r.converged);
    CHECK(r.z[0] == doctest::Approx(1.0));
    CHECK(r.residual <= 1e-9);
    CHECK(r.in_range_component);
    r = phi0_solve(sys, 0.0, vec1(0.5), vec1(0.5));
    CHECK(r.z[0] == doctest::Approx(0.5));

    const auto flat = scalar_relay_system(0.0);
    // D = 0: z in Sign(x); x = 0 gives the multivalued slot, minimal pick 0
    r = phi0_solve(flat, 0.0, vec1(0.0), vec1(0.0));
    CHECK(r.converged);
    CHECK(r.z[0] == doctest::Approx(0.0));
    CHECK(r.in_range_component);  // rge(0) = {0} contains 0
    r = phi0_solve(flat, 0.0, vec1(0.5), vec1(0.5));
    CHECK(r.z[0] == doctest::Approx(1.0));
    CHECK(!r.in_range_component);  // 1 outside rge(0), reported honestly
  }

  TEST_CASE("phi0 paths agree on sampled relay instances") {
    std::mt19937_64 rng(41);
    for (double d : {0.0, 0.5, 1.0}) {
      const auto sys = scalar_relay_system(d);
      for (int k = 0; k < 60; ++k) {
        const Vec x = vec1(std::uniform_real_distribution<double>(-3, 3)(rng));
        Phi0Options fb;
        fb.path = Phi0Options::Path::ForwardBackward;
        Phi0Options ex;
        ex.path = Phi0Options::Path::Exact;
        const auto rf = phi0_solve(sys, 0.0, x, x, fb);
        const auto re = phi0_solve(sys, 0.0, x, x, ex);
        REQUIRE(rf.converged);
        REQUIRE(re.converged);
        CHECK(std::abs(rf.z[0] - re.z[0]) <= 1e-8);
        if (d > 0) {
          CHECK(rf.in_range_component);
          CHECK(re.in_range_component);
        }
      }
    }
  }

  TEST_CASE("lure constants transfer the moduli through C") {
    auto sys = scalar_relay_system(0.5);
    sys.L_F1 = 0.3;
    sys.L_F2 = 0.4;
    const auto d = lure_constants(sys);
    CHECK(d.c2 == doctest::Approx(1.0));
    CHECK(d.norm_C == doctest::Approx(1.0));
    CHECK(d.L1p == doctest::Approx(0.3));
    CHECK(d.L2p == doctest::Approx(0.4));
    Mat C2(1, 1);
    C2 << 2.0;
    sys.C = C2;
    const auto d2 = lure_constants(sys);
    // c2 = 4, |C| = 2: moduli scale by |C|/c2 = 1/2
    CHECK(d2.L1p == doctest::Approx(0.15));
    CHECK(d2.L2p == doctest::Approx(0.2));
  }

  TEST_CASE("lure problem rejects boundary feedback and degenerate C") {
    auto sys = scalar_relay_system(0.5);
    sys.L_F2 = 1.0;  // L2' = 1: strict inequality required
    CHECK_THROWS_AS(lure_problem(sys), std::invalid_argument);
    auto wide = scalar_relay_system(0.5);
    Mat C(2, 2);
    C << 1, 0, 0, 0;  // C C^T rank deficient
    wide.n = wide.m = 2;
    wide.B = Mat::Identity(2, 2);
    wide.C = C;
    wide.D = Mat::Zero(2, 2);
    wide.F = sign_relay(2, 1.0);
    wide.g = [](double, const Vec& x) { return Vec(-x); };
    CHECK_THROWS_AS(lure_problem(wide), std::invalid_argument);
  }

  TEST_CASE("reduction identity: lure front-end equals sweeping, step for step") {
    SetMap moving = [](double t, const Vec&) {
      return ConvexSet::interval(-1 - t, 1 + t);
    };
    std::function<Vec(double, const Vec&)> drive = [](double t, const Vec& x) {
      return vec1(std::sin(t) - 0.5 * x[0]);
    };

    SweepingScenario sc;
    sc.dim = 1;
    sc.moving_set = moving;
    sc.f = drive;
    sc.c_f = 1.5;
    sc.L1 = 1.0;
    sc.T = 0.5;
    const auto direct = sweeping_problem(sc);

    LureSystem sys;
    sys.n = sys.m = 1;
    sys.B = Mat::Identity(1, 1);
    sys.C = Mat::Identity(1, 1);
    sys.D = Mat::Zero(1, 1);
    sys.F = normal_cone(1, moving);
    sys.g = drive;
    sys.c_g = 1.5;
    sys.L_F1 = 1.0;
    sys.T = 0.5;
    const auto reduced = lure_problem(sys);

    const auto t1 = solve(direct, 0.0, vec1(0.25), 0.01);
    const auto t2 = solve(reduced, 0.0, vec1(0.25), 0.01);
    REQUIRE(t1.states.size() == t2.states.size());
    for (std::size_t j = 0; j < t1.states.size(); ++j)
      CHECK(t1.states[j][0] == t2.states[j][0]);  // exact, not approximate
  }

  TEST_CASE("assumption report flags kernel incompatibility") {
    LureSystem sys;
    sys.n = sys.m = 2;
    sys.B = Mat::Identity(2, 2);
    Mat C(2, 2), D(2, 2);
    C << 1, 0, 0, 2;
    D << 1, 0, 0, 0;
    sys.C = C;
    sys.D = D;
    sys.F = sign_relay(2, 1.0);
    sys.g = [](double, const Vec& x) { return Vec(-x); };
    sys.c_g = 1.0;
    sys.P = Mat::Identity(2, 2);
    const auto rep = check_assumptions(sys);
    const auto* kern = rep.find("kernel_inclusion");
    REQUIRE(kern);
    // ker(D + D^T) = span e2; (P B - C^T) e2 = (0, -1): not contained
    CHECK(kern->status == CheckStatus::Fail);
    CHECK(!rep.all_passed());
  }

  TEST_CASE("assumption report passes on the scalar relay system") {
    const auto rep = check_assumptions(scalar_relay_system(1.0));
    CHECK(rep.all_passed());
    const auto* solv = rep.find("solvability");
    REQUIRE(solv);
    CHECK(solv->value == doctest::Approx(1.0));
    const auto* dmon = rep.find("D_monotone");
    REQUIRE(dmon);
    CHECK(dmon->status == CheckStatus::Pass);
  }

  TEST_CASE("builtin scenario registry") {
    const auto names = builtin_scenario_names();
    REQUIRE(names.size() == 4);
    for (const auto& name : names) {
      const auto bundle = builtin_scenario(name);
      CHECK(bundle.name == name);
      CHECK(bundle.x0.size() == bundle.problem.dim);
      CHECK(admissible(bundle.problem, bundle.t0, bundle.x0));
    }
    CHECK_THROWS_AS(builtin_scenario("no-such"), std::invalid_argument);
  }

  TEST_CASE("builtin scenarios run clean at their default steps") {
    for (const auto& bundle : builtin_scenarios()) {
      const auto traj = solve(bundle.problem, bundle.t0, bundle.x0,
                              bundle.default_h, SolveOptions{bundle.delta});
      CHECK(traj.status == SolveStatus::Complete);
      CHECK(traj.max_residual() <= 1e-8);
    }
  }
}
