#include <doctest.h>

#include <cmath>
#include <random>

#include "catchup/detail/geneq.hpp"
#include "catchup/operators.hpp"
#include "helpers.hpp"

using namespace catchup;
using test_util::uniform_vec;
using test_util::vec1;
using test_util::vec2;
using test_util::vec3;

namespace {

// Independent oracle: J_lambda(y) for gamma Sign via the prox grid search
// argmin_z (z - y)^2 / 2 + lambda gamma |z|.
double grid_soft_threshold(double y, double lambda, double gamma) {
  double best_z = 0, best_v = kInf;
  for (int i = -40000; i <= 40000; ++i) {
    const double z = i * 1e-4;
    const double v = 0.5 * (z - y) * (z - y) + lambda * gamma * std::abs(z);
    if (v < best_v) {
      best_v = v;
      best_z = z;
    }
  }
  return best_z;
}

OperatorHandle moving_interval_op() {
  return normal_cone(1, [](double t, const Vec&) {
    return ConvexSet::interval(t, t + 1.0);
  });
}

std::vector<OperatorHandle> law_families() {
  std::vector<OperatorHandle> ops;
  ops.push_back(sign_relay(3, 1.0));
  ops.push_back(sign_relay(3, 0.5, {2}));
  ops.push_back(moving_interval_op());
  Mat rot(2, 2);
  rot << 0.5, 1, -1, 0.5;  // symmetric part 0.5 I: monotone
  ops.push_back(linear_psd(rot));
  ops.push_back(zero_operator(2));
  ops.push_back(shift_operator(sign_relay(1, 1.0), 0.5));
  ops.push_back(direct_sum({sign_relay(1, 1.0), moving_interval_op()}));
  Mat C(1, 2), D(1, 1);
  C << 1, 2;
  D << 0.5;
  ops.push_back(lure_composed(sign_relay(1, 1.0), C, D));
  return ops;
}

}  // namespace

TEST_SUITE("operators") {
  TEST_CASE("relay resolvent is the soft threshold (grid oracle)") {
    const auto op = sign_relay(1, 1.0);
    const Vec s = vec1(0);
    CHECK(op.resolvent(0, s, 0.5, vec1(1.2))[0] == doctest::Approx(0.7));
    CHECK(grid_soft_threshold(1.2, 0.5, 1.0) == doctest::Approx(0.7).epsilon(1e-3));
    CHECK(op.resolvent(0, s, 0.5, vec1(-1.2))[0] == doctest::Approx(-0.7));
    CHECK(op.resolvent(0, s, 0.5, vec1(0.3))[0] == doctest::Approx(0.0));
    std::mt19937_64 rng(3);
    for (int k = 0; k < 25; ++k) {
      std::uniform_real_distribution<double> u(-3, 3);
      const double y = u(rng);
      CHECK(op.resolvent(0, s, 0.5, vec1(y))[0] ==
            doctest::Approx(grid_soft_threshold(y, 0.5, 1.0)).epsilon(2e-4));
    }
  }

  TEST_CASE("relay yosida and minimal selection") {
    const auto op = sign_relay(1, 1.0);
    const Vec s = vec1(0);
    // |y| <= lambda gamma: J = 0, yosida = y / lambda
    CHECK(op.yosida(0, s, 0.5, vec1(0.2))[0] == doctest::Approx(0.4));
    CHECK(op.minimal_norm(0, s, vec1(0.0))[0] == doctest::Approx(0.0));
    CHECK(op.minimal_norm(0, s, vec1(0.5))[0] == doctest::Approx(1.0));
    CHECK(op.minimal_norm(0, s, vec1(-2.0))[0] == doctest::Approx(-1.0));
  }

  TEST_CASE("masked relay acts only on masked coordinates") {
    const auto op = sign_relay(3, 2.0, {2});
    const Vec y = vec3(5, -5, 5);
    const Vec x = op.resolvent(0, Vec::Zero(3), 1.0, y);
    CHECK(x[0] == doctest::Approx(5.0));
    CHECK(x[1] == doctest::Approx(-5.0));
    CHECK(x[2] == doctest::Approx(3.0));  // soft threshold with knee 2
  }

  TEST_CASE("normal cone resolvent is the projection onto the advanced set") {
    const auto op = moving_interval_op();
    // set at t = 1 is [1, 2]
    CHECK(op.resolvent(1.0, vec1(0), 0.25, vec1(5))[0] == doctest::Approx(2.0));
    CHECK(op.resolvent(1.0, vec1(0), 2.5, vec1(5))[0] == doctest::Approx(2.0));
    CHECK(op.minimal_norm(1.0, vec1(0), vec1(1.5))[0] == doctest::Approx(0.0));
    CHECK(op.in_domain(1.0, vec1(0), vec1(1.5)));
    CHECK(!op.in_domain(1.0, vec1(0), vec1(0.5)));
    CHECK_THROWS_AS(op.minimal_norm(1.0, vec1(0), vec1(0.5)), std::domain_error);
  }

  TEST_CASE("shifted relay frozen resolvent") {
    // A_{t,s}(y) = Sign(y + 0.5 s); J(y) = soft(y + 0.5 s) - 0.5 s
    const auto op = shift_operator(sign_relay(1, 1.0), 0.5);
    const Vec s = vec1(2.0);
    CHECK(op.resolvent(0, s, 0.5, vec1(0))[0] == doctest::Approx(-0.5));
    // state 0: plain soft threshold
    CHECK(op.resolvent(0, vec1(0), 0.5, vec1(1.2))[0] == doctest::Approx(0.7));
  }

  TEST_CASE("graph residual frozen value for the relay") {
    const auto op = sign_relay(1, 1.0);
    // (1, -1) is off the graph: Sign(1) = {1}; J_1(1 - 1) = 0, residual 1
    GraphPoint pt{vec1(1), vec1(-1)};
    CHECK(op.graph_residual(0, vec1(0), pt, 1.0) == doctest::Approx(1.0));
    GraphPoint on{vec1(1), vec1(1)};
    CHECK(op.graph_residual(0, vec1(0), on, 1.0) == doctest::Approx(0.0));
    GraphPoint inside{vec1(0), vec1(0.3)};  // 0.3 in Sign(0)
    CHECK(op.graph_residual(0, vec1(0), inside, 1.0) == doctest::Approx(0.0));
  }

  TEST_CASE("linear psd resolvent solves the regularized system") {
    Mat M(2, 2);
    M << 1, 1, -1, 1;
    const auto op = linear_psd(M);
    const Vec y = vec2(1, 2);
    const double lambda = 0.3;
    const Vec x = op.resolvent(0, Vec::Zero(2), lambda, y);
    CHECK((x + lambda * M * x - y).norm() <= 1e-12);
    CHECK((op.minimal_norm(0, Vec::Zero(2), y) - M * y).norm() <= 1e-12);
    Mat bad(2, 2);
    bad << -1, 0, 0, 1;
    CHECK_THROWS_AS(linear_psd(bad), std::invalid_argument);
  }

  TEST_CASE("direct sum applies blocks to coordinate slices") {
    const auto op = direct_sum({sign_relay(1, 1.0), moving_interval_op()});
    REQUIRE(op.dim() == 2);
    const Vec y = vec2(1.2, 5.0);
    const Vec x = op.resolvent(1.0, vec2(0, 0), 0.5, y);
    CHECK(x[0] == doctest::Approx(0.7));
    CHECK(x[1] == doctest::Approx(2.0));
  }

  TEST_CASE("operator laws: nonexpansive resolvents") {
    std::mt19937_64 rng(11);
    for (const auto& op : law_families()) {
      const int d = op.dim();
      for (int k = 0; k < 300; ++k) {
        std::uniform_real_distribution<double> ul(0.05, 2.0);
        const double lambda = ul(rng);
        const double t = ul(rng);
        const Vec state = uniform_vec(d, rng, -2, 2);
        const Vec y1 = uniform_vec(d, rng, -4, 4);
        const Vec y2 = uniform_vec(d, rng, -4, 4);
        const Vec j1 = op.resolvent(t, state, lambda, y1);
        const Vec j2 = op.resolvent(t, state, lambda, y2);
        CHECK((j1 - j2).norm() <= (y1 - y2).norm() + 1e-9);
      }
    }
  }

  TEST_CASE("operator laws: yosida output lies on the graph") {
    std::mt19937_64 rng(12);
    for (const auto& op : law_families()) {
      const int d = op.dim();
      for (int k = 0; k < 200; ++k) {
        std::uniform_real_distribution<double> ul(0.05, 2.0);
        const double lambda = ul(rng);
        const double t = ul(rng);
        const Vec state = uniform_vec(d, rng, -2, 2);
        const Vec y = uniform_vec(d, rng, -4, 4);
        GraphPoint pt{op.resolvent(t, state, lambda, y),
                      op.yosida(t, state, lambda, y)};
        // consistency across a different resolvent parameter
        CHECK(op.graph_residual(t, state, pt, 0.37) <= 1e-8);
        CHECK(op.graph_residual(t, state, pt, 1.0) <= 1e-8);
      }
    }
  }

  TEST_CASE("operator laws: yosida norm dominated by the minimal selection") {
    std::mt19937_64 rng(13);
    for (const auto& op : law_families()) {
      const int d = op.dim();
      for (int k = 0; k < 200; ++k) {
        std::uniform_real_distribution<double> ul(0.05, 2.0);
        const double lambda = ul(rng);
        const double t = ul(rng);
        const Vec state = uniform_vec(d, rng, -2, 2);
        Vec x = uniform_vec(d, rng, -4, 4);
        // move onto the domain: the resolvent always lands there
        x = op.resolvent(t, state, 0.5, x);
        if (!op.in_domain(t, state, x)) continue;
        const Vec a0 = op.minimal_norm(t, state, x);
        const Vec ylam = op.yosida(t, state, lambda, x);
        CHECK(ylam.norm() <= a0.norm() + 1e-9);
      }
    }
  }

  TEST_CASE("sampled images lie on the graph and image boxes are consistent") {
    std::mt19937_64 rng(14);
    for (const auto& op : law_families()) {
      const int d = op.dim();
      for (int k = 0; k < 100; ++k) {
        const double t = std::uniform_real_distribution<double>(0.05, 2.0)(rng);
        const Vec state = uniform_vec(d, rng, -2, 2);
        Vec x = op.resolvent(t, state, 0.5, uniform_vec(d, rng, -4, 4));
        if (!op.in_domain(t, state, x)) continue;
        const Vec eta = op.sample_image(t, state, x, rng, 1.5);
        CHECK(op.graph_residual(t, state, GraphPoint{x, eta}, 1.0) <= 1e-8);
        if (auto box = op.image_box(t, state, x)) {
          CHECK(box->contains(eta, 1e-8));
          CHECK(box->contains(op.minimal_norm(t, state, x), 1e-8));
        }
      }
    }
  }

  TEST_CASE("lure composition with identity data collapses to the inner operator") {
    const auto relay = sign_relay(2, 1.0);
    const auto composed = lure_composed(relay, Mat::Identity(2, 2), Mat::Zero(2, 2));
    CHECK(composed.kind() == OpKind::SignRelay);
    std::mt19937_64 rng(15);
    for (int k = 0; k < 50; ++k) {
      const Vec y = uniform_vec(2, rng, -3, 3);
      const Vec a = relay.resolvent(0, Vec::Zero(2), 0.7, y);
      const Vec b = composed.resolvent(0, Vec::Zero(2), 0.7, y);
      CHECK((a - b).norm() == 0.0);  // same implementation object
    }
  }

  TEST_CASE("lure composed resolvent satisfies the defining inclusion") {
    Mat C(1, 2), D(1, 1);
    C << 1, 2;
    D << 0.5;
    const auto F = sign_relay(1, 1.0);
    const auto op = lure_composed(F, C, D);
    std::mt19937_64 rng(16);
    for (int k = 0; k < 100; ++k) {
      const double lambda = std::uniform_real_distribution<double>(0.05, 1.5)(rng);
      const Vec y = uniform_vec(2, rng, -3, 3);
      const Vec x = op.resolvent(0, Vec::Zero(2), lambda, y);
      // recover z from x = y - lambda C^T z, then check z in F(C x - D z)
      const Vec ct_z = (y - x) / lambda;
      // C^T has full column rank here: z = (C C^T)^{-1} C (C^T z)
      const double z = (C * ct_z)(0) / (C * C.transpose())(0, 0);
      const double w = (C * x)(0) - D(0, 0) * z;
      GraphPoint pt{vec1(w), vec1(z)};
      CHECK(F.graph_residual(0, Vec::Zero(1), pt, 1.0) <= 1e-7);
    }
  }

  TEST_CASE("scalar generalized equation: frozen cases") {
    using detail::ScalarUnit;
    double z = 0;
    bool multi = false;

    ScalarUnit relay{ScalarUnit::Type::Relay, 1.0, -kInf, kInf, 0.0};
    REQUIRE(detail::solve_scalar_unit(relay, 2.0, 1.0, true, z, multi));
    CHECK(z == doctest::Approx(1.0));
    CHECK(!multi);
    REQUIRE(detail::solve_scalar_unit(relay, 0.5, 1.0, true, z, multi));
    CHECK(z == doctest::Approx(0.5));
    REQUIRE(detail::solve_scalar_unit(relay, 2.0, 0.0, true, z, multi));
    CHECK(z == doctest::Approx(1.0));
    REQUIRE(detail::solve_scalar_unit(relay, 0.0, 0.0, true, z, multi));
    CHECK(z == doctest::Approx(0.0));  // minimal-norm pick from [-1, 1]
    CHECK(multi);

    ScalarUnit cone{ScalarUnit::Type::Cone, 0.0, 0.0, 1.0, 0.0};
    REQUIRE(detail::solve_scalar_unit(cone, 2.0, 1.0, true, z, multi));
    CHECK(z == doctest::Approx(1.0));
    REQUIRE(detail::solve_scalar_unit(cone, 0.5, 1.0, true, z, multi));
    CHECK(z == doctest::Approx(0.0));  // interior: N = {0}
    // infeasible: w = u must land in [0, 1] when d = 0
    CHECK(!detail::solve_scalar_unit(cone, 2.0, 0.0, true, z, multi));

    ScalarUnit lin{ScalarUnit::Type::Linear, 0.0, -kInf, kInf, 2.0};
    REQUIRE(detail::solve_scalar_unit(lin, 3.0, 0.5, true, z, multi));
    CHECK(z == doctest::Approx(3.0));  // z = q u / (1 + q d)

    ScalarUnit zero{ScalarUnit::Type::Zero, 0.0, -kInf, kInf, 0.0};
    REQUIRE(detail::solve_scalar_unit(zero, 5.0, 2.0, true, z, multi));
    CHECK(z == doctest::Approx(0.0));
  }

  TEST_CASE("generalized equation: iterative path agrees with the exact path") {
    std::mt19937_64 rng(17);
    const auto F = sign_relay(1, 1.0);
    for (double dval : {0.0, 0.5, 1.0}) {
      Mat D(1, 1);
      D << dval;
      for (int k = 0; k < 120; ++k) {
        const Vec u = vec1(std::uniform_real_distribution<double>(-3, 3)(rng));
        detail::GenEqOptions fb;
        fb.force_fb = true;
        detail::GenEqOptions ex;
        ex.force_exact = true;
        const auto rf = detail::solve_generalized(F, 0, vec1(0), u, D, true, fb);
        const auto re = detail::solve_generalized(F, 0, vec1(0), u, D, true, ex);
        REQUIRE(rf.converged);
        REQUIRE(re.converged);
        CHECK(std::abs(rf.z[0] - re.z[0]) <= 1e-8);
        CHECK(rf.residual <= 1e-8);
        CHECK(re.residual <= 1e-10);
        if (dval > 0) {
          CHECK(rf.in_range);
          CHECK(re.in_range);
        }
      }
    }
  }

  TEST_CASE("generalized equation respects honest range reporting at D = 0") {
    const auto F = sign_relay(1, 1.0);
    const Mat D = Mat::Zero(1, 1);
    // u != 0: the unique solution z = +-1 lies outside rge(D + D^T) = {0}
    auto r = detail::solve_generalized(F, 0, vec1(0), vec1(2.0), D, true, {});
    REQUIRE(r.converged);
    CHECK(r.z[0] == doctest::Approx(1.0));
    CHECK(!r.in_range);
    // u = 0: minimal-norm solution 0 lies in the degenerate range
    r = detail::solve_generalized(F, 0, vec1(0), vec1(0.0), D, true, {});
    REQUIRE(r.converged);
    CHECK(r.z[0] == doctest::Approx(0.0));
    CHECK(r.in_range);
  }

  TEST_CASE("with_constants shares the implementation") {
    const auto op = sign_relay(2, 1.0);
    const auto tagged = op.with_constants(OperatorConstants{1.0, 0.25, 0.5});
    CHECK(tagged.impl() == op.impl());
    CHECK(tagged.constants().L1 == doctest::Approx(0.25));
    CHECK(op.constants().L1 == doctest::Approx(0.0));
  }
}
