#include "catchup/scenarios.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace catchup {

namespace {

double spectral_norm2x2(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues()[0];
}

}  // namespace

ScenarioBundle example1_scenario(double p, DampedRotationGrowth g, Vec x0, double T) {
  if (!(p > 0)) throw std::invalid_argument("example1_scenario: p must be positive");
  if (!(T > 0)) throw std::invalid_argument("example1_scenario: T must be positive");
  if (x0.size() == 0) {
    x0 = Vec(3);
    x0 << 1.0, 1.0, 0.5;
  }
  if (x0.size() != 3) throw std::invalid_argument("example1_scenario: x0 must be 3-d");

  const bool expg = g == DampedRotationGrowth::Exp2t;
  auto gval = [expg](double t) { return expg ? std::exp(2.0 * t) : 1.0; };
  auto gdot = [expg](double t) { return expg ? 2.0 * std::exp(2.0 * t) : 0.0; };

  ScenarioBundle b;
  b.name = "builtin-example-1";
  b.x0 = x0;
  b.default_h = 1e-3;
  b.delta = 1.0;

  InclusionProblem prob;
  prob.dim = 3;
  prob.T = T;
  prob.f = [gval, p](double t, const Vec& x) {
    Vec v(3);
    v[0] = -x[0] - gval(t) * x[1];
    v[1] = x[0] - x[1];
    v[2] = p * std::abs(x[2]);
    return v;
  };
  {
    Mat Mg(2, 2);
    Mg << 1.0, gval(T), 1.0, -1.0;  // |f_{1,2}| <= |Mg| |x_{1,2}| on [0, T]
    prob.c_f = std::max(spectral_norm2x2(Mg), p);
  }
  prob.A = sign_relay(3, 1.0, {2}).with_constants(OperatorConstants{1.0, 0.0, 0.0});
  b.problem = std::move(prob);

  const double cap = 1.0 / p;
  const double btol = 1e-9 * std::max(1.0, cap);
  LyapunovPair pair;
  pair.a = 0.0;
  pair.V = [gval, cap](double t, const Vec& x) {
    if (x[2] > cap + 1e-12) return kInf;
    return x[0] * x[0] + (1.0 + gval(t)) * x[1] * x[1] + std::abs(x[2]);
  };
  pair.proximal = [gval, gdot, cap, btol](double t, const Vec& x) {
    std::vector<SubdiffItem> out;
    if (x[2] > cap + btol) return out;
    const double theta = gdot(t) * x[1] * x[1];
    Vec xi(3);
    xi[0] = 2.0 * x[0];
    xi[1] = 2.0 * (1.0 + gval(t)) * x[1];
    auto push = [&](double xi3) {
      xi[2] = xi3;
      out.push_back({theta, xi});
    };
    if (std::abs(x[2]) <= btol) {
      push(-1.0);
      push(0.0);
      push(1.0);
    } else if (std::abs(x[2] - cap) <= btol) {
      push(1.0);  // extreme generator of the capped slope
      push(2.0);  // one interior sample of the outward ray
    } else {
      push(x[2] > 0 ? 1.0 : -1.0);
    }
    return out;
  };
  pair.singular = [cap, btol](double, const Vec& x) {
    std::vector<SubdiffItem> out;
    if (x[2] > cap + btol) return out;
    out.push_back({0.0, Vec(Vec::Zero(3))});
    if (std::abs(x[2] - cap) <= btol) {
      Vec ray = Vec::Zero(3);
      ray[2] = 1.0;
      out.push_back({0.0, ray});
      ray[2] = 2.0;
      out.push_back({0.0, ray});
    }
    return out;
  };
  b.pair = std::move(pair);
  return b;
}

ScenarioBundle example2_scenario(double alpha, double beta, double gamma, Vec x0,
                                 double T) {
  if (!(alpha > 0)) throw std::invalid_argument("example2_scenario: alpha must be positive");
  if (!(gamma > 0)) throw std::invalid_argument("example2_scenario: gamma must be positive");
  if (!(T > 0)) throw std::invalid_argument("example2_scenario: T must be positive");
  if (x0.size() == 0) {
    x0 = Vec(2);
    x0 << 0.5, 0.5;
  }
  if (x0.size() != 2) throw std::invalid_argument("example2_scenario: x0 must be 2-d");

  ScenarioBundle b;
  b.name = "builtin-example-2";
  b.x0 = x0;
  b.default_h = 1e-3;
  b.delta = 0.7;  // (1 + delta) L2 < 1 requires delta < 1 here

  const double x01_abs = std::abs(x0[0]);
  SetMap moving = [x01_abs](double t, const Vec& s) {
    const double r = t + 2.0 * x01_abs;
    return ConvexSet::interval(s[0] / 2.0 - r, s[0] / 2.0 + r);
  };

  InclusionProblem prob;
  prob.dim = 2;
  prob.T = T;
  Mat M(2, 2);
  M << -alpha, beta, -beta, 1.0;
  prob.f = [M](double, const Vec& x) { return Vec(M * x); };
  prob.c_f = spectral_norm2x2(M);
  prob.A = direct_sum({normal_cone(1, moving), sign_relay(1, gamma)})
               .with_constants(OperatorConstants{gamma, 1.0, 0.5});
  b.problem = std::move(prob);

  const double btol = 1e-9 * std::max(1.0, gamma);
  LyapunovPair pair;
  pair.a = 0.0;
  pair.V = [gamma](double, const Vec& x) {
    if (std::abs(x[1]) > gamma + 1e-12) return kInf;
    return 0.5 * x.squaredNorm();
  };
  pair.proximal = [gamma, btol](double, const Vec& x) {
    std::vector<SubdiffItem> out;
    if (std::abs(x[1]) > gamma + btol) return out;
    Vec xi(2);
    xi[0] = x[0];
    xi[1] = x[1];
    out.push_back({0.0, xi});
    if (std::abs(std::abs(x[1]) - gamma) <= btol) {
      xi[1] = 2.0 * x[1];  // one sample along the outward normal of the cap
      out.push_back({0.0, xi});
    }
    return out;
  };
  pair.singular = [gamma, btol](double, const Vec& x) {
    std::vector<SubdiffItem> out;
    if (std::abs(x[1]) > gamma + btol) return out;
    out.push_back({0.0, Vec(Vec::Zero(2))});
    if (std::abs(std::abs(x[1]) - gamma) <= btol) {
      Vec ray(2);
      ray << 0.0, x[1] > 0 ? 1.0 : -1.0;
      out.push_back({0.0, ray});
      ray[1] *= 2.0;
      out.push_back({0.0, ray});
    }
    return out;
  };
  b.pair = std::move(pair);
  return b;
}

ScenarioBundle static_sweep_scenario() {
  ScenarioBundle b;
  b.name = "static-sweep";
  b.x0 = Vec::Constant(1, 0.5);
  b.default_h = 0.01;
  b.delta = 1.0;

  InclusionProblem prob;
  prob.dim = 1;
  prob.T = 1.5;
  prob.f = [](double t, const Vec&) {
    return Vec(Vec::Constant(1, 0.3 * std::sin(t + 0.2)));
  };
  prob.c_f = 0.3;
  SetMap fixed = [](double, const Vec&) { return ConvexSet::interval(-2.0, 2.0); };
  prob.A = normal_cone(1, fixed);  // c_A = L1 = L2 = 0 exactly
  b.problem = std::move(prob);
  return b;
}

ScenarioBundle relay_lure_scenario() {
  ScenarioBundle b;
  b.name = "relay-lure";
  b.x0 = Vec::Constant(1, 2.0);
  b.default_h = 1e-3;
  b.delta = 1.0;

  LureSystem sys;
  sys.n = sys.m = 1;
  sys.g = [](double, const Vec& x) { return Vec(-x); };
  sys.c_g = 1.0;
  sys.B = Mat::Identity(1, 1);
  sys.C = Mat::Identity(1, 1);
  sys.D = Mat::Identity(1, 1);
  sys.F = sign_relay(1, 1.0);
  sys.L_F1 = 0.0;
  sys.L_F2 = 0.0;
  sys.T = 2.0;
  b.problem = lure_problem(sys);

  LyapunovPair pair;
  pair.a = 0.0;
  pair.V = [](double, const Vec& x) { return 0.5 * x.squaredNorm(); };
  pair.proximal = [](double, const Vec& x) {
    return std::vector<SubdiffItem>{{0.0, x}};
  };
  pair.singular = [](double, const Vec& x) {
    return std::vector<SubdiffItem>{{0.0, Vec(Vec::Zero(x.size()))}};
  };
  pair.in_domain = [](double, const Vec&) { return true; };
  b.pair = std::move(pair);
  return b;
}

std::vector<std::string> builtin_scenario_names() {
  return {"builtin-example-1", "builtin-example-2", "static-sweep", "relay-lure"};
}

ScenarioBundle builtin_scenario(const std::string& name) {
  if (name == "builtin-example-1") return example1_scenario();
  if (name == "builtin-example-2") return example2_scenario();
  if (name == "static-sweep") return static_sweep_scenario();
  if (name == "relay-lure") return relay_lure_scenario();
  throw std::invalid_argument("unknown builtin scenario: " + name);
}

std::vector<ScenarioBundle> builtin_scenarios() {
  std::vector<ScenarioBundle> out;
  for (const auto& n : builtin_scenario_names()) out.push_back(builtin_scenario(n));
  return out;
}

}  // namespace catchup
