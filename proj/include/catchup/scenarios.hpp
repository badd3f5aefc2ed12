#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catchup/applications.hpp"
#include "catchup/lyapunov.hpp"

namespace catchup {

// A ready-to-run problem with its initial data, operating parameters, and
// (when one is known in closed form) a Lyapunov pair.
struct ScenarioBundle {
  std::string name;
  InclusionProblem problem;
  std::optional<LyapunovPair> pair;
  double t0 = 0;
  Vec x0;
  double default_h = 1e-3;
  double delta = 1.0;  // step-rule delta this scenario operates under
};

// Relay-damped planar rotation with a third coordinate driven by
//   dx3/dt in p |x3| - Sign(x3);
// V = x1^2 + (1 + g(t)) x2^2 + |x3| capped to x3 <= 1/p, W = 0.
enum class DampedRotationGrowth { ConstOne, Exp2t };
ScenarioBundle example1_scenario(double p = 1.0,
                                 DampedRotationGrowth g = DampedRotationGrowth::ConstOne,
                                 Vec x0 = {}, double T = 2.0);

// State-dependent interval sweeping coupled with a relay:
//   C(t, x1) = x1/2 + [-(t + 2|x01|), t + 2|x01|],  V = |x|^2 / 2 on |x2| <= gamma.
ScenarioBundle example2_scenario(double alpha = 1.0, double beta = 0.5,
                                 double gamma = 1.0, Vec x0 = {}, double T = 2.0);

// Static interval sweeping with a bounded drive and exactly known constants.
ScenarioBundle static_sweep_scenario();

// Scalar relay feedback block (B = C = D = 1, relay F), reduced dynamics
// dx/dt = -x - clamp(x, [-1, 1]).
ScenarioBundle relay_lure_scenario();

std::vector<std::string> builtin_scenario_names();
ScenarioBundle builtin_scenario(const std::string& name);  // defaults per name
std::vector<ScenarioBundle> builtin_scenarios();           // all four, defaults

}  // namespace catchup
