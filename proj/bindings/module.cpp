// Python bindings for the catching-up toolkit. Callbacks supplied from Python
// (drives, set maps, Lyapunov data) are invoked under the GIL by the function
// casters; long-running entry points release it so worker threads can call
// back in.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>
#include <sstream>

#include "catchup/applications.hpp"
#include "catchup/config.hpp"
#include "catchup/lyapunov.hpp"
#include "catchup/metrics.hpp"
#include "catchup/run.hpp"
#include "catchup/scenarios.hpp"
#include "catchup/solver.hpp"

namespace py = pybind11;
using namespace catchup;

namespace {

Phi0Options::Path parse_path(const std::string& name) {
  if (name == "auto") return Phi0Options::Path::Auto;
  if (name == "fb" || name == "forward-backward")
    return Phi0Options::Path::ForwardBackward;
  if (name == "exact") return Phi0Options::Path::Exact;
  throw std::invalid_argument("unknown path '" + name +
                              "' (expected auto, fb, or exact)");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Catching-up solver for state-dependent monotone inclusions";
  m.attr("__version__") = "0.1.0";
  m.attr("INF") = kInf;

  py::register_exception<ResolventError>(m, "ResolventError");
  py::register_exception<ConfigError>(m, "ConfigError");

  // ---- sets ----
  py::class_<Box>(m, "Box")
      .def(py::init([](Vec lo, Vec hi) {
             return Box{std::move(lo), std::move(hi)};
           }),
           py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &Box::lo)
      .def_readwrite("hi", &Box::hi)
      .def("dim", &Box::dim)
      .def("bounded", &Box::bounded)
      .def("contains", &Box::contains, py::arg("x"), py::arg("tol") = 1e-9)
      .def("clamp", &Box::clamp, py::arg("x"))
      .def("min_norm", &Box::min_norm);

  py::enum_<SetKind>(m, "SetKind")
      .value("IntervalProduct", SetKind::IntervalProduct)
      .value("Ball", SetKind::Ball)
      .value("Polytope", SetKind::Polytope);

  py::class_<ConvexSet>(m, "ConvexSet")
      .def_static("interval_product", &ConvexSet::interval_product, py::arg("lo"),
                  py::arg("hi"))
      .def_static("interval", &ConvexSet::interval, py::arg("lo"), py::arg("hi"))
      .def_static("ball", &ConvexSet::ball, py::arg("center"), py::arg("radius"))
      .def_static("polytope", &ConvexSet::polytope, py::arg("A"), py::arg("b"))
      .def("dim", &ConvexSet::dim)
      .def("kind", &ConvexSet::kind)
      .def("bounded", &ConvexSet::bounded)
      .def("project", &ConvexSet::project, py::arg("y"))
      .def("distance", &ConvexSet::distance, py::arg("y"))
      .def("contains", &ConvexSet::contains, py::arg("y"), py::arg("tol") = 1e-8)
      .def("support", &ConvexSet::support, py::arg("d"))
      .def("any_point", &ConvexSet::any_point)
      .def("vertices", &ConvexSet::vertices)
      .def("normal_box", &ConvexSet::normal_box, py::arg("x"),
           py::arg("tol") = 1e-9);

  m.def("min_linear_over_box_ball", &min_linear_over_box_ball, py::arg("xi"),
        py::arg("box"), py::arg("M"));

  // ---- operators ----
  py::class_<OperatorConstants>(m, "OperatorConstants")
      .def(py::init<>())
      .def(py::init([](double c_A, double L1, double L2) {
             return OperatorConstants{c_A, L1, L2};
           }),
           py::arg("c_A") = 0.0, py::arg("L1") = 0.0, py::arg("L2") = 0.0)
      .def_readwrite("c_A", &OperatorConstants::c_A)
      .def_readwrite("L1", &OperatorConstants::L1)
      .def_readwrite("L2", &OperatorConstants::L2);

  py::enum_<OpKind>(m, "OpKind")
      .value("NormalCone", OpKind::NormalCone)
      .value("SignRelay", OpKind::SignRelay)
      .value("LinearPsd", OpKind::LinearPsd)
      .value("Shifted", OpKind::Shifted)
      .value("DirectSum", OpKind::DirectSum)
      .value("LureComposed", OpKind::LureComposed);

  py::class_<OperatorHandle>(m, "Operator")
      .def("dim", &OperatorHandle::dim)
      .def("kind", &OperatorHandle::kind)
      .def("constants", &OperatorHandle::constants,
           py::return_value_policy::copy)
      .def("with_constants", &OperatorHandle::with_constants, py::arg("constants"))
      .def("resolvent", &OperatorHandle::resolvent, py::arg("t"), py::arg("state"),
           py::arg("lam"), py::arg("y"))
      .def("yosida", &OperatorHandle::yosida, py::arg("t"), py::arg("state"),
           py::arg("lam"), py::arg("y"))
      .def("minimal_norm", &OperatorHandle::minimal_norm, py::arg("t"),
           py::arg("state"), py::arg("x"))
      .def("in_domain", &OperatorHandle::in_domain, py::arg("t"), py::arg("state"),
           py::arg("x"), py::arg("tol") = 1e-8)
      .def("image_box", &OperatorHandle::image_box, py::arg("t"), py::arg("state"),
           py::arg("x"))
      .def(
          "sample_image",
          [](const OperatorHandle& op, double t, const Vec& state, const Vec& x,
             std::uint64_t seed, double scale) {
            std::mt19937_64 rng(seed);
            return op.sample_image(t, state, x, rng, scale);
          },
          py::arg("t"), py::arg("state"), py::arg("x"), py::arg("seed") = 1234,
          py::arg("scale") = 1.0)
      .def(
          "graph_residual",
          [](const OperatorHandle& op, double t, const Vec& state, const Vec& base,
             const Vec& image, double mu) {
            return op.graph_residual(t, state, GraphPoint{base, image}, mu);
          },
          py::arg("t"), py::arg("state"), py::arg("base"), py::arg("image"),
          py::arg("mu") = 1.0);

  m.def("normal_cone",
        py::overload_cast<int, SetMap, OperatorConstants>(&normal_cone),
        py::arg("dim"), py::arg("set_map"),
        py::arg("constants") = OperatorConstants{});
  m.def("normal_cone",
        py::overload_cast<ConvexSet, OperatorConstants>(&normal_cone),
        py::arg("fixed_set"), py::arg("constants") = OperatorConstants{});
  m.def("sign_relay", &sign_relay, py::arg("dim"), py::arg("gamma"),
        py::arg("mask") = std::vector<int>{});
  m.def("linear_psd", &linear_psd, py::arg("M"));
  m.def("zero_operator", &zero_operator, py::arg("dim"));
  m.def("shift_operator", &shift_operator, py::arg("base"), py::arg("alpha"));
  m.def("direct_sum", &direct_sum, py::arg("blocks"));
  m.def("lure_composed", &lure_composed, py::arg("F"), py::arg("C"), py::arg("D"));

  // ---- metrics ----
  m.def("hausdorff", &hausdorff, py::arg("s1"), py::arg("s2"));
  m.def("resolvent_gap_bound", &resolvent_gap_bound, py::arg("lam"),
        py::arg("delta"), py::arg("f0norm"), py::arg("dis"));

  py::class_<DisEstimate>(m, "DisEstimate")
      .def_readonly("lower_bound", &DisEstimate::lower_bound)
      .def_readonly("best_value", &DisEstimate::best_value)
      .def_readonly("samples_used", &DisEstimate::samples_used);

  m.def(
      "dis_estimate",
      [](const OperatorHandle& op1, double t1, const Vec& s1,
         const OperatorHandle& op2, double t2, const Vec& s2, long budget,
         std::uint64_t seed) {
        DisParams params;
        params.seed = seed;
        return dis_estimate(op1, t1, s1, op2, t2, s2, budget, params);
      },
      py::arg("op1"), py::arg("t1"), py::arg("state1"), py::arg("op2"),
      py::arg("t2"), py::arg("state2"), py::arg("budget") = 100000,
      py::arg("seed") = 12345, py::call_guard<py::gil_scoped_release>());

  m.def("discrete_gronwall_bound", &discrete_gronwall_bound, py::arg("alpha"),
        py::arg("betas"));
  m.def("continuous_gronwall_bound", &continuous_gronwall_bound, py::arg("w0"),
        py::arg("a"), py::arg("b"), py::arg("alpha_exp"), py::arg("grid"));

  // ---- solver ----
  py::class_<InclusionProblem>(m, "InclusionProblem")
      .def(py::init([](int dim, std::function<Vec(double, const Vec&)> f,
                       OperatorHandle A, double c_f, double T) {
             InclusionProblem p;
             p.dim = dim;
             p.f = std::move(f);
             p.A = std::move(A);
             p.c_f = c_f;
             p.T = T;
             return p;
           }),
           py::arg("dim"), py::arg("f"), py::arg("A"), py::arg("c_f"),
           py::arg("T"))
      .def_readwrite("dim", &InclusionProblem::dim)
      .def_readwrite("f", &InclusionProblem::f)
      .def_readwrite("A", &InclusionProblem::A)
      .def_readwrite("c_f", &InclusionProblem::c_f)
      .def_readwrite("T", &InclusionProblem::T);

  py::class_<AprioriConstants>(m, "AprioriConstants")
      .def_readonly("delta", &AprioriConstants::delta)
      .def_readonly("c1", &AprioriConstants::c1)
      .def_readonly("m", &AprioriConstants::m)
      .def_readonly("M", &AprioriConstants::M);

  m.def("apriori_bounds",
        py::overload_cast<const Vec&, double, double, double, double, double>(
            &apriori_bounds),
        py::arg("x0"), py::arg("c_f"), py::arg("c_A"), py::arg("L1"),
        py::arg("L2"), py::arg("delta") = 1.0);
  m.def("apriori_bounds",
        py::overload_cast<const InclusionProblem&, const Vec&, double>(
            &apriori_bounds),
        py::arg("problem"), py::arg("x0"), py::arg("delta") = 1.0);
  m.def("apriori_bounds_minimized", &apriori_bounds_minimized, py::arg("x0"),
        py::arg("c_f"), py::arg("c_A"), py::arg("L1"), py::arg("L2"),
        py::arg("grid_points") = 121);

  py::class_<StepDiagnostics>(m, "StepDiagnostics")
      .def_readonly("residual", &StepDiagnostics::residual)
      .def_readonly("selection_norm", &StepDiagnostics::selection_norm);

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init([](double delta, bool allow_large_step, double residual_mu,
                       bool record_diagnostics) {
             SolveOptions o;
             o.delta = delta;
             o.allow_large_step = allow_large_step;
             o.residual_mu = residual_mu;
             o.record_diagnostics = record_diagnostics;
             return o;
           }),
           py::arg("delta") = 1.0, py::arg("allow_large_step") = false,
           py::arg("residual_mu") = 1.0, py::arg("record_diagnostics") = true)
      .def_readwrite("delta", &SolveOptions::delta)
      .def_readwrite("allow_large_step", &SolveOptions::allow_large_step)
      .def_readwrite("residual_mu", &SolveOptions::residual_mu)
      .def_readwrite("record_diagnostics", &SolveOptions::record_diagnostics);

  py::enum_<SolveStatus>(m, "SolveStatus")
      .value("Complete", SolveStatus::Complete)
      .value("Truncated", SolveStatus::Truncated);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("t0", &Trajectory::t0)
      .def_readonly("h", &Trajectory::h)
      .def_readonly("times", &Trajectory::times)
      .def_readonly("states", &Trajectory::states)
      .def_readonly("velocities", &Trajectory::velocities)
      .def_readonly("status", &Trajectory::status)
      .def_readonly("failure", &Trajectory::failure)
      .def_readonly("last_valid", &Trajectory::last_valid)
      .def("max_residual", &Trajectory::max_residual)
      .def("max_speed", &Trajectory::max_speed);

  m.def("admissible", &admissible, py::arg("problem"), py::arg("t0"),
        py::arg("x0"), py::arg("tol") = 1e-8,
        py::call_guard<py::gil_scoped_release>());
  m.def("solve", &solve, py::arg("problem"), py::arg("t0"), py::arg("x0"),
        py::arg("h"), py::arg("options") = SolveOptions{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<ConvergenceRow>(m, "ConvergenceRow")
      .def_readonly("h_coarse", &ConvergenceRow::h_coarse)
      .def_readonly("h_fine", &ConvergenceRow::h_fine)
      .def_readonly("gap", &ConvergenceRow::gap)
      .def_readonly("ratio", &ConvergenceRow::ratio);

  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("h_list", &ConvergenceReport::h_list)
      .def_readonly("rows", &ConvergenceReport::rows)
      .def_readonly("extrapolated_gap", &ConvergenceReport::extrapolated_gap)
      .def("gaps_decreasing", &ConvergenceReport::gaps_decreasing)
      .def("ratios_below", &ConvergenceReport::ratios_below, py::arg("cap"));

  m.def("convergence_study", &convergence_study, py::arg("problem"),
        py::arg("t0"), py::arg("x0"), py::arg("h_list"),
        py::arg("options") = SolveOptions{},
        py::arg("keep_trajectories") = false, py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<HypoProbeResult>(m, "HypoProbeResult")
      .def_readonly("k_estimate", &HypoProbeResult::k_estimate)
      .def_readonly("worst_quotient", &HypoProbeResult::worst_quotient)
      .def_readonly("pairs", &HypoProbeResult::pairs);

  m.def("hypo_probe", &hypo_probe, py::arg("A"), py::arg("t_grid"),
        py::arg("box"), py::arg("M"), py::arg("samples_per_t"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());

  // ---- lyapunov ----
  py::class_<SubdiffItem>(m, "SubdiffItem")
      .def(py::init([](double theta, Vec xi) {
             return SubdiffItem{theta, std::move(xi)};
           }),
           py::arg("theta"), py::arg("xi"))
      .def_readwrite("theta", &SubdiffItem::theta)
      .def_readwrite("xi", &SubdiffItem::xi);

  py::class_<LyapunovPair>(m, "LyapunovPair")
      .def(py::init([](std::function<double(double, const Vec&)> V,
                       std::function<double(double, const Vec&)> W, double a,
                       SubdiffMap proximal, SubdiffMap singular,
                       std::function<bool(double, const Vec&)> in_domain) {
             LyapunovPair p;
             p.V = std::move(V);
             p.W = std::move(W);
             p.a = a;
             p.proximal = std::move(proximal);
             p.singular = std::move(singular);
             p.in_domain = std::move(in_domain);
             return p;
           }),
           py::arg("V"), py::arg("W") = nullptr, py::arg("a") = 0.0,
           py::arg("proximal") = nullptr, py::arg("singular") = nullptr,
           py::arg("in_domain") = nullptr)
      .def_readwrite("a", &LyapunovPair::a)
      .def("eval_V", &LyapunovPair::eval_V, py::arg("t"), py::arg("x"))
      .def("eval_W", &LyapunovPair::eval_W, py::arg("t"), py::arg("x"));

  py::class_<DecayReport>(m, "DecayReport")
      .def_readonly("pass_", &DecayReport::pass)
      .def_readonly("slack", &DecayReport::slack)
      .def_readonly("v0", &DecayReport::v0)
      .def_readonly("composite", &DecayReport::composite)
      .def_readonly("max_increment", &DecayReport::max_increment)
      .def_readonly("max_violation", &DecayReport::max_violation)
      .def_readonly("first_exit", &DecayReport::first_exit)
      .def("__bool__", [](const DecayReport& r) { return r.pass; });

  m.def("evaluate_pair_decay", &evaluate_pair_decay, py::arg("trajectory"),
        py::arg("pair"), py::arg("slack") = -1.0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<ProximalReport>(m, "ProximalReport")
      .def_readonly("residual", &ProximalReport::residual)
      .def_readonly("singular_residual", &ProximalReport::singular_residual)
      .def_readonly("velocity_exact", &ProximalReport::velocity_exact)
      .def_readonly("velocity_nonempty", &ProximalReport::velocity_nonempty)
      .def_readonly("generators", &ProximalReport::generators);

  m.def("proximal_criterion", &proximal_criterion, py::arg("pair"),
        py::arg("problem"), py::arg("t"), py::arg("x"), py::arg("M"),
        py::arg("samples") = 64, py::arg("seed") = 1234,
        py::call_guard<py::gil_scoped_release>());

  // ---- applications ----
  py::class_<SweepingScenario>(m, "SweepingScenario")
      .def(py::init([](int dim, SetMap moving_set,
                       std::function<Vec(double, const Vec&)> f, double c_f,
                       double c_A, double L1, double L2, double T) {
             SweepingScenario s;
             s.dim = dim;
             s.moving_set = std::move(moving_set);
             s.f = std::move(f);
             s.c_f = c_f;
             s.c_A = c_A;
             s.L1 = L1;
             s.L2 = L2;
             s.T = T;
             return s;
           }),
           py::arg("dim"), py::arg("moving_set"), py::arg("f") = nullptr,
           py::arg("c_f") = 0.0, py::arg("c_A") = 0.0, py::arg("L1") = 0.0,
           py::arg("L2") = 0.0, py::arg("T") = 1.0)
      .def_readwrite("dim", &SweepingScenario::dim)
      .def_readwrite("c_f", &SweepingScenario::c_f)
      .def_readwrite("c_A", &SweepingScenario::c_A)
      .def_readwrite("L1", &SweepingScenario::L1)
      .def_readwrite("L2", &SweepingScenario::L2)
      .def_readwrite("T", &SweepingScenario::T);

  m.def("sweeping_problem", &sweeping_problem, py::arg("scenario"));

  py::class_<LureSystem>(m, "LureSystem")
      .def(py::init([](int n, int m_, std::function<Vec(double, const Vec&)> g,
                       double c_g, Mat B, Mat C, Mat D, OperatorHandle F,
                       double L_F1, double L_F2, double T) {
             LureSystem s;
             s.n = n;
             s.m = m_;
             s.g = std::move(g);
             s.c_g = c_g;
             s.B = std::move(B);
             s.C = std::move(C);
             s.D = std::move(D);
             s.F = std::move(F);
             s.L_F1 = L_F1;
             s.L_F2 = L_F2;
             s.T = T;
             return s;
           }),
           py::arg("n"), py::arg("m"), py::arg("g"), py::arg("c_g"),
           py::arg("B"), py::arg("C"), py::arg("D"), py::arg("F"),
           py::arg("L_F1") = 0.0, py::arg("L_F2") = 0.0, py::arg("T") = 1.0)
      .def_readwrite("n", &LureSystem::n)
      .def_readwrite("m", &LureSystem::m)
      .def_readwrite("c_g", &LureSystem::c_g)
      .def_readwrite("B", &LureSystem::B)
      .def_readwrite("C", &LureSystem::C)
      .def_readwrite("D", &LureSystem::D)
      .def_readwrite("F", &LureSystem::F)
      .def_readwrite("L_F1", &LureSystem::L_F1)
      .def_readwrite("L_F2", &LureSystem::L_F2)
      .def_readwrite("T", &LureSystem::T);

  py::class_<Phi0Result>(m, "Phi0Result")
      .def_readonly("z", &Phi0Result::z)
      .def_readonly("residual", &Phi0Result::residual)
      .def_readonly("converged", &Phi0Result::converged)
      .def_readonly("in_range_component", &Phi0Result::in_range_component)
      .def_readonly("iterations", &Phi0Result::iterations);

  m.def(
      "phi0_solve",
      [](const LureSystem& sys, double t, const Vec& x, const Vec& y,
         const std::string& path, double tol, int max_iter) {
        Phi0Options opts;
        opts.path = parse_path(path);
        opts.tol = tol;
        opts.max_iter = max_iter;
        py::gil_scoped_release release;
        return phi0_solve(sys, t, x, y, opts);
      },
      py::arg("system"), py::arg("t"), py::arg("x"), py::arg("y"),
      py::arg("path") = "auto", py::arg("tol") = 1e-11,
      py::arg("max_iter") = 5000);

  m.def(
      "lure_problem",
      [](const LureSystem& sys) { return lure_problem(sys); },
      py::arg("system"), py::call_guard<py::gil_scoped_release>());

  py::enum_<CheckStatus>(m, "CheckStatus")
      .value("Pass", CheckStatus::Pass)
      .value("Fail", CheckStatus::Fail)
      .value("SampledPass", CheckStatus::SampledPass)
      .value("SampledFail", CheckStatus::SampledFail)
      .value("Info", CheckStatus::Info);

  py::class_<AssumptionEntry>(m, "AssumptionEntry")
      .def_readonly("name", &AssumptionEntry::name)
      .def_readonly("status", &AssumptionEntry::status)
      .def_readonly("value", &AssumptionEntry::value)
      .def_readonly("detail", &AssumptionEntry::detail);

  py::class_<AssumptionReport>(m, "AssumptionReport")
      .def_readonly("entries", &AssumptionReport::entries)
      .def("all_passed", &AssumptionReport::all_passed);

  m.def(
      "check_assumptions",
      [](const LureSystem& sys) { return check_assumptions(sys); },
      py::arg("system"), py::call_guard<py::gil_scoped_release>());

  // ---- scenarios ----
  py::class_<ScenarioBundle>(m, "ScenarioBundle")
      .def_readonly("name", &ScenarioBundle::name)
      .def_readonly("problem", &ScenarioBundle::problem)
      .def_readonly("pair", &ScenarioBundle::pair)
      .def_readonly("t0", &ScenarioBundle::t0)
      .def_readonly("x0", &ScenarioBundle::x0)
      .def_readonly("default_h", &ScenarioBundle::default_h)
      .def_readonly("delta", &ScenarioBundle::delta);

  m.def("builtin_scenario_names", &builtin_scenario_names);
  m.def("builtin_scenario", &builtin_scenario, py::arg("name"));

  // ---- config driven runs ----
  py::class_<RunSettings>(m, "RunSettings")
      .def_readwrite("h", &RunSettings::h)
      .def_readwrite("refine", &RunSettings::refine)
      .def_readwrite("seed", &RunSettings::seed)
      .def_readwrite("slack", &RunSettings::slack)
      .def_readwrite("delta", &RunSettings::delta)
      .def_readwrite("out_dir", &RunSettings::out_dir);

  py::class_<LyapunovSettings>(m, "LyapunovSettings")
      .def_readwrite("enabled", &LyapunovSettings::enabled)
      .def_readwrite("samples", &LyapunovSettings::samples)
      .def_readwrite("radius", &LyapunovSettings::radius);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_readonly("kind", &ScenarioConfig::kind)
      .def_readonly("name", &ScenarioConfig::name)
      .def_readonly("bundle", &ScenarioConfig::bundle)
      .def_readwrite("run", &ScenarioConfig::run)
      .def_readwrite("lyap", &ScenarioConfig::lyap)
      .def_readonly("notes", &ScenarioConfig::notes);

  m.def("load_scenario_config_text", &load_scenario_config_text, py::arg("text"),
        py::arg("filename") = "<inline>");
  m.def("load_scenario_config_file", &load_scenario_config_file, py::arg("path"));

  py::class_<RunOutcome>(m, "RunOutcome")
      .def_readonly("exit_code", &RunOutcome::exit_code)
      .def_readonly("message", &RunOutcome::message)
      .def_readonly("scenario", &RunOutcome::scenario)
      .def_readonly("h", &RunOutcome::h)
      .def_readonly("files", &RunOutcome::files)
      .def_readonly("decay", &RunOutcome::decay)
      .def_readonly("convergence", &RunOutcome::convergence)
      .def_readonly("trajectory", &RunOutcome::trajectory)
      .def_readonly("report_text", &RunOutcome::report_text)
      .def_readonly("wall_seconds", &RunOutcome::wall_seconds);

  m.def("run_config", &run_config, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
}
