#include "catchup/run.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "catchup/metrics.hpp"

namespace catchup {

namespace {

// Shortest decimal that round-trips; locale independent.
std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void emit_trajectory(const Trajectory& traj, const LyapunovPair* pair,
                     const std::string& path) {
  const std::size_t n_rows = traj.states.size();
  const int dim = n_rows ? static_cast<int>(traj.states.front().size()) : 0;
  std::ostringstream out;
  out << "t";
  for (int i = 1; i <= dim; ++i) out << ", x_" << i;
  out << ", speed";
  if (pair) out << ", V, W, lyap_composite";
  out << "\n";

  bool exited = false;
  double integral = 0;
  double prev_w = 0;
  for (std::size_t j = 0; j < n_rows; ++j) {
    const double t = traj.times[j];
    const Vec& x = traj.states[j];
    out << fmt(t);
    for (int i = 0; i < dim; ++i) out << ", " << fmt(x[i]);
    double speed = 0;
    if (!traj.velocities.empty())
      speed = traj.velocities[std::min(j, traj.velocities.size() - 1)].norm();
    out << ", " << fmt(speed);
    if (pair) {
      double v = kInf, w = 0;
      if (!exited) {
        v = pair->eval_V(t, x);
        w = pair->eval_W(t, x);
        if (!pair->domain_ok(t, x) || !std::isfinite(v) || !std::isfinite(w))
          exited = true;
      }
      if (exited) {
        out << ", nan, nan, nan";
      } else {
        if (j > 0) integral += 0.5 * (prev_w + w) * (traj.times[j] - traj.times[j - 1]);
        prev_w = w;
        const double comp = std::exp(pair->a * (t - traj.t0)) * v + integral;
        out << ", " << fmt(v) << ", " << fmt(w) << ", " << fmt(comp);
      }
    }
    out << "\n";
  }
  write_atomic(path, out.str());
}

namespace {

void append_convergence_csv(const ConvergenceReport& rep, const std::string& path) {
  std::ostringstream out;
  out << "h_coarse, h_fine, gap, ratio\n";
  for (const auto& row : rep.rows)
    out << fmt(row.h_coarse) << ", " << fmt(row.h_fine) << ", " << fmt(row.gap)
        << ", " << fmt(row.ratio) << "\n";
  write_atomic(path, out.str());
}

const char* status_name(SolveStatus s) {
  return s == SolveStatus::Complete ? "complete" : "truncated";
}

}  // namespace

RunOutcome run_bundle(const ScenarioBundle& bundle, const RunSettings& run,
                      const LyapunovSettings& lyap, const std::string& notes) {
  RunOutcome out;
  out.scenario = bundle.name;
  const auto t_start = std::chrono::steady_clock::now();
  std::ostringstream rep;
  rep.setf(std::ios::boolalpha);

  auto finish = [&](int code, const std::string& msg) {
    out.exit_code = code;
    out.message = msg;
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    rep << "wall_seconds: " << fmt(out.wall_seconds) << "\n";
    rep << "status: " << msg << "\n";
    out.report_text = rep.str();
    if (!out.files.empty() || code != kExitInput) {
      const std::filesystem::path dir(run.out_dir.empty() ? "." : run.out_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      const std::string rp = (dir / "report.txt").string();
      try {
        write_atomic(rp, out.report_text);
        out.files.push_back(rp);
      } catch (const std::exception&) {
        // report is best effort; the outcome already carries the text
      }
    }
    return out;
  };

  try {
    const double h = run.h > 0 ? run.h : bundle.default_h;
    out.h = h;
    const double delta = run.delta.value_or(bundle.delta);
    SolveOptions opts;
    opts.delta = delta;

    rep << "scenario: " << bundle.name << "\n";
    rep << "t0: " << fmt(bundle.t0) << "\n";
    rep << "x0:";
    for (int i = 0; i < bundle.x0.size(); ++i) rep << " " << fmt(bundle.x0[i]);
    rep << "\n";
    rep << "T: " << fmt(bundle.problem.T) << "\n";
    rep << "h: " << fmt(h) << "\n";
    rep << "delta: " << fmt(delta) << "\n";
    if (!notes.empty()) rep << notes << (notes.back() == '\n' ? "" : "\n");

    if (!(h > 0)) return finish(kExitInput, "input error: step size must be positive");
    if (!admissible(bundle.problem, bundle.t0, bundle.x0))
      return finish(kExitInput,
                    "input error: initial state is not admissible (x0 must lie in "
                    "the operator domain at t0)");

    std::optional<AprioriConstants> ap;
    try {
      ap = apriori_bounds(bundle.problem, bundle.x0, delta);
      rep << "apriori: c1 " << fmt(ap->c1) << ", m " << fmt(ap->m) << ", M "
          << fmt(ap->M) << "\n";
    } catch (const std::exception& e) {
      rep << "apriori: unavailable (" << e.what() << ")\n";
    }

    const std::filesystem::path dir(run.out_dir.empty() ? "." : run.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    Trajectory traj;
    if (run.refine > 0) {
      std::vector<double> h_list;
      for (int k = 0; k <= run.refine; ++k) h_list.push_back(h * std::ldexp(1.0, -k));
      ConvergenceReport crep = convergence_study(bundle.problem, bundle.t0, bundle.x0,
                                                 h_list, opts, true);
      traj = crep.trajectories.back();
      rep << "refinement (" << crep.rows.size() << " halvings):\n";
      for (const auto& row : crep.rows)
        rep << "  h " << fmt(row.h_coarse) << " -> " << fmt(row.h_fine) << ": gap "
            << fmt(row.gap) << ", ratio " << fmt(row.ratio) << "\n";
      if (std::isfinite(crep.extrapolated_gap))
        rep << "  extrapolated gap: " << fmt(crep.extrapolated_gap) << "\n";
      const bool decreasing = crep.gaps_decreasing();
      rep << "  gaps decreasing: " << decreasing << "\n";
      const std::string cp = (dir / "convergence.csv").string();
      append_convergence_csv(crep, cp);
      out.files.push_back(cp);
      crep.trajectories.clear();
      out.convergence = std::move(crep);
      if (!decreasing) {
        const std::string tp = (dir / "trajectory.csv").string();
        emit_trajectory(traj, bundle.pair ? &*bundle.pair : nullptr, tp);
        out.files.push_back(tp);
        out.trajectory = std::move(traj);
        return finish(kExitCriterion,
                      "criterion failure: refinement gaps are not decreasing");
      }
    } else {
      traj = solve(bundle.problem, bundle.t0, bundle.x0, h, opts);
    }

    rep << "steps: " << traj.velocities.size() << "\n";
    rep << "solver: " << status_name(traj.status) << "\n";
    rep << "max_residual: " << fmt(traj.max_residual()) << "\n";
    rep << "max_speed: " << fmt(traj.max_speed()) << "\n";

    const LyapunovPair* pair =
        (bundle.pair && lyap.enabled) ? &*bundle.pair : nullptr;
    const std::string tp = (dir / "trajectory.csv").string();
    emit_trajectory(traj, pair, tp);
    out.files.push_back(tp);

    if (traj.status != SolveStatus::Complete) {
      out.trajectory = std::move(traj);
      return finish(kExitSolver, "solver failure: " + out.trajectory->failure);
    }

    if (pair) {
      DecayReport dr =
          evaluate_pair_decay(traj, *pair, run.slack ? *run.slack : -1.0);
      rep << "decay: pass " << dr.pass << ", V0 " << fmt(dr.v0) << ", slack "
          << fmt(dr.slack) << ", max_increment " << fmt(dr.max_increment)
          << ", max_violation " << fmt(dr.max_violation);
      if (dr.first_exit) rep << ", domain exit at step " << *dr.first_exit;
      rep << "\n";
      out.decay = dr;

      if (pair->proximal && ap) {
        const double radius = lyap.radius.value_or(ap->M);
        const std::size_t stride = std::max<std::size_t>(1, traj.states.size() / 50);
        int checked = 0, multi = 0, empty = 0;
        double worst = -kInf;
        for (std::size_t j = 0; j + 1 < traj.states.size(); j += stride) {
          ProximalReport pr = proximal_criterion(*pair, bundle.problem, traj.times[j],
                                                 traj.states[j], radius, lyap.samples,
                                                 run.seed + j);
          if (!pr.velocity_nonempty) {
            ++empty;
            continue;
          }
          if (!pr.velocity_exact) ++multi;
          ++checked;
          if (std::isfinite(pr.residual)) worst = std::max(worst, pr.residual);
        }
        rep << "proximal: checked " << checked << " points, sampled " << multi
            << ", empty " << empty << ", max residual "
            << (checked ? fmt(worst) : "n/a") << "\n";
      }

      if (!dr.pass) {
        out.trajectory = std::move(traj);
        return finish(kExitCriterion,
                      "criterion failure: composite Lyapunov quantity increased "
                      "beyond slack");
      }
    }

    out.trajectory = std::move(traj);
    return finish(kExitOk, "ok");
  } catch (const ConfigError& e) {
    return finish(kExitInput, std::string("input error: ") + e.what());
  } catch (const ResolventError& e) {
    return finish(kExitSolver, std::string("solver failure: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return finish(kExitInput, std::string("input error: ") + e.what());
  } catch (const std::runtime_error& e) {
    return finish(kExitSolver, std::string("solver failure: ") + e.what());
  }
}

RunOutcome run_config(const ScenarioConfig& cfg) {
  return run_bundle(cfg.bundle, cfg.run, cfg.lyap, cfg.notes);
}

}  // namespace catchup
