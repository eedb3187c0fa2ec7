// Command-line surface for the observable-regularity toolkit.  Every
// subcommand works inside one experiment directory (--out):
//
//   simulate     integrate the reference flow, write snapshots/
//   observe      extract modal or nodal observations into obs/
//   interpolate  broken-H^1 norm report from nodal observations
//   monitor      evaluate the regularity criterion over the observation series
//   nudge        run the data-assimilation system against the snapshots
//   report       gather plot-ready CSVs and an overview JSON under report/
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "obsreg/obsreg.hpp"

namespace fs = std::filesystem;
using namespace obsreg;

namespace {

std::string indexed(const std::string& dir, const char* stem, size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%06zu.bin", stem, i);
  return dir + "/" + buf;
}

Trajectory load_trajectory(const std::string& out_dir, const ExperimentConfig& cfg) {
  Trajectory traj;
  traj.nu = cfg.solver.nu;
  traj.forcing = cfg.make_forcing();
  const std::string dir = out_dir + "/snapshots";
  for (size_t i = 0;; ++i) {
    const std::string path = indexed(dir, "snap", i);
    if (!fs::exists(path)) break;
    LoadedSnapshot s = load_snapshot(path);
    if (!(s.field.torus == cfg.torus))
      throw Error(path + ": snapshot torus (L = " + std::to_string(s.field.torus.L) +
                  ", n_spec = " + std::to_string(s.field.torus.n_spec) +
                  ") does not match config torus.L / torus.n_spec");
    traj.torus = s.field.torus;
    traj.snapshots.push_back({s.time, std::move(s.field)});
  }
  if (traj.snapshots.empty())
    throw Error(dir + ": no snapshots found; run `obsreg simulate` first");
  return traj;
}

int cmd_simulate(const ExperimentConfig& cfg) {
  SolverConfig sc;
  sc.nu = cfg.solver.nu;
  sc.dt = cfg.solver.dt;
  sc.t_end = cfg.solver.t_end;
  sc.dealias = cfg.solver.dealias;
  sc.snapshot_every = cfg.solver.snapshot_every;
  sc.forcing = cfg.make_forcing();
  const Trajectory traj = run(cfg.make_initial(), sc);

  fs::create_directories(cfg.out_dir + "/snapshots");
  std::string times = "index,t\n";
  for (size_t i = 0; i < traj.snapshots.size(); ++i) {
    save_snapshot(indexed(cfg.out_dir + "/snapshots", "snap", i), traj.snapshots[i].u,
                  traj.snapshots[i].t);
    times += std::to_string(i) + "," + fmt17(traj.snapshots[i].t) + "\n";
  }
  emit_report(cfg.out_dir + "/times.csv", times);
  std::cout << "simulate: wrote " << traj.snapshots.size() << " snapshots to " << cfg.out_dir
            << "/snapshots\n";
  return 0;
}

int cmd_observe(const ExperimentConfig& cfg) {
  const Trajectory traj = load_trajectory(cfg.out_dir, cfg);
  fs::create_directories(cfg.out_dir + "/obs");
  const bool modal = cfg.observer_kind() == ObserverKind::modal;
  for (size_t i = 0; i < traj.snapshots.size(); ++i) {
    if (modal) {
      ModalData md = observe_modal(traj.snapshots[i].u, cfg.observer.N);
      md.time = traj.snapshots[i].t;
      save_modal(indexed(cfg.out_dir + "/obs", "modal", i), md);
    } else {
      NodalData nd = observe_nodal(traj.snapshots[i].u, cfg.observer.n_cubes);
      nd.time = traj.snapshots[i].t;
      save_nodal(indexed(cfg.out_dir + "/obs", "nodal", i), nd);
    }
  }
  std::cout << "observe: wrote " << traj.snapshots.size() << " "
            << (modal ? "modal" : "nodal") << " observation files to " << cfg.out_dir
            << "/obs\n";
  return 0;
}

std::vector<ModalData> load_modal_series(const std::string& out_dir) {
  std::vector<ModalData> v;
  for (size_t i = 0;; ++i) {
    const std::string path = indexed(out_dir + "/obs", "modal", i);
    if (!fs::exists(path)) break;
    v.push_back(load_modal(path));
  }
  return v;
}

std::vector<NodalData> load_nodal_series(const std::string& out_dir) {
  std::vector<NodalData> v;
  for (size_t i = 0;; ++i) {
    const std::string path = indexed(out_dir + "/obs", "nodal", i);
    if (!fs::exists(path)) break;
    v.push_back(load_nodal(path));
  }
  return v;
}

int cmd_interpolate(const ExperimentConfig& cfg) {
  const std::vector<NodalData> series = load_nodal_series(cfg.out_dir);
  if (series.empty())
    throw Error(cfg.out_dir + "/obs: no nodal observations found; run `obsreg observe` "
                "with observer.kind = nodal first");
  std::vector<H1Report> rows;
  size_t best = 0;
  for (size_t i = 0; i < series.size(); ++i) {
    H1Report r;
    r.norms = h1_data_norms(series[i]);
    r.h = series[i].h;
    r.n_cubes = series[i].n_cubes;
    r.t = series[i].time;
    if (rows.empty() || r.norms.data > rows[best].norms.data) best = i;
    rows.push_back(r);
  }
  emit_report(cfg.out_dir + "/h1_norms.csv", h1_norms_csv(rows));
  emit_report(cfg.out_dir + "/h1_report.json", to_json(rows[best]));
  std::cout << "interpolate: wrote h1_norms.csv (" << rows.size() << " rows) and h1_report.json\n";
  return 0;
}

int cmd_monitor(const ExperimentConfig& cfg) {
  ObservationSeries series;
  series.kind = cfg.observer_kind();
  const double t0 = cfg.monitor.t0;
  std::vector<std::pair<double, double>> mh_rows;

  if (series.kind == ObserverKind::modal) {
    for (ModalData& md : load_modal_series(cfg.out_dir)) {
      mh_rows.emplace_back(md.time, modal_h1_sq(md));
      if (md.time >= t0 - 1e-12) series.modal.push_back(std::move(md));
    }
  } else {
    for (NodalData& nd : load_nodal_series(cfg.out_dir)) {
      const H1DataNorms n = h1_data_norms(nd);
      mh_rows.emplace_back(nd.time, n.data * n.data);
      if (nd.time >= t0 - 1e-12) series.nodal.push_back(std::move(nd));
    }
  }
  if (series.size() == 0)
    throw Error(cfg.out_dir + "/obs: no observations at or after monitor.t0; run `obsreg "
                "observe` first");
  series.t0 = series.time(0);
  series.T = series.time(series.size() - 1);

  CriterionInputs in;
  in.mh_sq = series.kind == ObserverKind::modal ? mh_modal(series) : mh_nodal(series);
  const SpectralField f = cfg.make_forcing();
  const double fl2 = f.data.empty() ? 0.0 : norms(f).l2;
  in.f_l2_sq = fl2 * fl2;

  // Initial-gradient term: prefer the stored reference; otherwise fall back to
  // the first observation itself and flag the substitution in the report.
  const std::string snap0 = indexed(cfg.out_dir + "/snapshots", "snap", 0);
  in.grad_from_reference = false;
  if (fs::exists(snap0)) {
    for (size_t i = 0;; ++i) {
      const std::string path = indexed(cfg.out_dir + "/snapshots", "snap", i);
      if (!fs::exists(path)) break;
      LoadedSnapshot s = load_snapshot(path);
      if (s.time >= t0 - 1e-12) {
        in.grad_u0 = norms(s.field).h1;
        in.grad_from_reference = true;
        break;
      }
    }
  }
  if (!in.grad_from_reference) {
    in.grad_u0 = series.kind == ObserverKind::modal
                     ? std::sqrt(modal_h1_sq(series.modal.front()))
                     : h1_data_norms(series.nodal.front()).exact;
  }

  in.nu = cfg.solver.nu;
  in.lambda1 = cfg.torus.lambda1();
  in.c = cfg.monitor.c;
  in.h = cfg.monitor.h > 0.0
             ? cfg.monitor.h
             : observer_scale(series.kind,
                              series.kind == ObserverKind::modal ? cfg.observer.N
                                                                 : cfg.observer.n_cubes,
                              cfg.torus);
  in.variant = cfg.criterion_variant();
  CriterionReport rep = check(in);
  if (series.kind == ObserverKind::nodal && cfg.monitor.h == 0.0)
    rep.n_cubes = cfg.observer.n_cubes;

  emit_report(cfg.out_dir + "/criterion.json", to_json(rep));
  emit_report(cfg.out_dir + "/mh_series.csv", mh_series_csv(mh_rows));
  std::cout << "monitor: satisfied=" << (rep.satisfied ? "true" : "false")
            << " max_term=" << fmt17(rep.max_term()) << " threshold=" << fmt17(rep.threshold)
            << "\n";
  return 0;
}

int cmd_nudge(const ExperimentConfig& cfg) {
  const Trajectory traj = load_trajectory(cfg.out_dir, cfg);
  NudgeConfig nc;
  nc.mu = cfg.nudge.mu;
  nc.kind = cfg.observer_kind();
  nc.resolution = nc.kind == ObserverKind::modal ? cfg.observer.N : cfg.observer.n_cubes;
  nc.project_feedback = cfg.nudge.project;
  nc.c = cfg.monitor.c;
  nc.nu = cfg.solver.nu;
  nc.dt = cfg.solver.dt;
  nc.dealias = cfg.solver.dealias;
  nc.snapshot_every = cfg.solver.snapshot_every;
  nc.forcing = cfg.make_forcing();
  const NudgeResult res = run_nudged(traj, nc);

  emit_report(cfg.out_dir + "/sync.csv", to_csv(res.sync));
  if (res.sync.entries.empty())
    throw Error("nudge: no synchronization samples recorded (snapshot times do not align "
                "with solver.dt)");
  std::ostringstream os;
  const SyncSample& last = res.sync.entries.back();
  os << "{\"final_err_h1\":" << fmt17(last.err_h1) << ",\"final_err_l2\":" << fmt17(last.err_l2)
     << ",\"h_observer\":" << fmt17(res.h_observer) << ",\"kind\":\"" << to_string(nc.kind)
     << "\",\"mu\":" << fmt17(res.mu_used) << ",\"resolution\":" << res.resolution << "}\n";
  emit_report(cfg.out_dir + "/nudge_report.json", std::move(os).str());
  std::cout << "nudge: mu=" << fmt17(res.mu_used) << " final_err_l2=" << fmt17(last.err_l2)
            << "\n";
  return 0;
}

int cmd_report(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir + "/report");
  std::ostringstream ov;
  ov << "{";
  bool first = true;
  auto add = [&](const std::string& key, const std::string& value, bool quote) {
    if (!first) ov << ",";
    first = false;
    ov << "\"" << key << "\":";
    if (quote)
      ov << "\"" << value << "\"";
    else
      ov << value;
  };
  // copy plot-ready CSVs and inline the criterion verdict, in sorted key order
  std::string crit = "null";
  if (fs::exists(cfg.out_dir + "/criterion.json")) {
    crit = detail::read_file(cfg.out_dir + "/criterion.json");
    while (!crit.empty() && (crit.back() == '\n' || crit.back() == '\r')) crit.pop_back();
  }
  add("criterion", crit, false);
  std::string files = "[";
  bool ffirst = true;
  for (const char* name : {"h1_norms.csv", "mh_series.csv", "sync.csv", "times.csv"}) {
    const std::string src = cfg.out_dir + "/" + name;
    if (!fs::exists(src)) continue;
    emit_report(cfg.out_dir + "/report/" + name, detail::read_file(src));
    if (!ffirst) files += ",";
    ffirst = false;
    files += std::string("\"") + name + "\"";
  }
  files += "]";
  add("files", files, false);
  ov << "}\n";
  emit_report(cfg.out_dir + "/report/overview.json", std::move(ov).str());
  std::cout << "report: wrote " << cfg.out_dir << "/report/overview.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentConfig cfg;
  CLI::App app{"observable-regularity toolkit: spectral reference flow, finite observations, "
               "interpolant norms, regularity criterion, nudging"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "config file (INI-style sections)");

  app.add_option("--torus.L", cfg.torus.L, "box size L");
  app.add_option("--torus.n_spec", cfg.torus.n_spec, "collocation points per axis (even)");
  app.add_option("--solver.nu", cfg.solver.nu, "kinematic viscosity");
  app.add_option("--solver.dt", cfg.solver.dt, "time step");
  app.add_option("--solver.t_end", cfg.solver.t_end, "final time");
  app.add_option("--solver.dealias", cfg.solver.dealias, "2/3-rule dealiasing on/off");
  app.add_option("--snapshot-every,--solver.snapshot_every", cfg.solver.snapshot_every,
                 "record every k-th step");
  app.add_option("--initial.type", cfg.initial.type, "zero | abc | random");
  app.add_option("--initial.m", cfg.initial.m, "wavenumber of the ABC initial field");
  app.add_option("--initial.amp", cfg.initial.amp, "initial amplitude");
  app.add_option("--initial.A", cfg.initial.A, "ABC coefficient A");
  app.add_option("--initial.B", cfg.initial.B, "ABC coefficient B");
  app.add_option("--initial.C", cfg.initial.C, "ABC coefficient C");
  app.add_option("--initial.seed", cfg.initial.seed, "seed for random initial data");
  app.add_option("--forcing.type", cfg.forcing.type, "zero | abc");
  app.add_option("--forcing.m", cfg.forcing.m, "forcing wavenumber");
  app.add_option("--forcing.amp", cfg.forcing.amp, "forcing amplitude");
  app.add_option("--observer.kind", cfg.observer.kind, "modal | nodal");
  app.add_option("--N,--observer.N", cfg.observer.N, "modal cutoff N");
  app.add_option("--observer.n_cubes", cfg.observer.n_cubes, "nodal grid cubes per axis");
  app.add_option("--observer.collocation", cfg.observer.collocation,
                 "require nodes on the collocation grid");
  app.add_option("--c,--monitor.c", cfg.monitor.c, "criterion constant c");
  app.add_option("--t0,--monitor.t0", cfg.monitor.t0, "start of the monitoring window");
  app.add_option("--monitor.variant", cfg.monitor.variant, "thm-5.1 | thm-5.2");
  app.add_option("--h,--monitor.h", cfg.monitor.h, "criterion scale h (0 = observer scale)");
  app.add_option("--mu,--nudge.mu", cfg.nudge.mu, "relaxation gain (negative = default rule)");
  app.add_option("--nudge.project", cfg.nudge.project, "Leray-project the feedback term");
  app.add_option("--out", cfg.out_dir, "experiment directory");

  auto* c_sim = app.add_subcommand("simulate", "integrate the reference flow");
  auto* c_obs = app.add_subcommand("observe", "extract observations from snapshots");
  auto* c_int = app.add_subcommand("interpolate", "broken-H^1 norms of nodal observations");
  auto* c_mon = app.add_subcommand("monitor", "evaluate the regularity criterion");
  auto* c_nud = app.add_subcommand("nudge", "run the data-assimilation system");
  auto* c_rep = app.add_subcommand("report", "collect plot-ready outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help() << std::flush;
    return 2;
  }

  try {
    cfg.validate();
    if (c_sim->parsed()) return cmd_simulate(cfg);
    if (c_obs->parsed()) return cmd_observe(cfg);
    if (c_int->parsed()) return cmd_interpolate(cfg);
    if (c_mon->parsed()) return cmd_monitor(cfg);
    if (c_nud->parsed()) return cmd_nudge(cfg);
    if (c_rep->parsed()) return cmd_report(cfg);
    std::cerr << "no subcommand given\n" << app.help();
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
