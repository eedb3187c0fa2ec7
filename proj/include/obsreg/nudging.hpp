#ifndef OBSREG_NUDGING_HPP
#define OBSREG_NUDGING_HPP

#include "monitor.hpp"

namespace obsreg {

/** One observation of a velocity field, in whichever form the observer uses. */
struct Observation {
  ObserverKind kind = ObserverKind::modal;
  ModalData modal;
  NodalData nodal;
};

inline Observation observe(const SpectralField& u, ObserverKind kind, int resolution) {
  Observation o;
  o.kind = kind;
  if (kind == ObserverKind::modal)
    o.modal = observe_modal(u, resolution);
  else
    o.nodal = observe_nodal(u, resolution);
  return o;
}

/** Observer length scale h: grid spacing L/n_cubes, or lambda_N^{-1/2} for modes. */
inline double observer_scale(ObserverKind kind, int resolution, const TorusConfig& torus) {
  if (kind == ObserverKind::nodal) {
    if (resolution < 1) throw Error("observer_scale: n_cubes must be >= 1");
    return torus.L / resolution;
  }
  return 1.0 / std::sqrt(stokes_spectrum(torus).lambda(resolution));
}

/**
 * Default relaxation gain mu = min(nu/(c h^2), 10 max(nu lambda1, 1)): large
 * enough to act within the observable scale h (the criterion threshold shape),
 * capped so the explicit stages stay comfortably stable.  A heuristic, always
 * recorded next to the results.
 */
inline double default_gain(double nu, double lambda1, double c, double h) {
  if (!(nu > 0.0) || !(lambda1 > 0.0) || !(c > 0.0) || !(h > 0.0))
    throw Error("default_gain: nu, lambda1, c, h must be positive");
  return std::min(nu / (c * h * h), 10.0 * std::max(nu * lambda1, 1.0));
}

struct NudgeConfig {
  double mu = -1.0;  // >= 0 explicit gain; negative means "use the default rule"
  ObserverKind kind = ObserverKind::modal;
  int resolution = 0;  // modal cutoff N (0 = every represented mode) or n_cubes
  bool project_feedback = true;
  double c = 1.0;  // enters the default-gain rule only
  // solver parameters for the assimilating system, as in SolverConfig
  double nu = 1.0;
  double dt = 1e-2;
  bool dealias = true;
  int snapshot_every = 1;
  SpectralField forcing;
};

namespace detail {

/** P_N v realized as a mask: zero every mode with |k|^2 above the cutoff. */
inline SpectralField modal_cut(SpectralField v, int kk_cut) {
  const int n = v.n();
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const int kx = signed_wave(ix, n), ky = signed_wave(iy, n), kz = signed_wave(iz, n);
        if (kx * kx + ky * ky + kz * kz > kk_cut)
          for (int c = 0; c < 3; ++c) v.at(c, ix, iy, iz) = Cplx(0.0, 0.0);
      }
  return v;
}

/** Mean-corrected interpolant sampled on the collocation grid of `torus`. */
inline PhysicalField interpolant_on_grid(const Interpolant& it, const TorusConfig& torus) {
  const int n = torus.n_spec, P = it.nodal.n_cubes;
  PhysicalField out(torus);
  std::vector<int> cube(n);
  std::vector<double> yloc(n);
  for (int j = 0; j < n; ++j) {
    const double s = double(j) * P / n;  // grid position in units of h
    int c = int(std::floor(s));
    if (c >= P) c = P - 1;
    cube[j] = c;
    yloc[j] = std::min(std::max(s - c, 0.0), 1.0);
  }
  for (int jx = 0; jx < n; ++jx)
    for (int jy = 0; jy < n; ++jy)
      for (int jz = 0; jz < n; ++jz) {
        const Vec3 v = eval_in_cube(it.nodal, cube[jx], cube[jy], cube[jz],
                                    Vec3(yloc[jx], yloc[jy], yloc[jz])) -
                       it.mean;
        for (int c = 0; c < 3; ++c) out.at(c, jx, jy, jz) = v[c];
      }
  return out;
}

/** Spectral image of the interpolant I u, the form entering the feedback term. */
inline SpectralField interpolant_field(const Observation& obs, const TorusConfig& torus,
                                       bool project) {
  SpectralField f;
  if (obs.kind == ObserverKind::modal) {
    if (!(obs.modal.torus == torus))
      throw Error("feedback: modal observation resolution does not match the simulation");
    f = reconstruct(obs.modal);
  } else {
    if (std::abs(obs.nodal.L - torus.L) > 1e-12 * torus.L)
      throw Error("feedback: nodal observation box size does not match the simulation");
    f = to_spectral(interpolant_on_grid(mean_correct(obs.nodal), torus));
  }
  return project ? leray_project(std::move(f)) : f;
}

}  // namespace detail

/**
 * Relaxation term mu P_sigma(I u - I w).  I w applies the *same* observation
 * operator to the candidate field w, so the term is computable by an observer
 * who can only measure their own simulation: mu (P_N u - P_N w) for modes,
 * mu P_sigma(interp(u nodes) - interp(w nodes)) for nodes.
 */
inline SpectralField feedback(const Observation& u_obs, const SpectralField& w,
                              const NudgeConfig& cfg) {
  int res = cfg.resolution;
  if (u_obs.kind != cfg.kind) throw Error("feedback: observation kind does not match config");
  if (u_obs.kind == ObserverKind::modal) {
    if (res == 0) res = u_obs.modal.cutoff;
    if (u_obs.modal.cutoff != res)
      throw Error("feedback: modal cutoff mismatch (observation N = " +
                  std::to_string(u_obs.modal.cutoff) + ", config N = " + std::to_string(res) + ")");
  } else {
    if (res == 0) res = u_obs.nodal.n_cubes;
    if (u_obs.nodal.n_cubes != res)
      throw Error("feedback: nodal grid mismatch (observation n_cubes = " +
                  std::to_string(u_obs.nodal.n_cubes) + ", config n_cubes = " +
                  std::to_string(res) + ")");
  }
  const double mu = cfg.mu < 0.0
                        ? default_gain(cfg.nu, w.torus.lambda1(), cfg.c,
                                       observer_scale(cfg.kind, res, w.torus))
                        : cfg.mu;
  SpectralField diff = detail::interpolant_field(u_obs, w.torus, false);
  diff -= detail::interpolant_field(observe(w, cfg.kind, res), w.torus, false);
  if (cfg.project_feedback) diff = leray_project(std::move(diff));
  diff *= mu;
  return diff;
}

struct SyncSample {
  double t = 0.0;
  double err_l2 = 0.0;  // |u - w|
  double err_h1 = 0.0;  // ||u - w||
};

/** Synchronization diagnostic: errors recorded at the reference snapshot times. */
struct SyncSeries {
  std::vector<SyncSample> entries;
};

struct NudgeResult {
  Trajectory w;
  SyncSeries sync;
  double mu_used = 0.0;
  double h_observer = 0.0;
  int resolution = 0;
};

/**
 * Integrate the assimilating system dw/dt + B(w,w) + nu A w = f + mu(Iu - Iw)
 * from w(0) = 0, driving w toward the observed reference.  Observations of u
 * are held piecewise-constant in time (latest snapshot at or before t), so the
 * reference trajectory's cadence is the data rate.
 */
inline NudgeResult run_nudged(const Trajectory& reference, const NudgeConfig& cfg) {
  if (reference.snapshots.empty()) throw Error("run_nudged: reference has no snapshots");
  if (!(cfg.dt > 0.0)) throw Error("NudgeConfig.dt: must be positive");
  if (!(cfg.nu > 0.0)) throw Error("NudgeConfig.nu: must be positive");
  if (cfg.snapshot_every < 1) throw Error("NudgeConfig.snapshot_every: must be >= 1");
  const TorusConfig torus = reference.torus;
  int res = cfg.resolution;
  if (cfg.kind == ObserverKind::modal && res == 0) res = stokes_spectrum(torus).count();
  if (res < 1) throw Error("NudgeConfig.resolution: must be >= 1");
  if (!cfg.forcing.data.empty() && !(cfg.forcing.torus == torus))
    throw Error("NudgeConfig.forcing: resolution does not match the reference");

  const double h_obs = observer_scale(cfg.kind, res, torus);
  const double mu =
      cfg.mu < 0.0 ? default_gain(cfg.nu, torus.lambda1(), cfg.c, h_obs) : cfg.mu;
  const int kk_cut =
      cfg.kind == ObserverKind::modal ? stokes_spectrum(torus).kk_sorted[size_t(res) - 1] : 0;

  const bool forced = !cfg.forcing.data.empty();
  const SpectralField fhat = forced ? leray_project(cfg.forcing) : SpectralField();

  // Piecewise-constant observation of the reference: refreshed on snapshot change.
  size_t obs_idx = 0;
  SpectralField iu_modal;    // P_N u for the modal observer
  PhysicalField iu_grid;     // I u on the collocation grid for the nodal observer
  auto refresh_obs = [&](size_t idx) {
    const SpectralField& u = reference.snapshots[idx].u;
    if (cfg.kind == ObserverKind::modal)
      iu_modal = detail::modal_cut(u, kk_cut);
    else
      iu_grid = detail::interpolant_on_grid(mean_correct(observe_nodal(u, res)), torus);
  };
  refresh_obs(0);

  auto g = [&](const SpectralField& v) {
    SpectralField r = nonlinear_term(v, cfg.dealias);
    r *= -1.0;
    if (forced) r += fhat;
    if (mu != 0.0) {
      SpectralField fb;
      if (cfg.kind == ObserverKind::modal) {
        fb = iu_modal - detail::modal_cut(v, kk_cut);
      } else {
        PhysicalField diff = detail::interpolant_on_grid(
            mean_correct(observe_nodal(v, res)), torus);
        for (size_t i = 0; i < diff.data.size(); ++i)
          diff.data[i] = iu_grid.data[i] - diff.data[i];
        fb = to_spectral(diff);
      }
      if (cfg.project_feedback) fb = leray_project(std::move(fb));
      fb *= mu;
      r += fb;
    }
    return r;
  };

  NudgeResult out;
  out.mu_used = mu;
  out.h_observer = h_obs;
  out.resolution = res;
  out.w.torus = torus;
  out.w.nu = cfg.nu;
  out.w.forcing = cfg.forcing;

  SpectralField w(torus);  // w(0) = 0
  const double t_end = reference.snapshots.back().t;
  const long n_steps = steps_for(t_end, cfg.dt);
  const double tol = 1e-9 * std::max(1.0, t_end);
  size_t sync_idx = 0;

  auto at_time = [&](long i) { return double(i) * cfg.dt; };
  auto record = [&](long i) {
    const double t = at_time(i);
    while (sync_idx < reference.snapshots.size() &&
           reference.snapshots[sync_idx].t <= t + tol) {
      if (std::abs(reference.snapshots[sync_idx].t - t) <= tol) {
        const Norms e = norms(reference.snapshots[sync_idx].u - w);
        out.sync.entries.push_back({t, e.l2, e.h1});
      }
      ++sync_idx;
    }
  };

  record(0);
  out.w.snapshots.push_back({0.0, w});
  for (long i = 1; i <= n_steps; ++i) {
    // hold the newest observation available at the start of the step
    while (obs_idx + 1 < reference.snapshots.size() &&
           reference.snapshots[obs_idx + 1].t <= at_time(i - 1) + tol)
      refresh_obs(++obs_idx);
    w = if_rk4_step(w, cfg.nu, cfg.dt, g);
    const double t = at_time(i);
    if (!all_finite(w)) throw BlowupError(t);
    if (i % cfg.snapshot_every == 0 || i == n_steps) out.w.snapshots.push_back({t, w});
    record(i);
  }
  return out;
}

}  // namespace obsreg

#endif
