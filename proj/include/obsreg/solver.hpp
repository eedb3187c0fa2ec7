#ifndef OBSREG_SOLVER_HPP
#define OBSREG_SOLVER_HPP

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "fields.hpp"

namespace obsreg {

/** Zero every mode with a component above the 2/3 cutoff: keep |k_j| <= n/3. */
inline void apply_dealias_mask(SpectralField& f) {
  const int n = f.n();
  const int kc = n / 3;
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const int kx = signed_wave(ix, n), ky = signed_wave(iy, n), kz = signed_wave(iz, n);
        if (std::abs(kx) > kc || std::abs(ky) > kc || std::abs(kz) > kc)
          for (int c = 0; c < 3; ++c) f.at(c, ix, iy, iz) = Cplx(0.0, 0.0);
      }
}

namespace detail {

/** Grid values of the derivative d_m b_l (one inverse transform). */
inline std::vector<double> grad_component(const SpectralField& b, int l, int m) {
  const int n = b.n();
  const double kappa = two_pi / b.torus.L;
  std::vector<Cplx> buf(b.n3());
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const int kv[3] = {signed_wave(ix, n), signed_wave(iy, n), signed_wave(iz, n)};
        buf[(size_t(ix) * n + iy) * n + iz] =
            Cplx(0.0, kappa * kv[m]) * b.at(l, ix, iy, iz);
      }
  fft3(buf.data(), n, +1);
  std::vector<double> out(b.n3());
  for (size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real();
  return out;
}

}  // namespace detail

/**
 * Projected convective term P_sigma((a . grad) b), evaluated pseudo-spectrally
 * in convective form.  With dealias set, inputs are masked with the 2/3 rule
 * before the grid products and the result is masked again, so retained modes
 * carry no aliasing error.
 */
inline SpectralField advect(SpectralField a, SpectralField b, bool dealias = true) {
  if (!(a.torus == b.torus)) throw Error("advect: mismatched torus configurations");
  if (dealias) {
    apply_dealias_mask(a);
    apply_dealias_mask(b);
  }
  const PhysicalField ap = to_physical(a);
  PhysicalField conv(a.torus);
  for (int l = 0; l < 3; ++l)
    for (int m = 0; m < 3; ++m) {
      const std::vector<double> db = detail::grad_component(b, l, m);
      for (size_t i = 0; i < db.size(); ++i)
        conv.data[l * a.n3() + i] += ap.data[m * a.n3() + i] * db[i];
    }
  SpectralField out = leray_project(to_spectral(conv));
  if (dealias) apply_dealias_mask(out);
  return out;
}

/** B(u, u): the projected self-advection term of the momentum equation. */
inline SpectralField nonlinear_term(const SpectralField& u, bool dealias = true) {
  return advect(u, u, dealias);
}

/** Multiply each mode by exp(-nu * lambda(k) * tau) (the viscous semigroup). */
inline SpectralField exp_viscous(SpectralField f, double nu, double tau) {
  const int n = f.n();
  const double lam1 = f.torus.lambda1();
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const double kx = signed_wave(ix, n), ky = signed_wave(iy, n), kz = signed_wave(iz, n);
        const double e = std::exp(-nu * lam1 * (kx * kx + ky * ky + kz * kz) * tau);
        for (int c = 0; c < 3; ++c) f.at(c, ix, iy, iz) *= e;
      }
  return f;
}

/**
 * One step of the integrating-factor RK4 scheme for du/dt = -nu A u + g(u):
 * classical RK4 applied to v = e^{nu A t} u.  With E = e^{-nu A dt/2},
 *
 *   a = g(u),  b = g(E(u + dt/2 a)),  c = g(E u + dt/2 b),  d = g(E^2 u + dt E c),
 *   u' = E^2 u + dt/6 (E^2 a + 2 E (b + c) + d).
 *
 * The stiff viscous part is integrated exactly; only g is treated explicitly.
 */
template <class Rhs>
SpectralField if_rk4_step(const SpectralField& u, double nu, double dt, Rhs&& g) {
  const double h2 = 0.5 * dt;
  SpectralField a = g(u);
  SpectralField b = g(exp_viscous(u + h2 * a, nu, h2));
  SpectralField eu = exp_viscous(u, nu, h2);
  SpectralField c = g(eu + h2 * b);
  SpectralField e2u = exp_viscous(eu, nu, h2);
  SpectralField d = g(e2u + dt * exp_viscous(c, nu, h2));
  b += c;
  SpectralField out = std::move(e2u);
  out += (dt / 6.0) * (exp_viscous(std::move(a), nu, dt) + 2.0 * exp_viscous(std::move(b), nu, h2) + d);
  return out;
}

struct SolverConfig {
  double nu = 1.0;
  double dt = 1e-2;
  double t_end = 1.0;
  bool dealias = true;
  int snapshot_every = 1;     // record every k-th step (t = 0 and t_end always kept)
  SpectralField forcing;      // stationary; empty means zero

  void validate() const {
    if (!(nu > 0.0)) throw Error("SolverConfig.nu: must be positive");
    if (!(dt > 0.0)) throw Error("SolverConfig.dt: must be positive");
    if (!(t_end >= 0.0)) throw Error("SolverConfig.t_end: must be nonnegative");
    if (snapshot_every < 1) throw Error("SolverConfig.snapshot_every: must be >= 1");
  }
};

struct Snapshot {
  double t;
  SpectralField u;
};

struct Trajectory {
  TorusConfig torus;
  double nu = 0.0;
  SpectralField forcing;  // as supplied to the solver (empty means zero)
  std::vector<Snapshot> snapshots;

  const Snapshot& at_time(double t, double tol = 1e-9) const {
    for (const auto& s : snapshots)
      if (std::abs(s.t - t) <= tol) return s;
    throw Error("Trajectory: no snapshot at t = " + std::to_string(t));
  }
};

/**
 * One step of the momentum equation du/dt + B(u,u) + nu A u = f with the
 * integrating-factor RK4 scheme; the forcing is held stationary.
 */
inline SpectralField step(const SpectralField& u, const SolverConfig& cfg) {
  cfg.validate();
  if (!cfg.forcing.data.empty() && !(cfg.forcing.torus == u.torus))
    throw Error("SolverConfig.forcing: resolution does not match the state");
  const bool forced = !cfg.forcing.data.empty();
  const SpectralField fhat = forced ? leray_project(cfg.forcing) : SpectralField();
  auto g = [&](const SpectralField& v) {
    SpectralField r = nonlinear_term(v, cfg.dealias);
    r *= -1.0;
    if (forced) r += fhat;
    return r;
  };
  return if_rk4_step(u, cfg.nu, cfg.dt, g);
}

/** Number of dt-steps spanning [0, t_end]; t_end must sit on the step grid. */
inline long steps_for(double t_end, double dt) {
  const long n = std::lround(t_end / dt);
  if (std::abs(double(n) * dt - t_end) > 1e-9 * std::max(1.0, std::abs(t_end)))
    throw Error("t_end must be an integer multiple of dt");
  return n;
}

/**
 * Integrate the projected momentum equation du/dt + B(u,u) + nu A u = f from
 * u0, recording snapshots.  Throws BlowupError if the state leaves the range
 * of double precision.
 */
inline Trajectory run(const SpectralField& u0, const SolverConfig& cfg) {
  cfg.validate();
  if (!cfg.forcing.data.empty() && !(cfg.forcing.torus == u0.torus))
    throw Error("SolverConfig.forcing: resolution does not match the initial condition");
  Trajectory traj;
  traj.torus = u0.torus;
  traj.nu = cfg.nu;
  traj.forcing = cfg.forcing;

  SpectralField u = leray_project(u0);
  const long n_steps = steps_for(cfg.t_end, cfg.dt);
  traj.snapshots.push_back({0.0, u});
  for (long i = 1; i <= n_steps; ++i) {
    u = step(u, cfg);
    const double t = double(i) * cfg.dt;
    if (!all_finite(u)) throw BlowupError(t);
    if (i % cfg.snapshot_every == 0 || i == n_steps) traj.snapshots.push_back({t, u});
  }
  return traj;
}

}  // namespace obsreg

#endif
