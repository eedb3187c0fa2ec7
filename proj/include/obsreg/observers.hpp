#ifndef OBSREG_OBSERVERS_HPP
#define OBSREG_OBSERVERS_HPP

#include <array>
#include <limits>
#include <vector>

#include "spectral.hpp"

namespace obsreg {

/**
 * Sorted Stokes spectrum on the represented modes (all k != 0 with components
 * in [-(n/2-1), n/2-1]; the unpaired -n/2 planes carry no real-field data).
 * Eigenvalues are kept as integer |k|^2 so cutoff comparisons are exact.
 */
struct StokesSpectrum {
  TorusConfig torus;
  std::vector<int> kk_sorted;  // |k|^2 ascending, with multiplicity

  int count() const { return int(kk_sorted.size()); }

  /** N-th smallest eigenvalue, 1-indexed, counted with multiplicity. */
  double lambda(int N) const {
    if (N < 1 || N > count())
      throw Error("StokesSpectrum.lambda: N out of range [1, " + std::to_string(count()) + "]");
    return torus.lambda1() * kk_sorted[size_t(N) - 1];
  }
};

inline StokesSpectrum stokes_spectrum(const TorusConfig& torus) {
  torus.validate();
  StokesSpectrum s;
  s.torus = torus;
  const int kmax = torus.n_spec / 2 - 1;
  s.kk_sorted.reserve(size_t(2 * kmax + 1) * (2 * kmax + 1) * (2 * kmax + 1) - 1);
  for (int kx = -kmax; kx <= kmax; ++kx)
    for (int ky = -kmax; ky <= kmax; ++ky)
      for (int kz = -kmax; kz <= kmax; ++kz) {
        if (kx == 0 && ky == 0 && kz == 0) continue;
        s.kk_sorted.push_back(kx * kx + ky * ky + kz * kz);
      }
  std::sort(s.kk_sorted.begin(), s.kk_sorted.end());
  return s;
}

struct ModalEntry {
  WaveVector k;
  std::array<Cplx, 3> c;
};

/** Low-mode observation P_N u: every retained mode coefficient, plus cutoff context. */
struct ModalData {
  TorusConfig torus;
  double time = 0.0;
  int cutoff = 0;           // N
  double lambda_N = 0.0;    // N-th eigenvalue
  double lambda_after = std::numeric_limits<double>::infinity();  // (N+1)-th, inf if exhausted
  std::vector<ModalEntry> modes;  // lexicographic in (kx, ky, kz)
};

/**
 * Projection onto the span of the first N Stokes eigenfunctions.  The retained
 * set is every k != 0 with lambda(k) <= lambda_N; under eigenvalue ties this
 * keeps whole shells, so the retained count can exceed N but the projector is
 * well defined.  Exactly-zero coefficients are dropped from the stored list
 * (the data is sparse; reconstruction is unaffected).
 */
inline ModalData observe_modal(const SpectralField& u, int N) {
  const StokesSpectrum spec = stokes_spectrum(u.torus);
  if (N < 1 || N > spec.count())
    throw Error("observe_modal: cutoff N out of range [1, " + std::to_string(spec.count()) + "]");
  ModalData md;
  md.torus = u.torus;
  md.cutoff = N;
  const int kk_cut = spec.kk_sorted[size_t(N) - 1];
  md.lambda_N = u.torus.lambda1() * kk_cut;
  if (N < spec.count()) md.lambda_after = u.torus.lambda1() * spec.kk_sorted[size_t(N)];
  const int kmax = u.torus.n_spec / 2 - 1;
  for (int kx = -kmax; kx <= kmax; ++kx)
    for (int ky = -kmax; ky <= kmax; ++ky)
      for (int kz = -kmax; kz <= kmax; ++kz) {
        if (kx == 0 && ky == 0 && kz == 0) continue;
        if (kx * kx + ky * ky + kz * kz > kk_cut) continue;
        const WaveVector k(kx, ky, kz);
        const std::array<Cplx, 3> c = {u.mode(0, k), u.mode(1, k), u.mode(2, k)};
        if (c[0] == Cplx(0, 0) && c[1] == Cplx(0, 0) && c[2] == Cplx(0, 0)) continue;
        md.modes.push_back({k, c});
      }
  return md;
}

/** P_N u as a spectral field (all unobserved modes zero). */
inline SpectralField reconstruct(const ModalData& md) {
  SpectralField f(md.torus);
  for (const auto& e : md.modes)
    for (int c = 0; c < 3; ++c) f.mode(c, e.k) = e.c[c];
  return f;
}

/** ||P_N u||^2 = L^3 sum lambda(k) |c(k)|^2, computed from the observation alone. */
inline double modal_h1_sq(const ModalData& md) {
  const double lam1 = md.torus.lambda1();
  double s = 0.0;
  for (const auto& e : md.modes) {
    const double kk = double(e.k.x()) * e.k.x() + double(e.k.y()) * e.k.y() +
                      double(e.k.z()) * e.k.z();
    s += lam1 * kk *
         (std::norm(e.c[0]) + std::norm(e.c[1]) + std::norm(e.c[2]));
  }
  const double L = md.torus.L;
  return L * L * L * s;
}

/** |P_N u|^2 = L^3 sum |c(k)|^2. */
inline double modal_l2_sq(const ModalData& md) {
  double s = 0.0;
  for (const auto& e : md.modes)
    s += std::norm(e.c[0]) + std::norm(e.c[1]) + std::norm(e.c[2]);
  const double L = md.torus.L;
  return L * L * L * s;
}

/** Point samples of u on the interpolation grid x_j = j h, h = L / n_cubes. */
struct NodalData {
  double L = 0.0;
  int n_cubes = 0;
  double h = 0.0;
  double time = 0.0;
  std::vector<Vec3> samples;  // lexicographic in (jx, jy, jz)

  Vec3& sample(int jx, int jy, int jz) {
    const int P = n_cubes;
    return samples[(size_t(wrap_index(jx, P)) * P + wrap_index(jy, P)) * P + wrap_index(jz, P)];
  }
  const Vec3& sample(int jx, int jy, int jz) const {
    const int P = n_cubes;
    return samples[(size_t(wrap_index(jx, P)) * P + wrap_index(jy, P)) * P + wrap_index(jz, P)];
  }
};

/**
 * Exact nodal samples u(j h).  The trigonometric sum is evaluated by three
 * successive one-axis contractions, not by interpolating from the collocation
 * grid, so any n_cubes works and values agree with evaluate_at to rounding.
 */
inline NodalData observe_nodal(const SpectralField& u, int n_cubes) {
  if (n_cubes < 2) throw Error("observe_nodal: n_cubes must be >= 2");
  const int n = u.n(), P = n_cubes;
  NodalData nd;
  nd.L = u.torus.L;
  nd.n_cubes = P;
  nd.h = u.torus.L / P;
  nd.samples.assign(size_t(P) * P * P, Vec3::Zero());

  std::vector<Cplx> W(size_t(n) * P);  // W[i*P + j] = exp(2 pi i k(i) j / P)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < P; ++j)
      W[size_t(i) * P + j] = std::polar(1.0, two_pi * signed_wave(i, n) * j / double(P));

  std::vector<Cplx> A(size_t(n) * n * P), B(size_t(n) * P * P), C(size_t(P) * P * P);
  for (int c = 0; c < 3; ++c) {
    std::fill(A.begin(), A.end(), Cplx(0, 0));
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy)
        for (int iz = 0; iz < n; ++iz) {
          const Cplx v = u.at(c, ix, iy, iz);
          if (v == Cplx(0, 0)) continue;
          for (int j = 0; j < P; ++j)
            A[(size_t(ix) * n + iy) * P + j] += v * W[size_t(iz) * P + j];
        }
    std::fill(B.begin(), B.end(), Cplx(0, 0));
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy)
        for (int jy = 0; jy < P; ++jy) {
          const Cplx w = W[size_t(iy) * P + jy];
          for (int jz = 0; jz < P; ++jz)
            B[(size_t(ix) * P + jy) * P + jz] += w * A[(size_t(ix) * n + iy) * P + jz];
        }
    std::fill(C.begin(), C.end(), Cplx(0, 0));
    for (int ix = 0; ix < n; ++ix)
      for (int jx = 0; jx < P; ++jx) {
        const Cplx w = W[size_t(ix) * P + jx];
        for (int jy = 0; jy < P; ++jy)
          for (int jz = 0; jz < P; ++jz)
            C[(size_t(jx) * P + jy) * P + jz] += w * B[(size_t(ix) * P + jy) * P + jz];
      }
    for (size_t i = 0; i < C.size(); ++i) nd.samples[i][c] = C[i].real();
  }
  return nd;
}

}  // namespace obsreg

#endif
