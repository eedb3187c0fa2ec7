#ifndef OBSREG_FIELDS_HPP
#define OBSREG_FIELDS_HPP

#include <random>

#include "spectral.hpp"

namespace obsreg {

/**
 * ABC-type Beltrami field at wavenumber m (kappa = 2 pi / L):
 *
 *   u = amp * ( A sin(kappa m z) + C cos(kappa m y),
 *               B sin(kappa m x) + A cos(kappa m z),
 *               C sin(kappa m y) + B cos(kappa m x) )
 *
 * Divergence-free curl eigenfield, curl u = kappa m u, hence a Stokes
 * eigenfield with lambda = (kappa m)^2.  Built directly in Fourier space.
 */
inline SpectralField abc_field(const TorusConfig& torus, int m, double amp, double A = 1.0,
                               double B = 1.0, double C = 1.0) {
  torus.validate();
  if (m < 1 || m > torus.n_spec / 2 - 1)
    throw Error("abc_field: wavenumber m must lie in [1, n_spec/2 - 1]");
  SpectralField f(torus);
  const Cplx half(0.5, 0.0), mhalf_i(0.0, -0.5), half_i(0.0, 0.5);
  const WaveVector ex(m, 0, 0), ey(0, m, 0), ez(0, 0, m);
  // component x: A sin(k z) + C cos(k y)
  f.mode(0, ez) = amp * A * mhalf_i;
  f.mode(0, -ez) = amp * A * half_i;
  f.mode(0, ey) = amp * C * half;
  f.mode(0, -ey) = amp * C * half;
  // component y: B sin(k x) + A cos(k z)
  f.mode(1, ex) = amp * B * mhalf_i;
  f.mode(1, -ex) = amp * B * half_i;
  f.mode(1, ez) = amp * A * half;
  f.mode(1, -ez) = amp * A * half;
  // component z: C sin(k y) + B cos(k x)
  f.mode(2, ey) = amp * C * mhalf_i;
  f.mode(2, -ey) = amp * C * half_i;
  f.mode(2, ex) = amp * B * half;
  f.mode(2, -ex) = amp * B * half;
  return f;
}

/** Single-mode shear u_comp = amp * sin(kappa m x_dep), comp != dep; divergence-free. */
inline SpectralField shear_field(const TorusConfig& torus, int comp, int dep, int m, double amp) {
  torus.validate();
  if (comp == dep || comp < 0 || comp > 2 || dep < 0 || dep > 2)
    throw Error("shear_field: component and dependence axis must differ and lie in {0,1,2}");
  if (m < 1 || m > torus.n_spec / 2 - 1)
    throw Error("shear_field: wavenumber m must lie in [1, n_spec/2 - 1]");
  SpectralField f(torus);
  WaveVector k(0, 0, 0);
  k[dep] = m;
  f.mode(comp, k) = Cplx(0.0, -0.5 * amp);
  f.mode(comp, -k) = Cplx(0.0, 0.5 * amp);
  return f;
}

namespace detail {

/** Box-Muller on explicit 53-bit uniforms; reproducible across platforms. */
inline double gaussian(std::mt19937_64& rng) {
  double u1 = 0.0;
  while (u1 == 0.0) u1 = double(rng() >> 11) * 0x1p-53;
  const double u2 = double(rng() >> 11) * 0x1p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace detail

/**
 * Random divergence-free field with smooth spectrum |uhat(k)| ~ e^{-decay |k|},
 * normalized to L^2 norm amp.  Deterministic for a given seed.
 */
inline SpectralField random_solenoidal(const TorusConfig& torus, uint64_t seed, double amp,
                                       double decay = 1.0) {
  torus.validate();
  SpectralField f(torus);
  std::mt19937_64 rng(seed);
  const int n = torus.n_spec;
  const int kmax = n / 2 - 1;
  for (int c = 0; c < 3; ++c)
    for (int kx = -kmax; kx <= kmax; ++kx)
      for (int ky = -kmax; ky <= kmax; ++ky)
        for (int kz = -kmax; kz <= kmax; ++kz) {
          if (kx == 0 && ky == 0 && kz == 0) continue;
          const double r = std::sqrt(double(kx) * kx + double(ky) * ky + double(kz) * kz);
          const double w = std::exp(-decay * r);
          f.mode(c, WaveVector(kx, ky, kz)) =
              Cplx(w * detail::gaussian(rng), w * detail::gaussian(rng));
        }
  f = leray_project(symmetrize(std::move(f)));
  const double cur = norms(f).l2;
  if (cur > 0.0) f *= amp / cur;
  return f;
}

/** Exact trigonometric evaluation of the field at one point (O(n^3) sum). */
inline Vec3 evaluate_at(const SpectralField& f, const Vec3& x) {
  const int n = f.n();
  const double kappa = two_pi / f.torus.L;
  std::vector<Cplx> phx(n), phy(n), phz(n);
  for (int i = 0; i < n; ++i) {
    const double k = signed_wave(i, n);
    phx[i] = std::polar(1.0, kappa * k * x.x());
    phy[i] = std::polar(1.0, kappa * k * x.y());
    phz[i] = std::polar(1.0, kappa * k * x.z());
  }
  Vec3 out = Vec3::Zero();
  for (int c = 0; c < 3; ++c) {
    Cplx acc(0.0, 0.0);
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const Cplx pxy = phx[ix] * phy[iy];
        for (int iz = 0; iz < n; ++iz) acc += f.at(c, ix, iy, iz) * pxy * phz[iz];
      }
    out[c] = acc.real();
  }
  return out;
}

/**
 * Values of the field on the uniform M^3 grid x_m = (m + offset) L / M,
 * offset in [0,1).  Exact for M >= n_spec: the spectrum is zero-padded into
 * an M^3 cube, phase-shifted by the offset, and inverse transformed.
 * Layout matches PhysicalField: component-major, index (ix M + iy) M + iz.
 */
inline std::vector<double> dense_samples(const SpectralField& f, int M, double offset) {
  const int n = f.n();
  if (M < n) throw Error("dense_samples: target grid must be at least as fine as the spectrum");
  std::vector<double> out(size_t(3) * M * M * M);
  std::vector<Cplx> buf(size_t(M) * M * M);
  std::vector<Cplx> phase(n);
  for (int i = 0; i < n; ++i)
    phase[i] = std::polar(1.0, two_pi * signed_wave(i, n) * offset / double(M));
  for (int c = 0; c < 3; ++c) {
    std::fill(buf.begin(), buf.end(), Cplx(0.0, 0.0));
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy)
        for (int iz = 0; iz < n; ++iz) {
          const int jx = wrap_index(signed_wave(ix, n), M);
          const int jy = wrap_index(signed_wave(iy, n), M);
          const int jz = wrap_index(signed_wave(iz, n), M);
          buf[(size_t(jx) * M + jy) * M + jz] =
              f.at(c, ix, iy, iz) * phase[ix] * phase[iy] * phase[iz];
        }
    detail::fft3(buf.data(), M, +1);
    for (size_t i = 0; i < buf.size(); ++i) out[size_t(c) * M * M * M + i] = buf[i].real();
  }
  return out;
}

}  // namespace obsreg

#endif
