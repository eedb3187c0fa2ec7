#ifndef OBSREG_SPECTRAL_HPP
#define OBSREG_SPECTRAL_HPP

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "core.hpp"

namespace obsreg {

/**
 * Velocity field in Fourier space: three complex components on the full
 * n^3 cube of modes.  Convention (unnormalized inverse transform):
 *
 *   u(x_j) = sum_k uhat(k) exp(+2*pi*i k.j / n),   x_j = j L / n,
 *
 * so to_spectral divides the forward transform by n^3.  Component-major
 * layout; mode (kx,ky,kz) lives at storage index (wrap(kx) n + wrap(ky)) n + wrap(kz).
 */
struct SpectralField {
  TorusConfig torus;
  std::vector<Cplx> data;  // size 3 n^3

  SpectralField() = default;
  explicit SpectralField(const TorusConfig& t) : torus(t) {
    t.validate();
    data.assign(size_t(3) * t.n_spec * t.n_spec * t.n_spec, Cplx(0.0, 0.0));
  }

  int n() const { return torus.n_spec; }
  size_t n3() const { return size_t(n()) * n() * n(); }

  Cplx& at(int c, int ix, int iy, int iz) {
    return data[size_t(c) * n3() + (size_t(ix) * n() + iy) * n() + iz];
  }
  const Cplx& at(int c, int ix, int iy, int iz) const {
    return data[size_t(c) * n3() + (size_t(ix) * n() + iy) * n() + iz];
  }

  Cplx& mode(int c, const WaveVector& k) {
    return at(c, wrap_index(k.x(), n()), wrap_index(k.y(), n()), wrap_index(k.z(), n()));
  }
  const Cplx& mode(int c, const WaveVector& k) const {
    return at(c, wrap_index(k.x(), n()), wrap_index(k.y(), n()), wrap_index(k.z(), n()));
  }
};

/** Velocity samples on the collocation grid x_j = j L / n, same layout as SpectralField. */
struct PhysicalField {
  TorusConfig torus;
  std::vector<double> data;  // size 3 n^3

  PhysicalField() = default;
  explicit PhysicalField(const TorusConfig& t) : torus(t) {
    t.validate();
    data.assign(size_t(3) * t.n_spec * t.n_spec * t.n_spec, 0.0);
  }

  int n() const { return torus.n_spec; }
  size_t n3() const { return size_t(n()) * n() * n(); }

  double& at(int c, int ix, int iy, int iz) {
    return data[size_t(c) * n3() + (size_t(ix) * n() + iy) * n() + iz];
  }
  const double& at(int c, int ix, int iy, int iz) const {
    return data[size_t(c) * n3() + (size_t(ix) * n() + iy) * n() + iz];
  }
};

namespace detail {

/**
 * Cache of FFTW plans keyed by (n, sign).  Plans are created with
 * FFTW_ESTIMATE so repeated runs pick the same algorithm (bit-for-bit
 * reproducible output), and FFTW_UNALIGNED so they execute on any buffer.
 */
class FftPlanCache {
 public:
  static FftPlanCache& instance() {
    static FftPlanCache cache;
    return cache;
  }

  void execute(Cplx* buf, int n, int sign) {
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto key = std::make_pair(n, sign);
      auto it = plans_.find(key);
      if (it == plans_.end()) {
        std::vector<Cplx> scratch(size_t(n) * n * n);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        plan = fftw_plan_dft_3d(n, n, n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw Error("fftw_plan_dft_3d failed for n = " + std::to_string(n));
        plans_.emplace(key, plan);
      } else {
        plan = it->second;
      }
    }
    auto* p = reinterpret_cast<fftw_complex*>(buf);
    fftw_execute_dft(plan, p, p);
  }

 private:
  FftPlanCache() = default;
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

/** In-place 3-D transform of one component; sign -1 forward, +1 inverse. */
inline void fft3(Cplx* buf, int n, int sign) {
  FftPlanCache::instance().execute(buf, n, sign == -1 ? FFTW_FORWARD : FFTW_BACKWARD);
}

}  // namespace detail

/** Inverse transform: grid values u(x_j) = sum_k uhat(k) e^{2 pi i k.j/n}. */
inline PhysicalField to_physical(const SpectralField& f) {
  PhysicalField out(f.torus);
  const int n = f.n();
  std::vector<Cplx> buf(f.n3());
  for (int c = 0; c < 3; ++c) {
    std::copy(f.data.begin() + c * f.n3(), f.data.begin() + (c + 1) * f.n3(), buf.begin());
    detail::fft3(buf.data(), n, +1);
    for (size_t i = 0; i < f.n3(); ++i) out.data[c * f.n3() + i] = buf[i].real();
  }
  return out;
}

/**
 * Forward transform with 1/n^3 normalization, inverse of to_physical.  The
 * zero mode (spatial mean) is kept unless the caller asks for its removal.
 */
inline SpectralField to_spectral(const PhysicalField& g, bool remove_mean = false) {
  SpectralField out(g.torus);
  const int n = g.n();
  const double scale = 1.0 / double(g.n3());
  std::vector<Cplx> buf(g.n3());
  for (int c = 0; c < 3; ++c) {
    for (size_t i = 0; i < g.n3(); ++i) buf[i] = Cplx(g.data[c * g.n3() + i], 0.0);
    detail::fft3(buf.data(), n, -1);
    for (size_t i = 0; i < g.n3(); ++i) out.data[c * g.n3() + i] = buf[i] * scale;
    if (remove_mean) out.at(c, 0, 0, 0) = Cplx(0.0, 0.0);
  }
  return out;
}

/**
 * Leray projection onto divergence-free fields:
 * chat(k) <- chat(k) - k (k . chat) / |k|^2 per mode, and the k = 0 mode is
 * zeroed (the solver state space carries zero spatial mean).
 */
inline SpectralField leray_project(SpectralField f) {
  const int n = f.n();
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const double kx = signed_wave(ix, n), ky = signed_wave(iy, n), kz = signed_wave(iz, n);
        const double kk = kx * kx + ky * ky + kz * kz;
        Cplx& cx = f.at(0, ix, iy, iz);
        Cplx& cy = f.at(1, ix, iy, iz);
        Cplx& cz = f.at(2, ix, iy, iz);
        if (kk == 0.0) {
          cx = cy = cz = Cplx(0.0, 0.0);
          continue;
        }
        const Cplx kdot = (kx * cx + ky * cy + kz * cz) / kk;
        cx -= kx * kdot;
        cy -= ky * kdot;
        cz -= kz * kdot;
      }
  return f;
}

struct Norms {
  double l2 = 0.0;  // |u|,  L^2 norm
  double h1 = 0.0;  // ||u||, H^1 seminorm |A^{1/2} u|
};

/**
 * Parseval norms: |u|^2 = L^3 sum |uhat|^2 and ||u||^2 = L^3 sum lambda(k) |uhat|^2
 * with lambda(k) = (2 pi / L)^2 |k|^2.
 */
inline Norms norms(const SpectralField& f) {
  const int n = f.n();
  const double lam1 = f.torus.lambda1();
  double s0 = 0.0, s1 = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy)
        for (int iz = 0; iz < n; ++iz) {
          const double kx = signed_wave(ix, n), ky = signed_wave(iy, n), kz = signed_wave(iz, n);
          const double a = std::norm(f.at(c, ix, iy, iz));
          s0 += a;
          s1 += lam1 * (kx * kx + ky * ky + kz * kz) * a;
        }
  const double vol = f.torus.L * f.torus.L * f.torus.L;
  return Norms{std::sqrt(vol * s0), std::sqrt(vol * s1)};
}

/** L^2 inner product (u, v) = L^3 sum uhat(k) conj(vhat(k)), real part. */
inline double inner_l2(const SpectralField& u, const SpectralField& v) {
  if (!(u.torus == v.torus)) throw Error("inner_l2: mismatched torus configurations");
  double s = 0.0;
  for (size_t i = 0; i < u.data.size(); ++i)
    s += u.data[i].real() * v.data[i].real() + u.data[i].imag() * v.data[i].imag();
  return u.torus.L * u.torus.L * u.torus.L * s;
}

/** Max |k . uhat(k)| over modes; 0 for divergence-free fields. */
inline double max_divergence(const SpectralField& f) {
  const int n = f.n();
  double worst = 0.0;
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const double kx = signed_wave(ix, n), ky = signed_wave(iy, n), kz = signed_wave(iz, n);
        const Cplx d =
            kx * f.at(0, ix, iy, iz) + ky * f.at(1, ix, iy, iz) + kz * f.at(2, ix, iy, iz);
        worst = std::max(worst, std::abs(d));
      }
  return worst;
}

/**
 * Max |uhat(k) - conj(uhat(-k))| over representable pairs; 0 iff the grid
 * values are real.  Modes with a component equal to -n/2 have no negation
 * partner on the grid and are skipped.
 */
inline double hermitian_defect(const SpectralField& f) {
  const int n = f.n();
  double worst = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy)
        for (int iz = 0; iz < n; ++iz) {
          const int kx = signed_wave(ix, n), ky = signed_wave(iy, n), kz = signed_wave(iz, n);
          if (kx == -n / 2 || ky == -n / 2 || kz == -n / 2) continue;
          const Cplx a = f.at(c, ix, iy, iz);
          const Cplx b = f.mode(c, WaveVector(-kx, -ky, -kz));
          worst = std::max(worst, std::abs(a - std::conj(b)));
        }
  return worst;
}

/** Force exact conjugate symmetry by averaging uhat(k) with conj(uhat(-k)). */
inline SpectralField symmetrize(SpectralField f) {
  const int n = f.n();
  for (int c = 0; c < 3; ++c)
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy)
        for (int iz = 0; iz < n; ++iz) {
          const int kx = signed_wave(ix, n), ky = signed_wave(iy, n), kz = signed_wave(iz, n);
          if (kx == -n / 2 || ky == -n / 2 || kz == -n / 2) {
            f.at(c, ix, iy, iz) = Cplx(0.0, 0.0);  // unpaired; drop to keep values real
            continue;
          }
          WaveVector neg(-kx, -ky, -kz);
          const Cplx a = f.at(c, ix, iy, iz);
          const Cplx b = f.mode(c, neg);
          const Cplx avg = 0.5 * (a + std::conj(b));
          f.at(c, ix, iy, iz) = avg;
          f.mode(c, neg) = std::conj(avg);
        }
  return f;
}

// ---- elementwise arithmetic used by the time steppers ----

inline SpectralField& operator+=(SpectralField& a, const SpectralField& b) {
  for (size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
  return a;
}
inline SpectralField& operator-=(SpectralField& a, const SpectralField& b) {
  for (size_t i = 0; i < a.data.size(); ++i) a.data[i] -= b.data[i];
  return a;
}
inline SpectralField& operator*=(SpectralField& a, double s) {
  for (auto& v : a.data) v *= s;
  return a;
}
inline SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
inline SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
inline SpectralField operator*(double s, SpectralField a) { return a *= s; }

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i)
    worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  return worst;
}

inline bool all_finite(const SpectralField& f) {
  for (const auto& v : f.data)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

}  // namespace obsreg

#endif
