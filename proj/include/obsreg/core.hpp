#ifndef OBSREG_CORE_HPP
#define OBSREG_CORE_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace obsreg {

using Cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec3c = Eigen::Vector3cd;

/** Integer wave vector (kx, ky, kz), components in [-n/2, n/2-1]. */
using WaveVector = Eigen::Vector3i;

inline constexpr double two_pi = 6.283185307179586476925286766559;

/** Base error for domain failures (maps to CLI exit code 1). */
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Thrown when a time integration produces non-finite values. */
struct BlowupError : Error {
  double t;
  explicit BlowupError(double t_)
      : Error("solution became non-finite at t = " + std::to_string(t_)), t(t_) {}
};

/** Periodic box [0,L]^3 discretized with n_spec collocation points per axis. */
struct TorusConfig {
  double L = two_pi;
  int n_spec = 16;

  void validate() const {
    if (!(L > 0.0)) throw Error("TorusConfig.L: must be positive, got " + std::to_string(L));
    if (n_spec < 4 || n_spec % 2 != 0)
      throw Error("TorusConfig.n_spec: must be even and >= 4, got " + std::to_string(n_spec));
  }

  /** Smallest Stokes eigenvalue (2*pi/L)^2. */
  double lambda1() const { return (two_pi / L) * (two_pi / L); }

  bool operator==(const TorusConfig& o) const { return L == o.L && n_spec == o.n_spec; }
};

/** Storage index in [0,n) for a signed wave number. */
inline int wrap_index(int k, int n) {
  int r = k % n;
  return r < 0 ? r + n : r;
}

/** Signed wave number in [-n/2, n/2-1] for a storage index in [0,n). */
inline int signed_wave(int idx, int n) { return idx <= n / 2 - 1 ? idx : idx - n; }

/** Stokes eigenvalue (2*pi/L)^2 |k|^2 of a nonzero wave vector. */
inline double stokes_eigenvalue(const WaveVector& k, const TorusConfig& torus) {
  if (k.x() == 0 && k.y() == 0 && k.z() == 0)
    throw Error("stokes_eigenvalue: k = 0 is not an eigenmode of the Stokes operator");
  double kk = double(k.x()) * k.x() + double(k.y()) * k.y() + double(k.z()) * k.z();
  return torus.lambda1() * kk;
}

}  // namespace obsreg

#endif
