#ifndef OBSREG_TESTS_ORACLES_HPP
#define OBSREG_TESTS_ORACLES_HPP

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately brute-force and shares no arithmetic with
// the code under test beyond the data layout accessors.

#include <cmath>
#include <random>
#include <vector>

#include "obsreg/obsreg.hpp"

namespace oracle {

using obsreg::Cplx;
using obsreg::SpectralField;
using obsreg::Vec3;
using obsreg::two_pi;

/** O(n^6) inverse DFT of one component by direct summation; complex output. */
inline std::vector<Cplx> dft_inverse(const SpectralField& f, int comp) {
  const int n = f.n();
  std::vector<Cplx> out(size_t(n) * n * n, Cplx(0, 0));
  for (int jx = 0; jx < n; ++jx)
    for (int jy = 0; jy < n; ++jy)
      for (int jz = 0; jz < n; ++jz) {
        Cplx acc(0, 0);
        for (int ix = 0; ix < n; ++ix)
          for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
              const double ph = two_pi * (double(ix) * jx + double(iy) * jy + double(iz) * jz) /
                                double(n);
              acc += f.at(comp, ix, iy, iz) * Cplx(std::cos(ph), std::sin(ph));
            }
        out[(size_t(jx) * n + jy) * n + jz] = acc;
      }
  return out;
}

/**
 * Convective term by direct circular convolution over mode pairs:
 * out_l(k) = sum_{p+q = k mod n} a_m(p) (i kappa q~_m) b_l(q), with q~ the
 * signed wave of q; then the Leray projection, mirroring advect's masking.
 */
inline SpectralField convolution_advect(SpectralField a, SpectralField b, bool dealias) {
  if (dealias) {
    obsreg::apply_dealias_mask(a);
    obsreg::apply_dealias_mask(b);
  }
  const int n = a.n();
  const double kappa = two_pi / a.torus.L;
  SpectralField out(a.torus);
  for (int px = 0; px < n; ++px)
    for (int py = 0; py < n; ++py)
      for (int pz = 0; pz < n; ++pz) {
        const Cplx ap[3] = {a.at(0, px, py, pz), a.at(1, px, py, pz), a.at(2, px, py, pz)};
        if (ap[0] == Cplx(0, 0) && ap[1] == Cplx(0, 0) && ap[2] == Cplx(0, 0)) continue;
        for (int qx = 0; qx < n; ++qx)
          for (int qy = 0; qy < n; ++qy)
            for (int qz = 0; qz < n; ++qz) {
              const double qs[3] = {double(obsreg::signed_wave(qx, n)),
                                    double(obsreg::signed_wave(qy, n)),
                                    double(obsreg::signed_wave(qz, n))};
              const int kx = (px + qx) % n, ky = (py + qy) % n, kz = (pz + qz) % n;
              for (int l = 0; l < 3; ++l) {
                const Cplx bq = b.at(l, qx, qy, qz);
                if (bq == Cplx(0, 0)) continue;
                Cplx term(0, 0);
                for (int m = 0; m < 3; ++m)
                  term += ap[m] * Cplx(0.0, kappa * qs[m]);
                out.at(l, kx, ky, kz) += term * bq;
              }
            }
      }
  out = obsreg::leray_project(std::move(out));
  if (dealias) obsreg::apply_dealias_mask(out);
  return out;
}

/** 3x3 inverse by Cramer's rule on plain arrays (no Eigen). */
inline void inv3(const double W[3][3], double out[3][3]) {
  const double det = W[0][0] * (W[1][1] * W[2][2] - W[1][2] * W[2][1]) -
                     W[0][1] * (W[1][0] * W[2][2] - W[1][2] * W[2][0]) +
                     W[0][2] * (W[1][0] * W[2][1] - W[1][1] * W[2][0]);
  out[0][0] = (W[1][1] * W[2][2] - W[1][2] * W[2][1]) / det;
  out[0][1] = (W[0][2] * W[2][1] - W[0][1] * W[2][2]) / det;
  out[0][2] = (W[0][1] * W[1][2] - W[0][2] * W[1][1]) / det;
  out[1][0] = (W[1][2] * W[2][0] - W[1][0] * W[2][2]) / det;
  out[1][1] = (W[0][0] * W[2][2] - W[0][2] * W[2][0]) / det;
  out[1][2] = (W[0][2] * W[1][0] - W[0][0] * W[1][2]) / det;
  out[2][0] = (W[1][0] * W[2][1] - W[1][1] * W[2][0]) / det;
  out[2][1] = (W[0][1] * W[2][0] - W[0][0] * W[2][1]) / det;
  out[2][2] = (W[0][0] * W[1][1] - W[0][1] * W[1][0]) / det;
}

/**
 * Volume mean of the raw piecewise-linear interpolant by the 5-point
 * degree-3 tetrahedral quadrature (centroid weight -4/5, four points at
 * barycentric (1/2,1/6,1/6,1/6) with weight 9/20).
 */
inline Vec3 quadrature_mean(const obsreg::NodalData& nd) {
  const auto& tb = obsreg::TetraBasis::standard();
  const int P = nd.n_cubes;
  const double h3 = nd.h * nd.h * nd.h;
  Vec3 acc = Vec3::Zero();
  const double wc = -4.0 / 5.0, wp = 9.0 / 20.0;
  for (int cx = 0; cx < P; ++cx)
    for (int cy = 0; cy < P; ++cy)
      for (int cz = 0; cz < P; ++cz)
        for (const auto& piece : tb.piece) {
          Vec3 corner[4];
          for (int k = 0; k < 4; ++k) {
            const Eigen::Vector3i d = obsreg::corner_offset(piece.corner[k]);
            corner[k] = nd.sample(cx + d.x(), cy + d.y(), cz + d.z());
          }
          const double vol = piece.volfrac * h3;
          Vec3 integral = wc * 0.25 * (corner[0] + corner[1] + corner[2] + corner[3]);
          for (int j = 0; j < 4; ++j) {
            Vec3 val = Vec3::Zero();
            for (int k = 0; k < 4; ++k) val += (k == j ? 0.5 : 1.0 / 6.0) * corner[k];
            integral += wp * val;
          }
          acc += vol * integral;
        }
  return acc / (nd.L * nd.L * nd.L);
}

/** Least-squares slope of log(err) against log(h). */
inline double fitted_order(const std::vector<double>& hs, const std::vector<double>& errs) {
  const size_t m = hs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    const double x = std::log(hs[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (double(m) * sxy - sx * sy) / (double(m) * sxx - sx * sx);
}

/** Deterministic uniform in [lo, hi). */
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (double(rng() >> 11) * 0x1p-53);
}

}  // namespace oracle

#endif
