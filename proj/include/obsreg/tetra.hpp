#ifndef OBSREG_TETRA_HPP
#define OBSREG_TETRA_HPP

#include <array>

#include <Eigen/SVD>

#include "fields.hpp"
#include "observers.hpp"

namespace obsreg {

/** Corner id inside a cube: dx*4 + dy*2 + dz with offsets in {0,1}. */
inline Eigen::Vector3i corner_offset(int id) {
  return Eigen::Vector3i((id >> 2) & 1, (id >> 1) & 1, id & 1);
}

/**
 * The five-tetrahedra subdivision of the unit cube, repeated identically in
 * every grid cube.  With corners O=(0,0,0), A=(1,0,0), B=(0,1,0), C=(0,0,1)
 * and sums AB, AC, BC, ABC, the pieces (reference vertex v4 listed last) are
 *
 *   T1 = (A,B,C | O)    T2 = (A,B,C | ABC)   T3 = (A,B,AB | ABC)
 *   T4 = (A,C,AC | ABC) T5 = (B,C,BC | ABC)
 *
 * T2 is the central piece of volume 1/3; the rest are corner pieces of
 * volume 1/6, and the five volumes tile the cube.
 */
struct TetraTopology {
  std::array<std::array<int, 4>, 5> corner;  // corner ids, v4 last

  static const TetraTopology& standard() {
    //                                  A  B  C  O      A  B  C  ABC    A  B  AB ABC
    static const TetraTopology t = {{{{{4, 2, 1, 0}},
                                      {{4, 2, 1, 7}},
                                      {{4, 2, 6, 7}},
                                      {{4, 1, 5, 7}},
                                      {{2, 1, 3, 7}}}}};
    return t;
  }
};

/**
 * Per-piece edge geometry: the edge matrix W has columns v_k - v_4 and the
 * change of basis M is the inverse of the column-normalized edge matrix, so
 * [e1,e2,e3] = [w1_hat, w2_hat, w3_hat] M with residual at rounding level.
 * M is dimensionless: independent of the grid spacing and of the cube.
 */
struct TetraBasis {
  struct Piece {
    std::array<int, 4> corner;  // corner ids, apex v4 last
    Mat3 W;                     // columns v_k - v_4, unit-cube scale
    Mat3 Winv;
    Vec3 len;                   // |v_k - v_4| (1 or sqrt(2))
    Mat3 M;                     // inverse of W * diag(1/len)
    double volfrac = 0.0;       // |det W| / 6
    double M_norm = 0.0;        // operator 2-norms
    double Minv_norm = 0.0;
  };
  std::array<Piece, 5> piece;
  double max_M_norm = 0.0;
  double max_Minv_norm = 0.0;

  static const TetraBasis& standard();
};

inline TetraBasis build_basis(const TetraTopology& topo) {
  TetraBasis b;
  for (int t = 0; t < 5; ++t) {
    TetraBasis::Piece& p = b.piece[t];
    p.corner = topo.corner[t];
    const Vec3 v4 = corner_offset(p.corner[3]).cast<double>();
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = corner_offset(p.corner[k]).cast<double>() - v4;
      p.W.col(k) = e;
      p.len[k] = e.norm();
      if (p.len[k] == 0.0)
        throw Error("build_basis: malformed topology: repeated vertex in tetra type " +
                    std::to_string(t + 1));
    }
    const double det = p.W.determinant();
    if (std::abs(det) < 1e-12)
      throw Error("build_basis: malformed topology: singular edge matrix for tetra type " +
                  std::to_string(t + 1));
    p.Winv = p.W.inverse();
    p.M = (p.W * p.len.cwiseInverse().asDiagonal()).inverse();
    p.volfrac = std::abs(det) / 6.0;
    p.M_norm = Eigen::JacobiSVD<Mat3>(p.M).singularValues()(0);
    p.Minv_norm = Eigen::JacobiSVD<Mat3>(Mat3(p.M.inverse())).singularValues()(0);
    b.max_M_norm = std::max(b.max_M_norm, p.M_norm);
    b.max_Minv_norm = std::max(b.max_Minv_norm, p.Minv_norm);
  }
  return b;
}

inline const TetraBasis& TetraBasis::standard() {
  static const TetraBasis b = build_basis(TetraTopology::standard());
  return b;
}

struct Location {
  std::array<int, 3> cube;
  int type = 0;  // piece index 0..4
  Eigen::Vector4d bary;
};

namespace detail {

/** Piece index and barycentric coordinates of a point in unit-cube coordinates. */
inline void locate_unit(const Vec3& y, int& type, Eigen::Vector4d& bary) {
  const TetraBasis& tb = TetraBasis::standard();
  double best = -1e300;
  int best_t = 0;
  Eigen::Vector4d best_a;
  for (int t = 0; t < 5; ++t) {
    const auto& p = tb.piece[t];
    const Vec3 a123 = p.Winv * (y - corner_offset(p.corner[3]).cast<double>());
    Eigen::Vector4d a(a123.x(), a123.y(), a123.z(), 1.0 - a123.sum());
    const double amin = a.minCoeff();
    if (amin >= -1e-12) {
      type = t;
      bary = a;
      return;
    }
    if (amin > best) {
      best = amin;
      best_t = t;
      best_a = a;
    }
  }
  // Round-off can leave a boundary point marginally outside every piece;
  // fall back to the piece it violates least.
  type = best_t;
  bary = best_a;
}

/** Raw (not mean-corrected) interpolant value at local coordinates y in a cube. */
inline Vec3 eval_in_cube(const NodalData& nd, int cx, int cy, int cz, const Vec3& y) {
  int type;
  Eigen::Vector4d a;
  locate_unit(y, type, a);
  const auto& p = TetraBasis::standard().piece[type];
  Vec3 v = Vec3::Zero();
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector3i d = corner_offset(p.corner[k]);
    v += a[k] * nd.sample(cx + d.x(), cy + d.y(), cz + d.z());
  }
  return v;
}

}  // namespace detail

/** Containing cube, piece, and barycentric coordinates of a point (periodic wrap). */
inline Location locate(const Vec3& x, double L, int n_cubes) {
  if (n_cubes < 1 || !(L > 0.0)) throw Error("locate: need L > 0 and n_cubes >= 1");
  const double h = L / n_cubes;
  Location loc;
  Vec3 y;
  for (int i = 0; i < 3; ++i) {
    double xi = x[i] - L * std::floor(x[i] / L);  // wrap into [0, L)
    int c = int(std::floor(xi / h));
    if (c >= n_cubes) c = n_cubes - 1;
    loc.cube[i] = c;
    y[i] = std::min(std::max(xi / h - c, 0.0), 1.0);
  }
  detail::locate_unit(y, loc.type, loc.bary);
  return loc;
}

/**
 * Mean-corrected piecewise-linear interpolant of nodal samples.  `mean` is the
 * volume average of the raw interpolant (which equals the plain average of the
 * samples, since every node carries total barycentric weight h^3).
 */
struct Interpolant {
  NodalData nodal;
  Vec3 mean = Vec3::Zero();
};

inline Interpolant mean_correct(NodalData nd) {
  if (nd.n_cubes < 1 || nd.samples.size() != size_t(nd.n_cubes) * nd.n_cubes * nd.n_cubes)
    throw Error("mean_correct: nodal data is empty or inconsistent");
  const TetraBasis& tb = TetraBasis::standard();
  const int P = nd.n_cubes;
  const double h3 = nd.h * nd.h * nd.h, L3 = nd.L * nd.L * nd.L;
  Vec3 acc = Vec3::Zero();
  for (int cx = 0; cx < P; ++cx)
    for (int cy = 0; cy < P; ++cy)
      for (int cz = 0; cz < P; ++cz)
        for (const auto& p : tb.piece) {
          Vec3 s = Vec3::Zero();
          for (int k = 0; k < 4; ++k) {
            const Eigen::Vector3i d = corner_offset(p.corner[k]);
            s += nd.sample(cx + d.x(), cy + d.y(), cz + d.z());
          }
          acc += (p.volfrac * h3) * (0.25 * s);  // linear fn: cell average = vertex average
        }
  Interpolant it;
  it.nodal = std::move(nd);
  it.mean = acc / L3;
  return it;
}

/** Interpolant value at an arbitrary point (periodic, mean-corrected). */
inline Vec3 evaluate(const Interpolant& it, const Vec3& x) {
  const Location loc = locate(x, it.nodal.L, it.nodal.n_cubes);
  const auto& p = TetraBasis::standard().piece[loc.type];
  Vec3 v = -it.mean;
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector3i d = corner_offset(p.corner[k]);
    v += loc.bary[k] *
         it.nodal.sample(loc.cube[0] + d.x(), loc.cube[1] + d.y(), loc.cube[2] + d.z());
  }
  return v;
}

/** The eight corner samples of one grid cube, indexed by corner id. */
using CubeCorners = std::array<Vec3, 8>;

inline CubeCorners cube_corners(const NodalData& nd, int cx, int cy, int cz) {
  CubeCorners cc;
  for (int id = 0; id < 8; ++id) {
    const Eigen::Vector3i d = corner_offset(id);
    cc[id] = nd.sample(cx + d.x(), cy + d.y(), cz + d.z());
  }
  return cc;
}

/**
 * Directional-difference matrix of one piece:
 * D_{l,k} = (u_l(v_k) - u_l(v_4)) / |v_k - v_4|.  Rows are velocity
 * components, columns the three normalized edges from the apex.
 */
inline Mat3 directional_matrix(const CubeCorners& cc, int type, double h) {
  const auto& p = TetraBasis::standard().piece[type];
  Mat3 D;
  const Vec3& u4 = cc[p.corner[3]];
  for (int k = 0; k < 3; ++k) D.col(k) = (cc[p.corner[k]] - u4) / (h * p.len[k]);
  return D;
}

/** Constant Jacobian of the interpolant on one piece: grad(Iu) = D * M. */
inline Mat3 gradient(const NodalData& nd, int cx, int cy, int cz, int type) {
  const Mat3 D = directional_matrix(cube_corners(nd, cx, cy, cz), type, nd.h);
  return D * TetraBasis::standard().piece[type].M;
}

inline Mat3 gradient(const Interpolant& it, const std::array<int, 3>& cube, int type) {
  return gradient(it.nodal, cube[0], cube[1], cube[2], type);
}

/** Every D^{alpha,i} matrix of the grid, cube-major (lexicographic), 5 per cube. */
struct DirectionalData {
  int n_cubes = 0;
  double h = 0.0;
  std::vector<std::array<Mat3, 5>> cubes;

  const Mat3& D(int cx, int cy, int cz, int type) const {
    return cubes[(size_t(cx) * n_cubes + cy) * n_cubes + cz][type];
  }
};

inline DirectionalData directional_data(const NodalData& nd) {
  DirectionalData dd;
  dd.n_cubes = nd.n_cubes;
  dd.h = nd.h;
  dd.cubes.resize(size_t(nd.n_cubes) * nd.n_cubes * nd.n_cubes);
  size_t idx = 0;
  for (int cx = 0; cx < nd.n_cubes; ++cx)
    for (int cy = 0; cy < nd.n_cubes; ++cy)
      for (int cz = 0; cz < nd.n_cubes; ++cz, ++idx) {
        const CubeCorners cc = cube_corners(nd, cx, cy, cz);
        for (int t = 0; t < 5; ++t) dd.cubes[idx][t] = directional_matrix(cc, t, nd.h);
      }
  return dd;
}

/**
 * Broken H^1 seminorm of the interpolant together with its two-sided bounds
 * in terms of the raw directional data:
 *
 *   exact^2 = sum vol ||D M||_F^2     (the seminorm itself)
 *   data^2  = sum vol ||D||_F^2       (computable without M)
 *   data / max ||M^{-1}||_2  <=  exact  <=  data * max ||M||_2
 */
struct H1DataNorms {
  double exact = 0.0;
  double data = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

inline H1DataNorms h1_data_norms(const NodalData& nd) {
  const TetraBasis& tb = TetraBasis::standard();
  const int P = nd.n_cubes;
  const double h3 = nd.h * nd.h * nd.h;
  double exact_sq = 0.0, data_sq = 0.0;
  for (int cx = 0; cx < P; ++cx)
    for (int cy = 0; cy < P; ++cy)
      for (int cz = 0; cz < P; ++cz) {
        const CubeCorners cc = cube_corners(nd, cx, cy, cz);
        for (int t = 0; t < 5; ++t) {
          const Mat3 D = directional_matrix(cc, t, nd.h);
          const double vol = tb.piece[t].volfrac * h3;
          exact_sq += vol * (D * tb.piece[t].M).squaredNorm();
          data_sq += vol * D.squaredNorm();
        }
      }
  H1DataNorms r;
  r.exact = std::sqrt(exact_sq);
  r.data = std::sqrt(data_sq);
  r.lower = r.data / tb.max_Minv_norm;
  r.upper = r.data * tb.max_M_norm;
  return r;
}

/**
 * L^2 distance between the (zero-mean) field and its mean-corrected
 * interpolant, by midpoint quadrature on a uniform fine grid with q^3 points
 * per cube (refined as needed to resolve the spectrum).
 */
inline double l2_error(const Interpolant& it, const SpectralField& u, int q = 4) {
  if (std::abs(u.torus.L - it.nodal.L) > 1e-12 * it.nodal.L)
    throw Error("l2_error: field and interpolant live on different boxes");
  const int P = it.nodal.n_cubes;
  int qe = std::max(q, 1);
  while (P * qe < u.n()) ++qe;  // keep the fine grid at least as fine as the spectrum
  const int M = P * qe;

  SpectralField uz = u;
  for (int c = 0; c < 3; ++c) uz.mode(c, WaveVector(0, 0, 0)) = Cplx(0.0, 0.0);
  const std::vector<double> vals = dense_samples(uz, M, 0.5);

  const size_t m3 = size_t(M) * M * M;
  double acc = 0.0;
  for (int ix = 0; ix < M; ++ix)
    for (int iy = 0; iy < M; ++iy)
      for (int iz = 0; iz < M; ++iz) {
        const Vec3 y((ix % qe + 0.5) / qe, (iy % qe + 0.5) / qe, (iz % qe + 0.5) / qe);
        const Vec3 iv =
            detail::eval_in_cube(it.nodal, ix / qe, iy / qe, iz / qe, y) - it.mean;
        const size_t idx = (size_t(ix) * M + iy) * M + iz;
        const Vec3 uv(vals[idx], vals[m3 + idx], vals[2 * m3 + idx]);
        acc += (uv - iv).squaredNorm();
      }
  const double cell = it.nodal.L / M;
  return std::sqrt(acc * cell * cell * cell);
}

/**
 * Largest interpolant discontinuity across cube faces.  The subdivision uses
 * the same tetrahedra in every cube, so face triangulations of neighboring
 * cubes disagree and the interpolant is only piecewise continuous; this
 * samples interior points of every face from both sides.
 */
inline double max_face_jump(const NodalData& nd) {
  const int P = nd.n_cubes;
  const double ss[2] = {0.25, 0.75};
  double worst = 0.0;
  for (int cx = 0; cx < P; ++cx)
    for (int cy = 0; cy < P; ++cy)
      for (int cz = 0; cz < P; ++cz)
        for (int axis = 0; axis < 3; ++axis)
          for (double s : ss)
            for (double t : ss) {
              Vec3 yhi, ylo;
              yhi[axis] = 1.0;
              ylo[axis] = 0.0;
              yhi[(axis + 1) % 3] = ylo[(axis + 1) % 3] = s;
              yhi[(axis + 2) % 3] = ylo[(axis + 2) % 3] = t;
              int nx = cx + (axis == 0), ny = cy + (axis == 1), nz = cz + (axis == 2);
              const Vec3 a = detail::eval_in_cube(nd, cx, cy, cz, yhi);
              const Vec3 b = detail::eval_in_cube(nd, nx, ny, nz, ylo);
              worst = std::max(worst, (a - b).norm());
            }
  return worst;
}

}  // namespace obsreg

#endif
