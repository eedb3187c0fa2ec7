#ifndef OBSREG_IO_HPP
#define OBSREG_IO_HPP

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nudging.hpp"

namespace obsreg {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need byte swaps");

// ---------------------------------------------------------------------------
// Binary container: 7-byte magic + u8 version, then format-specific header
// and a little-endian f64 payload in fixed index order.
// ---------------------------------------------------------------------------

namespace detail {

struct ByteWriter {
  std::string bytes;
  void raw(const void* p, size_t n) { bytes.append(static_cast<const char*>(p), n); }
  void u8(uint8_t v) { raw(&v, 1); }
  void u32(uint32_t v) { raw(&v, 4); }
  void u64(uint64_t v) { raw(&v, 8); }
  void i32(int32_t v) { raw(&v, 4); }
  void f64(double v) { raw(&v, 8); }
};

struct ByteReader {
  const std::string& bytes;
  size_t pos = 0;
  std::string path;  // for error context

  void need(size_t n, const char* what) const {
    if (pos + n > bytes.size())
      throw Error(path + ": truncated " + what + ": expected at least " +
                  std::to_string(pos + n) + " bytes, got " + std::to_string(bytes.size()));
  }
  void raw(void* p, size_t n, const char* what) {
    need(n, what);
    std::memcpy(p, bytes.data() + pos, n);
    pos += n;
  }
  uint8_t u8(const char* what) { uint8_t v; raw(&v, 1, what); return v; }
  uint32_t u32(const char* what) { uint32_t v; raw(&v, 4, what); return v; }
  uint64_t u64(const char* what) { uint64_t v; raw(&v, 8, what); return v; }
  int32_t i32(const char* what) { int32_t v; raw(&v, 4, what); return v; }
  double f64(const char* what) { double v; raw(&v, 8, what); return v; }
};

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(path + ": cannot open for writing");
  os.write(bytes.data(), std::streamsize(bytes.size()));
  if (!os) throw Error(path + ": write failed");
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << is.rdbuf();
  return std::move(ss).str();
}

inline void check_magic_version(ByteReader& r, const char* magic) {
  char m[7];
  r.raw(m, 7, "header");
  if (std::memcmp(m, magic, 7) != 0)
    throw Error(r.path + ": corrupt magic: expected \"" + magic + "\", got \"" +
                std::string(m, 7) + "\"");
  const uint8_t version = r.u8("header");
  if (version != 1)
    throw Error(r.path + ": unsupported format version " + std::to_string(version) +
                " (this build reads version 1; upgrade the toolkit to read newer files)");
}

}  // namespace detail

/**
 * Velocity snapshot file "OBSREG1": header (version, kind, n_spec, L, time)
 * then 6 doubles per mode (re/im interleaved, components x,y,z contiguous) in
 * lexicographic order of the wrapped indices (ix, iy, iz).  48 n^3 + 32 bytes.
 */
inline void save_snapshot(const std::string& path, const SpectralField& f, double time,
                          uint32_t kind = 0) {
  detail::ByteWriter w;
  w.raw("OBSREG1", 7);
  w.u8(1);
  w.u32(kind);
  w.u32(uint32_t(f.torus.n_spec));
  w.f64(f.torus.L);
  w.f64(time);
  const int n = f.n();
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz)
        for (int c = 0; c < 3; ++c) {
          const Cplx v = f.at(c, ix, iy, iz);
          w.f64(v.real());
          w.f64(v.imag());
        }
  detail::write_file(path, w.bytes);
}

struct LoadedSnapshot {
  SpectralField field;
  double time = 0.0;
  uint32_t kind = 0;
};

inline LoadedSnapshot load_snapshot(const std::string& path) {
  const std::string bytes = detail::read_file(path);
  detail::ByteReader r{bytes, 0, path};
  detail::check_magic_version(r, "OBSREG1");
  LoadedSnapshot out;
  out.kind = r.u32("header");
  const uint32_t n = r.u32("header");
  TorusConfig torus;
  torus.n_spec = int(n);
  torus.L = r.f64("header");
  out.time = r.f64("header");
  torus.validate();
  const size_t expected = r.pos + size_t(48) * n * n * n;
  if (bytes.size() != expected)
    throw Error(path + ": truncated payload: expected " + std::to_string(expected) +
                " bytes, got " + std::to_string(bytes.size()));
  out.field = SpectralField(torus);
  for (int ix = 0; ix < int(n); ++ix)
    for (int iy = 0; iy < int(n); ++iy)
      for (int iz = 0; iz < int(n); ++iz)
        for (int c = 0; c < 3; ++c) {
          const double re = r.f64("payload");
          const double im = r.f64("payload");
          out.field.at(c, ix, iy, iz) = Cplx(re, im);
        }
  return out;
}

/** Modal observation file "OBSMOD1": cutoff context plus one entry per retained mode. */
inline void save_modal(const std::string& path, const ModalData& md) {
  detail::ByteWriter w;
  w.raw("OBSMOD1", 7);
  w.u8(1);
  w.u32(uint32_t(md.cutoff));
  w.u32(uint32_t(md.torus.n_spec));
  w.f64(md.torus.L);
  w.f64(md.time);
  w.f64(md.lambda_N);
  w.f64(md.lambda_after);
  w.u64(md.modes.size());
  for (const auto& e : md.modes) {
    w.i32(e.k.x());
    w.i32(e.k.y());
    w.i32(e.k.z());
    for (int c = 0; c < 3; ++c) {
      w.f64(e.c[c].real());
      w.f64(e.c[c].imag());
    }
  }
  detail::write_file(path, w.bytes);
}

inline ModalData load_modal(const std::string& path) {
  const std::string bytes = detail::read_file(path);
  detail::ByteReader r{bytes, 0, path};
  detail::check_magic_version(r, "OBSMOD1");
  ModalData md;
  md.cutoff = int(r.u32("header"));
  md.torus.n_spec = int(r.u32("header"));
  md.torus.L = r.f64("header");
  md.time = r.f64("header");
  md.lambda_N = r.f64("header");
  md.lambda_after = r.f64("header");
  md.torus.validate();
  const uint64_t count = r.u64("header");
  const size_t expected = r.pos + count * 60;
  if (bytes.size() != expected)
    throw Error(path + ": truncated payload: expected " + std::to_string(expected) +
                " bytes, got " + std::to_string(bytes.size()));
  md.modes.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    ModalEntry e;
    e.k.x() = r.i32("payload");
    e.k.y() = r.i32("payload");
    e.k.z() = r.i32("payload");
    for (int c = 0; c < 3; ++c) {
      const double re = r.f64("payload");
      const double im = r.f64("payload");
      e.c[c] = Cplx(re, im);
    }
    md.modes.push_back(e);
  }
  return md;
}

/** Nodal observation file "OBSNOD1": grid context plus 3 doubles per node. */
inline void save_nodal(const std::string& path, const NodalData& nd) {
  detail::ByteWriter w;
  w.raw("OBSNOD1", 7);
  w.u8(1);
  w.u32(uint32_t(nd.n_cubes));
  w.u32(0);  // reserved
  w.f64(nd.L);
  w.f64(nd.time);
  w.u64(nd.samples.size());
  for (const auto& s : nd.samples) {
    w.f64(s.x());
    w.f64(s.y());
    w.f64(s.z());
  }
  detail::write_file(path, w.bytes);
}

inline NodalData load_nodal(const std::string& path) {
  const std::string bytes = detail::read_file(path);
  detail::ByteReader r{bytes, 0, path};
  detail::check_magic_version(r, "OBSNOD1");
  NodalData nd;
  nd.n_cubes = int(r.u32("header"));
  r.u32("header");  // reserved
  nd.L = r.f64("header");
  nd.time = r.f64("header");
  const uint64_t count = r.u64("header");
  if (nd.n_cubes < 1 || count != uint64_t(nd.n_cubes) * nd.n_cubes * nd.n_cubes)
    throw Error(path + ": inconsistent header: n_cubes^3 != sample count");
  nd.h = nd.L / nd.n_cubes;
  const size_t expected = r.pos + count * 24;
  if (bytes.size() != expected)
    throw Error(path + ": truncated payload: expected " + std::to_string(expected) +
                " bytes, got " + std::to_string(bytes.size()));
  nd.samples.resize(count);
  for (auto& s : nd.samples) {
    s.x() = r.f64("payload");
    s.y() = r.f64("payload");
    s.z() = r.f64("payload");
  }
  return nd;
}

// ---------------------------------------------------------------------------
// Deterministic text reports: JSON with sorted keys, CSV with fixed columns,
// every number printed with 17 significant digits.
// ---------------------------------------------------------------------------

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_json(const CriterionReport& r) {
  std::ostringstream os;
  os << "{\"c\":" << fmt17(r.c)
     << ",\"grad_from_reference\":" << (r.grad_from_reference ? "true" : "false")
     << ",\"h\":" << fmt17(r.h) << ",\"lambda1\":" << fmt17(r.lambda1)
     << ",\"mh_sq\":" << fmt17(r.mh_sq) << ",\"n_cubes\":" << r.n_cubes
     << ",\"nu\":" << fmt17(r.nu)
     << ",\"predicted_h1_bound\":" << fmt17(r.predicted_h1_bound)
     << ",\"satisfied\":" << (r.satisfied ? "true" : "false")
     << ",\"terms\":{\"grad0_pow4_over_nu3\":" << fmt17(r.term_grad0_pow4_over_nu3)
     << ",\"nu_lambda1\":" << fmt17(r.term_nu_lambda1)
     << ",\"w4_over_nu3\":" << fmt17(r.term_w4_over_nu3) << "}"
     << ",\"threshold\":" << fmt17(r.threshold) << ",\"variant\":\"" << to_string(r.variant)
     << "\",\"wh_sq\":" << fmt17(r.wh_sq) << "}\n";
  return std::move(os).str();
}

/** Broken-H^1 report for one nodal observation. */
struct H1Report {
  H1DataNorms norms;
  double h = 0.0;
  int n_cubes = 0;
  double t = 0.0;
};

inline std::string to_json(const H1Report& r) {
  std::ostringstream os;
  os << "{\"data_sq\":" << fmt17(r.norms.data * r.norms.data)
     << ",\"exact_sq\":" << fmt17(r.norms.exact * r.norms.exact) << ",\"h\":" << fmt17(r.h)
     << ",\"lower_sq\":" << fmt17(r.norms.lower * r.norms.lower)
     << ",\"n_cubes\":" << r.n_cubes << ",\"t\":" << fmt17(r.t)
     << ",\"upper_sq\":" << fmt17(r.norms.upper * r.norms.upper) << "}\n";
  return std::move(os).str();
}

inline std::string to_csv(const SyncSeries& s) {
  std::string out = "t,err_l2,err_h1\n";
  for (const auto& e : s.entries)
    out += fmt17(e.t) + "," + fmt17(e.err_l2) + "," + fmt17(e.err_h1) + "\n";
  return out;
}

/** CSV of the per-snapshot observable norm M_h^2(t). */
inline std::string mh_series_csv(const std::vector<std::pair<double, double>>& rows) {
  std::string out = "t,mh_sq\n";
  for (const auto& [t, m] : rows) out += fmt17(t) + "," + fmt17(m) + "\n";
  return out;
}

inline std::string sweep_csv(const std::vector<CriterionReport>& reports) {
  std::string out =
      "h,n_cubes,mh_sq,wh_sq,term_nu_lambda1,term_w4_over_nu3,term_grad0_pow4_over_nu3,"
      "threshold,satisfied\n";
  for (const auto& r : reports) {
    out += fmt17(r.h) + "," + std::to_string(r.n_cubes) + "," + fmt17(r.mh_sq) + "," +
           fmt17(r.wh_sq) + "," + fmt17(r.term_nu_lambda1) + "," + fmt17(r.term_w4_over_nu3) +
           "," + fmt17(r.term_grad0_pow4_over_nu3) + "," + fmt17(r.threshold) + "," +
           (r.satisfied ? "true" : "false") + "\n";
  }
  return out;
}

inline std::string h1_norms_csv(const std::vector<H1Report>& rows) {
  std::string out = "t,exact,data,lower,upper\n";
  for (const auto& r : rows)
    out += fmt17(r.t) + "," + fmt17(r.norms.exact) + "," + fmt17(r.norms.data) + "," +
           fmt17(r.norms.lower) + "," + fmt17(r.norms.upper) + "\n";
  return out;
}

inline void emit_report(const std::string& path, const std::string& content) {
  detail::write_file(path, content);
}

// ---------------------------------------------------------------------------
// Experiment configuration shared by the CLI subcommands.
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  TorusConfig torus;

  struct Solver {
    double nu = 1.0;
    double dt = 1e-2;
    double t_end = 1.0;
    bool dealias = true;
    int snapshot_every = 1;
  } solver;

  struct Initial {
    std::string type = "abc";  // zero | abc | random
    int m = 1;
    double amp = 1.0;
    double A = 1.0, B = 1.0, C = 1.0;
    uint64_t seed = 1;
  } initial;

  struct Forcing {
    std::string type = "zero";  // zero | abc
    int m = 1;
    double amp = 0.0;
  } forcing;

  struct Observer {
    std::string kind = "modal";  // modal | nodal
    int N = 1;
    int n_cubes = 4;
    bool collocation = false;  // require nodes to be a subset of the collocation grid
  } observer;

  struct Monitor {
    double c = 1.0;
    double t0 = 0.0;
    std::string variant = "thm-5.1";  // thm-5.1 | thm-5.2
    double h = 0.0;                   // 0 = derive from the observer scale
  } monitor;

  struct Nudge {
    double mu = -1.0;  // negative = default gain rule
    bool project = true;
  } nudge;

  std::string out_dir = "out";

  void validate() const {
    if (!(torus.L > 0.0)) throw Error("config torus.L: must be positive");
    if (torus.n_spec < 4 || torus.n_spec % 2 != 0)
      throw Error("config torus.n_spec: must be even and >= 4");
    if (!(solver.nu > 0.0)) throw Error("config solver.nu: must be positive");
    if (!(solver.dt > 0.0)) throw Error("config solver.dt: must be positive");
    if (!(solver.t_end >= 0.0)) throw Error("config solver.t_end: must be nonnegative");
    if (solver.snapshot_every < 1) throw Error("config solver.snapshot_every: must be >= 1");
    if (initial.type != "zero" && initial.type != "abc" && initial.type != "random")
      throw Error("config initial.type: must be one of zero, abc, random");
    if (initial.m < 1) throw Error("config initial.m: must be >= 1");
    if (forcing.type != "zero" && forcing.type != "abc")
      throw Error("config forcing.type: must be one of zero, abc");
    if (forcing.m < 1) throw Error("config forcing.m: must be >= 1");
    if (observer.kind != "modal" && observer.kind != "nodal")
      throw Error("config observer.kind: must be modal or nodal");
    if (observer.N < 1) throw Error("config observer.N: must be >= 1");
    if (observer.n_cubes < 2) throw Error("config observer.n_cubes: must be >= 2");
    if (observer.collocation && torus.n_spec % observer.n_cubes != 0)
      throw Error("config observer.n_cubes: must divide torus.n_spec when "
                  "observer.collocation is set (got n_cubes = " +
                  std::to_string(observer.n_cubes) + ", n_spec = " +
                  std::to_string(torus.n_spec) + ")");
    if (!(monitor.c > 0.0)) throw Error("config monitor.c: must be positive");
    if (!(monitor.t0 >= 0.0)) throw Error("config monitor.t0: must be nonnegative");
    if (monitor.variant != "thm-5.1" && monitor.variant != "thm-5.2")
      throw Error("config monitor.variant: must be thm-5.1 or thm-5.2");
    if (!(monitor.h >= 0.0)) throw Error("config monitor.h: must be nonnegative (0 = auto)");
    if (out_dir.empty()) throw Error("config out: output directory must not be empty");
  }

  ObserverKind observer_kind() const {
    return observer.kind == "modal" ? ObserverKind::modal : ObserverKind::nodal;
  }
  CriterionVariant criterion_variant() const {
    return monitor.variant == "thm-5.1" ? CriterionVariant::thm_5_1 : CriterionVariant::thm_5_2;
  }

  SpectralField make_initial() const {
    if (initial.type == "zero") return SpectralField(torus);
    if (initial.type == "abc")
      return abc_field(torus, initial.m, initial.amp, initial.A, initial.B, initial.C);
    return random_solenoidal(torus, initial.seed, initial.amp);
  }

  SpectralField make_forcing() const {
    if (forcing.type == "zero" || forcing.amp == 0.0) return SpectralField();
    return abc_field(torus, forcing.m, forcing.amp);
  }
};

}  // namespace obsreg

#endif
