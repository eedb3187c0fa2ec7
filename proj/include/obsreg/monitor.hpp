#ifndef OBSREG_MONITOR_HPP
#define OBSREG_MONITOR_HPP

#include <functional>

#include "solver.hpp"
#include "tetra.hpp"

namespace obsreg {

enum class ObserverKind { modal, nodal };

inline const char* to_string(ObserverKind k) { return k == ObserverKind::modal ? "modal" : "nodal"; }

/** Observations of one trajectory over a time window [t0, T], uniform kind. */
struct ObservationSeries {
  ObserverKind kind = ObserverKind::modal;
  double t0 = 0.0;
  double T = 0.0;
  std::vector<ModalData> modal;  // exactly one of these two is populated
  std::vector<NodalData> nodal;

  size_t size() const { return kind == ObserverKind::modal ? modal.size() : nodal.size(); }
  double time(size_t i) const {
    return kind == ObserverKind::modal ? modal[i].time : nodal[i].time;
  }

  void validate() const {
    if (size() == 0) throw Error("ObservationSeries: empty series");
    if (kind == ObserverKind::modal ? !nodal.empty() : !modal.empty())
      throw Error("ObservationSeries: mixed observation kinds");
    const double tol = 1e-9 * std::max(1.0, std::abs(T));
    for (size_t i = 0; i < size(); ++i) {
      if (time(i) < t0 - tol || time(i) > T + tol)
        throw Error("ObservationSeries: entry time outside window [t0, T]");
      if (i > 0 && !(time(i) > time(i - 1)))
        throw Error("ObservationSeries: times must be strictly increasing");
    }
  }
};

/**
 * Modal observable data norm: max over snapshots of L^3 sum lambda(k)|uhat(k)|^2
 * over retained modes — the squared H^1 seminorm of P_N u, computable from the
 * observations alone.  The max over stored snapshots stands in for the
 * essential supremum in time (an under-approximation at finite cadence).
 */
inline double mh_modal(const ObservationSeries& s) {
  s.validate();
  if (s.kind != ObserverKind::modal) throw Error("mh_modal: series is not modal");
  double m = 0.0;
  for (const auto& md : s.modal) m = std::max(m, modal_h1_sq(md));
  return m;
}

/**
 * Nodal observable data norm: max over snapshots of the volume-weighted
 * directional-difference norm data^2 = sum vol ||D||_F^2 (h1_data_norms).
 */
inline double mh_nodal(const ObservationSeries& s) {
  s.validate();
  if (s.kind != ObserverKind::nodal) throw Error("mh_nodal: series is not nodal");
  double m = 0.0;
  for (const auto& nd : s.nodal) {
    const H1DataNorms n = h1_data_norms(nd);
    m = std::max(m, n.data * n.data);
  }
  return m;
}

/** W^2 = (c/(nu^2 lambda1)) |f|^2 + c M^2, the data-derived bound entering the criterion. */
inline double wh(double mh_sq, double f_l2_sq, double nu, double lambda1, double c) {
  if (!(nu > 0.0)) throw Error("wh: nu must be positive");
  if (!(lambda1 > 0.0)) throw Error("wh: lambda1 must be positive");
  if (!(c > 0.0)) throw Error("wh: c must be positive");
  if (mh_sq < 0.0 || f_l2_sq < 0.0) throw Error("wh: squared norms must be nonnegative");
  return (c / (nu * nu * lambda1)) * f_l2_sq + c * mh_sq;
}

inline double wh(double mh_sq, const SpectralField& f, double nu, double lambda1, double c) {
  const double fl2 = f.data.empty() ? 0.0 : norms(f).l2;
  return wh(mh_sq, fl2 * fl2, nu, lambda1, c);
}

enum class CriterionVariant { thm_5_1, thm_5_2 };

inline const char* to_string(CriterionVariant v) {
  return v == CriterionVariant::thm_5_1 ? "thm-5.1" : "thm-5.2";
}

struct CriterionInputs {
  double mh_sq = 0.0;       // observable data norm M_h^2 over the window
  double f_l2_sq = 0.0;     // |f|^2
  double grad_u0 = 0.0;     // ||u(t0)||, the H^1 seminorm at the window start
  bool grad_from_reference = true;  // false if grad_u0 came from an observation fallback
  double nu = 1.0;
  double lambda1 = 1.0;
  double c = 1.0;
  double h = 1.0;           // observer scale
  CriterionVariant variant = CriterionVariant::thm_5_1;
};

/**
 * Regularity test: the flow is declared regular (and ||u(t)|| bounded by W_h)
 * when  max{ nu lambda1, W^4/nu^3, c ||u(t0)||^4 / nu^3 } <= nu/(c h^2),
 * with the threshold tightened to nu/(4 c h^2) for the if-and-only-if variant.
 */
struct CriterionReport {
  double mh_sq = 0.0;
  double wh_sq = 0.0;
  double term_nu_lambda1 = 0.0;
  double term_w4_over_nu3 = 0.0;
  double term_grad0_pow4_over_nu3 = 0.0;
  double threshold = 0.0;
  bool satisfied = false;
  double predicted_h1_bound = 0.0;  // W_h, the asserted sup-in-time bound on ||u||
  double c = 0.0;
  double h = 0.0;
  double nu = 0.0;
  double lambda1 = 0.0;
  int n_cubes = 0;  // 0 when h does not come from a nodal grid
  CriterionVariant variant = CriterionVariant::thm_5_1;
  bool grad_from_reference = true;

  double max_term() const {
    return std::max(term_nu_lambda1, std::max(term_w4_over_nu3, term_grad0_pow4_over_nu3));
  }
};

inline CriterionReport check(const CriterionInputs& in) {
  if (!(in.h > 0.0)) throw Error("check: h must be positive");
  const double w2 = wh(in.mh_sq, in.f_l2_sq, in.nu, in.lambda1, in.c);
  CriterionReport r;
  r.mh_sq = in.mh_sq;
  r.wh_sq = w2;
  r.term_nu_lambda1 = in.nu * in.lambda1;
  r.term_w4_over_nu3 = w2 * w2 / (in.nu * in.nu * in.nu);
  r.term_grad0_pow4_over_nu3 =
      in.c * std::pow(in.grad_u0, 4) / (in.nu * in.nu * in.nu);
  const double denom = in.variant == CriterionVariant::thm_5_1 ? in.c : 4.0 * in.c;
  r.threshold = in.nu / (denom * in.h * in.h);
  r.satisfied = r.max_term() <= r.threshold;
  r.predicted_h1_bound = std::sqrt(w2);
  r.c = in.c;
  r.h = in.h;
  r.nu = in.nu;
  r.lambda1 = in.lambda1;
  r.variant = in.variant;
  r.grad_from_reference = in.grad_from_reference;
  return r;
}

/**
 * Criterion reports across a list of nodal resolutions, coarse to fine.  The
 * series provider supplies observations at each n_cubes; for a smooth
 * reference, M_h^2 stabilizes under refinement and fine enough h is admissible.
 */
inline std::vector<CriterionReport> h_sweep(
    const std::function<ObservationSeries(int)>& provider, const std::vector<int>& n_cubes_list,
    double L, double f_l2_sq, double grad_u0, bool grad_from_reference, double nu, double c,
    CriterionVariant variant = CriterionVariant::thm_5_1) {
  if (n_cubes_list.empty()) throw Error("h_sweep: empty resolution list");
  if (!(L > 0.0)) throw Error("h_sweep: L must be positive");
  std::vector<CriterionReport> out;
  out.reserve(n_cubes_list.size());
  const double lambda1 = (two_pi / L) * (two_pi / L);
  for (int P : n_cubes_list) {
    if (P < 1) throw Error("h_sweep: n_cubes must be >= 1");
    const ObservationSeries series = provider(P);
    CriterionInputs in;
    in.mh_sq = series.kind == ObserverKind::nodal ? mh_nodal(series) : mh_modal(series);
    in.f_l2_sq = f_l2_sq;
    in.grad_u0 = grad_u0;
    in.grad_from_reference = grad_from_reference;
    in.nu = nu;
    in.lambda1 = lambda1;
    in.c = c;
    in.h = L / P;
    in.variant = variant;
    CriterionReport r = check(in);
    r.n_cubes = P;
    out.push_back(r);
  }
  return out;
}

/** Sweep over nodal observations of a stored trajectory, window [t0, end]. */
inline std::vector<CriterionReport> h_sweep(const Trajectory& traj, const SpectralField& f,
                                            double nu, double c,
                                            const std::vector<int>& n_cubes_list, double t0 = 0.0,
                                            CriterionVariant variant = CriterionVariant::thm_5_1) {
  if (traj.snapshots.empty()) throw Error("h_sweep: trajectory has no snapshots");
  std::vector<const Snapshot*> window;
  for (const auto& s : traj.snapshots)
    if (s.t >= t0 - 1e-12) window.push_back(&s);
  if (window.empty()) throw Error("h_sweep: no snapshots at or after t0");

  const double fl2 = f.data.empty() ? 0.0 : norms(f).l2;
  const double grad_u0 = norms(window.front()->u).h1;
  auto provider = [&](int P) {
    ObservationSeries s;
    s.kind = ObserverKind::nodal;
    s.t0 = window.front()->t;
    s.T = window.back()->t;
    for (const Snapshot* snap : window) {
      NodalData nd = observe_nodal(snap->u, P);
      nd.time = snap->t;
      s.nodal.push_back(std::move(nd));
    }
    return s;
  };
  return h_sweep(provider, n_cubes_list, traj.torus.L, fl2 * fl2, grad_u0, true, nu, c, variant);
}

}  // namespace obsreg

#endif
