#pragma once

#include <cmath>
#include <vector>

#include "mcflab/flow.hpp"
#include "mcflab/ineq.hpp"
#include "mcflab/spacetime.hpp"

namespace mcflab {

// ---------------------------------------------------------------------------
// Parabolic rescaling.  A window [t_i - 1/Q^2, t_i] of a stored trajectory is
// remapped to normalised time via t~ = 1 + (t - t_i) Q^2 and every snapshot
// field is transformed arithmetically:
//   pos -> Q pos,  H -> H/Q,  principal curvatures -> /Q,  measures -> Q^n.
// Nothing is re-estimated, so H~ * Q reproduces the source samples exactly
// whenever Q is a power of two (and to one ulp otherwise), and the
// scaling-invariant norms match the source window identically.
// ---------------------------------------------------------------------------

inline Curve scale_mesh(const Curve& m, double Q) {
  Curve out = m;
  for (auto& p : out.pos) p *= Q;
  for (auto& h : out.H) h /= Q;
  for (auto& l : out.lam1) l /= Q;
  for (auto& a : out.dmu) a *= Q;
  out.total_area *= Q;
  out.min_h *= Q;
  return out;
}

inline Surface scale_mesh(const Surface& m, double Q) {
  Surface out = m;  // shares topology
  const double Qn = Q * Q;
  for (auto& p : out.pos) p *= Q;
  for (auto& h : out.H) h /= Q;
  for (auto& l : out.lam1) l /= Q;
  for (auto& l : out.lam2) l /= Q;
  for (auto& a : out.dmu) a *= Qn;
  for (auto& a : out.vor) a *= Qn;
  // cot_w is angle-based and scale free
  out.total_area *= Qn;
  out.min_h *= Q;
  return out;
}

template <class M>
int nearest_snapshot(const Trajectory<M>& tr, double t) {
  int best = 0;
  double gap = kInf;
  for (int j = 0; j < tr.n_snaps(); ++j) {
    const double d = std::abs(tr.snaps[j].t - t);
    if (d < gap) gap = d, best = j;
  }
  return best;
}

template <class M>
Trajectory<M> rescale_trajectory(const Trajectory<M>& tr, double Q, double t_i) {
  if (!(Q > 0.0)) throw ConfigInvalid("rescale factor Q must be positive");
  if (tr.n_snaps() < 2) throw WindowOutOfRange("trajectory has fewer than two snapshots");
  const double t0 = tr.snaps.front().t;
  const double t_last = tr.snaps.back().t;
  if (t_i < t0 || t_i > t_last)
    throw WindowOutOfRange(strf("t_i=%.17g outside trajectory span [%.17g, %.17g]",
                                t_i, t0, t_last));
  const int j_hi = nearest_snapshot(tr, t_i);
  const double t_mark = tr.snaps[j_hi].t;
  const double Q2 = Q * Q;
  const double t_s = t_mark - 1.0 / Q2;
  if (t_s < t0)
    throw WindowOutOfRange(strf(
        "window start t_i - 1/Q^2 = %.17g precedes the trajectory start %.17g", t_s, t0));

  int j_lo = j_hi;
  while (j_lo > 0 && tr.snaps[j_lo].t > t_s) --j_lo;

  Trajectory<M> out;
  out.reason = (j_hi + 1 == tr.n_snaps()) ? tr.reason : StopReason::MaxTime;
  for (int j = j_lo; j <= j_hi; ++j) {
    const auto& s = tr.snaps[j];
    Snapshot<M> ns;
    ns.mesh = scale_mesh(s.mesh, Q);
    ns.t = 1.0 + (s.t - t_mark) * Q2;
    ns.dt = s.dt * Q2;
    ns.step = s.step;
    ns.max_H = s.max_H / Q;
    out.snaps.push_back(std::move(ns));
  }
  out.total_steps = tr.snaps[j_hi].step - tr.snaps[j_lo].step;
  return out;
}

// ---------------------------------------------------------------------------
// Blow-up sequence: for each threshold in an increasing grid, the first
// snapshot where the running maximum of H attains it.  The scale is the
// attained maximum itself, so the rescaled curvature at the marked point and
// time equals one exactly.
// ---------------------------------------------------------------------------

template <class M>
struct BlowupEntry {
  int snap_index = -1;
  typename M::Vec x;       // marked point in source coordinates
  double t = 0.0;          // marked time (a snapshot time)
  double Q = 0.0;          // attained running max of H
  typename M::Vec center;  // Q * x, centre of the rescaled cylinders
  Trajectory<M> window;    // rescaled trajectory over normalised time
  double local_sum = std::nan("");  // ||H~||_{n+2,D} + (B/Q)||1||_{n+2,D}
};

template <class M>
struct BlowupSequence {
  std::vector<BlowupEntry<M>> entries;
};

template <class M>
BlowupSequence<M> select_blowup_sequence(const Trajectory<M>& tr,
                                         const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw ConfigInvalid("threshold grid is empty");
  for (size_t i = 1; i < thresholds.size(); ++i)
    if (!(thresholds[i] > thresholds[i - 1]))
      throw ConfigInvalid("thresholds must increase");

  double run_max = -kInf;
  std::vector<double> run(tr.n_snaps());
  for (int j = 0; j < tr.n_snaps(); ++j) {
    run_max = std::max(run_max, tr.snaps[j].max_H);
    run[j] = run_max;
  }
  if (run.empty() || run.back() < thresholds.front())
    throw NoBlowup(strf("running max %.6g never attains the smallest threshold %.6g",
                        run.empty() ? 0.0 : run.back(), thresholds.front()));

  BlowupSequence<M> seq;
  int last_index = -1;
  for (double th : thresholds) {
    int j = -1;
    for (int i = 0; i < (int)run.size(); ++i)
      if (run[i] >= th) {
        j = i;
        break;
      }
    if (j < 0) break;          // grid exhausted the attained range
    if (j == last_index) continue;  // same crossing snapshot, one entry only
    const auto& s = tr.snaps[j];
    BlowupEntry<M> e;
    e.snap_index = j;
    e.Q = run[j];
    e.t = s.t;
    int arg = 0;
    for (int v = 1; v < s.mesh.n_vertices(); ++v)
      if (s.mesh.H[v] > s.mesh.H[arg]) arg = v;
    e.x = s.mesh.pos[arg];
    e.center = e.x * e.Q;
    if (e.t - 1.0 / (e.Q * e.Q) < tr.snaps.front().t) continue;  // window does not fit
    e.window = rescale_trajectory(tr, e.Q, e.t);
    last_index = j;
    seq.entries.push_back(std::move(e));
  }
  if (seq.entries.empty())
    throw NoBlowup("no threshold admits a full unit window inside the trajectory");
  return seq;
}

// ---------------------------------------------------------------------------
// Local norm sums of the rescaled windows: the series the blow-up argument
// drives to zero, with its fitted log-log slope against Q.
// ---------------------------------------------------------------------------

struct VanishingReport {
  std::vector<double> Q;
  std::vector<double> value;
  double slope = std::nan("");  // d log(value) / d log(Q)
  double intercept = std::nan("");
  bool strictly_decreasing = false;
};

template <class M>
VanishingReport vanishing_local_norms(BlowupSequence<M>& seq, double B) {
  if (seq.entries.empty()) throw ConfigInvalid("empty blow-up sequence");
  VanishingReport rep;
  const int n = M::dim;
  for (auto& e : seq.entries) {
    const auto D = dyadic_cylinder(0, e.center);
    const double hn =
        spacetime_norm(e.window, [&](int j, int v) { return e.window.snaps[j].mesh.H[v]; },
                       n + 2.0, &D)
            .value;
    const double one =
        spacetime_norm(e.window, [](int, int) { return 1.0; }, n + 2.0, &D).value;
    e.local_sum = hn + (B / e.Q) * one;
    rep.Q.push_back(e.Q);
    rep.value.push_back(e.local_sum);
  }
  rep.strictly_decreasing = rep.value.size() > 1;
  for (size_t i = 1; i < rep.value.size(); ++i)
    rep.strictly_decreasing = rep.strictly_decreasing && rep.value[i] < rep.value[i - 1];
  if (rep.value.size() >= 2) {
    std::vector<double> lq(rep.Q.size()), lv(rep.Q.size());
    for (size_t i = 0; i < rep.Q.size(); ++i)
      lq[i] = std::log(rep.Q[i]), lv[i] = std::log(rep.value[i]);
    detail::least_squares_line(lq, lv, rep.slope, rep.intercept);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Contradiction witness: per entry, the certified curvature bound side
// C_d * local sum next to the rescaled supremum, which the construction pins
// at one.  A decreasing bound side against a unit sup side is the tension the
// blow-up argument exploits.
// ---------------------------------------------------------------------------

struct WitnessRow {
  double Q = 0.0;
  double t = 0.0;
  double local_sum = 0.0;
  double delta_2 = 0.0;
  bool hypothesis_met = false;
  double C_d = 0.0;
  double bound_side = 0.0;  // C_d * local_sum
  double sup_side = 0.0;    // sup of H~+ over the inner cylinder
};

struct WitnessReport {
  std::vector<WitnessRow> rows;
  int met_count = 0;
  double sup_min = kInf;
  bool bound_decreasing = false;
};

template <class M>
WitnessReport contradiction_witness(const BlowupSequence<M>& seq, double B, double c_n,
                                    int min_met = 3) {
  if (seq.entries.empty()) throw ConfigInvalid("empty blow-up sequence");
  WitnessReport rep;
  for (const auto& e : seq.entries) {
    const CurvatureBoundReport cb =
        mean_curvature_bound_check(e.window, B / e.Q, e.center, c_n);
    WitnessRow row;
    row.Q = e.Q;
    row.t = e.t;
    row.local_sum = cb.hyp;
    row.delta_2 = cb.delta_2;
    row.hypothesis_met = cb.hypothesis_met;
    row.C_d = cb.C_d;
    row.bound_side = cb.bound;
    row.sup_side = cb.sup_H_plus;
    rep.met_count += row.hypothesis_met ? 1 : 0;
    rep.sup_min = std::min(rep.sup_min, row.sup_side);
    rep.rows.push_back(row);
  }
  rep.bound_decreasing = rep.rows.size() > 1;
  for (size_t i = 1; i < rep.rows.size(); ++i)
    rep.bound_decreasing =
        rep.bound_decreasing && rep.rows[i].bound_side < rep.rows[i - 1].bound_side;
  if (rep.met_count < min_met)
    throw HypothesisNotMet(strf(
        "only %d of %zu blow-up entries satisfy the smallness hypothesis (need %d)",
        rep.met_count, seq.entries.size(), min_met));
  return rep;
}

}  // namespace mcflab
