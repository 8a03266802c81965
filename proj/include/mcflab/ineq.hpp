#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mcflab/constants.hpp"
#include "mcflab/diagnostics.hpp"
#include "mcflab/spacetime.hpp"

namespace mcflab {

// Every check reports both sides of its inequality and never adjusts them;
// `certified` records whether the claimed bound holds on the data as-is.

struct CheckReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;      // full right-hand side including constants
  double ratio = 0.0;    // lhs / rhs-core with structural constants factored out
  bool certified = false;
};

inline double safe_ratio(double lhs, double rhs) {
  if (rhs == 0.0) {
    if (lhs == 0.0) return 0.0;
    throw Error("inequality with vanishing right-hand side and positive left-hand side");
  }
  return lhs / rhs;
}

inline double check_nonneg(double x) {
  if (x < 0.0) throw NegativeFunction("field must be >= 0");
  return x;
}

// ---------------------------------------------------------------------------
// Slice inequalities (closed surfaces in R^3).
// ---------------------------------------------------------------------------

// ( int f^{n/(n-1)} )^{(n-1)/n}  <=  c_n int (|grad f| + |H| f)
inline CheckReport michael_simon_check(const Surface& mesh, const std::vector<double>& f,
                                       double c_n) {
  for (double x : f)
    if (x < 0.0) throw NegativeFunction("michael_simon_check needs f >= 0");
  const int n = Surface::dim;
  CheckReport rep;
  rep.name = "michael_simon";
  double lhs_sum = 0.0;
  const std::vector<double> gn = mesh.gradient_norm(f);
  double rhs_sum = 0.0;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    lhs_sum += std::pow(f[v], n / double(n - 1)) * mesh.dmu[v];
    rhs_sum += (gn[v] + std::abs(mesh.H[v]) * f[v]) * mesh.dmu[v];
  }
  rep.lhs = std::pow(lhs_sum, (n - 1) / double(n));
  rep.rhs = c_n * rhs_sum;
  rep.ratio = safe_ratio(rep.lhs, rhs_sum);
  rep.certified = rep.lhs <= rep.rhs;
  return rep;
}

// ||v||^2_{L^{2Q}}  <=  c_n ( ||grad v||^2_{L^2} + ||H||^{n+2}_{L^{n+2}} ||v||^2_{L^2} )
// Works on |v|, so any sign is admissible.
inline CheckReport curvature_sobolev_check(const Surface& mesh, const std::vector<double>& v,
                                           double Q, double c_n) {
  if (!(Q > 1.0)) throw ConfigInvalid("sobolev exponent Q must exceed 1");
  const int n = Surface::dim;
  CheckReport rep;
  rep.name = "curvature_sobolev";
  const auto p_norm = [&](const std::vector<double>& g, double p) {
    double s = 0.0;
    for (int w = 0; w < mesh.n_vertices(); ++w)
      s += std::pow(std::abs(g[w]), p) * mesh.dmu[w];
    return std::pow(s, 1.0 / p);
  };
  rep.lhs = sqr(p_norm(v, 2.0 * Q));
  const std::vector<double> gn = mesh.gradient_norm(v);
  const double grad2 = sqr(p_norm(gn, 2.0));
  const double hn = std::pow(p_norm(mesh.H, n + 2.0), n + 2.0);
  const double v2 = sqr(p_norm(v, 2.0));
  const double core = grad2 + hn * v2;
  rep.rhs = c_n * core;
  rep.ratio = safe_ratio(rep.lhs, core);
  rep.certified = rep.lhs <= rep.rhs;
  return rep;
}

// ||u||_r <= eps ||u||_s + eps^{-mu} ||u||_t  with  mu = (1/t - 1/r)/(1/r - 1/s)
template <class M>
CheckReport interpolation_check(const M& mesh, const std::vector<double>& u, double t_exp,
                                double r_exp, double s_exp, double eps) {
  if (!(1.0 <= t_exp && t_exp < r_exp && r_exp < s_exp))
    throw ConfigInvalid("interpolation needs 1 <= t < r < s");
  if (!(eps > 0.0)) throw ConfigInvalid("interpolation needs eps > 0");
  CheckReport rep;
  rep.name = "interpolation";
  const double mu = (1.0 / t_exp - 1.0 / r_exp) / (1.0 / r_exp - 1.0 / s_exp);
  const auto p_norm = [&](double p) {
    double acc = 0.0;
    for (int w = 0; w < mesh.n_vertices(); ++w)
      acc += std::pow(std::abs(u[w]), p) * mesh.dmu[w];
    return std::pow(acc, 1.0 / p);
  };
  rep.lhs = p_norm(r_exp);
  rep.rhs = eps * p_norm(s_exp) + std::pow(eps, -mu) * p_norm(t_exp);
  rep.ratio = safe_ratio(rep.lhs, rep.rhs);
  rep.certified = rep.lhs <= rep.rhs;
  return rep;
}

// space-time version, beta = 2(n+2)/n:
// ||v||^beta_{L^beta(S)} <= c_n max_t ||v||^{4/n}_{L^2}
//        ( ||grad v||^2_{L^2(S)} + max_t ||v||^2_{L^2} ||H||^{n+2}_{L^{n+2}(S)} )
template <class M, class F>
CheckReport spacetime_sobolev_check(const Trajectory<M>& tr, F&& field, double c_n) {
  const int n = M::dim;
  const double beta = 2.0 * (n + 2) / n;
  CheckReport rep;
  rep.name = "spacetime_sobolev";

  double max_v_l2 = 0.0;
  for (int j = 0; j < tr.n_snaps(); ++j) {
    const auto& mesh = tr.snaps[j].mesh;
    double s = 0.0;
    for (int v = 0; v < mesh.n_vertices(); ++v)
      s += sqr(check_nonneg(field(j, v))) * mesh.dmu[v];
    max_v_l2 = std::max(max_v_l2, std::sqrt(s));
  }

  rep.lhs = spacetime_norm(tr, field, beta).sum;  // the beta-th power

  std::vector<std::vector<double>> gnorm(tr.n_snaps());
  for (int j = 0; j + 1 < tr.n_snaps(); ++j) {
    std::vector<double> slice(tr.snaps[j].mesh.n_vertices());
    for (int v = 0; v < (int)slice.size(); ++v) slice[v] = field(j, v);
    gnorm[j] = tr.snaps[j].mesh.gradient_norm(slice);
  }
  const double grad2 =
      spacetime_norm(tr, [&](int j, int v) { return gnorm[j][v]; }, 2.0).sum;
  const double h_np2 =
      spacetime_norm(tr, [&](int j, int v) { return tr.snaps[j].mesh.H[v]; }, n + 2.0).sum;

  const double core = std::pow(max_v_l2, 4.0 / n) * (grad2 + sqr(max_v_l2) * h_np2);
  rep.rhs = c_n * core;
  rep.ratio = safe_ratio(rep.lhs, core);
  rep.certified = rep.lhs <= rep.rhs;
  return rep;
}

// ---------------------------------------------------------------------------
// Subsolution verification: (v_{j+1} - v_j)/dt - Lap v_j - f_j v_j should stay
// under the discretisation noise floor, taken as ten times the
// area-normalised RMS residual of the mean curvature evolution itself.
// ---------------------------------------------------------------------------

struct SubsolutionReport {
  double max_violation = -kInf;  // most positive residual over the window
  int arg_snap = -1;
  int arg_vertex = -1;
  double tolerance = 0.0;
  bool ok = false;
};

template <class M, class FV, class FF>
SubsolutionReport subsolution_check(const Trajectory<M>& tr, FV&& v, FF&& f) {
  SubsolutionReport rep;
  for (int j = 0; j + 1 < tr.n_snaps(); ++j) {
    const auto& mesh = tr.snaps[j].mesh;
    std::vector<double> vj(mesh.n_vertices());
    for (int w = 0; w < mesh.n_vertices(); ++w)
      vj[w] = check_nonneg(v(j, w));
    const std::vector<double> lap = mesh.laplacian(vj);
    const double dt = tr.snaps[j + 1].t - tr.snaps[j].t;
    for (int w = 0; w < mesh.n_vertices(); ++w) {
      const double r = (v(j + 1, w) - vj[w]) / dt - lap[w] - f(j, w) * vj[w];
      if (r > rep.max_violation) {
        rep.max_violation = r;
        rep.arg_snap = j;
        rep.arg_vertex = w;
      }
    }
    const ResidualReport hr = h_evolution_residual(tr, j);
    rep.tolerance =
        std::max(rep.tolerance, 10.0 * hr.l2 / std::sqrt(mesh.total_area));
  }
  rep.ok = rep.max_violation <= rep.tolerance;
  return rep;
}

template <class M, class FV, class FF>
void require_subsolution(const Trajectory<M>& tr, FV&& v, FF&& f) {
  const SubsolutionReport rep = subsolution_check(tr, v, f);
  if (!rep.ok)
    throw NotSubsolution(strf(
        "residual %.6g exceeds tolerance %.6g at snapshot %d vertex %d",
        rep.max_violation, rep.tolerance, rep.arg_snap, rep.arg_vertex));
}

// ---------------------------------------------------------------------------
// Reverse Holder inequality for a nonnegative subsolution of
// (d/dt - Delta) v <= f v on the normalised window:
//   || eta_k^2 v^beta ||_{L^{(n+2)/n}(S)}
//     <= C_a Lambda(beta)^{1+nu} || v^beta (eta^2 + |grad eta|^2
//                                 + 2 eta |(d/dt - Delta) eta|) ||_{L^1(S)}
// The field is only ever evaluated where the cutoff weight is nonzero.
// ---------------------------------------------------------------------------

struct ReverseHolderReport {
  CheckReport check;
  int k = 1;
  double beta = 0.0;
  long samples = 0;
};

template <class M, class FV, class FF>
ReverseHolderReport reverse_holder_check(const Trajectory<M>& tr, FV&& v, FF&& f,
                                         double beta, int k,
                                         const typename M::Vec& center,
                                         const ConstantsTable& ct) {
  if (!(beta >= 2.0)) throw ConfigInvalid("profile constant needs beta >= 2");
  if (!(ct.in.q > 0.5 * (M::dim + 2)))
    throw SubcriticalExponent("reverse Holder needs q > (n+2)/2");
  require_subsolution(tr, v, f);

  const int n = M::dim;
  ReverseHolderReport rep;
  rep.k = k;
  rep.beta = beta;
  rep.check.name = strf("reverse_holder_k%d", k);

  const auto cut = Cutoff<typename M::Vec>::standard(k, center);
  const int nj = tr.n_snaps();
  std::vector<CutoffHeatResult> ch(nj > 0 ? nj - 1 : 0);
  for (int j = 0; j + 1 < nj; ++j) ch[j] = cutoff_heat_operator(tr, j, cut);

  auto vpow = [&](int j, int w) { return std::pow(check_nonneg(v(j, w)), beta); };

  const NormReport lhs = spacetime_norm(
      tr,
      [&](int j, int w) {
        const double e2 = sqr(ch[j].eta[w]);
        return e2 == 0.0 ? 0.0 : e2 * vpow(j, w);
      },
      (n + 2.0) / n);
  const NormReport rhs_core = spacetime_norm(
      tr,
      [&](int j, int w) {
        const double weight = sqr(ch[j].eta[w]) + sqr(ch[j].grad[w]) +
                              2.0 * ch[j].eta[w] * std::abs(ch[j].heat[w]);
        return weight == 0.0 ? 0.0 : vpow(j, w) * weight;
      },
      1.0);

  rep.samples = lhs.samples;
  rep.check.lhs = lhs.value;
  rep.check.rhs = ct.C_a * std::pow(ct.Lambda_beta, 1.0 + ct.nu) * rhs_core.value;
  rep.check.ratio = safe_ratio(rep.check.lhs, rep.check.rhs);
  rep.check.certified = rep.check.lhs <= rep.check.rhs;
  return rep;
}

// ---------------------------------------------------------------------------
// Moser ladder: iterate the reverse Holder step through the dyadic cylinders,
//   s_k = ||v||_{L^{beta lambda^k}(D_k)}
//   s_k <= C_z^{1/(beta l)} 4^{(k-1)/(beta l)} (l beta)^{(1+nu)/(beta l)} s_{k-1}
// with l = lambda^{k-1}, then compare the inner-cylinder supremum with the
// closed-form constant: sup_{D'} v <= C_b s_0.
// ---------------------------------------------------------------------------

struct LadderRung {
  int k = 0;
  double exponent = 0.0;  // beta lambda^k
  double value = 0.0;     // s_k
  double bound = 0.0;     // rung bound in terms of s_{k-1}
  long samples = 0;
  bool ok = false;
};

struct MoserLadderReport {
  std::vector<LadderRung> rungs;  // rung 0 holds s_0 with no bound
  double sup_inner = 0.0;         // sup over D'
  double sup_bound = 0.0;         // C_b s_0
  bool rungs_certified = false;
  bool sup_certified = false;
};

template <class M, class FV, class FF>
MoserLadderReport moser_ladder(const Trajectory<M>& tr, FV&& v, FF&& f, double beta,
                               int k_max, const typename M::Vec& center,
                               const ConstantsTable& ct, long min_samples = 100) {
  if (k_max < 1) throw ConfigInvalid("ladder needs k_max >= 1");
  if (!(beta >= 2.0)) throw ConfigInvalid("profile constant needs beta >= 2");
  require_subsolution(tr, v, f);
  MoserLadderReport rep;

  const auto cylinder_norm = [&](int k, double p) {
    const auto cyl = dyadic_cylinder(k, center);
    return spacetime_norm(tr, [&](int j, int w) { return check_nonneg(v(j, w)); }, p,
                          &cyl);
  };

  {
    const NormReport n0 = cylinder_norm(0, beta);
    rep.rungs.push_back({0, beta, n0.value, 0.0, n0.samples, true});
  }
  for (int k = 1; k <= k_max; ++k) {
    const double l = std::pow(ct.lambda, k - 1);
    const double bl = beta * l;
    const NormReport nk = cylinder_norm(k, bl * ct.lambda);
    LadderRung rung;
    rung.k = k;
    rung.exponent = bl * ct.lambda;
    rung.value = nk.value;
    rung.samples = nk.samples;
    rung.bound = std::pow(ct.C_z, 1.0 / bl) * std::pow(4.0, (k - 1) / bl) *
                 std::pow(bl, (1.0 + ct.nu) / bl) * rep.rungs.back().value;
    rung.ok = rung.value <= rung.bound;
    rep.rungs.push_back(rung);
  }
  if (rep.rungs.back().samples < min_samples)
    throw LadderUnderresolved(strf("top cylinder has %ld samples, need %ld",
                                   rep.rungs.back().samples, min_samples));

  const auto inner = inner_cylinder(center);
  rep.sup_inner =
      sup_norm(tr, [&](int j, int w) { return check_nonneg(v(j, w)); }, &inner).value;
  rep.sup_bound = ct.C_b * rep.rungs.front().value;
  rep.rungs_certified = true;
  for (size_t i = 1; i < rep.rungs.size(); ++i)
    rep.rungs_certified = rep.rungs_certified && rep.rungs[i].ok;
  rep.sup_certified = rep.sup_inner <= rep.sup_bound;
  return rep;
}

// ---------------------------------------------------------------------------
// Critical-exponent smallness: when || f ||_{L^{(n+2)/2}(D)} <= delta_1 the
// first iteration rung survives without the supercritical absorption and
//   || v ||_{L^{lambda beta}(D_1)} <= C_c || v ||_{L^beta(D)},
// with lambda = (n+2)/n.  Both sides are tabulated whether or not smallness
// holds; `certified` requires both.
// ---------------------------------------------------------------------------

struct SmallnessReport {
  double kappa = 0.0;  // || f ||_{L^{(n+2)/2}(D)}
  double delta_1 = 0.0;
  bool small = false;
  CheckReport conclusion;
  bool certified = false;
};

template <class M, class FV, class FF>
SmallnessReport critical_smallness_check(const Trajectory<M>& tr, FV&& v, FF&& f,
                                         double beta, const typename M::Vec& center,
                                         const ConstantsTable& ct) {
  const int n = M::dim;
  if (ct.in.q != 0.5 * (n + 2))
    throw ConfigInvalid("critical smallness needs the table built at q = (n+2)/2");
  require_subsolution(tr, v, f);

  SmallnessReport rep;
  rep.delta_1 = ct.delta_1;
  const auto D0 = dyadic_cylinder(0, center);
  const auto D1 = dyadic_cylinder(1, center);
  rep.kappa = spacetime_norm(tr, [&](int j, int w) { return std::abs(f(j, w)); },
                             (n + 2.0) / 2.0, &D0)
                  .value;
  rep.small = rep.kappa <= rep.delta_1;

  rep.conclusion.name = "critical_smallness";
  rep.conclusion.lhs =
      spacetime_norm(tr, [&](int j, int w) { return check_nonneg(v(j, w)); },
                     ct.lambda * beta, &D1)
          .value;
  const double v_beta_D =
      spacetime_norm(tr, [&](int j, int w) { return check_nonneg(v(j, w)); }, beta, &D0)
          .value;
  rep.conclusion.rhs = ct.C_c * v_beta_D;
  rep.conclusion.ratio = safe_ratio(rep.conclusion.lhs, rep.conclusion.rhs);
  rep.conclusion.certified = rep.conclusion.lhs <= rep.conclusion.rhs;
  rep.certified = rep.small && rep.conclusion.certified;
  return rep;
}

// ---------------------------------------------------------------------------
// Mean curvature bound on the normalised window: with
//   h := ||H||_{L^{n+2}(D)} + B ||1||_{L^{n+2}(D)}
// the hypothesis h <= delta_2 implies sup_{D'} H^+ <= C_d h.  The bound side
// is evaluated and reported whether or not the hypothesis is met.
// ---------------------------------------------------------------------------

struct CurvatureBoundReport {
  double C1 = 1.0;
  double B = 0.0;
  double hyp = 0.0;  // h above
  double delta_2 = 0.0;
  bool hypothesis_met = false;
  double sup_H_plus = 0.0;
  double C_3 = 0.0;
  double C_d = 0.0;
  double bound = 0.0;  // C_d * h
  bool bound_holds = false;
  bool certified = false;
};

template <class M>
CurvatureBoundReport mean_curvature_bound_check(const Trajectory<M>& tr, double B,
                                                const typename M::Vec& center,
                                                double c_n) {
  const int n = M::dim;
  CurvatureBoundReport rep;
  rep.B = B;

  const auto H_of = [&](int j, int v) { return tr.snaps[j].mesh.H[v]; };
  const double h_np2_S = spacetime_norm(tr, H_of, n + 2.0).sum;
  rep.C1 = std::pow(1.0 + h_np2_S, n / (n + 2.0));

  ConstantsInput ci;
  ci.n = n;
  ci.c_n = c_n;
  ci.C1 = rep.C1;
  ci.beta = n + 2.0;
  ci.q = n + 2.0;
  rep.delta_2 = constants_table(ci).delta_2;

  const auto D0 = dyadic_cylinder(0, center);
  const double normH = spacetime_norm(tr, H_of, n + 2.0, &D0).value;
  const double norm1 = spacetime_norm(tr, [](int, int) { return 1.0; }, n + 2.0, &D0).value;
  const double norm1q2 =
      spacetime_norm(tr, [](int, int) { return 1.0; }, sqr(n + 2.0) / (2.0 * n), &D0).value;

  rep.hyp = normH + B * norm1;
  rep.hypothesis_met = rep.hyp <= rep.delta_2;

  const CurvatureBoundConstants cb =
      curvature_bound_constants(ci, B, normH, norm1, norm1q2);
  rep.C_3 = cb.C_3;
  rep.C_d = cb.C_d;
  rep.bound = rep.C_d * rep.hyp;

  const auto inner = inner_cylinder(center);
  rep.sup_H_plus =
      sup_norm(tr, [&](int j, int v) { return std::max(H_of(j, v), 0.0); }, &inner).value;
  rep.bound_holds = rep.sup_H_plus <= rep.bound;
  rep.certified = rep.hypothesis_met && rep.bound_holds;
  return rep;
}

// Builds the constants table from trajectory data: C0 = ||f||_{L^q(S)} and
// C1 = (1 + ||H||^{n+2}_{L^{n+2}(S)})^{n/(n+2)} over the whole window.
template <class M, class FF>
ConstantsTable constants_from_trajectory(const Trajectory<M>& tr, FF&& f, double q,
                                         double beta, double c_n) {
  const int n = M::dim;
  ConstantsInput ci;
  ci.n = n;
  ci.q = q;
  ci.beta = beta;
  ci.c_n = c_n;
  ci.C0 = spacetime_norm(tr, [&](int j, int w) { return std::abs(f(j, w)); }, q).value;
  const double h_np2 =
      spacetime_norm(tr, [&](int j, int w) { return tr.snaps[j].mesh.H[w]; }, n + 2.0)
          .sum;
  ci.C1 = std::pow(1.0 + h_np2, n / (n + 2.0));
  return constants_table(ci);
}

}  // namespace mcflab
