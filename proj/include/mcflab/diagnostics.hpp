#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mcflab/exact.hpp"
#include "mcflab/spacetime.hpp"

namespace mcflab {

// ---------------------------------------------------------------------------
// Conservation-law and evolution-equation residuals.  These quantify how
// faithfully the discrete flow reproduces the continuum identities
//   d/dt area = -int H^2,   dH/dt = Lap H + |A|^2 H,
//   (d/dt - Delta)|x - x0|^2 = -2n.
// ---------------------------------------------------------------------------

struct AreaDerivativeRow {
  double t = 0.0;
  double dA_dt = 0.0;      // forward difference of total area
  double int_H2 = 0.0;     // integral of H^2 at the left snapshot
  double rel_err = 0.0;    // |dA/dt + int H^2| / int H^2
};

template <class M>
std::vector<AreaDerivativeRow> area_derivative_check(const Trajectory<M>& tr) {
  std::vector<AreaDerivativeRow> rows;
  for (int j = 0; j + 1 < tr.n_snaps(); ++j) {
    const auto& a = tr.snaps[j];
    const auto& b = tr.snaps[j + 1];
    AreaDerivativeRow r;
    r.t = a.t;
    r.dA_dt = (b.mesh.total_area - a.mesh.total_area) / (b.t - a.t);
    for (int v = 0; v < a.mesh.n_vertices(); ++v)
      r.int_H2 += sqr(a.mesh.H[v]) * a.mesh.dmu[v];
    r.rel_err = std::abs(r.dA_dt + r.int_H2) / std::max(r.int_H2, 1e-300);
    rows.push_back(r);
  }
  return rows;
}

template <class M>
std::vector<double> second_fundamental_norm2(const M& mesh) {
  std::vector<double> a2(mesh.n_vertices());
  if constexpr (M::dim == 1) {
    for (int v = 0; v < mesh.n_vertices(); ++v) a2[v] = sqr(mesh.H[v]);
  } else {
    for (int v = 0; v < mesh.n_vertices(); ++v)
      a2[v] = sqr(mesh.lam1[v]) + sqr(mesh.lam2[v]);
  }
  return a2;
}

struct ResidualReport {
  double max_abs = 0.0;  // max_v |r_v|
  double l2 = 0.0;       // ||r||_{L^2(M_j)}
  double ref_l2 = 0.0;   // |||A|^2 H||_{L^2(M_j)}
  double rel_l2 = 0.0;   // l2 / ref_l2
};

// residual of dH/dt = Lap H + |A|^2 H at snapshot j (forward difference)
template <class M>
ResidualReport h_evolution_residual(const Trajectory<M>& tr, int j) {
  if (j + 1 >= tr.n_snaps())
    throw LastSnapshot("forward time difference needs a successor snapshot");
  const auto& s = tr.snaps[j];
  const double dt = tr.snaps[j + 1].t - s.t;
  const std::vector<double> lap = s.mesh.laplacian(s.mesh.H);
  const std::vector<double> a2 = second_fundamental_norm2(s.mesh);
  ResidualReport rep;
  double sum = 0.0, ref = 0.0;
  for (int v = 0; v < s.mesh.n_vertices(); ++v) {
    const double drive = a2[v] * s.mesh.H[v];
    const double r = (tr.snaps[j + 1].mesh.H[v] - s.mesh.H[v]) / dt - lap[v] - drive;
    rep.max_abs = std::max(rep.max_abs, std::abs(r));
    sum += sqr(r) * s.mesh.dmu[v];
    ref += sqr(drive) * s.mesh.dmu[v];
  }
  rep.l2 = std::sqrt(sum);
  rep.ref_l2 = std::sqrt(ref);
  rep.rel_l2 = rep.l2 / std::max(rep.ref_l2, 1e-300);
  return rep;
}

// residual of (d/dt - Delta)|x - x0|^2 = -2n at snapshot j
template <class M>
ResidualReport brakke_identity_residual(const Trajectory<M>& tr, int j,
                                        const typename M::Vec& x0) {
  const std::vector<double> heat = material_heat_operator(tr, j, [&](int jj, int v) {
    return (tr.snaps[jj].mesh.pos[v] - x0).squaredNorm();
  });
  const double target = -2.0 * M::dim;
  ResidualReport rep;
  double sum = 0.0, ref = 0.0;
  const auto& s = tr.snaps[j];
  for (int v = 0; v < s.mesh.n_vertices(); ++v) {
    const double r = heat[v] - target;
    rep.max_abs = std::max(rep.max_abs, std::abs(r));
    sum += sqr(r) * s.mesh.dmu[v];
    ref += sqr(target) * s.mesh.dmu[v];
  }
  rep.l2 = std::sqrt(sum);
  rep.ref_l2 = std::sqrt(ref);
  rep.rel_l2 = rep.l2 / std::max(rep.ref_l2, 1e-300);
  return rep;
}

// ---------------------------------------------------------------------------
// Pinching.  B is the smallest nonnegative constant with lambda_i >= -B for
// every principal curvature on the slice; to keep H + n B nonnegative under
// the two independent curvature estimators the maximum is also taken over
// -H/n.
// ---------------------------------------------------------------------------

struct PinchingReport {
  double B = 0.0;
  double min_lambda = 0.0;
  int argmin = -1;
};

template <class M>
PinchingReport pinching_constant(const M& mesh) {
  PinchingReport rep;
  rep.min_lambda = kInf;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const double lmin = (M::dim == 1) ? mesh.H[v] : mesh.lam1[v];
    if (lmin < rep.min_lambda) rep.min_lambda = lmin, rep.argmin = v;
    rep.B = std::max(rep.B, -mesh.H[v] / M::dim);
  }
  rep.B = std::max(rep.B, -rep.min_lambda);
  return rep;
}

struct HatFields {
  std::vector<double> H_hat;  // H + n B >= 0
  std::vector<double> f;      // H_hat^2 + n B^2
  double max_upper_violation = 0.0;  // of |A|^2 <= H_hat^2 - 2 B H_hat + n B^2
};

template <class M>
HatFields hat_fields(const M& mesh, double B) {
  if (B < 0.0) throw ConfigInvalid("pinching constant must be >= 0");
  const int n = M::dim;
  const int nv = mesh.n_vertices();
  const double tol = 1e-9 * std::max(1.0, B);
  HatFields out;
  out.H_hat.resize(nv);
  out.f.resize(nv);
  const std::vector<double> a2 = second_fundamental_norm2(mesh);
  for (int v = 0; v < nv; ++v) {
    const double lmin = (M::dim == 1) ? mesh.H[v] : mesh.lam1[v];
    if (lmin < -B - tol || mesh.H[v] < -n * B - tol)
      throw PinchingViolated(strf("vertex %d has curvature below -B=%.17g", v, -B));
    out.H_hat[v] = std::max(mesh.H[v] + n * B, 0.0);
    out.f[v] = sqr(out.H_hat[v]) + n * B * B;
    const double bound = sqr(out.H_hat[v]) - 2.0 * B * out.H_hat[v] + n * B * B;
    out.max_upper_violation = std::max(out.max_upper_violation, a2[v] - bound);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curvature maxima along a trajectory.
// ---------------------------------------------------------------------------

struct MaxHRow {
  double t = 0.0;
  double max_H = 0.0;
  int argmax = -1;
  double running_max = 0.0;
};

template <class M>
std::vector<MaxHRow> max_H_series(const Trajectory<M>& tr) {
  std::vector<MaxHRow> rows;
  double run = -kInf;
  for (const auto& s : tr.snaps) {
    MaxHRow r;
    r.t = s.t;
    for (int v = 0; v < s.mesh.n_vertices(); ++v) {
      const double h = std::abs(s.mesh.H[v]);
      if (h > r.max_H) r.max_H = h, r.argmax = v;
    }
    run = std::max(run, r.max_H);
    r.running_max = run;
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Divergence of scaling-critical curvature integrals near the singular time.
//   I(eps) = integral over M x [0, T - eps] of |H|^alpha
// sampled on a geometric grid eps_m = T 2^-m.  The singular time is
// estimated from the final snapshot: a surface whose largest curvature is h
// has at most n/(2 h^2) of life left.
//
// Against the exact shrinking solution:
//   alpha = n + 2: I grows like c log(1/eps) (critical divergence),
//   alpha > n + 2: log I / log(1/eps) -> (alpha - n)/2 - 1,
//   alpha < n + 2: I converges, reported with its Cauchy tail.
// ---------------------------------------------------------------------------

enum class DivergenceRegime { Subcritical, Critical, Supercritical };

struct DivergenceFit {
  double alpha = 0.0;
  DivergenceRegime regime = DivergenceRegime::Critical;
  double T_est = 0.0;
  std::vector<double> eps, I;
  double slope = 0.0;      // critical: dI/dlog(1/eps); super: dlogI/dlog(1/eps)
  double intercept = 0.0;
  double cauchy_tail = 0.0;  // |I_m - I_{m-1}| / I_m at the finest pair
  double limit = 0.0;        // finest I (subcritical limit estimate)
};

namespace detail {
inline void least_squares_line(const std::vector<double>& x, const std::vector<double>& y,
                               double& slope, double& intercept) {
  const int n = (int)x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
  const double det = n * sxx - sx * sx;
  slope = (n * sxy - sx * sy) / det;
  intercept = (sy * sxx - sx * sxy) / det;
}
}  // namespace detail

template <class M>
DivergenceFit divergence_exponent_fit(const Trajectory<M>& tr, double alpha,
                                      int m_lo = 3, int m_hi = 10) {
  if (!(alpha > 0.0)) throw ConfigInvalid("exponent must be positive");
  if (m_lo < 1 || m_hi <= m_lo) throw ConfigInvalid("bad epsilon grid");
  DivergenceFit fit;
  fit.alpha = alpha;
  const double critical = M::dim + 2;
  fit.regime = alpha == critical  ? DivergenceRegime::Critical
               : alpha > critical ? DivergenceRegime::Supercritical
                                  : DivergenceRegime::Subcritical;

  const auto& last = tr.snaps.back();
  fit.T_est = last.t + ExactSphere::time_left(M::dim, std::max(last.max_H, 1e-300));

  // accumulate I(eps) over the snapshot list; each snapshot interval that
  // straddles the cut T - eps contributes its clipped left-endpoint weight
  for (int m = m_lo; m <= m_hi; ++m) {
    const double eps = fit.T_est * std::exp2(-m);
    const double t_cut = fit.T_est - eps;
    if (t_cut > tr.t_end()) continue;  // data does not reach this close to T
    double I = 0.0;
    for (int j = 0; j + 1 < tr.n_snaps(); ++j) {
      const auto& s = tr.snaps[j];
      if (s.t >= t_cut) break;
      const double w = std::min(tr.snaps[j + 1].t, t_cut) - s.t;
      double slice = 0.0;
      for (int v = 0; v < s.mesh.n_vertices(); ++v)
        slice += std::pow(std::abs(s.mesh.H[v]), alpha) * s.mesh.dmu[v];
      I += w * slice;
    }
    fit.eps.push_back(eps);
    fit.I.push_back(I);
  }
  if ((int)fit.eps.size() < 4)
    throw InsufficientTail(strf("only %zu usable grid points", fit.eps.size()));

  std::vector<double> x(fit.eps.size()), y(fit.eps.size());
  for (size_t i = 0; i < fit.eps.size(); ++i) x[i] = std::log(1.0 / fit.eps[i]);
  switch (fit.regime) {
    case DivergenceRegime::Critical:
      detail::least_squares_line(x, fit.I, fit.slope, fit.intercept);
      break;
    case DivergenceRegime::Supercritical:
      for (size_t i = 0; i < fit.I.size(); ++i) y[i] = std::log(fit.I[i]);
      detail::least_squares_line(x, y, fit.slope, fit.intercept);
      break;
    case DivergenceRegime::Subcritical:
      detail::least_squares_line(x, fit.I, fit.slope, fit.intercept);
      break;
  }
  const size_t nI = fit.I.size();
  fit.limit = fit.I[nI - 1];
  fit.cauchy_tail = std::abs(fit.I[nI - 1] - fit.I[nI - 2]) / std::max(fit.I[nI - 1], 1e-300);
  return fit;
}

// slope a supercritical exponent should produce on the exact solution
inline double supercritical_slope(int n, double alpha) { return (alpha - n) / 2.0 - 1.0; }

}  // namespace mcflab
