#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "mcflab/flow.hpp"

namespace mcflab {

// ---------------------------------------------------------------------------
// Space-time regions.  A trajectory is treated as the slab M x [t0, t_end];
// parabolic cylinders restrict it to a ball around a centre from a start
// time onward.  Membership is vertex-based: a vertex contributes at snapshot
// time t when |x - c| <= radius and t >= t_start.
//
// The standard dyadic family lives on a normalised window [0, 1]:
//   r_k = 1/2 + 2^-(k+1),  t_k = (1 - 4^-k) / 12,  rho_k = 2^-(k+1)
// so consecutive cylinders are separated by a parabolic gap t_k - t_{k-1} =
// rho_k^2.  k = 0 is the unit cylinder; the inner cylinder (radius 1/2 from
// t = 1/12 on) contains every D_k.
// ---------------------------------------------------------------------------

template <class Vec>
struct Cylinder {
  Vec center = Vec::Zero();
  double radius = 1.0;
  double t_start = 0.0;
  std::string name = "D0";

  bool contains(double t, const Vec& x) const {
    return t >= t_start && (x - center).norm() <= radius;
  }
};

inline double dyadic_radius(int k) { return 0.5 + std::exp2(-(k + 1)); }
inline double dyadic_rho(int k) { return std::exp2(-(k + 1)); }
inline double dyadic_start(int k) { return (1.0 - std::exp2(-2.0 * k)) / 12.0; }

template <class Vec>
Cylinder<Vec> dyadic_cylinder(int k, const Vec& center) {
  if (k < 0) throw ConfigInvalid("cylinder index must be >= 0");
  return {center, dyadic_radius(k), dyadic_start(k), strf("D%d", k)};
}

template <class Vec>
Cylinder<Vec> inner_cylinder(const Vec& center) {
  return {center, 0.5, 1.0 / 12.0, "Dprime"};
}

// ---------------------------------------------------------------------------
// Norms.  Space-time integrals use left-endpoint time quadrature (the final
// snapshot carries zero weight) and the lumped vertex measure in space.
// ---------------------------------------------------------------------------

struct NormReport {
  double p = 2.0;
  double value = 0.0;  // (integral of |f|^p)^(1/p)
  double sum = 0.0;    // integral of |f|^p
  long samples = 0;
  std::string region = "slab";
};

// field: (snapshot index, vertex index) -> double
template <class M, class F>
NormReport spacetime_norm(const Trajectory<M>& tr, F&& field, double p,
                          const Cylinder<typename M::Vec>* region = nullptr) {
  if (!(p > 0.0)) throw ConfigInvalid("norm exponent must be positive");
  NormReport rep;
  rep.p = p;
  if (region) rep.region = region->name;
  for (int j = 0; j + 1 < tr.n_snaps(); ++j) {
    const auto& s = tr.snaps[j];
    const double w = tr.snaps[j + 1].t - s.t;
    for (int v = 0; v < s.mesh.n_vertices(); ++v) {
      if (region && !region->contains(s.t, s.mesh.pos[v])) continue;
      rep.sum += w * s.mesh.dmu[v] * std::pow(std::abs(field(j, v)), p);
      ++rep.samples;
    }
  }
  if (rep.samples == 0)
    throw EmptyRegion(strf("no quadrature samples in %s", rep.region.c_str()));
  rep.value = std::pow(rep.sum, 1.0 / p);
  return rep;
}

template <class M, class F>
NormReport slice_norm(const M& mesh, F&& field, double p) {
  if (!(p > 0.0)) throw ConfigInvalid("norm exponent must be positive");
  NormReport rep;
  rep.p = p;
  rep.region = "slice";
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    rep.sum += mesh.dmu[v] * std::pow(std::abs(field(v)), p);
    ++rep.samples;
  }
  rep.value = std::pow(rep.sum, 1.0 / p);
  return rep;
}

struct SupReport {
  double value = -kInf;
  int snap = -1;
  int vert = -1;
  long samples = 0;
};

// pointwise supremum over a region; unlike the integrals this includes the
// final snapshot
template <class M, class F>
SupReport sup_norm(const Trajectory<M>& tr, F&& field,
                   const Cylinder<typename M::Vec>* region = nullptr) {
  SupReport rep;
  for (int j = 0; j < tr.n_snaps(); ++j) {
    const auto& s = tr.snaps[j];
    for (int v = 0; v < s.mesh.n_vertices(); ++v) {
      if (region && !region->contains(s.t, s.mesh.pos[v])) continue;
      ++rep.samples;
      const double val = field(j, v);
      if (val > rep.value) rep.value = val, rep.snap = j, rep.vert = v;
    }
  }
  if (rep.samples == 0) throw EmptyRegion("no vertices in region");
  return rep;
}

template <class M>
long count_samples(const Trajectory<M>& tr, const Cylinder<typename M::Vec>& region) {
  long n = 0;
  for (int j = 0; j + 1 < tr.n_snaps(); ++j) {
    const auto& s = tr.snaps[j];
    for (int v = 0; v < s.mesh.n_vertices(); ++v)
      if (region.contains(s.t, s.mesh.pos[v])) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Space-time cutoff for the dyadic pair (D_{k-1}, D_k): a product of a
// smoothstep ramp in time across [t_{k-1}, t_k] and a smoothstep shoulder in
// |x - c|^2 across [r_k^2, r_{k-1}^2].  It is 1 on D_k, 0 outside D_{k-1},
// and vanishes identically at the initial time of the normalised window.
// ---------------------------------------------------------------------------

inline double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * (3.0 - 2.0 * u);
}
inline double smoothstep_d(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return 6.0 * u * (1.0 - u);
}

template <class Vec>
struct Cutoff {
  int k = 1;
  Vec center = Vec::Zero();
  double t_lo = 0.0, t_hi = 0.0;  // phi ramps over [t_lo, t_hi], width rho^2
  double s_lo = 0.0, s_hi = 0.0;  // psi shoulders over s=|x-c|^2 in [s_lo, s_hi]
  double rho = 0.0;

  static Cutoff standard(int k, const Vec& c) {
    if (k < 1) throw ConfigInvalid("cutoff index must be >= 1");
    Cutoff q;
    q.k = k;
    q.center = c;
    q.rho = dyadic_rho(k);
    q.t_lo = dyadic_start(k - 1);
    q.t_hi = dyadic_start(k);
    q.s_lo = sqr(dyadic_radius(k));
    q.s_hi = sqr(dyadic_radius(k - 1));
    return q;
  }

  double phi(double t) const { return smoothstep((t - t_lo) / (t_hi - t_lo)); }
  double psi(double s) const { return smoothstep((s_hi - s) / (s_hi - s_lo)); }
  double dpsi_ds(double s) const {
    return -smoothstep_d((s_hi - s) / (s_hi - s_lo)) / (s_hi - s_lo);
  }

  double eval(double t, const Vec& x) const {
    return phi(t) * psi((x - center).squaredNorm());
  }

  // analytic surface gradient magnitude: |nabla eta| = phi |psi'| |P_tan 2(x-c)|
  double grad_norm(double t, const Vec& x, const Vec& nu) const {
    const Vec d = x - center;
    const Vec tang = 2.0 * (d - d.dot(nu) * nu);
    return phi(t) * std::abs(dpsi_ds(d.squaredNorm())) * tang.norm();
  }
};

// ---------------------------------------------------------------------------
// Heat operator along the flow.  For a vertex field given per snapshot,
// (d/dt - Delta) is discretised with a forward difference along the
// Lagrangian vertex tracks and the intrinsic Laplacian of snapshot j.
// ---------------------------------------------------------------------------

template <class M, class F>
std::vector<double> material_heat_operator(const Trajectory<M>& tr, int j, F&& field) {
  if (j < 0 || j >= tr.n_snaps()) throw ConfigInvalid("snapshot index out of range");
  if (j + 1 >= tr.n_snaps())
    throw LastSnapshot("forward time difference needs a successor snapshot");
  const auto& s = tr.snaps[j];
  const double dt = tr.snaps[j + 1].t - s.t;
  const int nv = s.mesh.n_vertices();
  std::vector<double> g(nv), out(nv);
  for (int v = 0; v < nv; ++v) g[v] = field(j, v);
  const std::vector<double> lap = s.mesh.laplacian(g);
  for (int v = 0; v < nv; ++v)
    out[v] = (field(j + 1, v) - g[v]) / dt - lap[v];
  return out;
}

struct CutoffHeatResult {
  std::vector<double> eta;       // eta at snapshot j
  std::vector<double> grad;      // |nabla eta| at snapshot j (analytic)
  std::vector<double> heat;      // (d/dt - Delta) eta at snapshot j
};

template <class M>
CutoffHeatResult cutoff_heat_operator(const Trajectory<M>& tr, int j,
                                      const Cutoff<typename M::Vec>& cut) {
  CutoffHeatResult res;
  res.heat = material_heat_operator(tr, j, [&](int jj, int v) {
    return cut.eval(tr.snaps[jj].t, tr.snaps[jj].mesh.pos[v]);
  });
  const auto& s = tr.snaps[j];
  const int nv = s.mesh.n_vertices();
  res.eta.resize(nv);
  res.grad.resize(nv);
  for (int v = 0; v < nv; ++v) {
    res.eta[v] = cut.eval(s.t, s.mesh.pos[v]);
    res.grad[v] = cut.grad_norm(s.t, s.mesh.pos[v], s.mesh.nrm[v]);
  }
  return res;
}

}  // namespace mcflab
