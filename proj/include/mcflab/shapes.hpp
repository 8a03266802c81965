#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "mcflab/mesh.hpp"

namespace mcflab {

inline constexpr int kMinCurveVertices = 8;
inline constexpr int kMinSurfaceVertices = 42;

inline Curve make_circle(double radius, int n) {
  if (radius <= 0.0) throw ConfigInvalid("circle radius must be positive");
  if (n < kMinCurveVertices)
    throw ResolutionTooLow(strf("circle with %d vertices, need >= %d", n, kMinCurveVertices));
  Curve c;
  c.pos.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * i / n;
    c.pos.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  c.compute_geometry();
  return c;
}

inline Curve make_ellipse(double a, double b, int n) {
  if (b > a || b <= 0.0) throw ConfigInvalid("ellipse needs 0 < b <= a");
  if (n < kMinCurveVertices)
    throw ResolutionTooLow(strf("ellipse with %d vertices, need >= %d", n, kMinCurveVertices));
  Curve c;
  c.pos.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    c.pos.emplace_back(a * std::cos(t), b * std::sin(t));
  }
  c.compute_geometry();
  return c;
}

// icosahedron subdivided `level` times, projected to the sphere; no minimum
// size guard so that the raw combinatorics stay testable
inline Surface icosphere_mesh(int level, double radius = 1.0) {
  if (level < 0) throw ConfigInvalid("subdivision level must be >= 0");
  if (radius <= 0.0) throw ConfigInvalid("sphere radius must be positive");
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vec3> v = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back(0.5 * (v[a] + v[b]));
      mid[key] = (int)v.size() - 1;
      return (int)v.size() - 1;
    };
    std::vector<std::array<int, 3>> nf;
    nf.reserve(4 * f.size());
    for (const auto& tr : f) {
      const int ab = midpoint(tr[0], tr[1]);
      const int bc = midpoint(tr[1], tr[2]);
      const int ca = midpoint(tr[2], tr[0]);
      nf.push_back({tr[0], ab, ca});
      nf.push_back({tr[1], bc, ab});
      nf.push_back({tr[2], ca, bc});
      nf.push_back({ab, bc, ca});
    }
    f = std::move(nf);
  }
  for (auto& p : v) p *= radius / p.norm();
  return Surface::build(std::move(v), std::move(f));
}

inline Surface make_sphere(double radius, int level) {
  Surface s = icosphere_mesh(level, radius);
  if (s.n_vertices() < kMinSurfaceVertices)
    throw ResolutionTooLow(strf("sphere with %d vertices, need >= %d",
                                s.n_vertices(), kMinSurfaceVertices));
  s.compute_geometry();
  return s;
}

inline Surface make_torus(double R, double r, int nu, int nv) {
  if (!(r > 0.0 && r < R)) throw ConfigInvalid("torus needs 0 < r < R");
  if (nu < 3 || nv < 3 || nu * nv < kMinSurfaceVertices)
    throw ResolutionTooLow(strf("torus %dx%d below %d vertices", nu, nv, kMinSurfaceVertices));
  std::vector<Vec3> v;
  v.reserve(nu * nv);
  for (int i = 0; i < nu; ++i) {
    const double a = 2.0 * kPi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double b = 2.0 * kPi * j / nv;
      const double w = R + r * std::cos(b);
      v.emplace_back(w * std::cos(a), w * std::sin(a), r * std::sin(b));
    }
  }
  std::vector<std::array<int, 3>> f;
  f.reserve(2 * nu * nv);
  auto id = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      // outward orientation
      f.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
      f.push_back({id(i, j + 1), id(i + 1, j), id(i + 1, j + 1)});
    }
  Surface s = Surface::build(std::move(v), std::move(f));
  s.compute_geometry();
  return s;
}

// Two spherical bulbs of radius `handle` joined by a neck of radius `neck`.
// The bulbs are hemispherical caps centred at z = +-(1 - handle); on
// |z| <= 1 - handle the profile blends from the neck radius up to the bulb
// radius with a quintic whose first two derivatives vanish at both ends, so
// the neck is locally a straight cylinder and the largest mean curvature of
// the initial surface, 1/neck, sits exactly at z = 0 (requires
// handle > 2*neck, enforced below).
inline Surface make_dumbbell(double neck, double handle, int nth, double scale = 1.0) {
  if (!(neck > 0.0)) throw ConfigInvalid("dumbbell neck radius must be positive");
  if (!(handle < 1.0 && handle > 2.0 * neck))
    throw ConfigInvalid("dumbbell needs 2*neck < handle < 1");
  if (nth < 8) throw ResolutionTooLow(strf("dumbbell with %d segments, need >= 8", nth));
  const double zb = 1.0 - handle;

  auto profile = [&](double z) {
    const double az = std::abs(z);
    if (az <= zb) {
      const double u = az / zb;
      const double s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
      return neck + (handle - neck) * s;
    }
    return std::sqrt(std::max(handle * handle - sqr(az - zb), 0.0));
  };

  // ring stations: uniform polar angle on the caps (poles excluded), uniform
  // z across the blend; the two lists meet exactly at |z| = zb
  const int ncap = std::max(3, nth / 3);
  const int nblend = std::max(4, (int)std::lround(zb * nth / 1.2));
  std::vector<double> zs;
  for (int i = 1; i <= ncap; ++i)
    zs.push_back(-(zb + handle * std::cos(kPi / 2.0 * (i / (double)ncap))));
  for (int i = 1; i < nblend; ++i)
    zs.push_back(-zb + 2.0 * zb * i / nblend);
  for (int i = 0; i < ncap; ++i)
    zs.push_back(zb + handle * std::sin(kPi / 2.0 * (i / (double)ncap)));

  std::vector<Vec3> v;
  v.emplace_back(0.0, 0.0, -scale);
  for (double z : zs) {
    const double rho = profile(z);
    for (int k = 0; k < nth; ++k) {
      const double a = 2.0 * kPi * k / nth;
      v.emplace_back(scale * rho * std::cos(a), scale * rho * std::sin(a), scale * z);
    }
  }
  v.emplace_back(0.0, 0.0, scale);

  const int nr = (int)zs.size();
  std::vector<std::array<int, 3>> f;
  f.reserve(2 * nr * nth);
  for (int k = 0; k < nth; ++k) f.push_back({0, 1 + (k + 1) % nth, 1 + k});
  for (int ring = 0; ring + 1 < nr; ++ring) {
    const int b0 = 1 + ring * nth, b1 = 1 + (ring + 1) * nth;
    for (int k = 0; k < nth; ++k) {
      const int k2 = (k + 1) % nth;
      f.push_back({b0 + k, b0 + k2, b1 + k});
      f.push_back({b0 + k2, b1 + k2, b1 + k});
    }
  }
  const int last = 1 + (nr - 1) * nth, top = (int)v.size() - 1;
  for (int k = 0; k < nth; ++k) f.push_back({last + k, last + (k + 1) % nth, top});

  Surface s = Surface::build(std::move(v), std::move(f));
  if (s.n_vertices() < kMinSurfaceVertices)
    throw ResolutionTooLow(strf("dumbbell with %d vertices, need >= %d",
                                s.n_vertices(), kMinSurfaceVertices));
  s.compute_geometry();
  return s;
}

}  // namespace mcflab
