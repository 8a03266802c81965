#pragma once

#include <cmath>
#include <vector>

#include "mcflab/mesh.hpp"
#include "mcflab/rng.hpp"
#include "mcflab/shapes.hpp"

namespace mcflab {

// Deterministic random geometry for regression suites.  Everything is a
// fixed-count draw from the caller's generator, so a fixed seed reproduces
// the same meshes and fields on every platform.

inline Vec3 random_unit_vector(Rng& rng) {
  const double z = rng.uniform(-1.0, 1.0);
  const double a = rng.uniform(0.0, 2.0 * kPi);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec3(s * std::cos(a), s * std::sin(a), z);
}

// Sum of ambient-space Gaussian bumps; smooth, and nonnegative when all
// amplitudes are nonnegative.
struct BumpField {
  struct Bump {
    Vec3 c;
    double a = 0.0;
    double inv_w2 = 1.0;
  };
  std::vector<Bump> bumps;
  double base = 0.0;

  double operator()(const Vec3& x) const {
    double v = base;
    for (const auto& b : bumps) v += b.a * std::exp(-(x - b.c).squaredNorm() * b.inv_w2);
    return v;
  }
};

inline BumpField random_bump_field(Rng& rng, int n_bumps, double center_radius,
                                   double amp_lo, double amp_hi, double w_lo,
                                   double w_hi, double base = 0.0) {
  BumpField f;
  f.base = base;
  f.bumps.resize(n_bumps);
  for (auto& b : f.bumps) {
    b.c = random_unit_vector(rng) * center_radius;
    b.a = rng.uniform(amp_lo, amp_hi);
    const double w = rng.uniform(w_lo, w_hi);
    b.inv_w2 = 1.0 / (w * w);
  }
  return f;
}

inline std::vector<double> field_on_mesh(const BumpField& f, const Surface& m) {
  std::vector<double> out(m.n_vertices());
  for (int v = 0; v < m.n_vertices(); ++v) out[v] = f(m.pos[v]);
  return out;
}

// Star-shaped perturbation of the unit sphere: radius 1 + sum of smooth
// directional bumps, kept well away from zero so the mesh stays embedded and
// outward oriented.
inline Surface random_star_mesh(Rng& rng, int level = 2, int n_bumps = 6,
                                double amp = 0.22) {
  struct DirBump {
    Vec3 d;
    double a, kappa;
  };
  std::vector<DirBump> bumps(n_bumps);
  for (auto& b : bumps) {
    b.d = random_unit_vector(rng);
    b.a = rng.uniform(-amp, amp);
    b.kappa = rng.uniform(2.0, 10.0);
  }
  Surface s = icosphere_mesh(level, 1.0);
  for (auto& p : s.pos) {
    const Vec3 dir = p.normalized();
    double r = 1.0;
    for (const auto& b : bumps) r += b.a * std::exp(b.kappa * (dir.dot(b.d) - 1.0));
    p = dir * r;
  }
  s.compute_geometry();
  return s;
}

inline std::vector<Surface> star_suite(std::uint64_t seed, int count = 10,
                                       int level = 2) {
  Rng rng(seed);
  std::vector<Surface> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(random_star_mesh(rng, level));
  return out;
}

}  // namespace mcflab
