#include <catch2/catch_amalgamated.hpp>

#include "mcflab/diagnostics.hpp"
#include "mcflab/shapes.hpp"
#include "mcflab/spacetime.hpp"

using namespace mcflab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Trajectory<Curve> short_circle_run(int n = 64, long steps = 12, long stride = 1) {
  StopCriteria sc;
  sc.max_steps = steps;
  return evolve(make_circle(1.0, n), sc, stride);
}

}  // namespace

TEST_CASE("dyadic cylinder family", "[spacetime]") {
  REQUIRE(dyadic_radius(0) == 1.0);
  REQUIRE(dyadic_radius(1) == 0.75);
  REQUIRE(dyadic_radius(2) == 0.625);
  REQUIRE(dyadic_start(0) == 0.0);
  REQUIRE_THAT(dyadic_start(1), WithinAbs((1.0 - 0.25) / 12.0, 1e-16));
  REQUIRE(dyadic_rho(3) == std::exp2(-4));

  for (int k = 1; k <= 8; ++k) {
    REQUIRE(dyadic_radius(k) < dyadic_radius(k - 1));
    REQUIRE(dyadic_radius(k) > 0.5);
    REQUIRE(dyadic_start(k) > dyadic_start(k - 1));
    REQUIRE(dyadic_start(k) < 1.0 / 12.0);
    // consecutive cylinders sit a parabolic gap apart
    REQUIRE_THAT(dyadic_start(k) - dyadic_start(k - 1), WithinRel(sqr(dyadic_rho(k)), 1e-12));
  }

  const Vec2 c(0.5, -1.0);
  const auto d2 = dyadic_cylinder(2, c);
  REQUIRE(d2.name == "D2");
  REQUIRE(d2.center == c);
  REQUIRE(d2.radius == dyadic_radius(2));
  REQUIRE(d2.t_start == dyadic_start(2));
  REQUIRE_THROWS_AS(dyadic_cylinder(-1, c), ConfigInvalid);

  const auto inner = inner_cylinder(c);
  REQUIRE(inner.name == "Dprime");
  REQUIRE(inner.radius == 0.5);
  REQUIRE_THAT(inner.t_start, WithinAbs(1.0 / 12.0, 1e-17));

  // membership: boundary included in space, start time included
  REQUIRE(d2.contains(d2.t_start, c + Vec2(d2.radius, 0.0)));
  REQUIRE_FALSE(d2.contains(d2.t_start, c + Vec2(d2.radius + 1e-12, 0.0)));
  REQUIRE_FALSE(d2.contains(d2.t_start - 1e-12, c));
  REQUIRE(d2.contains(5.0, c));  // no upper time limit
}

TEST_CASE("spacetime norm quadrature", "[spacetime]") {
  const auto tr = short_circle_run();
  const auto field_c = [](int, int) { return 1.7; };

  const NormReport rep = spacetime_norm(tr, field_c, 3.0);
  REQUIRE(rep.region == "slab");
  REQUIRE(rep.p == 3.0);

  // left-endpoint quadrature against a hand-rolled sum
  double sum = 0.0;
  long samples = 0;
  for (int j = 0; j + 1 < tr.n_snaps(); ++j) {
    const double w = tr.snaps[j + 1].t - tr.snaps[j].t;
    sum += w * tr.snaps[j].mesh.total_area * std::pow(1.7, 3.0);
    samples += tr.snaps[j].mesh.n_vertices();
  }
  REQUIRE_THAT(rep.sum, WithinRel(sum, 1e-13));
  REQUIRE_THAT(rep.value, WithinRel(std::pow(sum, 1.0 / 3.0), 1e-13));
  REQUIRE(rep.samples == samples);

  // the final snapshot carries zero weight
  const int last = tr.n_snaps() - 1;
  const auto poisoned = [&](int j, int) {
    return j == last ? std::nan("") : 2.0;
  };
  REQUIRE(std::isfinite(spacetime_norm(tr, poisoned, 2.0).value));

  REQUIRE_THROWS_AS(spacetime_norm(tr, field_c, 0.0), ConfigInvalid);
  REQUIRE_THROWS_AS(spacetime_norm(tr, field_c, -2.0), ConfigInvalid);
}

TEST_CASE("regions mask both space and time", "[spacetime]") {
  const auto tr = short_circle_run();
  // half-plane ball: only vertices with x > 0 once t reaches the 6th snapshot
  Cylinder<Vec2> cyl;
  cyl.center = Vec2(1.0, 0.0);
  cyl.radius = 0.9;
  cyl.t_start = tr.snaps[5].t;
  cyl.name = "probe";

  const auto guarded = [&](int j, int v) {
    // NaN outside the region: the norm must never evaluate it there
    return cyl.contains(tr.snaps[j].t, tr.snaps[j].mesh.pos[v]) ? 3.0 : std::nan("");
  };
  const NormReport rep = spacetime_norm(tr, guarded, 2.0, &cyl);
  REQUIRE(rep.region == "probe");
  REQUIRE(std::isfinite(rep.value));
  REQUIRE(rep.samples == count_samples(tr, cyl));
  REQUIRE(rep.samples > 0);

  long manual = 0;
  for (int j = 5; j + 1 < tr.n_snaps(); ++j)
    for (int v = 0; v < tr.snaps[j].mesh.n_vertices(); ++v)
      manual += cyl.contains(tr.snaps[j].t, tr.snaps[j].mesh.pos[v]) ? 1 : 0;
  REQUIRE(rep.samples == manual);

  Cylinder<Vec2> far;
  far.center = Vec2(50.0, 0.0);
  far.radius = 0.1;
  REQUIRE_THROWS_AS(spacetime_norm(tr, guarded, 2.0, &far), EmptyRegion);
  REQUIRE(count_samples(tr, far) == 0);
}

TEST_CASE("sup norm includes the final snapshot", "[spacetime]") {
  const auto tr = short_circle_run();
  const int last = tr.n_snaps() - 1;
  const auto field = [&](int j, int v) {
    return (j == last && v == 17) ? 100.0 : 1.0;
  };
  const SupReport rep = sup_norm(tr, field);
  REQUIRE(rep.value == 100.0);
  REQUIRE(rep.snap == last);
  REQUIRE(rep.vert == 17);
  REQUIRE(rep.samples == (long)tr.n_snaps() * 64);

  Cylinder<Vec2> far;
  far.center = Vec2(50.0, 0.0);
  far.radius = 0.1;
  REQUIRE_THROWS_AS(sup_norm(tr, field, &far), EmptyRegion);
}

TEST_CASE("slice norm", "[spacetime]") {
  const Curve c = make_circle(1.0, 32);
  std::vector<double> f(32);
  for (int v = 0; v < 32; ++v) f[v] = (v % 3) - 1.0;  // mixed signs
  const NormReport rep = slice_norm(c, [&](int v) { return f[v]; }, 4.0);
  REQUIRE(rep.region == "slice");
  double sum = 0.0;
  for (int v = 0; v < 32; ++v) sum += std::pow(std::abs(f[v]), 4.0) * c.dmu[v];
  REQUIRE_THAT(rep.sum, WithinRel(sum, 1e-14));
  REQUIRE(rep.samples == 32);
  REQUIRE_THROWS_AS(slice_norm(c, [&](int v) { return f[v]; }, 0.0), ConfigInvalid);
}

TEST_CASE("smoothstep cutoff", "[spacetime]") {
  REQUIRE(smoothstep(-1.0) == 0.0);
  REQUIRE(smoothstep(0.0) == 0.0);
  REQUIRE(smoothstep(0.5) == 0.5);
  REQUIRE(smoothstep(1.0) == 1.0);
  REQUIRE(smoothstep(2.0) == 1.0);
  for (double u : {0.2, 0.5, 0.8}) {
    const double fd = (smoothstep(u + 1e-6) - smoothstep(u - 1e-6)) / 2e-6;
    REQUIRE_THAT(smoothstep_d(u), WithinAbs(fd, 1e-6));
  }

  REQUIRE_THROWS_AS(Cutoff<Vec3>::standard(0, Vec3::Zero()), ConfigInvalid);
  const auto cut = Cutoff<Vec3>::standard(2, Vec3::Zero());
  REQUIRE(cut.rho == dyadic_rho(2));

  // 1 on D_2 (t past t_2, inside r_2), 0 outside D_1
  REQUIRE(cut.eval(dyadic_start(2), Vec3(dyadic_radius(2), 0, 0)) == 1.0);
  REQUIRE(cut.eval(0.5, Vec3::Zero()) == 1.0);
  REQUIRE(cut.eval(dyadic_start(1), Vec3::Zero()) == 0.0);  // ramp starts at t_1
  REQUIRE(cut.eval(0.5, Vec3(dyadic_radius(1) + 0.01, 0, 0)) == 0.0);
  REQUIRE(cut.grad_norm(0.5, Vec3(0.1, 0, 0), Vec3(0, 0, 1)) == 0.0);

  // analytic gradient against a finite difference through the shoulder,
  // with the normal orthogonal to the offset so the full gradient is tangent
  const double rmid = 0.5 * (dyadic_radius(2) + dyadic_radius(1));
  const Vec3 x(rmid, 0, 0);
  const Vec3 nu(0, 0, 1);
  const double t = 0.5;
  const double h = 1e-6;
  const double fd =
      (cut.eval(t, x + Vec3(h, 0, 0)) - cut.eval(t, x - Vec3(h, 0, 0))) / (2.0 * h);
  REQUIRE(cut.grad_norm(t, x, nu) > 0.0);
  REQUIRE_THAT(cut.grad_norm(t, x, nu), WithinRel(std::abs(fd), 1e-5));
}

TEST_CASE("material heat operator", "[spacetime]") {
  const auto tr = short_circle_run(64, 12, 1);
  REQUIRE_THROWS_AS(material_heat_operator(tr, tr.n_snaps() - 1, [](int, int) { return 0.0; }),
                    LastSnapshot);
  REQUIRE_THROWS_AS(material_heat_operator(tr, -1, [](int, int) { return 0.0; }),
                    ConfigInvalid);
  REQUIRE_THROWS_AS(material_heat_operator(tr, tr.n_snaps(), [](int, int) { return 0.0; }),
                    ConfigInvalid);

  // constants are annihilated exactly
  for (double r : material_heat_operator(tr, 3, [](int, int) { return 7.5; }))
    REQUIRE_THAT(r, WithinAbs(0.0, 1e-11));

  // (d/dt - Lap) |x|^2 = -2n along the flow
  const auto heat = material_heat_operator(tr, 3, [&](int j, int v) {
    return tr.snaps[j].mesh.pos[v].squaredNorm();
  });
  for (double r : heat) REQUIRE_THAT(r, WithinAbs(-2.0, 1e-2));
}

TEST_CASE("heat operator reproduces the curvature drive", "[spacetime]") {
  StopCriteria sc;
  sc.max_time = 0.05;
  const auto tr = evolve(make_sphere(1.0, 3), sc, 1);
  const int mid = tr.n_snaps() / 2;
  const auto heat = material_heat_operator(
      tr, mid, [&](int j, int v) { return tr.snaps[j].mesh.H[v]; });
  const auto& m = tr.snaps[mid].mesh;
  const auto a2 = second_fundamental_norm2(m);
  // dH/dt = Lap H + |A|^2 H on the exact flow
  double err = 0.0, ref = 0.0;
  for (int v = 0; v < m.n_vertices(); ++v) {
    err = std::max(err, std::abs(heat[v] - a2[v] * m.H[v]));
    ref = std::max(ref, std::abs(a2[v] * m.H[v]));
  }
  REQUIRE(err < 2e-2 * ref);
}

TEST_CASE("cutoff heat operator bundles the three fields", "[spacetime]") {
  StopCriteria sc;
  sc.max_steps = 6;
  const auto tr = evolve(make_sphere(1.0, 2), sc, 1);
  const auto cut = Cutoff<Vec3>::standard(1, Vec3::Zero());
  const auto res = cutoff_heat_operator(tr, 2, cut);
  const int nv = tr.snaps[2].mesh.n_vertices();
  REQUIRE((int)res.eta.size() == nv);
  REQUIRE((int)res.grad.size() == nv);
  REQUIRE((int)res.heat.size() == nv);
  for (int v = 0; v < nv; ++v) {
    REQUIRE(res.eta[v] == cut.eval(tr.snaps[2].t, tr.snaps[2].mesh.pos[v]));
    REQUIRE(res.grad[v] >= 0.0);
  }
}
