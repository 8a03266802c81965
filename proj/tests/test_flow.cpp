#include <catch2/catch_amalgamated.hpp>

#include "mcflab/exact.hpp"
#include "mcflab/flow.hpp"
#include "mcflab/shapes.hpp"

using namespace mcflab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double mean_radius(const Curve& c) {
  double r = 0.0;
  for (const auto& p : c.pos) r += p.norm();
  return r / c.n_vertices();
}

}  // namespace

TEST_CASE("shrinking circle tracks the exact radius", "[flow]") {
  StopCriteria sc;
  sc.max_time = 0.4;
  const auto tr = evolve(make_circle(1.0, 128), sc, 4);
  REQUIRE(tr.reason == StopReason::MaxTime);
  REQUIRE_THAT(tr.t_end(), WithinAbs(0.4, 1e-15));  // final step clipped

  const ExactSphere exact{1, 1.0};
  double r_err = 0.0;
  for (const auto& s : tr.snaps)
    r_err = std::max(r_err, std::abs(mean_radius(s.mesh) - exact.radius(s.t)));
  REQUIRE(r_err < 5e-4);

  for (int j = 1; j < tr.n_snaps(); ++j)
    REQUIRE(tr.snaps[j].mesh.total_area < tr.snaps[j - 1].mesh.total_area);

  // snapshots: initial state, every stride-th step, final state
  const long steps = tr.total_steps;
  REQUIRE(tr.n_snaps() == 1 + steps / 4 + (steps % 4 ? 1 : 0));
  REQUIRE(tr.snaps.front().step == 0);
  REQUIRE(tr.snaps.back().step == steps);
}

TEST_CASE("sphere shrinks self-similarly", "[flow]") {
  StopCriteria sc;
  sc.max_time = 0.1;
  const auto tr = evolve(make_sphere(1.0, 2), sc, 4);
  REQUIRE(tr.reason == StopReason::MaxTime);

  const auto& m = tr.snaps.back().mesh;
  double mean = 0.0;
  for (const auto& p : m.pos) mean += p.norm();
  mean /= m.n_vertices();
  REQUIRE_THAT(mean, WithinRel(std::sqrt(1.0 - 4.0 * 0.1), 1e-2));

  // roundness: coefficient of variation of the vertex radii stays tiny
  double var = 0.0;
  for (const auto& p : m.pos) var += sqr(p.norm() - mean);
  REQUIRE(std::sqrt(var / m.n_vertices()) / mean < 1e-5);

  for (int j = 1; j < tr.n_snaps(); ++j)
    REQUIRE(tr.snaps[j].mesh.total_area < tr.snaps[j - 1].mesh.total_area);
}

TEST_CASE("stop criteria", "[flow]") {
  SECTION("curvature ceiling") {
    StopCriteria sc;
    sc.h_ceiling = 2.0;  // exact hit at t = (1 - 1/4)/2
    const auto tr = evolve(make_circle(1.0, 128), sc, 4);
    REQUIRE(tr.reason == StopReason::CurvatureCeiling);
    REQUIRE_THAT(tr.t_end(), WithinAbs(0.375, 1e-3));
    REQUIRE(tr.snaps.back().max_H >= 2.0);
    REQUIRE(tr.snaps.back().max_H < 2.01);
  }
  SECTION("ceiling already exceeded at the initial state") {
    StopCriteria sc;
    sc.h_ceiling = 0.5;
    const auto tr = evolve(make_circle(1.0, 128), sc);
    REQUIRE(tr.reason == StopReason::CurvatureCeiling);
    REQUIRE(tr.total_steps == 0);
    REQUIRE(tr.n_snaps() == 1);
  }
  SECTION("step budget") {
    StopCriteria sc;
    sc.max_steps = 10;
    const auto tr = evolve(make_circle(1.0, 64), sc, 3);
    REQUIRE(tr.reason == StopReason::MaxSteps);
    REQUIRE(tr.total_steps == 10);
    REQUIRE(tr.snaps.back().step == 10);
  }
  SECTION("step floor") {
    StopCriteria sc;
    sc.dt_floor = 1e-3;  // above the adaptive step of a 128-gon
    const auto tr = evolve(make_circle(1.0, 128), sc);
    REQUIRE(tr.reason == StopReason::StepFloor);
    REQUIRE(tr.total_steps == 0);
    REQUIRE(tr.n_snaps() == 1);
  }
  SECTION("invalid stride") {
    StopCriteria sc;
    sc.max_steps = 1;
    REQUIRE_THROWS_AS(evolve(make_circle(1.0, 128), sc, 0), ConfigInvalid);
  }
}

TEST_CASE("stride changes sampling, not dynamics", "[flow]") {
  StopCriteria sc;
  sc.max_steps = 40;
  const auto t1 = evolve(make_circle(1.0, 64), sc, 1);
  const auto t5 = evolve(make_circle(1.0, 64), sc, 5);
  REQUIRE(t1.total_steps == t5.total_steps);
  REQUIRE(t1.n_snaps() == 41);
  REQUIRE(t5.n_snaps() == 9);
  REQUIRE(t1.t_end() == t5.t_end());
  for (int v = 0; v < 64; ++v)
    REQUIRE(t1.snaps.back().mesh.pos[v] == t5.snaps.back().mesh.pos[v]);
}

TEST_CASE("adaptive step resolves both mesh and curvature scales", "[flow]") {
  const Curve c = make_circle(1.0, 128);
  const double hmax = max_abs_H(c);
  REQUIRE(adaptive_dt(c, 0.25) ==
          0.25 * std::min(c.min_h * c.min_h, 1.0 / (hmax * hmax + 1.0)));

  const Surface s = make_sphere(1.0, 2);
  REQUIRE(adaptive_dt(s, 0.5) ==
          0.5 * std::min(s.min_h * s.min_h, 1.0 / (sqr(max_abs_H(s)) + 1.0)));
}

TEST_CASE("evolve accepts a mesh without precomputed geometry", "[flow]") {
  const Curve ref = make_circle(1.0, 64);
  Curve raw;
  raw.pos = ref.pos;  // geometry_valid is false
  StopCriteria sc;
  sc.max_steps = 5;
  const auto ta = evolve(ref, sc, 1);
  const auto tb = evolve(raw, sc, 1);
  for (int v = 0; v < 64; ++v)
    REQUIRE(ta.snaps.back().mesh.pos[v] == tb.snaps.back().mesh.pos[v]);
}

TEST_CASE("ellipse rounds out and loses enclosed area linearly", "[flow]") {
  StopCriteria sc;
  sc.max_time = 0.35;
  const auto tr = evolve(make_ellipse(2.0, 1.0, 96), sc, 100);
  const Curve& a = tr.snaps.front().mesh;
  const Curve& b = tr.snaps.back().mesh;

  // enclosed area of an embedded closed curve drains at exactly 2 pi
  REQUIRE_THAT(b.signed_area(), WithinRel(a.signed_area() - 2.0 * M_PI * 0.35, 5e-3));

  // curvature spread shrinks as the curve rounds out
  const auto cv = [](const Curve& c) {
    double m = 0.0, var = 0.0;
    for (double h : c.H) m += h;
    m /= c.n_vertices();
    for (double h : c.H) var += sqr(h - m);
    return std::sqrt(var / c.n_vertices()) / m;
  };
  REQUIRE(cv(b) < 0.6 * cv(a));
}

TEST_CASE("exact shrinking sphere oracle", "[flow]") {
  const ExactSphere circle{1, 1.0};
  REQUIRE(circle.extinction_time() == 0.5);
  REQUIRE(circle.radius(0.0) == 1.0);
  REQUIRE_THAT(circle.radius(0.375), WithinAbs(0.5, 1e-15));
  REQUIRE_THAT(circle.mean_curvature(0.375), WithinAbs(2.0, 1e-15));
  REQUIRE_THAT(circle.area(0.0), WithinAbs(2.0 * M_PI, 1e-15));
  REQUIRE_THROWS_AS(circle.radius(0.5), PastExtinction);
  REQUIRE_THROWS_AS(circle.radius(0.6), PastExtinction);

  const ExactSphere sphere{2, 2.0};
  REQUIRE(sphere.extinction_time() == 1.0);
  REQUIRE_THAT(sphere.radius(0.75), WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(sphere.area(0.75), WithinAbs(4.0 * M_PI, 1e-14));

  // a sphere whose largest curvature is h has n/(2 h^2) of life left
  for (int n = 1; n <= 2; ++n)
    for (double r : {0.3, 1.0, 2.5})
      REQUIRE_THAT(ExactSphere::time_left(n, n / r), WithinRel(r * r / (2.0 * n), 1e-15));
}
