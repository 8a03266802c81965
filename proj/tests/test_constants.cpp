#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mcflab/constants.hpp"

using namespace mcflab;
using Catch::Matchers::WithinRel;

TEST_CASE("constants table matches a hand-evaluated case", "[constants]") {
  // n = 2, q = 4, beta = 4, c_n = 40, C0 = C1 = 1: every power is rational
  ConstantsInput in;
  const auto t = constants_table(in);

  REQUIRE(t.nu == 1.0);      // (n+2)/(2q-(n+2)) = 4/4
  REQUIRE(t.lambda == 2.0);  // (n+2)/n
  REQUIRE(t.Lambda_beta == 400.0);
  REQUIRE_THAT(t.C_a, WithinRel(6400.0, 1e-12));        // (2*40)^2
  REQUIRE_THAT(t.C_z, WithinRel(4.096e10, 1e-12));      // 16*10^4*40*6400
  REQUIRE_THAT(t.C_b, WithinRel(1.048576e13, 1e-12));   // 256*C_z
  REQUIRE_THAT(t.C_c, WithinRel(std::pow(16000.0, 0.25), 1e-15));
  REQUIRE_THAT(t.delta_1, WithinRel(3.125e-5, 1e-15));  // 1/32000
  REQUIRE_THAT(t.delta_2, WithinRel(std::sqrt(3.125e-5 / 40.0), 1e-15));

  ConstantsInput i3 = in;
  i3.q = 3.0;
  REQUIRE(constants_table(i3).nu == 2.0);

  ConstantsInput i1;
  i1.n = 1;
  i1.q = 4.5;
  const auto t1 = constants_table(i1);
  REQUIRE(t1.nu == 0.5);
  REQUIRE(t1.lambda == 3.0);
}

TEST_CASE("constants are monotone in their inputs", "[constants]") {
  // nu (and everything built on it) shrinks as integrability improves
  double prev = kInf;
  for (double q : {3.0, 3.5, 4.0, 5.0, 8.0}) {
    ConstantsInput in;
    in.q = q;
    const auto t = constants_table(in);
    REQUIRE(t.nu < prev);
    REQUIRE(std::isfinite(t.C_b));
    REQUIRE(t.C_b > 0.0);
    prev = t.nu;
  }

  // the smallness thresholds tighten as beta grows
  prev = kInf;
  for (double beta : {2.0, 3.0, 4.0, 6.0, 10.0}) {
    ConstantsInput in;
    in.beta = beta;
    const auto t = constants_table(in);
    REQUIRE(t.delta_1 < prev);
    REQUIRE(t.C_c > 0.0);
    prev = t.delta_1;
  }
}

TEST_CASE("doubling the curvature budget halves the threshold", "[constants]") {
  ConstantsInput a;
  ConstantsInput b = a;
  b.C1 = 2.0;
  const auto ta = constants_table(a);
  const auto tb = constants_table(b);
  REQUIRE(tb.delta_1 == ta.delta_1 / 2.0);  // exact: scaling by a power of two
  REQUIRE_THAT(tb.delta_2, WithinRel(ta.delta_2 / std::sqrt(2.0), 1e-15));
  REQUIRE(tb.C_a > ta.C_a);
  REQUIRE(tb.C_c > ta.C_c);
}

TEST_CASE("critical exponent leaves nu undefined but keeps the thresholds", "[constants]") {
  ConstantsInput in;
  in.q = 2.0;  // exactly (n+2)/2 for n = 2
  const auto t = constants_table(in);
  REQUIRE(std::isnan(t.nu));
  REQUIRE(std::isnan(t.C_a));
  REQUIRE(std::isnan(t.C_z));
  REQUIRE(std::isnan(t.C_b));
  REQUIRE(t.lambda == 2.0);
  REQUIRE(std::isfinite(t.C_c));
  REQUIRE(t.delta_1 > 0.0);
  REQUIRE(t.delta_2 > 0.0);
}

TEST_CASE("constants input validation", "[constants]") {
  auto bad = [](auto mut) {
    ConstantsInput in;
    mut(in);
    return in;
  };
  REQUIRE_THROWS_AS(constants_table(bad([](auto& i) { i.n = 0; })), ConfigInvalid);
  REQUIRE_THROWS_AS(constants_table(bad([](auto& i) { i.c_n = 0.0; })), ConfigInvalid);
  REQUIRE_THROWS_AS(constants_table(bad([](auto& i) { i.C0 = -1.0; })), ConfigInvalid);
  REQUIRE_THROWS_AS(constants_table(bad([](auto& i) { i.C1 = 0.5; })), ConfigInvalid);
  REQUIRE_THROWS_AS(constants_table(bad([](auto& i) { i.beta = 1.0; })), ConfigInvalid);
  REQUIRE_THROWS_AS(constants_table(bad([](auto& i) { i.q = 1.9; })), SubcriticalExponent);
}

TEST_CASE("curvature bound constants", "[constants]") {
  ConstantsInput base;  // n = 2

  // B = 0 collapses C_3 to 2 C_c^2 ||H||^2
  const auto cb0 = curvature_bound_constants(base, 0.0, 1.0, 0.7, 0.9);
  REQUIRE_THAT(cb0.C_3, WithinRel(2.0 * std::sqrt(16000.0), 1e-13));

  // full recomputation at B > 0
  const double B = 0.3, nh = 1.2, n1 = 0.9, nq = 1.1;
  const auto cb = curvature_bound_constants(base, B, nh, n1, nq);

  ConstantsInput crit = base;
  crit.beta = 4.0;
  crit.q = 4.0;
  const auto tc = constants_table(crit);
  const double C3 = 2.0 * sqr(tc.C_c) * (sqr(nh) + sqr(2.0 * B * n1) + 2.0 * B * B * nq);
  REQUIRE_THAT(cb.C_3, WithinRel(C3, 1e-14));

  ConstantsInput sup = base;
  sup.beta = 4.0;
  sup.q = 4.0;  // (n+2)^2 / (2n) for n = 2
  sup.C0 = C3;
  REQUIRE_THAT(cb.C_d, WithinRel(2.0 * constants_table(sup).C_b * tc.C_c, 1e-14));
  REQUIRE(cb.C_d > cb.C_3);

  ConstantsInput junk = base;
  junk.c_n = -1.0;
  REQUIRE_THROWS_AS(curvature_bound_constants(junk, 0.0, 1.0, 1.0, 1.0), ConfigInvalid);
}
