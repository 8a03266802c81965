#pragma once

#include <cmath>

#include "mcflab/core.hpp"

namespace mcflab {

// ---------------------------------------------------------------------------
// Explicit constants for the reverse-Holder / iteration machinery.  All of
// them are monotone in the data: the C-constants are nondecreasing and the
// delta-thresholds nonincreasing in C0, C1, C3.
//
//   nu      = (n+2) / (2q - (n+2)),  q > (n+2)/2
//   lambda  = (n+2)/n
//   Lambda(beta) = 100 beta
//   C_a = (2 c_n C0 C1)^(1+nu)
//   C_z = 16 * 100^(1+nu) * c_n * C_a
//   C_b = (4 lambda^(1+nu) C_z beta^(1+nu))^(n^2/beta)
//   C_c = (c_n C1 Lambda(beta))^(1/beta)
//   delta_1 = 1 / (2 c_n C1 Lambda(beta))
//   delta_2 = sqrt(delta_1(n, beta=n+2, C1) / c_n)
//   C_3 = 2 C_c(n, n+2, C1)^2 (||H||^2_{n+2,D} + n^2 B^2 ||1||^2_{n+2,D}
//                              + n B^2 ||1||_{(n+2)^2/(2n),D})
//   C_d = n C_b(n, q=(n+2)^2/(2n), beta=n+2, C0=C3, C1) C_c(n, n+2, C1)
// ---------------------------------------------------------------------------

struct ConstantsInput {
  int n = 2;
  double q = 4.0;      // integrability exponent of the driving field f
  double beta = 4.0;   // iteration exponent
  double c_n = 40.0;   // empirical structural constant for this mesh family
  double C0 = 1.0;     // ||f||_{L^q} over the space-time region
  double C1 = 1.0;     // (1 + ||H||^{n+2}_{L^{n+2}})^{n/(n+2)}
};

struct ConstantsTable {
  ConstantsInput in;
  double nu = 0.0;
  double lambda = 0.0;
  double Lambda_beta = 0.0;
  double C_a = 0.0;
  double C_z = 0.0;
  double C_b = 0.0;
  double C_c = 0.0;
  double delta_1 = 0.0;
  double delta_2 = 0.0;
};

inline ConstantsTable constants_table(const ConstantsInput& in) {
  if (in.n < 1) throw ConfigInvalid("dimension must be >= 1");
  if (!(in.c_n > 0.0) || !(in.C0 >= 0.0) || !(in.C1 >= 1.0))
    throw ConfigInvalid("constants require c_n > 0, C0 >= 0, C1 >= 1");
  if (!(in.beta > 1.0)) throw ConfigInvalid("beta must exceed 1");
  const double crit = 0.5 * (in.n + 2);
  if (in.q < crit)
    throw SubcriticalExponent(strf("q=%.17g requires q >= (n+2)/2 = %.17g", in.q, crit));

  ConstantsTable t;
  t.in = in;
  t.lambda = (in.n + 2) / double(in.n);
  t.Lambda_beta = 100.0 * in.beta;
  if (in.q == crit) {
    // critical exponent: nu and the constants that need it are unavailable
    t.nu = std::nan("");
    t.C_a = std::nan("");
    t.C_z = std::nan("");
    t.C_b = std::nan("");
  } else {
    t.nu = (in.n + 2) / (2.0 * in.q - (in.n + 2));
    t.C_a = std::pow(2.0 * in.c_n * in.C0 * in.C1, 1.0 + t.nu);
    t.C_z = 16.0 * std::pow(100.0, 1.0 + t.nu) * in.c_n * t.C_a;
    t.C_b = std::pow(4.0 * std::pow(t.lambda, 1.0 + t.nu) * t.C_z *
                         std::pow(in.beta, 1.0 + t.nu),
                     double(in.n) * in.n / in.beta);
  }
  t.C_c = std::pow(in.c_n * in.C1 * t.Lambda_beta, 1.0 / in.beta);
  t.delta_1 = 1.0 / (2.0 * in.c_n * in.C1 * t.Lambda_beta);

  // delta_2 is tied to beta = n+2 regardless of the requested beta
  const double d1_crit = 1.0 / (2.0 * in.c_n * in.C1 * 100.0 * (in.n + 2));
  t.delta_2 = std::sqrt(d1_crit / in.c_n);
  return t;
}

struct CurvatureBoundConstants {
  double C_3 = 0.0;
  double C_d = 0.0;
};

// norms are over the unit cylinder D of the normalised window
inline CurvatureBoundConstants curvature_bound_constants(
    const ConstantsInput& base, double B, double normH_np2_D,
    double norm1_np2_D, double norm1_q2_D) {
  const int n = base.n;
  ConstantsInput crit = base;
  crit.beta = n + 2;
  crit.q = n + 2;  // any supercritical placeholder; C_c ignores q
  const ConstantsTable tc = constants_table(crit);

  CurvatureBoundConstants out;
  out.C_3 = 2.0 * sqr(tc.C_c) *
            (sqr(normH_np2_D) + sqr(double(n) * B * norm1_np2_D) +
             n * B * B * norm1_q2_D);

  ConstantsInput sup = base;
  sup.beta = n + 2;
  sup.q = sqr(double(n) + 2.0) / (2.0 * n);
  sup.C0 = out.C_3;
  const ConstantsTable tb = constants_table(sup);
  out.C_d = n * tb.C_b * tc.C_c;
  return out;
}

}  // namespace mcflab
