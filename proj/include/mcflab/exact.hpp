#pragma once

#include <cmath>

#include "mcflab/core.hpp"

namespace mcflab {

// Round sphere (or circle, n = 1) shrinking under mean curvature flow:
//   r(t) = sqrt(r0^2 - 2 n t),  H(t) = n / r(t),  extinction at T = r0^2 / (2n)
struct ExactSphere {
  int n = 2;
  double r0 = 1.0;

  double extinction_time() const { return r0 * r0 / (2.0 * n); }

  double radius(double t) const {
    const double s = r0 * r0 - 2.0 * n * t;
    if (s <= 0.0)
      throw PastExtinction(strf("t=%.17g >= T=%.17g", t, extinction_time()));
    return std::sqrt(s);
  }

  double mean_curvature(double t) const { return n / radius(t); }

  double area(double t) const {
    const double r = radius(t);
    return n == 1 ? 2.0 * kPi * r : 4.0 * kPi * r * r;
  }

  // total remaining lifetime of a sphere whose largest curvature is h
  static double time_left(int n, double h) { return n / (2.0 * h * h); }
};

}  // namespace mcflab
