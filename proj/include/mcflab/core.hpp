#pragma once

#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace mcflab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
inline std::string tag_msg(const char* tag, const std::string& m) {
  std::string s(tag);
  if (!m.empty()) {
    s += ": ";
    s += m;
  }
  return s;
}
}  // namespace detail

#define MCFLAB_ERROR(NAME)                                  \
  struct NAME : Error {                                     \
    explicit NAME(const std::string& m = "")                \
        : Error(detail::tag_msg(#NAME, m)) {}               \
  }

// mesh validity
MCFLAB_ERROR(NonManifold);
MCFLAB_ERROR(OpenBoundary);
MCFLAB_ERROR(InconsistentOrientation);
MCFLAB_ERROR(DegenerateElement);
MCFLAB_ERROR(ResolutionTooLow);

// flow / exact solutions
MCFLAB_ERROR(PastExtinction);

// space-time regions and cutoffs
MCFLAB_ERROR(EmptyRegion);
MCFLAB_ERROR(LastSnapshot);

// diagnostics
MCFLAB_ERROR(InsufficientTail);
MCFLAB_ERROR(PinchingViolated);

// inequality checks
MCFLAB_ERROR(NegativeFunction);
MCFLAB_ERROR(NotSubsolution);
MCFLAB_ERROR(SubcriticalExponent);
MCFLAB_ERROR(LadderUnderresolved);

// rescaling
MCFLAB_ERROR(WindowOutOfRange);
MCFLAB_ERROR(NoBlowup);
MCFLAB_ERROR(HypothesisNotMet);

// configuration / io
MCFLAB_ERROR(ConfigInvalid);
MCFLAB_ERROR(IoError);

#undef MCFLAB_ERROR

inline std::string strf(const char* fmt, ...) {
  char buf[768];
  va_list ap;
  va_start(ap, fmt);
  int k = vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  if (k < 0) return {};
  if (k >= (int)sizeof buf) k = (int)sizeof buf - 1;
  return std::string(buf, buf + k);
}

// shortest round-trippable decimal form
inline std::string num_str(double v) { return strf("%.17g", v); }

inline double sqr(double x) { return x * x; }

}  // namespace mcflab
