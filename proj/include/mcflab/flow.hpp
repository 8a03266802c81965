#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "mcflab/mesh.hpp"

namespace mcflab {

enum class StopReason { MaxTime, MaxSteps, CurvatureCeiling, StepFloor };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::MaxTime: return "MaxTime";
    case StopReason::MaxSteps: return "MaxSteps";
    case StopReason::CurvatureCeiling: return "CurvatureCeiling";
    case StopReason::StepFloor: return "StepFloor";
  }
  return "?";
}

struct StopCriteria {
  double max_time = kInf;
  long max_steps = 1000000000L;
  double h_ceiling = kInf;   // stop once max |H| reaches this
  double dt_floor = 0.0;     // stop if the adaptive step falls below this
  double safety = 0.25;
};

template <class M>
double max_abs_H(const M& m) {
  double h = 0.0;
  for (double v : m.H) h = std::max(h, std::abs(v));
  return h;
}

// explicit step limit: resolves both the parabolic mesh scale and the
// curvature time scale
template <class M>
double adaptive_dt(const M& m, double safety) {
  const double h2 = m.min_h * m.min_h;
  const double hmax = max_abs_H(m);
  return safety * std::min(h2, 1.0 / (hmax * hmax + 1.0));
}

template <class M>
void flow_step(M& m, double dt) {
  for (int v = 0; v < m.n_vertices(); ++v) m.pos[v] -= dt * m.H[v] * m.nrm[v];
  m.compute_geometry();
}

template <class M>
struct Snapshot {
  M mesh;
  double t = 0.0;
  double dt = 0.0;  // step size selected at this state
  long step = 0;
  double max_H = 0.0;
};

template <class M>
struct Trajectory {
  using MeshType = M;
  std::vector<Snapshot<M>> snaps;
  StopReason reason = StopReason::MaxTime;
  long total_steps = 0;

  int n_snaps() const { return (int)snaps.size(); }
  double t_begin() const { return snaps.front().t; }
  double t_end() const { return snaps.back().t; }
};

// Forward Euler evolution x <- x - H nu dt with adaptive steps.  Snapshots
// are recorded every `stride` steps, plus the initial and final states.  The
// last step is clipped to land exactly on max_time.
template <class M>
Trajectory<M> evolve(M m, const StopCriteria& sc, long stride = 1) {
  if (stride < 1) throw ConfigInvalid("snapshot stride must be >= 1");
  if (!m.geometry_valid) m.compute_geometry();

  Trajectory<M> tr;
  double t = 0.0;
  long step = 0;
  bool done = false;
  StopReason reason = StopReason::MaxSteps;

  auto record = [&](double dt_here) {
    tr.snaps.push_back({m, t, dt_here, step, max_abs_H(m)});
  };

  double dt = adaptive_dt(m, sc.safety);
  record(dt);
  if (max_abs_H(m) >= sc.h_ceiling) {
    tr.reason = StopReason::CurvatureCeiling;
    tr.total_steps = 0;
    return tr;
  }

  while (!done) {
    dt = adaptive_dt(m, sc.safety);
    bool lands_on_end = false;
    if (t + dt >= sc.max_time) {
      dt = sc.max_time - t;
      lands_on_end = true;
    }
    if (dt <= sc.dt_floor || dt <= 0.0) {
      reason = StopReason::StepFloor;
      if (tr.snaps.back().step != step) record(dt);
      break;
    }
    flow_step(m, dt);
    t += dt;
    ++step;

    if (lands_on_end || t >= sc.max_time) {
      reason = StopReason::MaxTime;
      done = true;
    } else if (max_abs_H(m) >= sc.h_ceiling) {
      reason = StopReason::CurvatureCeiling;
      done = true;
    } else if (step >= sc.max_steps) {
      reason = StopReason::MaxSteps;
      done = true;
    }
    if (done || step % stride == 0) record(adaptive_dt(m, sc.safety));
  }

  tr.reason = reason;
  tr.total_steps = step;
  return tr;
}

}  // namespace mcflab
