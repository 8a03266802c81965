#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "mcflab/diagnostics.hpp"
#include "mcflab/flow.hpp"
#include "mcflab/mesh.hpp"

namespace mcflab {

// All numeric output uses %.17g so that reading a file back reproduces the
// doubles bit for bit and repeated runs are byte identical.

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const std::string& path, const char* mode) {
  std::FILE* f = std::fopen(path.c_str(), mode);
  if (!f) throw IoError(strf("cannot open '%s' (mode %s)", path.c_str(), mode));
  return FilePtr(f);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(strf("cannot open '%s'", path.c_str()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Closed polyline (n=1): header line, vertex count, one "x y" line per vertex.
// The edge i -> i+1 (mod N) is implicit.
// ---------------------------------------------------------------------------

inline void write_polyline(const std::string& path, const Curve& c) {
  FilePtr f = open_file(path, "w");
  std::fprintf(f.get(), "CLOSEDPOLY\n%d\n", c.n_vertices());
  for (const auto& p : c.pos)
    std::fprintf(f.get(), "%.17g %.17g\n", p.x(), p.y());
}

inline Curve read_polyline(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string magic;
  int n = 0;
  if (!(in >> magic) || magic != "CLOSEDPOLY")
    throw IoError(strf("'%s' is not a closed polyline file", path.c_str()));
  if (!(in >> n) || n < 3) throw IoError(strf("bad vertex count in '%s'", path.c_str()));
  Curve c;
  c.pos.resize(n);
  for (int i = 0; i < n; ++i)
    if (!(in >> c.pos[i].x() >> c.pos[i].y()))
      throw IoError(strf("truncated vertex list in '%s'", path.c_str()));
  c.compute_geometry();
  return c;
}

// ---------------------------------------------------------------------------
// OFF (n=2): counts header, vertex lines, "3 a b c" face lines.
// ---------------------------------------------------------------------------

inline void write_off(const std::string& path, const Surface& s) {
  FilePtr f = open_file(path, "w");
  std::fprintf(f.get(), "OFF\n%d %zu 0\n", s.n_vertices(), s.tris().size());
  for (const auto& p : s.pos)
    std::fprintf(f.get(), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
  for (const auto& t : s.tris())
    std::fprintf(f.get(), "3 %d %d %d\n", t[0], t[1], t[2]);
}

inline Surface read_off(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string magic;
  if (!(in >> magic) || magic != "OFF")
    throw IoError(strf("'%s' is not an OFF file", path.c_str()));
  int nv = 0, nf = 0, ne = 0;
  if (!(in >> nv >> nf >> ne) || nv <= 0 || nf <= 0)
    throw IoError(strf("bad counts header in '%s'", path.c_str()));
  std::vector<Vec3> pos(nv);
  for (int i = 0; i < nv; ++i)
    if (!(in >> pos[i].x() >> pos[i].y() >> pos[i].z()))
      throw IoError(strf("truncated vertex list in '%s'", path.c_str()));
  std::vector<std::array<int, 3>> tri(nf);
  for (int i = 0; i < nf; ++i) {
    int k = 0;
    if (!(in >> k) || k != 3)
      throw IoError(strf("face %d in '%s' is not a triangle", i, path.c_str()));
    if (!(in >> tri[i][0] >> tri[i][1] >> tri[i][2]))
      throw IoError(strf("truncated face list in '%s'", path.c_str()));
  }
  Surface s = Surface::build(std::move(pos), std::move(tri));
  s.compute_geometry();
  return s;
}

inline void write_mesh(const std::string& path, const Curve& c) { write_polyline(path, c); }
inline void write_mesh(const std::string& path, const Surface& s) { write_off(path, s); }
inline const char* mesh_extension(const Curve&) { return "poly"; }
inline const char* mesh_extension(const Surface&) { return "off"; }

// ---------------------------------------------------------------------------
// Trajectory directory: index.csv (one line per snapshot) plus one mesh file
// per snapshot named snap_<index>.<ext>.
// ---------------------------------------------------------------------------

template <class M>
void write_trajectory(const std::string& dir, const Trajectory<M>& tr) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(strf("cannot create directory '%s': %s", dir.c_str(),
                             ec.message().c_str()));
  FilePtr idx = open_file(dir + "/index.csv", "w");
  std::fprintf(idx.get(), "index,time,dt,max_H,area\n");
  for (int j = 0; j < tr.n_snaps(); ++j) {
    const auto& s = tr.snaps[j];
    std::fprintf(idx.get(), "%d,%.17g,%.17g,%.17g,%.17g\n", j, s.t, s.dt, s.max_H,
                 s.mesh.total_area);
    write_mesh(strf("%s/snap_%06d.%s", dir.c_str(), j, mesh_extension(s.mesh)), s.mesh);
  }
}

// ---------------------------------------------------------------------------
// CSV reports.  Writers take precomputed rows so the caller controls what is
// measured; all columns are fixed by the interface contracts.
// ---------------------------------------------------------------------------

struct DiagnosticsRow {
  double t = 0.0;
  double max_H = 0.0;
  int argmax_id = -1;
  double min_lambda = 0.0;
  double area = 0.0;
  double area_residual = std::nan("");   // relative, forward difference
  double h_residual_max = std::nan("");  // max abs evolution residual
};

template <class M>
std::vector<DiagnosticsRow> diagnostics_rows(const Trajectory<M>& tr) {
  std::vector<DiagnosticsRow> rows;
  const std::vector<AreaDerivativeRow> area = area_derivative_check(tr);
  for (int j = 0; j < tr.n_snaps(); ++j) {
    const auto& mesh = tr.snaps[j].mesh;
    DiagnosticsRow r;
    r.t = tr.snaps[j].t;
    r.area = mesh.total_area;
    r.argmax_id = 0;
    r.min_lambda = kInf;
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      if (mesh.H[v] > mesh.H[r.argmax_id]) r.argmax_id = v;
      const double lmin = (M::dim == 1) ? mesh.H[v] : mesh.lam1[v];
      r.min_lambda = std::min(r.min_lambda, lmin);
    }
    r.max_H = tr.snaps[j].max_H;
    if (j + 1 < tr.n_snaps()) {
      r.area_residual = area[j].rel_err;
      r.h_residual_max = h_evolution_residual(tr, j).max_abs;
    }
    rows.push_back(r);
  }
  return rows;
}

inline void write_diagnostics_csv(const std::string& path, const std::string& experiment,
                                  const std::vector<DiagnosticsRow>& rows) {
  FilePtr f = open_file(path, "w");
  std::fprintf(f.get(), "experiment,t,maxH,argmax_id,minLambda,area,areaResidual,hResidualMax\n");
  for (const auto& r : rows)
    std::fprintf(f.get(), "%s,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g\n",
                 experiment.c_str(), r.t, r.max_H, r.argmax_id, r.min_lambda, r.area,
                 r.area_residual, r.h_residual_max);
}

struct NormRow {
  std::string region = "slab";
  int k = -1;  // dyadic cylinder index, -1 when not a cylinder norm
  double p = 2.0;
  double value = 0.0;
  long samples = 0;
};

inline void write_norms_csv(const std::string& path, const std::string& experiment,
                            const std::vector<NormRow>& rows) {
  FilePtr f = open_file(path, "w");
  std::fprintf(f.get(), "experiment,region,k,p,value,samples\n");
  for (const auto& r : rows)
    std::fprintf(f.get(), "%s,%s,%d,%.17g,%.17g,%ld\n", experiment.c_str(),
                 r.region.c_str(), r.k, r.p, r.value, r.samples);
}

struct BlowupRow {
  int entry = 0;
  double Q = 0.0;
  double t = 0.0;
  std::string x;  // coordinates joined with ';'
  double local_norm_sum = 0.0;
  double sup_H_plus = 0.0;
  double C_d = 0.0;
  bool hypothesis_met = false;
};

inline void write_blowup_csv(const std::string& path,
                             const std::vector<BlowupRow>& rows) {
  FilePtr f = open_file(path, "w");
  std::fprintf(f.get(), "entry,Q,t_i,x_i,localNormSum,supHplus,C_d,hypothesisMet\n");
  for (const auto& r : rows)
    std::fprintf(f.get(), "%d,%.17g,%.17g,%s,%.17g,%.17g,%.17g,%d\n", r.entry, r.Q, r.t,
                 r.x.c_str(), r.local_norm_sum, r.sup_H_plus, r.C_d,
                 r.hypothesis_met ? 1 : 0);
}

inline std::string coords_string(const Vec2& p) {
  return strf("%.17g;%.17g", p.x(), p.y());
}
inline std::string coords_string(const Vec3& p) {
  return strf("%.17g;%.17g;%.17g", p.x(), p.y(), p.z());
}

}  // namespace mcflab
