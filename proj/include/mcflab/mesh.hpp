#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "mcflab/core.hpp"

namespace mcflab {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// ---------------------------------------------------------------------------
// Closed plane curve (hypersurface dimension 1, ambient dimension 2).
// Vertices are stored in ring order; the edge i -> i+1 (mod n) is implicit.
// Positive orientation is counterclockwise, which makes the outward normal
// point away from the enclosed region and the curvature of a convex curve
// positive (so a round circle shrinks under the flow).
// ---------------------------------------------------------------------------

struct Curve {
  static constexpr int dim = 1;
  static constexpr int ambient = 2;
  using Vec = Vec2;

  std::vector<Vec2> pos;

  // filled by compute_geometry()
  std::vector<Vec2> nrm;     // outward unit normal
  std::vector<double> H;     // turning angle / vertex measure
  std::vector<double> lam1;  // sole principal curvature (= H)
  std::vector<double> dmu;   // lumped length measure
  double total_area = 0.0;   // perimeter
  double min_h = 0.0;
  bool geometry_valid = false;

  int n_vertices() const { return (int)pos.size(); }
  int next(int i) const { return i + 1 < (int)pos.size() ? i + 1 : 0; }
  int prev(int i) const { return i > 0 ? i - 1 : (int)pos.size() - 1; }

  double signed_area() const {
    double a = 0.0;
    for (int i = 0; i < n_vertices(); ++i) a += cross2(pos[i], pos[next(i)]);
    return 0.5 * a;
  }

  void validate() const {
    const int n = n_vertices();
    if (n < 3) throw ResolutionTooLow("closed curve needs at least 3 vertices");
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += (pos[next(i)] - pos[i]).norm();
    mean /= n;
    for (int i = 0; i < n; ++i) {
      if ((pos[next(i)] - pos[i]).norm() < 1e-14 * mean)
        throw DegenerateElement(strf("edge %d has vanishing length", i));
    }
    if (signed_area() <= 0.0)
      throw InconsistentOrientation("curve must wind counterclockwise");
  }

  void compute_geometry() {
    const int n = n_vertices();
    validate();
    nrm.assign(n, Vec2::Zero());
    H.assign(n, 0.0);
    lam1.assign(n, 0.0);
    dmu.assign(n, 0.0);
    total_area = 0.0;
    min_h = kInf;

    std::vector<double> len(n);
    for (int i = 0; i < n; ++i) {
      len[i] = (pos[next(i)] - pos[i]).norm();
      total_area += len[i];
      min_h = std::min(min_h, len[i]);
    }
    for (int i = 0; i < n; ++i) {
      const Vec2 e0 = pos[i] - pos[prev(i)];
      const Vec2 e1 = pos[next(i)] - pos[i];
      const double theta = std::atan2(cross2(e0, e1), e0.dot(e1));
      dmu[i] = 0.5 * (len[prev(i)] + len[i]);
      H[i] = theta / dmu[i];
      lam1[i] = H[i];
      Vec2 t = e0.normalized() + e1.normalized();
      double tn = t.norm();
      if (tn < 1e-12) t = e1.normalized(), tn = 1.0;  // hairpin vertex
      t /= tn;
      nrm[i] = Vec2(t.y(), -t.x());
    }
    geometry_valid = true;
  }

  // intrinsic Laplacian of a vertex field: second difference in arclength,
  // scaled by the lumped vertex measure
  std::vector<double> laplacian(const std::vector<double>& f) const {
    const int n = n_vertices();
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double hp = (pos[next(i)] - pos[i]).norm();
      const double hm = (pos[i] - pos[prev(i)]).norm();
      out[i] = ((f[next(i)] - f[i]) / hp - (f[i] - f[prev(i)]) / hm) / dmu[i];
    }
    return out;
  }

  // |df/ds| by central difference
  std::vector<double> gradient_norm(const std::vector<double>& f) const {
    const int n = n_vertices();
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double hp = (pos[next(i)] - pos[i]).norm();
      const double hm = (pos[i] - pos[prev(i)]).norm();
      out[i] = std::abs(f[next(i)] - f[prev(i)]) / (hp + hm);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Closed oriented triangle mesh (hypersurface dimension 2, ambient 3).
// Topology is immutable and shared between snapshots of an evolving surface;
// per-vertex geometry is recomputed from positions.
//
// Estimator choices:
//   * vertex normal: corner-angle weighted average of face normals
//   * mean curvature: cotangent Laplacian of the positions with the mixed
//     Voronoi vertex mass (the barycentric mass does not converge at
//     irregular vertices, the mixed mass does)
//   * quadrature measure dmu: barycentric (one third of each incident face)
//   * principal curvatures: least-squares quadric over the one-ring in the
//     normal frame
// ---------------------------------------------------------------------------

struct SurfTopology {
  int n_verts = 0;
  std::vector<std::array<int, 3>> tri;
  std::vector<int> ring_off, ring_idx;  // sorted one-ring neighbours
  std::vector<int> vf_off, vf_idx;      // incident faces
};

struct Surface {
  static constexpr int dim = 2;
  static constexpr int ambient = 3;
  using Vec = Vec3;

  std::vector<Vec3> pos;
  std::shared_ptr<const SurfTopology> topo;

  std::vector<Vec3> nrm;
  std::vector<double> H, lam1, lam2, dmu, vor;
  std::vector<double> cot_w;  // aligned with topo->ring_idx
  double total_area = 0.0;
  double min_h = 0.0;
  bool geometry_valid = false;

  int n_vertices() const { return (int)pos.size(); }
  const std::vector<std::array<int, 3>>& tris() const { return topo->tri; }

  static Surface build(std::vector<Vec3> positions,
                       std::vector<std::array<int, 3>> tri) {
    Surface s;
    s.pos = std::move(positions);
    auto t = std::make_shared<SurfTopology>();
    t->n_verts = (int)s.pos.size();
    t->tri = std::move(tri);
    validate_topology(*t);
    build_adjacency(*t);
    s.topo = std::move(t);
    return s;
  }

  // closed oriented 2-manifold: every undirected edge carried by exactly two
  // faces with opposite directions
  static void validate_topology(const SurfTopology& t) {
    if (t.tri.empty()) throw ResolutionTooLow("mesh has no faces");
    // per undirected edge: traversal counts (lo->hi, hi->lo)
    std::map<std::pair<int, int>, std::pair<int, int>> edges;
    for (size_t f = 0; f < t.tri.size(); ++f) {
      const auto& tr = t.tri[f];
      for (int c = 0; c < 3; ++c) {
        int a = tr[c], b = tr[(c + 1) % 3];
        if (a < 0 || b < 0 || a >= t.n_verts || b >= t.n_verts)
          throw NonManifold(strf("face %zu references missing vertex", f));
        if (a == b) throw DegenerateElement(strf("face %zu repeats a vertex", f));
        auto& e = edges[{std::min(a, b), std::max(a, b)}];
        (a < b ? e.first : e.second)++;
      }
    }
    for (const auto& [e, cnt] : edges) {
      const int total = cnt.first + cnt.second;
      if (total > 2)
        throw NonManifold(strf("edge %d-%d shared by %d faces", e.first, e.second, total));
      if (total == 1)
        throw OpenBoundary(strf("edge %d-%d borders a single face", e.first, e.second));
      if (cnt.first != 1)
        throw InconsistentOrientation(
            strf("edge %d-%d traversed twice in the same direction", e.first, e.second));
    }
    std::vector<char> used(t.n_verts, 0);
    for (const auto& tr : t.tri)
      for (int v : tr) used[v] = 1;
    for (int v = 0; v < t.n_verts; ++v)
      if (!used[v]) throw NonManifold(strf("vertex %d is isolated", v));
  }

  static void build_adjacency(SurfTopology& t) {
    std::vector<std::vector<int>> nbr(t.n_verts), vf(t.n_verts);
    for (size_t f = 0; f < t.tri.size(); ++f) {
      const auto& tr = t.tri[f];
      for (int c = 0; c < 3; ++c) {
        nbr[tr[c]].push_back(tr[(c + 1) % 3]);
        nbr[tr[c]].push_back(tr[(c + 2) % 3]);
        vf[tr[c]].push_back((int)f);
      }
    }
    t.ring_off.assign(t.n_verts + 1, 0);
    t.vf_off.assign(t.n_verts + 1, 0);
    for (int v = 0; v < t.n_verts; ++v) {
      auto& r = nbr[v];
      std::sort(r.begin(), r.end());
      r.erase(std::unique(r.begin(), r.end()), r.end());
      t.ring_off[v + 1] = t.ring_off[v] + (int)r.size();
      t.vf_off[v + 1] = t.vf_off[v] + (int)vf[v].size();
    }
    t.ring_idx.reserve(t.ring_off.back());
    t.vf_idx.reserve(t.vf_off.back());
    for (int v = 0; v < t.n_verts; ++v) {
      t.ring_idx.insert(t.ring_idx.end(), nbr[v].begin(), nbr[v].end());
      t.vf_idx.insert(t.vf_idx.end(), vf[v].begin(), vf[v].end());
    }
  }

  int ring_slot(int v, int w) const {
    const auto& t = *topo;
    int lo = t.ring_off[v], hi = t.ring_off[v + 1];
    auto it = std::lower_bound(t.ring_idx.begin() + lo, t.ring_idx.begin() + hi, w);
    return (int)(it - t.ring_idx.begin());
  }

  void compute_geometry() {
    const auto& t = *topo;
    const int nv = n_vertices();
    const int nf = (int)t.tri.size();
    nrm.assign(nv, Vec3::Zero());
    dmu.assign(nv, 0.0);
    vor.assign(nv, 0.0);
    H.assign(nv, 0.0);
    lam1.assign(nv, 0.0);
    lam2.assign(nv, 0.0);
    cot_w.assign(t.ring_idx.size(), 0.0);
    total_area = 0.0;
    min_h = kInf;

    std::vector<Vec3> fn(nf);
    std::vector<double> fa(nf);
    double mean_fa = 0.0;
    for (int f = 0; f < nf; ++f) {
      const auto& tr = t.tri[f];
      fn[f] = (pos[tr[1]] - pos[tr[0]]).cross(pos[tr[2]] - pos[tr[0]]);
      fa[f] = 0.5 * fn[f].norm();
      mean_fa += fa[f];
    }
    mean_fa /= nf;
    for (int f = 0; f < nf; ++f) {
      if (fa[f] < 1e-14 * mean_fa)
        throw DegenerateElement(strf("face %d area %.3e below threshold", f, fa[f]));
    }

    for (int f = 0; f < nf; ++f) {
      const auto& tr = t.tri[f];
      const Vec3 fnu = fn[f] / (2.0 * fa[f]);
      total_area += fa[f];
      std::array<Vec3, 3> e;  // e[c] = edge opposite corner c
      for (int c = 0; c < 3; ++c) e[c] = pos[tr[(c + 2) % 3]] - pos[tr[(c + 1) % 3]];
      std::array<double, 3> cot, ang;
      bool obtuse = false;
      int obtuse_at = -1;
      for (int c = 0; c < 3; ++c) {
        const Vec3 u = e[(c + 2) % 3];   // from corner c to next
        const Vec3 v = -e[(c + 1) % 3];  // from corner c to prev
        const double dn = u.cross(v).norm();
        cot[c] = u.dot(v) / std::max(dn, 1e-300);
        ang[c] = std::atan2(dn, u.dot(v));
        if (cot[c] < 0.0) obtuse = true, obtuse_at = c;
        min_h = std::min(min_h, e[c].norm());
      }
      for (int c = 0; c < 3; ++c) {
        const int v0 = tr[c];
        dmu[v0] += fa[f] / 3.0;
        nrm[v0] += ang[c] * fnu;
        // mixed Voronoi cell area
        if (!obtuse) {
          const double l2a = e[(c + 1) % 3].squaredNorm();
          const double l2b = e[(c + 2) % 3].squaredNorm();
          vor[v0] += (l2a * cot[(c + 1) % 3] + l2b * cot[(c + 2) % 3]) / 8.0;
        } else {
          vor[v0] += (c == obtuse_at) ? fa[f] / 2.0 : fa[f] / 4.0;
        }
        // cotangent weights: corner c faces edge (c+1, c+2)
        const int a = tr[(c + 1) % 3], b = tr[(c + 2) % 3];
        const double w = 0.5 * cot[c];
        cot_w[ring_slot(a, b)] += w;
        cot_w[ring_slot(b, a)] += w;
      }
    }

    for (int v = 0; v < nv; ++v) {
      nrm[v].normalize();
      Vec3 lap = Vec3::Zero();
      for (int s = t.ring_off[v]; s < t.ring_off[v + 1]; ++s)
        lap += cot_w[s] * (pos[t.ring_idx[s]] - pos[v]);
      H[v] = -nrm[v].dot(lap) / vor[v];
    }

    fit_principal_curvatures();
    geometry_valid = true;
  }

  // shape operator from a quadric fit over the one-ring, expressed in an
  // orthonormal tangent frame; eigenvalues ordered lam1 <= lam2
  void fit_principal_curvatures() {
    const auto& t = *topo;
    for (int v = 0; v < n_vertices(); ++v) {
      const Vec3& n = nrm[v];
      Vec3 e1 = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
      e1 = (e1 - e1.dot(n) * n).normalized();
      const Vec3 e2 = n.cross(e1);

      Eigen::Matrix<double, 5, 5> ata = Eigen::Matrix<double, 5, 5>::Zero();
      Eigen::Matrix<double, 5, 1> atb = Eigen::Matrix<double, 5, 1>::Zero();
      int rows = 0;
      auto add_row = [&](int w) {
        const Vec3 d = pos[w] - pos[v];
        const double u = d.dot(e1), q = d.dot(e2), z = d.dot(n);
        Eigen::Matrix<double, 5, 1> r;
        r << u, q, 0.5 * u * u, u * q, 0.5 * q * q;
        ata += r * r.transpose();
        atb += z * r;
        ++rows;
      };
      for (int s = t.ring_off[v]; s < t.ring_off[v + 1]; ++s) add_row(t.ring_idx[s]);
      if (rows < 5) {
        // widen to the two-ring for pathological valences
        std::vector<int> seen(t.ring_idx.begin() + t.ring_off[v],
                              t.ring_idx.begin() + t.ring_off[v + 1]);
        seen.push_back(v);
        std::sort(seen.begin(), seen.end());
        for (int s = t.ring_off[v]; s < t.ring_off[v + 1]; ++s) {
          const int w = t.ring_idx[s];
          for (int s2 = t.ring_off[w]; s2 < t.ring_off[w + 1]; ++s2) {
            const int w2 = t.ring_idx[s2];
            if (!std::binary_search(seen.begin(), seen.end(), w2)) add_row(w2);
          }
        }
      }
      const Eigen::Matrix<double, 5, 1> c = ata.ldlt().solve(atb);
      // curvature of the graph z(u,q), sign flipped so that a sphere with
      // outward normal has positive principal curvatures
      const double L = -c[2], M = -c[3], N = -c[4];
      const double tr2 = 0.5 * (L + N);
      const double det = L * N - M * M;
      const double disc = std::sqrt(std::max(tr2 * tr2 - det, 0.0));
      lam1[v] = tr2 - disc;
      lam2[v] = tr2 + disc;
    }
  }

  std::vector<double> laplacian(const std::vector<double>& f) const {
    const auto& t = *topo;
    std::vector<double> out(n_vertices(), 0.0);
    for (int v = 0; v < n_vertices(); ++v) {
      double acc = 0.0;
      for (int s = t.ring_off[v]; s < t.ring_off[v + 1]; ++s)
        acc += cot_w[s] * (f[t.ring_idx[s]] - f[v]);
      out[v] = acc / vor[v];
    }
    return out;
  }

  // per-face affine gradient magnitude, averaged onto vertices with face
  // area weights
  std::vector<double> gradient_norm(const std::vector<double>& f) const {
    const auto& t = *topo;
    std::vector<double> acc(n_vertices(), 0.0), den(n_vertices(), 0.0);
    for (const auto& tr : t.tri) {
      const Vec3 n = (pos[tr[1]] - pos[tr[0]]).cross(pos[tr[2]] - pos[tr[0]]);
      const double a2 = n.norm();
      const Vec3 nu = n / a2;
      Vec3 g = Vec3::Zero();
      for (int c = 0; c < 3; ++c) {
        const Vec3 opp = pos[tr[(c + 2) % 3]] - pos[tr[(c + 1) % 3]];
        g += f[tr[c]] * nu.cross(opp);
      }
      g /= a2;
      const double gn = g.norm(), fa = 0.5 * a2;
      for (int c = 0; c < 3; ++c) acc[tr[c]] += fa * gn, den[tr[c]] += fa;
    }
    for (int v = 0; v < n_vertices(); ++v) acc[v] /= den[v];
    return acc;
  }
};

}  // namespace mcflab
