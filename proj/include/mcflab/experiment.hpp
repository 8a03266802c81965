#pragma once

#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcflab/config.hpp"
#include "mcflab/diagnostics.hpp"
#include "mcflab/ineq.hpp"
#include "mcflab/io.hpp"
#include "mcflab/random_fields.hpp"
#include "mcflab/rescale.hpp"

namespace mcflab {

using Json = nlohmann::ordered_json;

struct StageSet {
  bool simulate = false;
  bool diagnose = false;
  bool norms = false;
  bool rescale = false;
  bool inequalities = false;
};

inline StageSet stages_for(const std::string& sub) {
  StageSet st;
  if (sub == "simulate") st.simulate = true;
  else if (sub == "diagnose") st.diagnose = true;
  else if (sub == "norms") st.norms = true;
  else if (sub == "rescale") st.rescale = true;
  else if (sub == "inequalities") st.inequalities = true;
  else if (sub == "report" || sub == "all")
    st.simulate = st.diagnose = st.norms = st.rescale = st.inequalities = true;
  else
    throw ConfigInvalid(strf("unknown subcommand '%s'", sub.c_str()));
  return st;
}

template <class M>
double trajectory_pinching(const Trajectory<M>& tr) {
  double B = 0.0;
  for (const auto& s : tr.snaps) B = std::max(B, pinching_constant(s.mesh).B);
  return B;
}

inline Vec2 config_center(const ExperimentConfig& cfg, const Vec2& fallback) {
  if (cfg.center_policy == "explicit") return cfg.center_point.head<2>();
  return fallback;
}

inline Vec3 config_center(const ExperimentConfig& cfg, const Vec3& fallback) {
  if (cfg.center_policy == "explicit") return cfg.center_point;
  return fallback;
}

namespace detail {

inline void stage_log(bool quiet, const char* fmt, ...) {
  if (quiet) return;
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stdout, fmt, args);
  va_end(args);
  std::fputc('\n', stdout);
}

inline Json check_record(const CheckReport& r) {
  Json j;
  j["check"] = r.name;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["ratio"] = r.ratio;
  j["certified"] = r.certified;
  return j;
}

inline Json constants_record(const ConstantsTable& ct) {
  Json j;
  j["n"] = ct.in.n;
  j["q"] = ct.in.q;
  j["beta"] = ct.in.beta;
  j["c_n"] = ct.in.c_n;
  j["C0"] = ct.in.C0;
  j["C1"] = ct.in.C1;
  j["nu"] = ct.nu;
  j["lambda"] = ct.lambda;
  j["Lambda_beta"] = ct.Lambda_beta;
  j["C_a"] = ct.C_a;
  j["C_z"] = ct.C_z;
  j["C_b"] = ct.C_b;
  j["C_c"] = ct.C_c;
  j["delta_1"] = ct.delta_1;
  j["delta_2"] = ct.delta_2;
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The pipeline: simulate -> diagnose -> norms -> rescale -> inequalities.
// Later stages reuse the in-memory results of earlier ones; files are only
// written for the stages that were requested.  Returns 0 on success and 2
// when a demanded certification fails; hard errors propagate as exceptions.
// ---------------------------------------------------------------------------

template <class M>
int run_typed(const ExperimentConfig& cfg, M shape, const StageSet& st, bool quiet) {
  namespace fs = std::filesystem;
  const std::string dir = cfg.out_dir + "/" + cfg.name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(strf("cannot create '%s': %s", dir.c_str(), ec.message().c_str()));

  constexpr int n = M::dim;
  std::vector<std::string> failures;
  Json records = Json::array();

  Trajectory<M> tr = evolve(std::move(shape), cfg.stop, cfg.stride);
  detail::stage_log(quiet, "[simulate] %s: %d snapshots, %ld steps, t in [%.6g, %.6g], stop=%s",
                    cfg.name.c_str(), tr.n_snaps(), tr.total_steps, tr.t_begin(), tr.t_end(),
                    to_string(tr.reason));
  if (st.simulate) write_trajectory(dir + "/trajectory", tr);

  if (st.diagnose) {
    write_diagnostics_csv(dir + "/diagnostics.csv", cfg.name, diagnostics_rows(tr));
    detail::stage_log(quiet, "[diagnose] wrote %s/diagnostics.csv", dir.c_str());
  }

  const double B = cfg.pinching == "auto" ? trajectory_pinching(tr) : cfg.B;

  // blow-up sequence (also feeds the norms and inequality stages)
  BlowupSequence<M> seq;
  bool have_seq = false;
  if (!cfg.thresholds.empty()) {
    seq = select_blowup_sequence(tr, cfg.thresholds);
    const VanishingReport van = vanishing_local_norms(seq, B);
    have_seq = true;
    Json v;
    v["check"] = "vanishing_local_norms";
    v["entries"] = (int)seq.entries.size();
    v["slope"] = van.slope;
    v["strictly_decreasing"] = van.strictly_decreasing;
    records.push_back(v);
    if (st.rescale) {
      const WitnessReport wit = contradiction_witness(seq, B, cfg.c_n, 0);
      std::vector<BlowupRow> rows;
      for (size_t i = 0; i < seq.entries.size(); ++i) {
        const auto& e = seq.entries[i];
        const auto& w = wit.rows[i];
        BlowupRow r;
        r.entry = (int)i;
        r.Q = e.Q;
        r.t = e.t;
        r.x = coords_string(e.x);
        r.local_norm_sum = w.local_sum;
        r.sup_H_plus = w.sup_side;
        r.C_d = w.C_d;
        r.hypothesis_met = w.hypothesis_met;
        rows.push_back(r);
      }
      write_blowup_csv(dir + "/blowup.csv", rows);
      detail::stage_log(quiet, "[rescale] %zu blow-up entries, %d satisfy the hypothesis",
                        seq.entries.size(), wit.met_count);
    }
  } else if (st.rescale) {
    write_blowup_csv(dir + "/blowup.csv", {});
    detail::stage_log(quiet, "[rescale] no thresholds configured, wrote empty blowup.csv");
  }

  if (st.norms) {
    std::vector<NormRow> rows;
    const auto H_of = [&](int j, int v) { return tr.snaps[j].mesh.H[v]; };
    for (double p : cfg.norm_exponents) {
      const NormReport nr = spacetime_norm(tr, H_of, p);
      rows.push_back({"slab", -1, p, nr.value, nr.samples});
    }
    if (have_seq) {
      const auto& e = seq.entries.back();
      const auto anchor = config_center(cfg, e.center);
      const auto Ht = [&](int j, int v) { return e.window.snaps[j].mesh.H[v]; };
      for (int k = 0; k <= cfg.k_max; ++k) {
        const auto cyl = dyadic_cylinder(k, anchor);
        NormRow r{cyl.name, k, double(n + 2), std::nan(""), 0};
        try {
          const NormReport nr = spacetime_norm(e.window, Ht, n + 2.0, &cyl);
          r.value = nr.value;
          r.samples = nr.samples;
        } catch (const EmptyRegion&) {
        }
        rows.push_back(r);
      }
    }
    write_norms_csv(dir + "/norms.csv", cfg.name, rows);
    detail::stage_log(quiet, "[norms] wrote %zu rows", rows.size());
  }

  ConstantsTable ct_main;
  bool have_ct = false;

  if (st.inequalities) {
    if constexpr (n == 2) {
      // slice checks on the initial mesh with a seeded bump field
      const auto& m0 = tr.snaps.front().mesh;
      double extent = 0.0;
      for (const auto& p : m0.pos) extent = std::max(extent, p.norm());
      Rng rng(cfg.seed);
      const BumpField bump =
          random_bump_field(rng, 5, extent, 0.2, 1.0, 0.4 * extent, 0.9 * extent, 0.05);
      const std::vector<double> f0 = field_on_mesh(bump, m0);

      const CheckReport ms = michael_simon_check(m0, f0, cfg.c_n);
      records.push_back(detail::check_record(ms));
      if (!ms.certified) failures.push_back(ms.name);

      const CheckReport cs = curvature_sobolev_check(m0, f0, 3.0, cfg.c_n);
      records.push_back(detail::check_record(cs));
      if (!cs.certified) failures.push_back(cs.name);

      const CheckReport ip = interpolation_check(m0, f0, 2.0, 3.0, 6.0, 1.0);
      records.push_back(detail::check_record(ip));
      if (!ip.certified) failures.push_back(ip.name);

      // whole-trajectory inequality for the shifted curvature
      const auto vhat = [&](int j, int v) { return tr.snaps[j].mesh.H[v] + n * B; };
      const CheckReport ps = spacetime_sobolev_check(tr, vhat, cfg.c_n);
      records.push_back(detail::check_record(ps));
      if (!ps.certified) failures.push_back(ps.name);

      if (have_seq) {
        const auto& e = seq.entries.back();
        const auto& win = e.window;
        const auto anchor = config_center(cfg, e.center);
        const double Bw = B / e.Q;
        const auto vw = [&, Bw](int j, int v) { return win.snaps[j].mesh.H[v] + n * Bw; };
        const auto fw = [&, Bw](int j, int v) { return sqr(vw(j, v)) + n * Bw * Bw; };

        const SubsolutionReport sub = subsolution_check(win, vw, fw);
        Json js;
        js["check"] = "subsolution";
        js["max_violation"] = sub.max_violation;
        js["tolerance"] = sub.tolerance;
        js["ok"] = sub.ok;
        records.push_back(js);

        ct_main = constants_from_trajectory(win, fw, cfg.q, cfg.beta, cfg.c_n);
        have_ct = true;

        const ReverseHolderReport rh =
            reverse_holder_check(win, vw, fw, cfg.beta, 1, anchor, ct_main);
        Json jr = detail::check_record(rh.check);
        jr["k"] = rh.k;
        jr["beta"] = rh.beta;
        jr["samples"] = rh.samples;
        records.push_back(jr);
        if (!rh.check.certified) failures.push_back(rh.check.name);

        const MoserLadderReport ml =
            moser_ladder(win, vw, fw, cfg.beta, cfg.k_max, anchor, ct_main);
        for (const auto& rung : ml.rungs) {
          Json jl;
          jl["check"] = strf("moser_rung_%d", rung.k);
          jl["exponent"] = rung.exponent;
          jl["value"] = rung.value;
          jl["bound"] = rung.bound;
          jl["samples"] = rung.samples;
          jl["certified"] = rung.ok;
          records.push_back(jl);
          if (!rung.ok) failures.push_back(strf("moser_rung_%d", rung.k));
        }
        Json jm;
        jm["check"] = "moser_sup";
        jm["sup_inner"] = ml.sup_inner;
        jm["bound"] = ml.sup_bound;
        jm["certified"] = ml.sup_certified;
        records.push_back(jm);
        if (!ml.sup_certified) failures.push_back("moser_sup");

        const ConstantsTable ct_crit = constants_from_trajectory(
            win, fw, 0.5 * (n + 2), cfg.beta, cfg.c_n);
        const SmallnessReport sm =
            critical_smallness_check(win, vw, fw, cfg.beta, anchor, ct_crit);
        Json jsm;
        jsm["check"] = "critical_smallness";
        jsm["kappa"] = sm.kappa;
        jsm["delta_1"] = sm.delta_1;
        jsm["small"] = sm.small;
        jsm["lhs"] = sm.conclusion.lhs;
        jsm["rhs"] = sm.conclusion.rhs;
        jsm["conclusion_holds"] = sm.conclusion.certified;
        jsm["certified"] = sm.certified;
        records.push_back(jsm);
        if (sm.small && !sm.conclusion.certified) failures.push_back("critical_smallness");

        const CurvatureBoundReport cb =
            mean_curvature_bound_check(win, Bw, anchor, cfg.c_n);
        Json jc;
        jc["check"] = "mean_curvature_bound";
        jc["B"] = cb.B;
        jc["hyp"] = cb.hyp;
        jc["delta_2"] = cb.delta_2;
        jc["hypothesis_met"] = cb.hypothesis_met;
        jc["sup_H_plus"] = cb.sup_H_plus;
        jc["C_3"] = cb.C_3;
        jc["C_d"] = cb.C_d;
        jc["bound"] = cb.bound;
        jc["bound_holds"] = cb.bound_holds;
        jc["certified"] = cb.certified;
        records.push_back(jc);
        if (cb.hypothesis_met && !cb.bound_holds) failures.push_back("mean_curvature_bound");
      } else {
        Json note;
        note["check"] = "note";
        note["detail"] = "no blow-up window configured; window checks skipped";
        records.push_back(note);
      }
    } else {
      Json note;
      note["check"] = "note";
      note["detail"] = "sobolev chain needs hypersurface dimension 2";
      records.push_back(note);
    }

    Json doc;
    doc["experiment"] = cfg.name;
    doc["seed"] = cfg.seed;
    doc["pinching_B"] = B;
    if (have_ct) doc["constants"] = detail::constants_record(ct_main);
    doc["records"] = records;
    doc["failures"] = failures;
    FilePtr f = open_file(dir + "/certification.json", "w");
    const std::string text = doc.dump(2) + "\n";
    std::fwrite(text.data(), 1, text.size(), f.get());
    detail::stage_log(quiet, "[inequalities] %zu records, %zu failures", records.size(),
                      failures.size());
  }

  if (!failures.empty()) {
    for (const auto& name : failures)
      std::fprintf(stderr, "certification failed: %s\n", name.c_str());
    return 2;
  }
  return 0;
}

inline int run_experiment(const ExperimentConfig& cfg, const StageSet& st,
                          bool quiet = false) {
  if (cfg.is_curve()) return run_typed(cfg, make_curve_shape(cfg.shape), st, quiet);
  return run_typed(cfg, make_surface_shape(cfg.shape), st, quiet);
}

}  // namespace mcflab
