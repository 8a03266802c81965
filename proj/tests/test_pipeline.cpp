#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <set>
#include <string>

#include "mcflab/experiment.hpp"

using namespace mcflab;

namespace {

bool file_exists(const std::string& p) { return std::filesystem::exists(p); }

ExperimentConfig circle_config(const std::string& name) {
  auto cfg = parse_experiment_config(
      "[shape]\nkind = circle\nn = 64\n"
      "[flow]\nmax_time = 0.45\nstride = 8\n"
      "[norms]\nexponents = 2 3\n"
      "[cylinders]\nk_max = 2\n"
      "[blowup]\nthresholds = 2 3\n");
  cfg.name = name;
  cfg.out_dir = "pipe_scratch";
  return cfg;
}

ExperimentConfig sphere_config(const std::string& name) {
  auto cfg = parse_experiment_config(
      "[shape]\nkind = sphere\nlevel = 3\n"
      "[flow]\nmax_time = 0.5\nh_ceiling = 4\nstride = 1\n"
      "[norms]\nexponents = 2 4\n"
      "[cylinders]\nk_max = 2\n"
      "[blowup]\nthresholds = 3\n");
  cfg.name = name;
  cfg.out_dir = "pipe_scratch";
  return cfg;
}

}  // namespace

TEST_CASE("subcommands map onto pipeline stages", "[pipeline]") {
  const auto sim = stages_for("simulate");
  REQUIRE(sim.simulate);
  REQUIRE_FALSE(sim.diagnose);
  REQUIRE_FALSE(sim.norms);
  REQUIRE_FALSE(sim.rescale);
  REQUIRE_FALSE(sim.inequalities);

  REQUIRE(stages_for("diagnose").diagnose);
  REQUIRE(stages_for("norms").norms);
  REQUIRE(stages_for("rescale").rescale);
  REQUIRE(stages_for("inequalities").inequalities);
  REQUIRE_FALSE(stages_for("diagnose").simulate);

  for (const char* sub : {"report", "all"}) {
    const auto st = stages_for(sub);
    REQUIRE(st.simulate);
    REQUIRE(st.diagnose);
    REQUIRE(st.norms);
    REQUIRE(st.rescale);
    REQUIRE(st.inequalities);
  }
  REQUIRE_THROWS_AS(stages_for("frobnicate"), ConfigInvalid);
}

TEST_CASE("full pipeline on a circle produces every artifact", "[pipeline]") {
  const auto cfg = circle_config("tiny-circle");
  REQUIRE(run_experiment(cfg, stages_for("all"), true) == 0);

  const std::string dir = cfg.out_dir + "/" + cfg.name;
  REQUIRE(file_exists(dir + "/trajectory/index.csv"));
  REQUIRE(file_exists(dir + "/trajectory/snap_000000.poly"));
  REQUIRE(file_exists(dir + "/diagnostics.csv"));
  REQUIRE(file_exists(dir + "/norms.csv"));
  REQUIRE(file_exists(dir + "/blowup.csv"));
  REQUIRE(file_exists(dir + "/certification.json"));

  const Json doc = Json::parse(read_text_file(dir + "/certification.json"));
  REQUIRE(doc["experiment"] == "tiny-circle");
  REQUIRE(doc["pinching_B"] == 0.0);  // circles are convex
  REQUIRE(doc["failures"].empty());
  REQUIRE_FALSE(doc.contains("constants"));  // the window chain is surface-only
  bool has_vanishing = false;
  bool has_note = false;
  for (const auto& r : doc["records"]) {
    if (r["check"] == "vanishing_local_norms") {
      has_vanishing = true;
      REQUIRE(r["entries"] == 2);
    }
    if (r["check"] == "note")
      has_note = r["detail"] == "sobolev chain needs hypersurface dimension 2";
  }
  REQUIRE(has_vanishing);
  REQUIRE(has_note);
}

TEST_CASE("pipeline reruns are byte identical", "[pipeline]") {
  const auto cfg = circle_config("repeat-circle");
  REQUIRE(run_experiment(cfg, stages_for("all"), true) == 0);
  const std::string dir = cfg.out_dir + "/" + cfg.name;
  const std::string cert = read_text_file(dir + "/certification.json");
  const std::string norms = read_text_file(dir + "/norms.csv");
  const std::string index = read_text_file(dir + "/trajectory/index.csv");
  const std::string blowup = read_text_file(dir + "/blowup.csv");

  REQUIRE(run_experiment(cfg, stages_for("all"), true) == 0);
  REQUIRE(read_text_file(dir + "/certification.json") == cert);
  REQUIRE(read_text_file(dir + "/norms.csv") == norms);
  REQUIRE(read_text_file(dir + "/trajectory/index.csv") == index);
  REQUIRE(read_text_file(dir + "/blowup.csv") == blowup);
}

TEST_CASE("stage subsets only write their own artifacts", "[pipeline]") {
  auto cfg = circle_config("stage-circle");
  std::filesystem::remove_all(cfg.out_dir + "/" + cfg.name);
  REQUIRE(run_experiment(cfg, stages_for("simulate"), true) == 0);
  const std::string dir = cfg.out_dir + "/" + cfg.name;
  REQUIRE(file_exists(dir + "/trajectory/index.csv"));
  REQUIRE_FALSE(file_exists(dir + "/diagnostics.csv"));
  REQUIRE_FALSE(file_exists(dir + "/norms.csv"));
  REQUIRE_FALSE(file_exists(dir + "/blowup.csv"));
  REQUIRE_FALSE(file_exists(dir + "/certification.json"));

  REQUIRE(run_experiment(cfg, stages_for("diagnose"), true) == 0);
  REQUIRE(file_exists(dir + "/diagnostics.csv"));
  REQUIRE_FALSE(file_exists(dir + "/norms.csv"));
}

TEST_CASE("full pipeline on a sphere certifies the window chain", "[pipeline]") {
  const auto cfg = sphere_config("tiny-sphere");
  REQUIRE(run_experiment(cfg, stages_for("report"), true) == 0);

  const std::string dir = cfg.out_dir + "/" + cfg.name;
  const Json doc = Json::parse(read_text_file(dir + "/certification.json"));
  REQUIRE(doc["failures"].empty());
  REQUIRE(doc.contains("constants"));
  REQUIRE(doc["constants"]["n"] == 2);

  std::set<std::string> seen;
  for (const auto& r : doc["records"]) seen.insert(r["check"].get<std::string>());
  for (const char* want :
       {"vanishing_local_norms", "michael_simon", "curvature_sobolev", "interpolation",
        "spacetime_sobolev", "subsolution", "reverse_holder_k1", "moser_rung_0",
        "moser_rung_1", "moser_rung_2", "moser_sup", "critical_smallness",
        "mean_curvature_bound"})
    REQUIRE(seen.count(want) == 1);

  // the norms report carries both the slab rows and the cylinder ladder
  const std::string norms = read_text_file(dir + "/norms.csv");
  REQUIRE(norms.find("slab") != std::string::npos);
  REQUIRE(norms.find("D0") != std::string::npos);
}

TEST_CASE("weak structural constants fail certification loudly", "[pipeline]") {
  auto cfg = sphere_config("weak-sphere");
  cfg.c_n = 0.001;
  REQUIRE(run_experiment(cfg, stages_for("inequalities"), true) == 2);
  const Json doc =
      Json::parse(read_text_file(cfg.out_dir + "/" + cfg.name + "/certification.json"));
  REQUIRE_FALSE(doc["failures"].empty());
}

TEST_CASE("unreachable blow-up thresholds propagate as errors", "[pipeline]") {
  auto cfg = circle_config("unreachable");
  cfg.thresholds = {500.0};
  REQUIRE_THROWS_AS(run_experiment(cfg, stages_for("all"), true), NoBlowup);
}
