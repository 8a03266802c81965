#pragma once

#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mcflab/flow.hpp"
#include "mcflab/io.hpp"
#include "mcflab/shapes.hpp"

namespace mcflab {

// ---------------------------------------------------------------------------
// INI-style configuration: [section] headers, key = value lines, '#' or ';'
// comments.  Sections and keys are whitelisted so typos fail loudly.
// ---------------------------------------------------------------------------

struct IniDoc {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    return s != sections.end() && s->second.count(key) > 0;
  }
  std::string get(const std::string& sec, const std::string& key,
                  const std::string& fallback) const {
    auto s = sections.find(sec);
    if (s == sections.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ConfigInvalid(strf("%s: '%s' is not a number", what.c_str(), s.c_str()));
  return v;
}

inline long to_long(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw ConfigInvalid(strf("%s: '%s' is not an integer", what.c_str(), s.c_str()));
  return v;
}

inline std::vector<double> to_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::string tok;
  for (char c : s + " ") {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!tok.empty()) out.push_back(to_double(tok, what)), tok.clear();
    } else {
      tok += c;
    }
  }
  return out;
}

}  // namespace detail

inline IniDoc parse_ini(const std::string& text) {
  IniDoc doc;
  std::string section;
  int lineno = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = detail::trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigInvalid(strf("line %d: unterminated section header", lineno));
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigInvalid(strf("line %d: empty section name", lineno));
      doc.sections[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigInvalid(strf("line %d: expected key = value", lineno));
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigInvalid(strf("line %d: empty key", lineno));
    if (section.empty())
      throw ConfigInvalid(strf("line %d: key outside any section", lineno));
    if (!doc.sections[section].emplace(key, val).second)
      throw ConfigInvalid(strf("line %d: duplicate key '%s'", lineno, key.c_str()));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Experiment configuration.
// ---------------------------------------------------------------------------

struct ShapeSpec {
  std::string kind;  // circle | ellipse | sphere | torus | dumbbell
  double radius = 1.0;
  double a = 1.0, b = 0.6;
  double R = 1.0, r = 0.4;
  double neck = 0.15, handle = 0.35, scale = 1.0;
  int n = 256, level = 4, nu = 48, nv = 24, nth = 32;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 42;
  ShapeSpec shape;
  StopCriteria stop;
  long stride = 1;
  std::vector<double> norm_exponents = {2.0, 3.0, 4.0};
  std::string center_policy = "argmax";  // or "explicit"
  Vec3 center_point = Vec3::Zero();
  int k_max = 5;
  std::vector<double> thresholds;  // empty -> no blow-up stage
  std::string pinching = "auto";   // "auto" or a number
  double B = 0.0;
  double c_n = 40.0;
  double q = 4.0;
  double beta = 4.0;
  std::string out_dir = "out";

  bool is_curve() const { return shape.kind == "circle" || shape.kind == "ellipse"; }
};

inline ExperimentConfig config_from_ini(const IniDoc& doc) {
  static const std::map<std::string, std::set<std::string>> kAllowed = {
      {"experiment", {"name", "seed"}},
      {"shape",
       {"kind", "radius", "a", "b", "R", "r", "neck", "handle", "scale", "n", "level",
        "nu", "nv", "nth"}},
      {"flow", {"max_time", "max_steps", "h_ceiling", "dt_floor", "safety", "stride"}},
      {"norms", {"exponents"}},
      {"cylinders", {"center", "point", "k_max"}},
      {"blowup", {"thresholds", "B"}},
      {"constants", {"c_n", "q", "beta"}},
      {"output", {"dir"}},
  };
  for (const auto& [sec, keys] : doc.sections) {
    auto it = kAllowed.find(sec);
    if (it == kAllowed.end()) throw ConfigInvalid(strf("unknown section [%s]", sec.c_str()));
    for (const auto& [key, val] : keys)
      if (!it->second.count(key))
        throw ConfigInvalid(strf("unknown key '%s' in [%s]", key.c_str(), sec.c_str()));
  }

  using detail::to_double;
  using detail::to_list;
  using detail::to_long;
  ExperimentConfig c;
  c.name = doc.get("experiment", "name", c.name);
  if (doc.has("experiment", "seed")) {
    const long s = to_long(doc.get("experiment", "seed", ""), "seed");
    if (s < 0) throw ConfigInvalid("seed must be nonnegative");
    c.seed = (std::uint64_t)s;
  }

  c.shape.kind = doc.get("shape", "kind", "");
  static const std::set<std::string> kKinds = {"circle", "ellipse", "sphere", "torus",
                                               "dumbbell"};
  if (!kKinds.count(c.shape.kind))
    throw ConfigInvalid(strf("shape kind '%s' is not recognised", c.shape.kind.c_str()));
  auto shd = [&](const char* k, double& slot) {
    if (doc.has("shape", k)) slot = to_double(doc.get("shape", k, ""), k);
  };
  auto shi = [&](const char* k, int& slot) {
    if (doc.has("shape", k)) slot = (int)to_long(doc.get("shape", k, ""), k);
  };
  shd("radius", c.shape.radius);
  shd("a", c.shape.a);
  shd("b", c.shape.b);
  shd("R", c.shape.R);
  shd("r", c.shape.r);
  shd("neck", c.shape.neck);
  shd("handle", c.shape.handle);
  shd("scale", c.shape.scale);
  shi("n", c.shape.n);
  shi("level", c.shape.level);
  shi("nu", c.shape.nu);
  shi("nv", c.shape.nv);
  shi("nth", c.shape.nth);

  if (doc.has("flow", "max_time"))
    c.stop.max_time = to_double(doc.get("flow", "max_time", ""), "max_time");
  if (doc.has("flow", "max_steps"))
    c.stop.max_steps = to_long(doc.get("flow", "max_steps", ""), "max_steps");
  if (doc.has("flow", "h_ceiling"))
    c.stop.h_ceiling = to_double(doc.get("flow", "h_ceiling", ""), "h_ceiling");
  if (doc.has("flow", "dt_floor"))
    c.stop.dt_floor = to_double(doc.get("flow", "dt_floor", ""), "dt_floor");
  if (doc.has("flow", "safety"))
    c.stop.safety = to_double(doc.get("flow", "safety", ""), "safety");
  if (doc.has("flow", "stride")) c.stride = to_long(doc.get("flow", "stride", ""), "stride");
  if (c.stride < 1) throw ConfigInvalid("stride must be >= 1");
  if (!(c.stop.safety > 0.0 && c.stop.safety <= 1.0))
    throw ConfigInvalid("safety must lie in (0, 1]");

  if (doc.has("norms", "exponents")) {
    c.norm_exponents = to_list(doc.get("norms", "exponents", ""), "exponents");
    for (double p : c.norm_exponents)
      if (!(p > 0.0)) throw ConfigInvalid("norm exponents must be positive");
    if (c.norm_exponents.empty()) throw ConfigInvalid("exponent list is empty");
  }

  c.center_policy = doc.get("cylinders", "center", c.center_policy);
  if (c.center_policy != "argmax" && c.center_policy != "explicit")
    throw ConfigInvalid("cylinder center policy must be 'argmax' or 'explicit'");
  if (doc.has("cylinders", "point")) {
    std::string pt = doc.get("cylinders", "point", "");
    for (char& ch : pt)
      if (ch == ';') ch = ' ';
    const std::vector<double> xs = to_list(pt, "point");
    if (xs.size() != 2 && xs.size() != 3)
      throw ConfigInvalid("cylinder point needs 2 or 3 coordinates");
    for (size_t i = 0; i < xs.size(); ++i) c.center_point[(int)i] = xs[i];
  } else if (c.center_policy == "explicit") {
    throw ConfigInvalid("explicit center policy needs a point");
  }
  if (doc.has("cylinders", "k_max"))
    c.k_max = (int)to_long(doc.get("cylinders", "k_max", ""), "k_max");
  if (c.k_max < 1) throw ConfigInvalid("k_max must be >= 1");

  if (doc.has("blowup", "thresholds")) {
    c.thresholds = to_list(doc.get("blowup", "thresholds", ""), "thresholds");
    for (size_t i = 1; i < c.thresholds.size(); ++i)
      if (!(c.thresholds[i] > c.thresholds[i - 1]))
        throw ConfigInvalid("thresholds must increase");
  }
  if (doc.has("blowup", "B")) {
    c.pinching = doc.get("blowup", "B", "auto");
    if (c.pinching != "auto") c.B = to_double(c.pinching, "B");
    if (c.pinching != "auto" && c.B < 0.0)
      throw ConfigInvalid("pinching constant B must be >= 0");
  }

  if (doc.has("constants", "c_n")) c.c_n = to_double(doc.get("constants", "c_n", ""), "c_n");
  if (doc.has("constants", "q")) c.q = to_double(doc.get("constants", "q", ""), "q");
  if (doc.has("constants", "beta"))
    c.beta = to_double(doc.get("constants", "beta", ""), "beta");
  if (!(c.c_n > 0.0)) throw ConfigInvalid("c_n must be positive");

  c.out_dir = doc.get("output", "dir", c.out_dir);
  return c;
}

inline ExperimentConfig parse_experiment_config(const std::string& text) {
  return config_from_ini(parse_ini(text));
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_text_file(path));
}

inline Curve make_curve_shape(const ShapeSpec& s) {
  if (s.kind == "circle") return make_circle(s.radius, s.n);
  if (s.kind == "ellipse") return make_ellipse(s.a, s.b, s.n);
  throw ConfigInvalid(strf("shape '%s' is not a curve", s.kind.c_str()));
}

inline Surface make_surface_shape(const ShapeSpec& s) {
  if (s.kind == "sphere") return make_sphere(s.radius, s.level);
  if (s.kind == "torus") return make_torus(s.R, s.r, s.nu, s.nv);
  if (s.kind == "dumbbell") return make_dumbbell(s.neck, s.handle, s.nth, s.scale);
  throw ConfigInvalid(strf("shape '%s' is not a surface", s.kind.c_str()));
}

}  // namespace mcflab
