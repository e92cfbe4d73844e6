#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "io.hpp"

namespace pcf {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct SolverConfig {
  std::string kind = "limit";  // limit | epsilon
  double eps = 0.1;
  Resolution resolution;
  int k_max = 6;
  int grid1 = 8, grid2 = 8;
  bool path = false;
  int path_steps = 8;
};

struct SlabConfig {
  SlabTraceOptions trace;
  int theta_points = 40;
};

struct GreenConfig {
  std::vector<BlochTheta> thetas{{0.5, 0.5}};
  std::vector<double> ks{-1.0, -0.5, 0.0};
  std::vector<double> deltas{0.1};
  GreenResolution resolution;
  int disc_cutoff = 64;
  double h = 1e-3;
};

struct ArrowConfig {
  std::vector<double> deltas{0.05};
  int grid = 4;
  int cutoff = 64;
  bool direct_sweep = false;
};

struct StudyConfig {
  std::vector<double> eps_list{0.2, 0.1, 0.05};
  double window = 0.0;  // 0: 1.5 x top of band 4
  SlabConfig slab;
  GreenConfig green;
  ArrowConfig arrow;
};

struct Config {
  CellSpec cell;
  SolverConfig solver;
  StudyConfig study;
  std::string out_dir = "out";
};

namespace detail {

inline std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

inline const json* child(const json& j, const std::string& path, const std::string& key, bool required) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) throw ConfigError(join(path, key), "missing required key");
    return nullptr;
  }
  return &*it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

inline bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

inline std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

inline std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

// Reads an optional key into `out`.
template <class F, class T>
void opt(const json& j, const std::string& path, const std::string& key, T& out, F read) {
  if (const json* c = child(j, path, key, false)) out = read(*c, join(path, key));
}

inline void check(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

inline InclusionGeometry parse_geometry(const json& g) {
  const std::string p = "geometry";
  std::string type = text(*child(g, p, "type", true), "geometry.type");
  if (type == "disc") {
    Disc d;
    opt(g, p, "radius", d.radius, number);
    check(d.radius > 0.0 && d.radius < 0.5, "geometry.radius", "must lie in (0, 0.5)");
    if (const json* c = child(g, p, "center", false)) {
      std::vector<double> v = numbers(*c, "geometry.center");
      check(v.size() == 2, "geometry.center", "expected two numbers");
      d.center = {v[0], v[1]};
    }
    return d;
  }
  if (type == "slab") {
    Slab s;
    opt(g, p, "a", s.a, number);
    opt(g, p, "b", s.b, number);
    check(0.0 < s.a && s.a < s.b, "geometry.a", "must satisfy 0 < a < b");
    check(s.b < 1.0, "geometry.b", "must satisfy b < 1");
    return s;
  }
  if (type == "raster") {
    Raster r;
    r.n1 = integer(*child(g, p, "n1", true), "geometry.n1");
    r.n2 = integer(*child(g, p, "n2", true), "geometry.n2");
    check(detail::power_of_two(r.n1), "geometry.n1", "must be a power of two");
    check(detail::power_of_two(r.n2), "geometry.n2", "must be a power of two");
    const json& cells = *child(g, p, "cells", true);
    check(cells.is_array() && cells.size() == static_cast<std::size_t>(r.n1) * r.n2, "geometry.cells",
          "expected n1*n2 entries in row-major order");
    for (std::size_t i = 0; i < cells.size(); ++i)
      r.cells.push_back(static_cast<std::uint8_t>(integer(cells[i], "geometry.cells[" + std::to_string(i) + "]") != 0));
    try {
      validate(InclusionGeometry{r});
    } catch (const Error& e) {
      throw ConfigError("geometry.cells", e.what());
    }
    return r;
  }
  throw ConfigError("geometry.type", "expected disc, slab or raster");
}

inline std::vector<BlochTheta> parse_thetas(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of [theta1, theta2]");
  std::vector<BlochTheta> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string ip = path + "[" + std::to_string(i) + "]";
    std::vector<double> v = numbers(j[i], ip);
    check(v.size() == 2, ip, "expected two numbers");
    out.emplace_back(v[0], v[1]);
  }
  return out;
}

}  // namespace detail

inline Config parse_config(const json& root) {
  using namespace detail;
  Config c;
  if (!root.is_object()) throw ConfigError("<root>", "expected a JSON object");
  c.cell.geometry = parse_geometry(*child(root, "", "geometry", true));

  const json& m = *child(root, "", "materials", true);
  c.cell.eps0 = number(*child(m, "materials", "eps0", true), "materials.eps0");
  c.cell.eps1 = number(*child(m, "materials", "eps1", true), "materials.eps1");
  opt(m, "materials", "mu", c.cell.mu, number);
  check(c.cell.eps1 > 0.0, "materials.eps1", "must be positive");
  check(c.cell.eps0 > c.cell.eps1, "materials.eps0", "must exceed materials.eps1");
  check(c.cell.mu > 0.0, "materials.mu", "must be positive");

  if (const json* s = child(root, "", "solver", false)) {
    const std::string p = "solver";
    SolverConfig& sc = c.solver;
    opt(*s, p, "kind", sc.kind, text);
    check(sc.kind == "limit" || sc.kind == "epsilon", "solver.kind", "expected limit or epsilon");
    opt(*s, p, "eps", sc.eps, number);
    opt(*s, p, "cutoff", sc.resolution.cutoff, integer);
    opt(*s, p, "source_cutoff", sc.resolution.source_cutoff, integer);
    opt(*s, p, "pw_cutoff", sc.resolution.pw_cutoff, integer);
    opt(*s, p, "gram_threshold", sc.resolution.gram_threshold, number);
    opt(*s, p, "k_max", sc.k_max, integer);
    if (const json* g = child(*s, p, "grid", false)) {
      std::vector<double> v = numbers(*g, "solver.grid");
      check(v.size() == 2, "solver.grid", "expected [n1, n2]");
      sc.grid1 = static_cast<int>(v[0]);
      sc.grid2 = static_cast<int>(v[1]);
    }
    opt(*s, p, "path", sc.path, boolean);
    opt(*s, p, "path_steps", sc.path_steps, integer);
  }
  const Resolution& r = c.solver.resolution;
  check(r.cutoff >= 1, "solver.cutoff", "must be at least 1");
  check(r.source_cutoff >= 0 && r.source_cutoff <= r.cutoff, "solver.source_cutoff", "must lie in [0, cutoff]");
  check(r.pw_cutoff <= r.cutoff, "solver.pw_cutoff", "must not exceed cutoff");
  check(r.gram_threshold > 0.0 && r.gram_threshold < 1.0, "solver.gram_threshold", "must lie in (0, 1)");
  check(c.solver.k_max >= 1, "solver.k_max", "must be at least 1");
  check(c.solver.grid1 >= 1 && c.solver.grid2 >= 1, "solver.grid", "entries must be positive");
  check(c.solver.path_steps >= 1, "solver.path_steps", "must be at least 1");
  const double emax = max_epsilon(c.cell);
  check(c.solver.eps > 0.0 && c.solver.eps <= emax, "solver.eps",
        "must lie in (0, " + fmt(emax) + "]");

  if (const json* st = child(root, "", "study", false)) {
    const std::string p = "study";
    StudyConfig& sc = c.study;
    opt(*st, p, "eps_list", sc.eps_list, numbers);
    opt(*st, p, "window", sc.window, number);
    if (const json* sl = child(*st, p, "slab", false)) {
      const std::string q = "study.slab";
      opt(*sl, q, "lambda_lo", sc.slab.trace.lambda_lo, number);
      opt(*sl, q, "lambda_hi", sc.slab.trace.lambda_hi, number);
      opt(*sl, q, "step", sc.slab.trace.step, number);
      opt(*sl, q, "max_refinements", sc.slab.trace.max_refinements, integer);
      opt(*sl, q, "root_tol", sc.slab.trace.root_tol, number);
      opt(*sl, q, "theta_points", sc.slab.theta_points, integer);
      check(sc.slab.trace.lambda_hi > sc.slab.trace.lambda_lo, "study.slab.lambda_hi", "must exceed lambda_lo");
      check(sc.slab.trace.step > 0.0, "study.slab.step", "must be positive");
      check(sc.slab.theta_points >= 2, "study.slab.theta_points", "must be at least 2");
    }
    if (const json* g = child(*st, p, "green", false)) {
      const std::string q = "study.green";
      if (const json* t = child(*g, q, "thetas", false)) sc.green.thetas = parse_thetas(*t, "study.green.thetas");
      opt(*g, q, "ks", sc.green.ks, numbers);
      opt(*g, q, "deltas", sc.green.deltas, numbers);
      opt(*g, q, "sigmas", sc.green.resolution.sigmas, numbers);
      opt(*g, q, "radii", sc.green.resolution.radii, numbers);
      opt(*g, q, "cutoff", sc.green.resolution.cutoff, integer);
      opt(*g, q, "tol", sc.green.resolution.tol, number);
      opt(*g, q, "disc_cutoff", sc.green.disc_cutoff, integer);
      opt(*g, q, "h", sc.green.h, number);
      check(sc.green.resolution.cutoff >= 1, "study.green.cutoff", "must be at least 1");
      check(sc.green.h > 0.0, "study.green.h", "must be positive");
      for (std::size_t i = 0; i < sc.green.thetas.size(); ++i)
        check(!sc.green.thetas[i].is_zero(), "study.green.thetas[" + std::to_string(i) + "]", "theta must be non-zero");
      for (std::size_t i = 0; i < sc.green.deltas.size(); ++i)
        check(sc.green.deltas[i] > 0.0 && sc.green.deltas[i] < 0.5, "study.green.deltas[" + std::to_string(i) + "]",
              "must lie in (0, 0.5)");
    }
    if (const json* a = child(*st, p, "arrow", false)) {
      const std::string q = "study.arrow";
      opt(*a, q, "deltas", sc.arrow.deltas, numbers);
      opt(*a, q, "grid", sc.arrow.grid, integer);
      opt(*a, q, "cutoff", sc.arrow.cutoff, integer);
      opt(*a, q, "direct_sweep", sc.arrow.direct_sweep, boolean);
      check(sc.arrow.grid >= 1, "study.arrow.grid", "must be at least 1");
      for (std::size_t i = 0; i < sc.arrow.deltas.size(); ++i)
        check(sc.arrow.deltas[i] > 0.0 && sc.arrow.deltas[i] < 0.5, "study.arrow.deltas[" + std::to_string(i) + "]",
              "must lie in (0, 0.5)");
    }
  }
  for (std::size_t i = 0; i < c.study.eps_list.size(); ++i)
    check(c.study.eps_list[i] > 0.0 && c.study.eps_list[i] <= emax, "study.eps_list[" + std::to_string(i) + "]",
          "must lie in (0, " + fmt(emax) + "]");
  check(c.study.window >= 0.0, "study.window", "must be non-negative");

  if (const json* o = child(root, "", "output", false)) opt(*o, "output", "dir", c.out_dir, text);
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(root);
}

}  // namespace pcf
