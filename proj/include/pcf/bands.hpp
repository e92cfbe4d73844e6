#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "epsilon.hpp"
#include "limit.hpp"
#include "slab1d.hpp"

namespace pcf {

struct ThetaGrid {
  std::string kind = "grid";  // "grid" or "path"
  int n1 = 0, n2 = 0;         // grid shape; path: n1 = point count, n2 = 1
  std::vector<BlochTheta> points;
  std::vector<std::pair<std::size_t, std::size_t>> neighbours;
};

// theta = (i/n1, j/n2); neighbours wrap around the torus.
inline ThetaGrid uniform_grid(int n1, int n2) {
  require(n1 >= 1 && n2 >= 1, "theta grid dimensions must be positive");
  ThetaGrid g;
  g.n1 = n1;
  g.n2 = n2;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) g.points.emplace_back(static_cast<double>(i) / n1, static_cast<double>(j) / n2);
  auto at = [&](int i, int j) { return static_cast<std::size_t>(((i + n1) % n1) * n2 + (j + n2) % n2); };
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      if (n1 > 1) g.neighbours.emplace_back(at(i, j), at(i + 1, j));
      if (n2 > 1) g.neighbours.emplace_back(at(i, j), at(i, j + 1));
    }
  return g;
}

// Gamma - X - M - Gamma with `per_segment` steps on each leg (closing Gamma included).
inline ThetaGrid symmetry_path(int per_segment) {
  require(per_segment >= 1, "path needs at least one step per segment");
  const Vec2 corners[4] = {{0.0, 0.0}, {0.5, 0.0}, {0.5, 0.5}, {0.0, 0.0}};
  ThetaGrid g;
  g.kind = "path";
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < per_segment; ++i) {
      double t = static_cast<double>(i) / per_segment;
      g.points.emplace_back(corners[s][0] + t * (corners[s + 1][0] - corners[s][0]),
                            corners[s][1] + t * (corners[s + 1][1] - corners[s][1]));
    }
  g.points.emplace_back(0.0, 0.0);
  g.n1 = static_cast<int>(g.points.size());
  g.n2 = 1;
  for (std::size_t i = 0; i + 1 < g.points.size(); ++i) g.neighbours.emplace_back(i, i + 1);
  return g;
}

struct BandStructure {
  std::string solver;
  ThetaGrid grid;
  std::vector<std::vector<double>> values;       // per theta, ascending
  std::vector<std::array<double, 2>> extents;    // per band [min, max]

  std::size_t bands() const { return extents.size(); }
};

// Extents over the common band count.
inline void compute_extents(BandStructure& bs) {
  require(!bs.values.empty(), "band structure has no theta points");
  std::size_t nb = std::numeric_limits<std::size_t>::max();
  for (const auto& v : bs.values) nb = std::min(nb, v.size());
  bs.extents.assign(nb, {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (const auto& v : bs.values)
    for (std::size_t i = 0; i < nb; ++i) {
      bs.extents[i][0] = std::min(bs.extents[i][0], v[i]);
      bs.extents[i][1] = std::max(bs.extents[i][1], v[i]);
    }
}

using ThetaSolver = std::function<std::vector<double>(const BlochTheta&)>;

// Runs `task(i)` for i < n on at most `jobs` threads.  Failures are collected and rethrown together.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::vector<std::pair<std::size_t, std::string>> failures;
  ErrorKind first = ErrorKind::eigensolver;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(mu);
        if (failures.empty()) first = e.kind();
        failures.emplace_back(i, e.what());
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        failures.emplace_back(i, e.what());
      }
    }
  };
  const int nt = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failures.empty()) return;
  std::sort(failures.begin(), failures.end());
  std::string msg = std::to_string(failures.size()) + " task(s) failed:";
  for (const auto& [i, what] : failures) msg += "\n  [" + std::to_string(i) + "] " + what;
  throw Error(first, msg);
}

inline BandStructure sweep(const std::string& solver, const ThetaGrid& grid, const ThetaSolver& fn, int jobs = 1) {
  BandStructure bs;
  bs.solver = solver;
  bs.grid = grid;
  bs.values.resize(grid.points.size());
  parallel_for(grid.points.size(), jobs, [&](std::size_t i) { bs.values[i] = fn(grid.points[i]); });
  compute_extents(bs);
  return bs;
}

inline ThetaSolver limit_solver(const CellSpec& cell, Eigen::Index k_max, const Resolution& res) {
  return [=](const BlochTheta& t) { return solve_limit_spectrum(t, cell, k_max, res).eigenvalues; };
}

inline ThetaSolver epsilon_solver(double eps, const CellSpec& cell, Eigen::Index k_max, const Resolution& res) {
  return [=](const BlochTheta& t) { return solve_epsilon_spectrum(eps, t, cell, k_max, res).eigenvalues; };
}

struct GapRecord {
  std::size_t band = 0;  // gap above band `band` (1-based)
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
  double relative_width() const { return 2.0 * width() / (upper + lower); }
};

inline std::vector<GapRecord> detect_gaps(const std::vector<std::array<double, 2>>& extents) {
  std::vector<GapRecord> out;
  for (std::size_t i = 0; i + 1 < extents.size(); ++i)
    if (extents[i][1] < extents[i + 1][0]) out.push_back({i + 1, extents[i][1], extents[i + 1][0]});
  return out;
}

inline std::vector<GapRecord> detect_gaps(const BandStructure& bs) { return detect_gaps(bs.extents); }

// Union of the first k_max values over all theta, restricted to [0, window].
inline std::vector<double> spectrum_points(const BandStructure& bs, std::size_t k_max, double window) {
  std::vector<double> pts;
  for (const auto& v : bs.values)
    for (std::size_t i = 0; i < std::min(k_max, v.size()); ++i)
      if (v[i] <= window) pts.push_back(v[i]);
  std::sort(pts.begin(), pts.end());
  return pts;
}

inline double default_window(const BandStructure& limit) {
  require(limit.bands() >= 4, "the default window needs four bands");
  return 1.5 * limit.extents[3][1];
}

inline double hausdorff_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::empty_window, "window too small: empty point set");
  std::vector<double> sb = b, sa = a;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  auto one_sided = [](const std::vector<double>& from, const std::vector<double>& to) {
    double h = 0.0;
    for (double x : from) {
      auto it = std::lower_bound(to.begin(), to.end(), x);
      double d = std::numeric_limits<double>::infinity();
      if (it != to.end()) d = *it - x;
      if (it != to.begin()) d = std::min(d, x - *std::prev(it));
      h = std::max(h, d);
    }
    return h;
  };
  return std::max(one_sided(sa, sb), one_sided(sb, sa));
}

struct ContinuityReport {
  std::size_t band = 0;
  double median_increment = 0.0;
  double max_increment = 0.0;
  double ratio() const { return max_increment / std::max(median_increment, 1e-12 * (1.0 + max_increment)); }
};

// Increments of each band between neighbouring grid points.
inline std::vector<ContinuityReport> band_continuity(const BandStructure& bs, std::size_t k_max) {
  std::vector<ContinuityReport> out;
  for (std::size_t k = 0; k < std::min(k_max, bs.bands()); ++k) {
    std::vector<double> inc;
    for (auto [i, j] : bs.grid.neighbours) inc.push_back(std::abs(bs.values[i][k] - bs.values[j][k]));
    ContinuityReport r;
    r.band = k + 1;
    if (!inc.empty()) {
      std::vector<double> s = inc;
      std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
      r.median_increment = s[s.size() / 2];
      r.max_increment = *std::max_element(inc.begin(), inc.end());
    }
    out.push_back(r);
  }
  return out;
}

struct OmegaKPair {
  double eps = 0.0;
  double omega2 = 0.0;
  double k2 = 0.0;
};

struct OmegaKRegion {
  GapRecord gap;
  double eps_lo = 0.0, eps_hi = 0.0;
  std::vector<OmegaKPair> pairs;
};

// Pairs (omega^2, omega^2 mu (eps1 - eps^2)) with omega^2 in the open gap, on an n_omega x n_eps sample.
inline OmegaKRegion map_gap_to_omega_k(const GapRecord& gap, const CellSpec& cell, double eps_lo, double eps_hi,
                                       int n_omega = 11, int n_eps = 5) {
  validate(cell);
  require(gap.width() > 0.0, "gap width must be positive");
  require(eps_lo > 0.0 && eps_lo <= eps_hi && eps_hi <= max_epsilon(cell),
          "eps range must lie in (0, 0.5 min(sqrt(eps1), sqrt(eps0 - eps1))]");
  require(n_omega >= 1 && n_eps >= 1, "sample counts must be positive");
  OmegaKRegion r;
  r.gap = gap;
  r.eps_lo = eps_lo;
  r.eps_hi = eps_hi;
  for (int e = 0; e < n_eps; ++e) {
    double eps = n_eps == 1 ? eps_lo : eps_lo + (eps_hi - eps_lo) * e / (n_eps - 1);
    for (int w = 0; w < n_omega; ++w) {
      double om2 = gap.lower + gap.width() * (w + 1.0) / (n_omega + 1.0);
      OmegaKPair p{eps, om2, om2 * cell.mu * (cell.eps1 - eps * eps)};
      if (!(p.k2 < om2 * cell.mu * cell.eps1))
        throw Error(ErrorKind::invalid_argument, "emitted pair is not subcritical");
      r.pairs.push_back(p);
    }
  }
  return r;
}

// Slab bands over theta1 in [0,1) on n points; thetas stored as (theta1, 0).
inline BandStructure slab_band_structure(const SlabProblem& p, int n, const SlabTraceOptions& opt = {},
                                         int jobs = 1, std::vector<std::string>* warnings = nullptr) {
  require(n >= 2, "slab sweep needs at least two theta1 points");
  p.validate();
  BandStructure bs;
  bs.solver = "slab1d";
  bs.grid = uniform_grid(n, 1);
  bs.grid.kind = "slab";
  std::vector<SlabRoots> roots(bs.grid.points.size());
  parallel_for(roots.size(), jobs, [&](std::size_t i) { roots[i] = slab_roots(bs.grid.points[i][0], p, opt); });
  for (const SlabRoots& r : roots) {
    bs.values.push_back(r.roots);
    if (warnings) warnings->insert(warnings->end(), r.warnings.begin(), r.warnings.end());
  }
  compute_extents(bs);
  return bs;
}

struct ConvergenceStudy {
  BandStructure limit;
  std::vector<double> eps;
  std::vector<BandStructure> eps_bands;
  std::vector<double> distances;
  double window = 0.0;
  std::size_t k_max = 0;
};

// Limit and epsilon spectra on a shared field system per theta (identical cutoffs on both sides).
inline ConvergenceStudy convergence_study(const CellSpec& cell, const ThetaGrid& grid, const std::vector<double>& eps,
                                          std::size_t k_max, const Resolution& res, double window = 0.0,
                                          int jobs = 1) {
  validate(cell);
  require(!eps.empty(), "convergence study needs at least one eps");
  for (double e : eps) EpsilonTensors::make(e, cell);
  const std::size_t nt = grid.points.size();
  std::vector<std::vector<double>> lim(nt);
  std::vector<std::vector<std::vector<double>>> ev(eps.size(), std::vector<std::vector<double>>(nt));
  parallel_for(nt, jobs, [&](std::size_t i) {
    auto fs = std::make_shared<FieldSystem>(
        build_field_system(Lattice{grid.points[i], {1, 1}}, cell.geometry, detail::epsilon_options(res)));
    ConstrainedBasis b = constrained_basis(fs, res.gram_threshold);
    lim[i] = solve_limit_on(b, cell, static_cast<Eigen::Index>(k_max)).eigenvalues;
    std::vector<Eigen::Index> all = fs->select(true, true);
    for (std::size_t e = 0; e < eps.size(); ++e)
      ev[e][i] = solve_epsilon_on(*fs, all, eps[e], cell, static_cast<Eigen::Index>(k_max), res).eigenvalues;
  });
  ConvergenceStudy s;
  s.eps = eps;
  s.k_max = k_max;
  s.limit.solver = "limit";
  s.limit.grid = grid;
  s.limit.values = std::move(lim);
  compute_extents(s.limit);
  s.window = window > 0.0 ? window : default_window(s.limit);
  std::vector<double> ref = spectrum_points(s.limit, k_max, s.window);
  for (std::size_t e = 0; e < eps.size(); ++e) {
    BandStructure b;
    b.solver = "epsilon";
    b.grid = grid;
    b.values = std::move(ev[e]);
    compute_extents(b);
    s.distances.push_back(hausdorff_distance(spectrum_points(b, k_max, s.window), ref));
    s.eps_bands.push_back(std::move(b));
  }
  return s;
}

}  // namespace pcf
