// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "pcf/pcf.hpp"

using namespace pcf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

FourierField random_field(const BlochTheta& t, int cutoff, int comps, std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  FourierField f(t, cutoff, comps);
  for (Eigen::Index q = 0; q < f.box.size(); ++q)
    for (int c = 0; c < comps; ++c) f.coeffs(q, c) = {n(rng), n(rng)};
  return f;
}

Resolution res(int M, int m, int pw = -1) {
  Resolution r;
  r.cutoff = M;
  r.source_cutoff = m;
  r.pw_cutoff = pw;
  return r;
}

CellSpec disc_cell(double r) {
  CellSpec c;
  c.geometry = Disc{r};
  return c;
}

std::string str(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// 1. grad:grad identity
Outcome identity() {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    FourierField v = random_field(BlochTheta(u(rng), u(rng)), 8, 2, rng);
    double g = 0.0;
    for (int a = 0; a < 2; ++a) g += std::pow(l2_norm(grad(v.component(a))), 2);
    double d = std::pow(l2_norm(div(v)), 2) + std::pow(l2_norm(div_perp(v)), 2);
    worst = std::max(worst, std::abs(g - d) / g);
  }
  return {worst < 1e-12, "max relative error " + str(worst) + " over 1000 fields (tol 1e-12)"};
}

// 2. Laplace solve H2 bound
Outcome laplace() {
  std::mt19937 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    BlochTheta t(u(rng), u(rng));
    FourierField f = random_field(t, 16, 1, rng);
    double ratio = h2_norm(laplace_solve(f)) / (laplace_bound(t) * l2_norm(f));
    worst = std::max(worst, ratio);
    if (ratio > 1.0) ++bad;
  }
  return {bad == 0, std::to_string(bad) + " violations in 100 pairs, max ||u||_H2 / bound = " + str(worst)};
}

// 3. kernel of the limit operator at theta = 0
Outcome kernel() {
  double worst = 0.0;
  for (InclusionGeometry g : {InclusionGeometry{Disc{0.3}}, InclusionGeometry{Slab{0.25, 0.75}}}) {
    CellSpec cell;
    cell.geometry = g;
    Spectrum s = solve_limit_spectrum(BlochTheta{}, cell, 3, res(32, 4));
    worst = std::max({worst, std::abs(s.eigenvalues[0]), std::abs(s.eigenvalues[1])});
  }
  return {worst < 1e-8, "max |lambda_1,2(0)| = " + str(worst) + " for disc and slab at cutoff 32 (tol 1e-8)"};
}

// 4. folding into the (2,1) multicell
Outcome folding() {
  CellSpec cell = disc_cell(0.3);
  Resolution r = res(16, 3);
  Spectrum half = solve_limit_spectrum(BlochTheta(0.5, 0.0), cell, 6, r);
  Spectrum multi = solve_multicell_spectrum({2, 1}, cell, 16, r);
  double worst = 0.0;
  for (double l : half.eigenvalues) {
    double best = std::numeric_limits<double>::infinity();
    for (double m : multi.eigenvalues) best = std::min(best, std::abs(l - m) / std::max(std::abs(l), 1.0));
    worst = std::max(worst, best);
  }
  return {worst < 1e-4, "max relative mismatch " + str(worst) + " over the first 6 eigenvalues (tol 1e-4)"};
}

// 5. Hausdorff convergence of the epsilon spectra
Outcome hausdorff() {
  ConvergenceStudy st =
      convergence_study(disc_cell(0.3), uniform_grid(8, 8), {0.2, 0.1, 0.05}, 4, res(16, 3, 3));
  bool dec = st.distances[1] < st.distances[0] && st.distances[2] < st.distances[1];
  double top = st.limit.extents[3][1];
  bool small = st.distances[2] < 0.05 * top;
  std::string d = "distances " + str(st.distances[0]) + ", " + str(st.distances[1]) + ", " + str(st.distances[2]) +
                  "; band-4 top " + str(top) + " (final < 5% = " + str(0.05 * top) + ")";
  return {dec && small, d};
}

// 6. disc integral by the direct solve and by g0
Outcome disc_dual() {
  DiscIntegral d = disc_integral_u(0.1, BlochTheta(0.5, 0.5), 64);
  double rel = std::abs(d.lhs - d.rhs) / std::abs(d.rhs);
  return {rel < 1e-2, "lhs " + str(d.lhs) + ", rhs " + str(d.rhs) + ", relative difference " + str(rel) + " (tol 1e-2)"};
}

// 7. derivative of g0 in k
Outcome derivative() {
  double worst = 0.0;
  bool positive = true;
  for (BlochTheta t : {BlochTheta(0.5, 0.5), BlochTheta(0.3, 0.5), BlochTheta(0.25, 0.1)})
    for (double k : {-1.0, -0.5, -0.1}) {
      DerivativeIdentity d = green_derivative_identity(t, k);
      positive = positive && d.finite_difference > 0.0;
      worst = std::max(worst, std::abs(d.finite_difference - d.spectral_sum) / d.spectral_sum);
    }
  return {positive && worst < 1e-2,
          "max relative difference " + str(worst) + " over 9 samples (tol 1e-2), all positive: " +
              (positive ? "yes" : "no")};
}

// 8. ARROW gap for delta = 0.05
Outcome arrow() {
  const double delta = 0.05;
  CellSpec cell = disc_cell(delta);
  ThetaGrid grid = uniform_grid(4, 4);
  ArrowBoundsReport rep = arrow_bounds(cell, grid.points);
  const double neumann = rep.mu2 / (delta * delta);
  BandStructure bs = sweep("limit", grid, limit_solver(cell, 4, res(16, 3)));
  bool direct = false;
  for (const GapRecord& g : detect_gaps(bs)) direct |= g.band == 2;
  bool bound = rep.max_lambda2_upper < neumann;
  return {bound && direct, "max lambda2 upper bound " + str(rep.max_lambda2_upper) + " vs mu2 delta^-2 " + str(neumann) +
                               "; direct sweep band 2 top " + str(bs.extents[1][1]) + ", band 3 bottom " +
                               str(bs.extents[2][0])};
}

// 9. one-dimensional slab
Outcome slab() {
  SlabProblem p;
  BandStructure bs = slab_band_structure(p, 40);
  bool zero = std::abs(bs.values[0][0]) < 1e-9;
  double ratio = 0.0;
  for (const ContinuityReport& c : band_continuity(bs, bs.bands())) ratio = std::max(ratio, c.ratio());
  // block union against a finer scan of the full 10x10 system
  double split = 0.0;
  bool counts = true;
  SlabTraceOptions fine;
  fine.step = 0.0125;
  for (double t : {0.0, 0.25, 0.5, 0.75}) {
    std::vector<double> blocks = slab_roots(t, p).roots;
    auto sv = [&](double x) -> RVec { return singular_values(build_M(x, t, p)); };
    std::vector<double> full = detail::scan_roots(sv, fine, fine.step);
    if (full.size() != blocks.size()) {
      counts = false;
      continue;
    }
    for (std::size_t i = 0; i < full.size(); ++i) split = std::max(split, std::abs(full[i] - blocks[i]) / (1.0 + full[i]));
  }
  std::vector<GapRecord> gaps = detect_gaps(bs);
  const double golden[2][2] = {{18.554521318321196, 39.47841760435744}, {83.82718880312841, 157.9136704174297}};
  bool edges = gaps.size() >= 2;
  double edge_err = 0.0;
  for (std::size_t i = 0; edges && i < 2; ++i) {
    edge_err = std::max({edge_err, std::abs(gaps[i].lower / golden[i][0] - 1.0), std::abs(gaps[i].upper / golden[i][1] - 1.0)});
  }
  edges = edges && edge_err < 1e-6;
  bool pass = zero && ratio <= 10.0 && counts && split < 1e-8 && edges;
  return {pass, "zero root " + std::string(zero ? "yes" : "no") + ", continuity ratio " + str(ratio) +
                    ", block/full mismatch " + str(split) + (counts ? "" : " (count differs)") + ", " +
                    std::to_string(gaps.size()) + " gaps, edge error " + str(edge_err) + " (tol 1e-6)"};
}

// 10. continuity over a 16x16 grid
Outcome continuity() {
  BandStructure bs = sweep("limit", uniform_grid(16, 16), limit_solver(disc_cell(0.3), 6, res(16, 3)));
  double worst = 0.0;
  for (const ContinuityReport& c : band_continuity(bs, 6)) worst = std::max(worst, c.ratio());
  return {worst <= 10.0, "max (largest / median increment) over bands 1-6 = " + str(worst) + " (limit 10)"};
}

// 11. transverse recovery satisfies the six first-order equations
Outcome maxwell() {
  CellSpec cell;
  double worst = 0.0;
  for (BlochTheta t : {BlochTheta(0.25, 0.0), BlochTheta(0.1, 0.7)})
    for (auto [z1, z2] : {std::pair{1, 0}, std::pair{-1, 2}, std::pair{0, 0}}) {
      FourierField E3 = single_mode(t, 3, z1, z2, {0.3, -0.7});
      FourierField H3 = single_mode(t, 3, z1, z2, {1.1, 0.2});
      double lam = 4.0 * pi * pi * (std::pow(t[0] + z1, 2) + std::pow(t[1] + z2, 2));
      // tune the phase: eps omega^2 mu - k^2 = lam with k^2 = 1
      auto m = maxwell_residuals(E3, H3, DispersionPair{(lam + 1.0) / cell.eps1, 1.0}, cell, 24, 1);
      auto i = maxwell_residuals(E3, H3, DispersionPair{(lam + 1.0) / cell.eps0, 1.0}, cell, 24, 0);
      for (double r : m) worst = std::max(worst, r);
      for (double r : i) worst = std::max(worst, r);
      TransverseFields tf = recover_transverse(E3, H3, DispersionPair{(lam + 1.0) / cell.eps1, 1.0}, cell, 24);
      if (!tf.E1.allFinite()) worst = std::numeric_limits<double>::infinity();
    }
  return {worst < 1e-10, "max relative residual " + str(worst) + " (tol 1e-10)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"grad identity", identity},
      {"laplace bound", laplace},
      {"limit kernel", kernel},
      {"spectral folding", folding},
      {"hausdorff convergence", hausdorff},
      {"disc integral dual route", disc_dual},
      {"g0 derivative", derivative},
      {"arrow gap", arrow},
      {"slab 1d", slab},
      {"eigenvalue continuity", continuity},
      {"maxwell reduction", maxwell}};
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %2zu %-26s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first.c_str(),
                o.detail.c_str(), sec);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, checks.size());
  return failed == 0 ? 0 : 1;
}
