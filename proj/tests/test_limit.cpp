#include "catch_amalgamated.hpp"

#include "helpers.hpp"

using namespace pcf;
using Catch::Approx;

namespace {

CellSpec disc_cell(double r) {
  CellSpec c;
  c.geometry = Disc{r};
  return c;
}

Resolution res(int M, int m) {
  Resolution r;
  r.cutoff = M;
  r.source_cutoff = m;
  return r;
}

}  // namespace

TEST_CASE("basis at theta = 0 carries the constants") {
  CellSpec cell = disc_cell(0.3);
  ConstrainedBasis b = build_V_basis(BlochTheta{}, cell, 8, 1);
  const auto& labels = b.system->labels;
  std::vector<Eigen::Index> consts;
  for (std::size_t i = 0; i < b.fields.size(); ++i)
    if (labels[b.fields[i]].kind == FieldKind::constant) consts.push_back(static_cast<Eigen::Index>(i));
  REQUIRE(consts.size() == 2);
  // chi0 itself only serves to remove the means: 2 ((2m+1)^2 - 1) sources plus 2 constants
  CHECK(b.raw() == 18);
  FormPair f = assemble_limit_forms(b, cell);
  const double g = gamma(cell), area = pi * 0.09;
  for (Eigen::Index c : consts) CHECK(f.K.row(c).norm() + f.K.col(c).norm() == 0.0);
  CHECK(f.B(consts[0], consts[0]).real() == Approx(cell.eps1 * (1.0 + g * area)).epsilon(1e-13));
  CHECK(f.B(consts[1], consts[1]).real() == Approx(cell.eps1).epsilon(1e-13));
  CHECK((f.K - f.K.adjoint()).norm() < 1e-12 * f.K.norm());
  CHECK((f.B - f.B.adjoint()).norm() < 1e-12 * f.B.norm());
}

TEST_CASE("single source pair satisfies the constraints up to truncation") {
  CellSpec cell = disc_cell(0.3);
  std::vector<double> worst;
  for (int M : {8, 16, 32}) {
    ConstrainedBasis b = build_V_basis(BlochTheta(0.5, 0.5), cell, M, 0);
    REQUIRE(b.raw() == 2);
    double w = 0.0;
    for (Eigen::Index i = 0; i < b.raw(); ++i) {
      auto r = constraint_residual(*b.system, cell.geometry, b.fields[i]);
      w = std::max({w, r[0], r[1]});
    }
    INFO("cutoff " << M << " constraint residual " << w);
    worst.push_back(w);
  }
  CHECK(worst.back() < worst.front());
  CHECK(worst.back() < 0.1);
}

TEST_CASE("raw and retained counts") {
  CellSpec cell = disc_cell(0.3);
  ConstrainedBasis b = build_V_basis(BlochTheta(0.5, 0.5), cell, 16, 2);
  CHECK(b.raw() == 50);
  CHECK(b.retained() == 50);
  ConstrainedBasis b0 = build_V_basis(BlochTheta{}, cell, 16, 2);
  CHECK(b0.raw() == 50);
  CHECK(b0.retained() == 50);
}

TEST_CASE("single-source forms against real-space quadrature") {
  CellSpec cell = disc_cell(0.25);
  const int M = 32;
  ConstrainedBasis b = build_V_basis(BlochTheta(0.5, 0.0), cell, M, 0);
  REQUIRE(b.raw() == 2);
  FormPair f = assemble_limit_forms(b, cell);
  // frozen assembly
  CHECK(f.K(0, 0).real() == Approx(0.31964993125336572).epsilon(1e-10));
  CHECK(f.K(1, 1).real() == Approx(0.26939869129472049).epsilon(1e-10));
  CHECK(f.B(0, 0).real() == Approx(0.008873654859315315).epsilon(1e-10));
  CHECK(f.B(1, 1).real() == Approx(0.0080247353703714174).epsilon(1e-10));

  // oracle: evaluate the truncated fields pointwise on a 1024^2 grid, chi0 from the geometry
  const int G = 1024;
  const double g = gamma(cell);
  std::vector<std::vector<CMat>> val(2), d1(2), d2(2);
  for (int i = 0; i < 2; ++i) {
    FourierField u = b.field(i);
    val[i] = evaluate_grid(u, G);
    for (int c = 0; c < 2; ++c) {
      d1[i].push_back(evaluate_grid(partial(u.component(c), 0), G)[0]);
      d2[i].push_back(evaluate_grid(partial(u.component(c), 1), G)[0]);
    }
  }
  Eigen::MatrixXd chi(G, G);
  for (int r = 0; r < G; ++r)
    for (int s = 0; s < G; ++s) chi(r, s) = inside(cell.geometry, double(r) / G, double(s) / G) ? 1.0 : 0.0;
  auto mean = [&](const CMat& a, const CMat& bb) { return (a.cwiseProduct(bb.conjugate())).sum() / double(G * G); };
  auto masked = [&](const CMat& a, const CMat& bb) {
    return (a.cwiseProduct(bb.conjugate()).cwiseProduct(chi.cast<cplx>())).sum() / double(G * G);
  };
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CMat divj = d1[j][0] + d2[j][1], divi = d1[i][0] + d2[i][1];
      CMat dpj = -d1[j][1] + d2[j][0], dpi = -d1[i][1] + d2[i][0];
      cplx K = mean(d1[j][0], d1[i][0]) + mean(d2[j][0], d2[i][0]) + (mean(divj, divi) + mean(dpj, dpi)) / g;
      cplx B = cell.eps1 * (mean(val[j][0], val[i][0]) + mean(val[j][1], val[i][1]) +
                            g * masked(val[j][0], val[i][0]));
      INFO("entry " << i << j << " K " << f.K(i, j) << " vs " << K << ", B " << f.B(i, j) << " vs " << B);
      double ks = std::abs(f.K(0, 0)), bs = std::abs(f.B(0, 0));
      CHECK(std::abs(f.K(i, j) - K) < 2e-2 * ks);
      CHECK(std::abs(f.B(i, j) - B) < 2e-3 * bs);
    }
}

TEST_CASE("limit kernel at theta = 0") {
  for (InclusionGeometry g : {InclusionGeometry{Disc{0.3}}, InclusionGeometry{Slab{0.25, 0.75}}}) {
    CellSpec cell;
    cell.geometry = g;
    Spectrum s = solve_limit_spectrum(BlochTheta{}, cell, 4, res(16, 2));
    CHECK(std::abs(s.eigenvalues[0]) < 1e-8);
    CHECK(std::abs(s.eigenvalues[1]) < 1e-8);
    CHECK(s.eigenvalues[2] > 1.0);
  }
}

TEST_CASE("scaling invariance") {
  CellSpec a = disc_cell(0.3), b = a;
  b.eps0 *= 2.0;
  b.eps1 *= 2.0;
  Spectrum sa = solve_limit_spectrum(BlochTheta(0.3, 0.1), a, 5, res(12, 2));
  Spectrum sb = solve_limit_spectrum(BlochTheta(0.3, 0.1), b, 5, res(12, 2));
  for (int k = 0; k < 5; ++k) CHECK(sb.eigenvalues[k] == Approx(sa.eigenvalues[k] / 2.0).epsilon(1e-10));
}

TEST_CASE("self-convergence against a fine run") {
  // cutoff 64, source cutoff 6
  const double fine = 143.8676854986841;
  Spectrum s = solve_limit_spectrum(BlochTheta(0.5, 0.5), disc_cell(0.1), 2, res(32, 4));
  CHECK(std::abs(s.eigenvalues[0] - fine) < 1e-3 * fine);
  CHECK(s.eigenvalues[0] <= fine * (1.0 + 1e-12) + 1.0);
}

TEST_CASE("variational monotonicity in the source cutoff") {
  CellSpec cell = disc_cell(0.3);
  std::vector<double> prev;
  for (int m = 0; m <= 3; ++m) {
    Spectrum s = solve_limit_spectrum(BlochTheta(0.25, 0.5), cell, 2, res(12, m));
    if (!prev.empty())
      for (int k = 0; k < 2; ++k) CHECK(s.eigenvalues[k] <= prev[k] * (1.0 + 1e-10));
    prev = s.eigenvalues;
  }
}

TEST_CASE("multicell equivalence and folding") {
  CellSpec cell = disc_cell(0.3);
  Resolution r = res(8, 2);
  Spectrum p = solve_limit_spectrum(BlochTheta{}, cell, 6, r);
  Spectrum n11 = solve_multicell_spectrum({1, 1}, cell, 6, r);
  for (int k = 0; k < 6; ++k) CHECK(std::abs(p.eigenvalues[k] - n11.eigenvalues[k]) < 1e-10 * (1.0 + p.eigenvalues[k]));

  // N = (2,2): counts in [0, L] add over the quarter points
  std::vector<double> all;
  for (auto t : {BlochTheta{}, BlochTheta(0.5, 0.0), BlochTheta(0.0, 0.5), BlochTheta(0.5, 0.5)}) {
    Spectrum s = solve_limit_spectrum(t, cell, 8, r);
    all.insert(all.end(), s.eigenvalues.begin(), s.eigenvalues.end());
  }
  std::sort(all.begin(), all.end());
  Spectrum n22 = solve_multicell_spectrum({2, 2}, cell, 32, r);
  // cut between two well separated values of the union
  std::size_t cut = 0;
  double best = 0.0;
  for (std::size_t i = 4; i + 1 < 20; ++i)
    if (all[i + 1] - all[i] > best) best = all[i + 1] - all[i], cut = i;
  const double L = 0.5 * (all[cut] + all[cut + 1]);
  auto count = [&](const std::vector<double>& v) { return std::count_if(v.begin(), v.end(), [&](double x) { return x <= L; }); };
  CHECK(count(n22.eigenvalues) == static_cast<long>(cut + 1));
}
