#include "catch_amalgamated.hpp"

#include "helpers.hpp"

using namespace pcf;
using Catch::Approx;
using testing_util::random_field;

namespace {

CellSpec disc_cell(double r) {
  CellSpec c;
  c.geometry = Disc{r};
  return c;
}

Resolution res(int M, int m, int pw = -1) {
  Resolution r;
  r.cutoff = M;
  r.source_cutoff = m;
  r.pw_cutoff = pw;
  return r;
}

}  // namespace

TEST_CASE("coupling tensor is a null Lagrangian on periodic fields") {
  std::mt19937 rng(11);
  CellSpec cell = disc_cell(0.3);
  for (BlochTheta t : {BlochTheta{}, BlochTheta(0.5, 0.5), BlochTheta(0.2, 0.7)}) {
    FourierField u = random_field(t, 6, 2, 4, rng);
    cplx full = tensor_form(u, u, coupling_J(), coupling_J(), cell.geometry);
    double scale = tensor_form(u, u, Mat4::Identity(), Mat4::Identity(), cell.geometry).real();
    CHECK(std::abs(full) < 1e-12 * scale);
  }
  Mat4 J = coupling_J();
  CHECK((J - J.transpose()).norm() == 0.0);
  CHECK((J * J - Mat4::Identity()).norm() == 0.0);
}

TEST_CASE("guard on eps") {
  CellSpec cell = disc_cell(0.3);
  CHECK(max_epsilon(cell) == 0.5);
  CHECK_THROWS_AS(EpsilonTensors::make(0.6, cell), Error);
  CHECK_THROWS_AS(EpsilonTensors::make(0.0, cell), Error);
  CHECK_THROWS_AS(solve_epsilon_spectrum(0.51, BlochTheta(0.5, 0.5), cell, 2, res(8, 1)), Error);
  EpsilonTensors t = EpsilonTensors::make(0.1, cell);
  CHECK(t.s == Approx(std::sqrt(0.99)).epsilon(1e-15));
  CHECK(t.alpha1 == Approx(100.0).epsilon(1e-13));
  CHECK(t.alpha0 == Approx(1.0 / 1.01).epsilon(1e-13));
}

TEST_CASE("assembled forms against the direct tensor quadrature") {
  CellSpec cell = disc_cell(0.3);
  const double eps = 0.2;
  EpsilonTensors t = EpsilonTensors::make(eps, cell);
  for (BlochTheta th : {BlochTheta(0.5, 0.25), BlochTheta{}}) {
    FieldSystem fs = build_field_system(Lattice{th, {1, 1}}, cell.geometry, {12, -1, 1});
    std::vector<Eigen::Index> idx = fs.select(true, false);
    FormPair f = epsilon_forms(fs, idx, t, cell);
    double worst = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) {
        FourierField ui = field_of(fs, idx[i]), uj = field_of(fs, idx[j]);
        cplx direct = t.alpha1 * tensor_form(uj, ui, t.A1, Mat4::Zero(), cell.geometry) +
                      t.alpha0 * tensor_form(uj, ui, Mat4::Zero(), t.A0, cell.geometry);
        worst = std::max(worst, std::abs(f.K(i, j) - direct));
      }
    INFO("theta " << th[0] << "," << th[1] << " worst entry difference " << worst);
    CHECK(worst < 1e-9 * f.K.norm());
  }
}

TEST_CASE("tensor expansion error is fourth order in eps") {
  std::mt19937 rng(12);
  CellSpec cell = disc_cell(0.3);
  FourierField u = random_field(BlochTheta(0.3, 0.6), 6, 2, 3, rng);
  double r1 = expansion_residual(u, 0.2, cell), r2 = expansion_residual(u, 0.1, cell), r3 = expansion_residual(u, 0.05, cell);
  double s1 = std::log(r1 / r2) / std::log(2.0), s2 = std::log(r2 / r3) / std::log(2.0);
  INFO("residuals " << r1 << " " << r2 << " " << r3);
  CHECK(s1 == Approx(4.0).margin(0.2));
  CHECK(s2 == Approx(4.0).margin(0.1));
}

TEST_CASE("constants at theta = 0") {
  CellSpec cell = disc_cell(0.3);
  EpsilonAssembly a = assemble_epsilon_forms(0.1, BlochTheta{}, cell, res(8, 1, 2));
  std::vector<Eigen::Index> consts;
  for (std::size_t i = 0; i < a.fields.size(); ++i)
    if (a.system->labels[a.fields[i]].kind == FieldKind::constant) consts.push_back(static_cast<Eigen::Index>(i));
  REQUIRE(consts.size() == 2);
  for (Eigen::Index c : consts) CHECK(a.forms.K.row(c).norm() == 0.0);
  Spectrum s = solve_epsilon_spectrum(0.1, BlochTheta{}, cell, 3, res(8, 1, 2));
  CHECK(std::abs(s.eigenvalues[0]) < 1e-8);
  CHECK(std::abs(s.eigenvalues[1]) < 1e-8);
  CHECK(s.eigenvalues[2] > 1.0);
}

TEST_CASE("epsilon spectra approach the limit spectrum") {
  CellSpec cell = disc_cell(0.3);
  const BlochTheta t(0.5, 0.5);
  Resolution r = res(16, 3, 3);
  Spectrum lim = solve_limit_spectrum(t, cell, 4, r);
  std::vector<double> err, energy;
  for (double eps : {0.2, 0.1, 0.05}) {
    FieldSystem fs = build_field_system(Lattice{t, {1, 1}}, cell.geometry, detail::epsilon_options(r));
    std::vector<Eigen::Index> idx = fs.select(true, true);
    Spectrum s = solve_epsilon_on(fs, idx, eps, cell, 4, r);
    double e = 0.0;
    for (int k = 0; k < 4; ++k) e = std::max(e, std::abs(s.eigenvalues[k] - lim.eigenvalues[k]));
    double w = degenerate_energy(fs, idx, s.eigenvectors.col(0));
    INFO("eps " << eps << " max |lambda_eps - lambda_lim| " << e << " degenerate energy " << w);
    err.push_back(e);
    energy.push_back(w);
  }
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
  CHECK(energy[1] < energy[0]);
  CHECK(energy[2] < energy[1]);
}
