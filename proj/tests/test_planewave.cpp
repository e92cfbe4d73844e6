#include <sstream>

#include "catch_amalgamated.hpp"

#include "helpers.hpp"

using namespace pcf;
using Catch::Approx;
using testing_util::random_field;

TEST_CASE("theta reduction") {
  BlochTheta t(1.25, -0.25);
  CHECK(t[0] == 0.25);
  CHECK(t[1] == 0.75);
  CHECK(BlochTheta(1.0, 2.0).is_zero());
  CHECK(BlochTheta(0.75, 0.5).centered()[0] == -0.25);
  CHECK(BlochTheta(0.9, 0.0).lattice_distance() == Approx(0.1));
}

TEST_CASE("laplace solve") {
  BlochTheta t(0.5, 0.0);
  FourierField f = single_mode(t, 3, 0, 0);
  FourierField u = laplace_solve(f);
  CHECK(std::abs(u.at(0, 0) - 1.0 / (pi * pi)) < 1e-15);

  FourierField one = single_mode(BlochTheta{}, 3, 0, 0);
  try {
    laplace_solve(one);
    FAIL("expected non-solvable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::non_solvable);
  }

  // exact inverse, zero mean at theta = 0
  std::mt19937 rng(1);
  FourierField g = random_field(BlochTheta{}, 6, 1, 6, rng);
  g.at(0, 0) = 0.0;
  FourierField w = laplace_solve(g);
  FourierField back = div(grad(w));
  CHECK((back.coeffs + g.coeffs).norm() < 1e-12 * g.coeffs.norm());
  CHECK(w.at(0, 0) == 0.0);

  // H2 bound at theta = (0.3, 0.7), cutoff 16
  BlochTheta s(0.3, 0.7);
  for (int trial = 0; trial < 20; ++trial) {
    FourierField h = random_field(s, 16, 1, 16, rng);
    CHECK(h2_norm(laplace_solve(h)) <= laplace_bound(s) * l2_norm(h));
  }
}

TEST_CASE("differential operators") {
  FourierField c(BlochTheta{}, 1, 2);
  c.at(0, 0, 0) = 1.0;
  FourierField p = perp(c);
  CHECK(p.at(0, 0, 0) == 0.0);
  CHECK(p.at(0, 0, 1) == 1.0);
  FourierField c2(BlochTheta{}, 1, 2);
  c2.at(0, 0, 1) = 1.0;
  CHECK(perp(c2).at(0, 0, 0) == -1.0);

  std::mt19937 rng(2);
  BlochTheta t(0.2, 0.45);
  FourierField f = random_field(t, 8, 1, 8, rng);
  CHECK(div(grad_perp(f)).coeffs.norm() < 1e-12 * h1_norm(f));
  FourierField v = random_field(t, 8, 2, 8, rng);
  CHECK((div_perp(v).coeffs - div(perp(v)).coeffs).norm() == 0.0);

  // grad u : grad u = |div u|^2 + |div u_perp|^2
  double g2 = 0.0;
  for (int a = 0; a < 2; ++a) g2 += std::pow(l2_norm(grad(v.component(a))), 2);
  double d2 = std::pow(l2_norm(div(v)), 2) + std::pow(l2_norm(div_perp(v)), 2);
  CHECK(std::abs(g2 - d2) < 1e-12 * g2);
}

TEST_CASE("Parseval against grid quadrature") {
  std::mt19937 rng(4);
  BlochTheta t(0.35, 0.6);
  FourierField f = random_field(t, 5, 1, 5, rng);
  const int G = 24;
  auto mean_sq = [&](const FourierField& h) {
    auto v = evaluate_grid(h, G);
    double s = 0.0;
    for (const auto& m : v) s += m.squaredNorm();
    return s / (G * G);
  };
  double l2 = mean_sq(f);
  CHECK(std::abs(l2 - std::pow(l2_norm(f), 2)) < 1e-10 * l2);
  double h1 = l2 + mean_sq(grad(f));
  CHECK(std::abs(h1 - std::pow(h1_norm(f), 2)) < 1e-10 * h1);
  // H2 with the (1 + lambda)^2 weight: |u|^2 + 2|grad u|^2 + |D^2 u|^2 summed by Parseval
  FourierField f1 = partial(f, 0), f2 = partial(f, 1);
  double hess = mean_sq(partial(f1, 0)) + 2.0 * mean_sq(partial(f1, 1)) + mean_sq(partial(f2, 1));
  double h2 = l2 + 2.0 * mean_sq(grad(f)) + hess;
  CHECK(std::abs(h2 - std::pow(h2_norm(f), 2)) < 1e-10 * h2);
}

TEST_CASE("shifted operator constant is uniform in theta") {
  std::mt19937 rng(6);
  double worst = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      if (i == 0 && j == 0) continue;
      Vec2 th = BlochTheta(i / 8.0, j / 8.0).centered();
      FourierField f = random_field(BlochTheta{}, 8, 1, 8, rng);
      f.at(0, 0) = 0.0;
      FourierField u = shifted_laplace_solve(f, th);
      CHECK((apply_shifted_operator(u, th).coeffs - f.coeffs).norm() < 1e-12 * f.coeffs.norm());
      worst = std::max(worst, h2_norm(u) / l2_norm(f));
    }
  INFO("worst H2/L2 ratio " << worst);
  // sup over centred theta of (1 + 4 pi^2 |z|^2) / (4 pi^2 |theta + z|^2) is about 4.10
  CHECK(worst < 4.11);
}

TEST_CASE("projection onto V") {
  InclusionGeometry g = Disc{0.3};
  FourierField c(BlochTheta{}, 8, 2);
  c.at(0, 0, 0) = 1.0;
  Projection pc = project_onto_V(c, g);
  CHECK((pc.v.coeffs - c.coeffs).norm() < 1e-12);

  // (sin 2 pi y1, 0): reference ||u - v||_H1 from a cutoff-128 run
  const double reference = 4.3313970372274886;
  std::vector<double> residual;
  double diff32 = 0.0;
  for (int M : {8, 16, 32}) {
    FourierField u(BlochTheta{}, M, 2);
    u.at(1, 0, 0) = cplx(0.0, -0.5);
    u.at(-1, 0, 0) = cplx(0.0, 0.5);
    Projection p = project_onto_V(u, g);
    FourierField d = u;
    d.coeffs -= p.v.coeffs;
    if (M == 32) diff32 = h1_norm(d);
    residual.push_back(matrix_divergence(p.v, g)[0]);
    auto before = matrix_divergence(u, g);
    double C = std::pow(h1_norm(d), 2) / (std::pow(before[0], 2) + std::pow(before[1], 2));
    INFO("cutoff " << M << " empirical projection constant " << C);
    CHECK(C < 10.0);
  }
  CHECK(std::abs(diff32 - reference) < 1e-3 * reference);
  CHECK(residual[1] < residual[0]);
  CHECK(residual[2] < residual[1]);

  // fields of the limit basis move by a truncation-sized amount that shrinks with the cutoff
  CellSpec cell;
  cell.geometry = g;
  double prev = 1.0;
  for (int M : {16, 32}) {
    ConstrainedBasis b = build_V_basis(BlochTheta{}, cell, M, 1);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < b.raw(); ++i) {
      FourierField u = b.field(i);
      FourierField d = u;
      d.coeffs -= project_onto_V(u, g).v.coeffs;
      worst = std::max(worst, h1_norm(d) / h1_norm(u));
    }
    INFO("cutoff " << M << " worst relative move " << worst);
    CHECK(worst < prev);
    CHECK(worst < 0.1);
    prev = worst;
  }

  FourierField q(BlochTheta(0.5, 0.0), 4, 2);
  CHECK_THROWS_AS(project_onto_V(q, g), Error);
}

TEST_CASE("field csv dump") {
  FourierField f = single_mode(BlochTheta(0.5, 0.0), 1, 1, -1, {0.5, -2.0});
  std::ostringstream os;
  write_csv(os, f);
  std::string s = os.str();
  CHECK(s.rfind("z1,z2,re,im\n", 0) == 0);
  CHECK(s.find("1,-1,0.5,-2\n") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 10);
}
