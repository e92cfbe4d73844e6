#pragma once

#include <array>

#include "fourier.hpp"
#include "geometry.hpp"
#include "toeplitz.hpp"

namespace pcf {

struct CellSpec {
  InclusionGeometry geometry = Disc{};
  double eps0 = 2.0;  // inclusion
  double eps1 = 1.0;  // matrix
  double mu = 1.0;
};

inline double gamma(const CellSpec& cell) {
  require(cell.eps1 > 0.0, "eps1 must be positive");
  require(cell.eps0 > cell.eps1, "high contrast requires eps0 > eps1");
  return cell.eps0 / cell.eps1 - 1.0;
}

inline void validate(const CellSpec& cell) {
  require(cell.mu > 0.0, "mu must be positive");
  gamma(cell);
  validate(cell.geometry);
}

struct DispersionPair {
  double omega2 = 0.0;
  double k2 = 0.0;
};

inline bool admissible(const DispersionPair& p, const CellSpec& cell) {
  return p.k2 < p.omega2 * std::min(cell.eps0, cell.eps1) * cell.mu;
}

inline constexpr double default_dispersion_floor = 1e-8;

// a = omega^2 eps mu - k^2 in each phase: [0] inclusion, [1] matrix.
inline std::array<double, 2> phase_a(const DispersionPair& p, const CellSpec& cell,
                                     double floor = default_dispersion_floor) {
  require(p.omega2 >= 0.0 && p.k2 >= 0.0, "omega2 and k2 must be non-negative");
  std::array<double, 2> eps{cell.eps0, cell.eps1}, a{};
  for (int s = 0; s < 2; ++s) {
    a[s] = p.omega2 * eps[s] * cell.mu - p.k2;
    if (std::abs(a[s]) <= floor * p.omega2 * eps[s] * cell.mu)
      throw Error(ErrorKind::critical_dispersion,
                  s == 0 ? "a(y) vanishes in the inclusion phase" : "a(y) vanishes in the matrix phase");
  }
  return a;
}

inline int default_grid(int cutoff) { return 4 * cutoff + 2; }

struct TransverseFields {
  int grid = 0;
  CMat E1, E2, H1, H2;  // grid x grid, row index j1
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> inclusion;
};

namespace detail {

struct AxialSamples {
  CMat v, d1, d2, d11, d12, d22;
};

inline AxialSamples sample_axial(const FourierField& f, int G) {
  FourierField f1 = partial(f, 0), f2 = partial(f, 1);
  return {evaluate_grid(f, G)[0],
          evaluate_grid(f1, G)[0],
          evaluate_grid(f2, G)[0],
          evaluate_grid(partial(f1, 0), G)[0],
          evaluate_grid(partial(f1, 1), G)[0],
          evaluate_grid(partial(f2, 1), G)[0]};
}

inline Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> phase_mask(const InclusionGeometry& g, int G) {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> m(G, G);
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) m(i, j) = inside(g, double(i) / G, double(j) / G);
  return m;
}

inline void check_axial(const FourierField& E3, const FourierField& H3) {
  require(E3.components() == 1 && H3.components() == 1, "axial fields must be scalar");
  require(E3.theta == H3.theta && E3.cutoff() == H3.cutoff(), "axial fields must share theta and cutoff");
}

}  // namespace detail

inline TransverseFields recover_transverse(const FourierField& E3, const FourierField& H3,
                                           const DispersionPair& pair, const CellSpec& cell, int grid = 0,
                                           double floor = default_dispersion_floor) {
  detail::check_axial(E3, H3);
  auto a = phase_a(pair, cell, floor);
  const int G = grid > 0 ? grid : default_grid(E3.cutoff());
  const double w = std::sqrt(pair.omega2), k = std::sqrt(pair.k2), mu = cell.mu;
  auto e = detail::sample_axial(E3, G);
  auto h = detail::sample_axial(H3, G);
  TransverseFields t;
  t.grid = G;
  t.inclusion = detail::phase_mask(cell.geometry, G);
  t.E1.resize(G, G);
  t.E2.resize(G, G);
  t.H1.resize(G, G);
  t.H2.resize(G, G);
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      int s = t.inclusion(i, j) ? 0 : 1;
      double eps = s == 0 ? cell.eps0 : cell.eps1;
      cplx inv = 1.0 / a[s];
      t.H1(i, j) = inv * (I * k * h.d1(i, j) - I * w * eps * e.d2(i, j));
      t.H2(i, j) = inv * (I * k * h.d2(i, j) + I * w * eps * e.d1(i, j));
      t.E1(i, j) = inv * (I * k * e.d1(i, j) + I * w * mu * h.d2(i, j));
      t.E2(i, j) = inv * (I * k * e.d2(i, j) - I * w * mu * h.d1(i, j));
    }
  return t;
}

// Relative residuals of the six first-order equations on the grid.  Derivatives of the
// transverse fields are taken phase-wise (a is constant in each phase).  phase: -1 all
// points, 0 inclusion only, 1 matrix only.
inline std::array<double, 6> maxwell_residuals(const FourierField& E3, const FourierField& H3,
                                               const DispersionPair& pair, const CellSpec& cell, int grid = 0,
                                               int phase = -1) {
  detail::check_axial(E3, H3);
  auto a = phase_a(pair, cell);
  const int G = grid > 0 ? grid : default_grid(E3.cutoff());
  const double w = std::sqrt(pair.omega2), k = std::sqrt(pair.k2), mu = cell.mu;
  auto e = detail::sample_axial(E3, G);
  auto h = detail::sample_axial(H3, G);
  auto mask = detail::phase_mask(cell.geometry, G);
  std::array<double, 6> res{}, scale{};
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      int s = mask(i, j) ? 0 : 1;
      if (phase >= 0 && s != phase) continue;
      double eps = s == 0 ? cell.eps0 : cell.eps1;
      cplx inv = 1.0 / a[s];
      cplx H1 = inv * (I * k * h.d1(i, j) - I * w * eps * e.d2(i, j));
      cplx H2 = inv * (I * k * h.d2(i, j) + I * w * eps * e.d1(i, j));
      cplx E1 = inv * (I * k * e.d1(i, j) + I * w * mu * h.d2(i, j));
      cplx E2 = inv * (I * k * e.d2(i, j) - I * w * mu * h.d1(i, j));
      cplx H2_1 = inv * (I * k * h.d12(i, j) + I * w * eps * e.d11(i, j));
      cplx H1_2 = inv * (I * k * h.d12(i, j) - I * w * eps * e.d22(i, j));
      cplx E2_1 = inv * (I * k * e.d12(i, j) - I * w * mu * h.d11(i, j));
      cplx E1_2 = inv * (I * k * e.d12(i, j) + I * w * mu * h.d22(i, j));
      std::array<std::array<cplx, 3>, 6> terms{{
          {h.d2(i, j), -I * k * H2, I * w * eps * E1},
          {I * k * H1, -h.d1(i, j), I * w * eps * E2},
          {H2_1, -H1_2, I * w * eps * e.v(i, j)},
          {e.d2(i, j), -I * k * E2, -I * w * mu * H1},
          {I * k * E1, -e.d1(i, j), -I * w * mu * H2},
          {E2_1, -E1_2, -I * w * mu * h.v(i, j)},
      }};
      for (int q = 0; q < 6; ++q) {
        cplx sum = terms[q][0] + terms[q][1] + terms[q][2];
        res[q] = std::max(res[q], std::abs(sum));
        for (auto& t : terms[q]) scale[q] = std::max(scale[q], std::abs(t));
      }
    }
  for (int q = 0; q < 6; ++q) res[q] = scale[q] > 0.0 ? res[q] / scale[q] : 0.0;
  return res;
}

namespace detail {

inline KernelTable indicator_table(const InclusionGeometry& g, const IndexBox& box) {
  return KernelTable(box, [&g](int d1, int d2) { return indicator_fourier(g, d1, d2); });
}

}  // namespace detail

// beta(u,v) with exact phase-wise integration (indicator Toeplitz products).
inline cplx beta_form(const FourierField& u, const FourierField& v, const DispersionPair& pair,
                      const CellSpec& cell, double floor = default_dispersion_floor) {
  require(u.components() == 2 && v.components() == 2, "beta_form takes 2-component fields");
  require(u.theta == v.theta && u.cutoff() == v.cutoff(), "beta_form fields must share theta and cutoff");
  auto a = phase_a(pair, cell, floor);
  const double w = std::sqrt(pair.omega2), k = std::sqrt(pair.k2);
  IndexBox box = IndexBox::square(u.cutoff());
  ToeplitzConvolver conv(box, detail::indicator_table(cell.geometry, box));

  // gradient columns: u1,1 u1,2 u2,1 u2,2
  auto grads = [](const FourierField& f) {
    CMat g(f.box.size(), 4);
    for (Eigen::Index q = 0; q < f.box.size(); ++q) {
      Vec2 x = f.xi(q);
      g(q, 0) = I * x[0] * f.coeffs(q, 0);
      g(q, 1) = I * x[1] * f.coeffs(q, 0);
      g(q, 2) = I * x[0] * f.coeffs(q, 1);
      g(q, 3) = I * x[1] * f.coeffs(q, 1);
    }
    return g;
  };
  CMat gu = grads(u), gv = grads(v);
  CMat cu = conv.apply(gu);
  // chi0 and full integrals of f_b * conj(g_a) for gradient components
  CMat in0 = gv.adjoint() * cu;
  CMat all = gv.adjoint() * gu;
  std::array<cplx, 2> P1, P2, P3, P4;
  for (int s = 0; s < 2; ++s) {
    auto term = [&](int b, int c) { return s == 0 ? in0(c, b) : all(c, b) - in0(c, b); };
    P1[s] = term(0, 0) + term(1, 1);
    P2[s] = term(2, 2) + term(3, 3);
    P3[s] = term(0, 3) - term(1, 2);  // u1,1 conj(v2,2) - u1,2 conj(v2,1)
    P4[s] = term(2, 1) - term(3, 0);  // u2,1 conj(v1,2) - u2,2 conj(v1,1)
  }
  std::array<double, 2> eps{cell.eps0, cell.eps1};
  cplx beta = 0.0;
  for (int s = 0; s < 2; ++s)
    beta += pair.omega2 / a[s] * (eps[s] * P1[s] + cell.mu * P2[s]) + k * w / a[s] * (P3[s] - P4[s]);
  return beta;
}

// int rho u.conj(v) with rho = diag(eps, mu) (physical mass paired with omega^2 in the weak form).
inline cplx physical_mass(const FourierField& u, const FourierField& v, const CellSpec& cell) {
  IndexBox box = IndexBox::square(u.cutoff());
  ToeplitzConvolver conv(box, detail::indicator_table(cell.geometry, box));
  CMat c = conv.apply(u.coeffs);
  cplx in0_1 = v.coeffs.col(0).dot(c.col(0)), in0_2 = v.coeffs.col(1).dot(c.col(1));
  cplx all1 = v.coeffs.col(0).dot(u.coeffs.col(0)), all2 = v.coeffs.col(1).dot(u.coeffs.col(1));
  return cell.eps0 * in0_1 + cell.eps1 * (all1 - in0_1) + cell.mu * (all2);
}

}  // namespace pcf
