#pragma once

#include "limit.hpp"

namespace pcf {

using Mat4 = Eigen::Matrix4d;

// Gradient ordering g = (u1,1, u2,1, u1,2, u2,2); J couples div u and div u_perp.
inline Mat4 coupling_J() {
  Mat4 J = Mat4::Zero();
  J(0, 3) = J(3, 0) = 1.0;
  J(1, 2) = J(2, 1) = -1.0;
  return J;
}

inline double max_epsilon(const CellSpec& cell) {
  return 0.5 * std::min(std::sqrt(cell.eps1), std::sqrt(cell.eps0 - cell.eps1));
}

struct EpsilonTensors {
  double eps = 0.0;
  double s = 1.0;       // sqrt(1 - eps^2/eps1)
  double alpha1 = 0.0;  // 1/eps^2
  double alpha0 = 0.0;  // 1/(eps0 - eps1 + eps^2)
  Mat4 A1, A0;

  static EpsilonTensors make(double eps, const CellSpec& cell) {
    gamma(cell);
    require(eps > 0.0 && eps <= max_epsilon(cell),
            "eps must lie in (0, 0.5 min(sqrt(eps1), sqrt(eps0 - eps1))]");
    EpsilonTensors t;
    t.eps = eps;
    t.s = std::sqrt(1.0 - eps * eps / cell.eps1);
    t.alpha1 = 1.0 / (eps * eps);
    t.alpha0 = 1.0 / (cell.eps0 - cell.eps1 + eps * eps);
    Mat4 J = coupling_J();
    t.A1 = Mat4::Identity() + t.s * J;
    Mat4 d = Mat4::Zero();
    d.diagonal() << cell.eps0 / cell.eps1, 1.0, cell.eps0 / cell.eps1, 1.0;
    t.A0 = d + t.s * J;
    return t;
  }
};

// Degenerate limit tensors: a1 on chi1, a0 split into chi1 and chi0 parts.
inline Mat4 degenerate_a1() { return Mat4::Identity() + coupling_J(); }
inline Mat4 degenerate_a0_matrix(const CellSpec& cell) { return -coupling_J() / (2.0 * cell.eps1); }
inline Mat4 degenerate_a0_inclusion(const CellSpec& cell) {
  Mat4 m = Mat4::Zero();
  double r = cell.eps0 / cell.eps1;
  m << r, 0, 0, 1,  //
      0, 1, -1, 0,  //
      0, -1, r, 0,  //
      1, 0, 0, 1;
  return m / (cell.eps0 - cell.eps1);
}

// int (chi1 A_matrix + chi0 A_inclusion) grad u . conj(grad v) for truncated 2-component fields.
inline cplx tensor_form(const FourierField& u, const FourierField& v, const Mat4& A_matrix, const Mat4& A_inclusion,
                        const InclusionGeometry& geom) {
  require(u.components() == 2 && v.components() == 2, "tensor_form takes 2-component fields");
  auto grads = [](const FourierField& f) {
    CMat g(f.box.size(), 4);
    for (Eigen::Index q = 0; q < f.box.size(); ++q) {
      Vec2 x = f.xi(q);
      g(q, 0) = I * x[0] * f.coeffs(q, 0);
      g(q, 1) = I * x[0] * f.coeffs(q, 1);
      g(q, 2) = I * x[1] * f.coeffs(q, 0);
      g(q, 3) = I * x[1] * f.coeffs(q, 1);
    }
    return g;
  };
  IndexBox box = IndexBox::square(u.cutoff());
  ToeplitzConvolver conv(box, detail::indicator_table(geom, box));
  CMat gu = grads(u), gv = grads(v);
  CMat in0 = gv.adjoint() * conv.apply(gu);
  CMat all = gv.adjoint() * gu;
  cplx acc = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) acc += A_inclusion(a, b) * in0(a, b) + A_matrix(a, b) * (all(a, b) - in0(a, b));
  return acc;
}

// Difference between the rescaled tensor energy chi1 A1 + eps^2/(eps0-eps1+eps^2) chi0 A0 and
// a1 + eps^2 a0, evaluated at u (expected O(eps^4)).
inline double expansion_residual(const FourierField& u, double eps, const CellSpec& cell) {
  EpsilonTensors t = EpsilonTensors::make(eps, cell);
  double c = eps * eps * t.alpha0;
  cplx full = tensor_form(u, u, t.A1, c * t.A0, cell.geometry);
  cplx lim = tensor_form(u, u, degenerate_a1() + eps * eps * degenerate_a0_matrix(cell),
                         eps * eps * degenerate_a0_inclusion(cell), cell.geometry);
  return std::abs(full - lim);
}

// K_eps = int (alpha1 chi1 A1 + alpha0 chi0 A0) grad u . conj(grad v), mass int u.conj(v) + gamma chi0 u1 conj(v1).
// Written through the pieces of the field system using int grad u : conj(grad v) = Dfull.
inline FormPair epsilon_forms(const FieldSystem& fs, const std::vector<Eigen::Index>& idx, const EpsilonTensors& t,
                              const CellSpec& cell) {
  const double g = gamma(cell), s = t.s;
  CMat D = detail::restrict(fs.Dfull, idx), D0 = detail::restrict(fs.D0, idx);
  CMat T1 = detail::restrict(fs.T1, idx), T2 = detail::restrict(fs.T2, idx);
  CMat M0 = detail::restrict(fs.M0, idx), M1 = detail::restrict(fs.M1, idx);
  CMat K = t.alpha1 * (s * (D - D0) + (1.0 - s) * (D - T1 - T2)) +
           t.alpha0 * (s * D0 + (cell.eps0 / cell.eps1 - s) * T1 + (1.0 - s) * T2);
  return {K, M0 + g * M1};
}

namespace detail {
inline FieldSystemOptions epsilon_options(const Resolution& res) {
  return {res.cutoff, res.source_cutoff, res.pw_cutoff < 0 ? res.cutoff : res.pw_cutoff};
}
}  // namespace detail

struct EpsilonAssembly {
  std::shared_ptr<const FieldSystem> system;
  std::vector<Eigen::Index> fields;
  FormPair forms;
};

// Plane-wave Galerkin space (|p| <= pw_cutoff, pw_cutoff < 0 meaning the full cutoff), enriched by the
// V-potential fields when source_cutoff >= 0.
inline EpsilonAssembly assemble_epsilon_forms(double eps, const BlochTheta& theta, const CellSpec& cell,
                                              const Resolution& res) {
  validate(cell);
  EpsilonTensors t = EpsilonTensors::make(eps, cell);
  auto fs = std::make_shared<FieldSystem>(
      build_field_system(Lattice{theta, {1, 1}}, cell.geometry, detail::epsilon_options(res)));
  EpsilonAssembly a;
  a.fields = fs->select(true, true);
  a.forms = epsilon_forms(*fs, a.fields, t, cell);
  a.system = std::move(fs);
  return a;
}

inline Spectrum solve_epsilon_on(const FieldSystem& fs, const std::vector<Eigen::Index>& idx, double eps,
                                 const CellSpec& cell, Eigen::Index k_max, const Resolution& res) {
  EpsilonTensors t = EpsilonTensors::make(eps, cell);
  FormPair f = epsilon_forms(fs, idx, t, cell);
  BasisFilter filter = filter_basis(detail::restrict(fs.M0, idx), res.gram_threshold);
  EigenResult r = solve_generalized(f.K, f.B, filter.X, k_max);
  Spectrum s;
  s.theta = fs.lattice.theta;
  s.solver = "epsilon";
  s.eps = eps;
  s.resolution = res;
  s.basis_raw = filter.raw;
  s.basis_retained = filter.retained();
  s.eigenvalues = r.values;
  s.eigenvectors = r.vectors;
  return s;
}

inline Spectrum solve_epsilon_spectrum(double eps, const BlochTheta& theta, const CellSpec& cell, Eigen::Index k_max,
                                       const Resolution& res) {
  validate(cell);
  EpsilonTensors::make(eps, cell);
  FieldSystem fs = build_field_system(Lattice{theta, {1, 1}}, cell.geometry, detail::epsilon_options(res));
  return solve_epsilon_on(fs, fs.select(true, true), eps, cell, k_max, res);
}

// ||(a1)^{1/2} grad u||^2 = int_Q1 |div u|^2 + |div u_perp|^2 for a combination x of system fields.
inline double degenerate_energy(const FieldSystem& fs, const std::vector<Eigen::Index>& idx, const CVec& x) {
  CMat D = detail::restrict(fs.Dfull, idx) - detail::restrict(fs.D0, idx);
  return std::max(0.0, x.dot(D * x).real());
}

}  // namespace pcf
