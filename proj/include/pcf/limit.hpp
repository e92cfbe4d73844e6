#pragma once

#include <memory>

#include "field_system.hpp"
#include "spectrum.hpp"

namespace pcf {

struct ConstrainedBasis {
  BlochTheta theta;
  std::array<int, 2> multicell{1, 1};
  std::shared_ptr<const FieldSystem> system;
  std::vector<Eigen::Index> fields;  // indices into system
  CMat gram;                         // L2 Gram of the selected fields
  BasisFilter filter;

  Eigen::Index raw() const { return static_cast<Eigen::Index>(fields.size()); }
  Eigen::Index retained() const { return filter.retained(); }
  FourierField field(Eigen::Index i) const { return field_of(*system, fields[i]); }
};

inline ConstrainedBasis constrained_basis(std::shared_ptr<const FieldSystem> fs, double gram_threshold = 1e-10) {
  ConstrainedBasis b;
  b.theta = fs->lattice.theta;
  b.multicell = fs->lattice.N;
  b.fields = fs->select(false, true);
  b.gram = detail::restrict(fs->M0, b.fields);
  b.filter = filter_basis(b.gram, gram_threshold);
  b.system = std::move(fs);
  return b;
}

inline ConstrainedBasis build_V_basis(const BlochTheta& theta, const CellSpec& cell, int cutoff, int source_cutoff,
                                      double gram_threshold = 1e-10) {
  validate(cell);
  require(source_cutoff >= 0, "source cutoff must be non-negative");
  FieldSystemOptions opt{cutoff, source_cutoff, -1};
  auto fs = std::make_shared<FieldSystem>(build_field_system(Lattice{theta, {1, 1}}, cell.geometry, opt));
  return constrained_basis(std::move(fs), gram_threshold);
}

struct FormPair {
  CMat K, B;
};

// alpha_theta(u,v) = int grad u1 . conj(grad v1) + gamma^-1 int (div u conj div v + div u_perp conj div v_perp),
// mass eps1 int (u.conj(v) + gamma chi0 u1 conj(v1)).  On V the first term equals
// (1/2) Dfull + (1/2)(T1 - T2), since |grad u1| = |grad u2| pointwise in Q1.
inline FormPair limit_forms(const FieldSystem& fs, const std::vector<Eigen::Index>& idx, const CellSpec& cell) {
  const double g = gamma(cell);
  CMat D = detail::restrict(fs.Dfull, idx);
  CMat T1 = detail::restrict(fs.T1, idx), T2 = detail::restrict(fs.T2, idx);
  CMat M0 = detail::restrict(fs.M0, idx), M1 = detail::restrict(fs.M1, idx);
  return {0.5 * D + 0.5 * (T1 - T2) + D / g, cell.eps1 * (M0 + g * M1)};
}

inline FormPair assemble_limit_forms(const ConstrainedBasis& basis, const CellSpec& cell) {
  return limit_forms(*basis.system, basis.fields, cell);
}

inline Spectrum solve_limit_on(const ConstrainedBasis& basis, const CellSpec& cell, Eigen::Index k_max) {
  FormPair f = assemble_limit_forms(basis, cell);
  EigenResult r = solve_generalized(f.K, f.B, basis.filter.X, k_max);
  Spectrum s;
  s.theta = basis.theta;
  s.multicell = basis.multicell;
  s.solver = basis.multicell == std::array<int, 2>{1, 1} ? "limit" : "multicell";
  s.resolution = {basis.system->options.cutoff, basis.system->options.source_cutoff, -1, 0.0};
  s.basis_raw = basis.raw();
  s.basis_retained = basis.retained();
  s.eigenvalues = r.values;
  s.eigenvectors = r.vectors;
  return s;
}

inline Spectrum solve_limit_spectrum(const BlochTheta& theta, const CellSpec& cell, Eigen::Index k_max,
                                     const Resolution& res = {}) {
  ConstrainedBasis b = build_V_basis(theta, cell, res.cutoff, res.source_cutoff, res.gram_threshold);
  Spectrum s = solve_limit_on(b, cell, k_max);
  s.resolution = res;
  return s;
}

// Periodic limit problem on the torus NQ (one inclusion per unit sub-cell).
inline Spectrum solve_multicell_spectrum(const std::array<int, 2>& N, const CellSpec& cell, Eigen::Index k_max,
                                         const Resolution& res = {}) {
  validate(cell);
  require(N[0] >= 1 && N[1] >= 1, "multicell sizes must be positive");
  FieldSystemOptions opt{res.cutoff, res.source_cutoff, -1};
  auto fs = std::make_shared<FieldSystem>(build_field_system(Lattice{BlochTheta{}, N}, cell.geometry, opt));
  ConstrainedBasis b = constrained_basis(std::move(fs), res.gram_threshold);
  Spectrum s = solve_limit_on(b, cell, k_max);
  s.resolution = res;
  return s;
}

// L2(Q1) norms of div u and div u_perp for the truncated field j of a system.
inline std::array<double, 2> constraint_residual(const FieldSystem& fs, const InclusionGeometry& geom,
                                                 Eigen::Index j) {
  const IndexBox& box = fs.box;
  const Eigen::Index ns = fs.U1.cols();
  if (j >= ns) return {0.0, 0.0};
  CMat d(box.size(), 2);
  for (Eigen::Index q = 0; q < box.size(); ++q) {
    double x1 = fs.lattice.xi(box.p(q, 0), 0), x2 = fs.lattice.xi(box.p(q, 1), 1);
    cplx u1 = fs.U1(q, j), u2 = fs.U2(q, j);
    d(q, 0) = I * (x1 * u1 + x2 * u2);
    d(q, 1) = I * (-x1 * u2 + x2 * u1);
  }
  const Lattice& lat = fs.lattice;
  KernelTable ker(box, [&](int d1, int d2) { return lat.indicator(geom, d1, d2); });
  ToeplitzConvolver conv(box, ker);
  CMat cd = conv.apply(d);
  std::array<double, 2> out{};
  for (int c = 0; c < 2; ++c) {
    double q1 = d.col(c).squaredNorm() - d.col(c).dot(cd.col(c)).real();
    out[c] = std::sqrt(std::max(q1, 0.0));
  }
  return out;
}

}  // namespace pcf
