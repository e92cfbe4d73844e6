#pragma once

#include "cell.hpp"

namespace pcf {

struct Projection {
  FourierField v;
  cplx c1 = 0.0;
  cplx c2 = 0.0;
};

// Periodic fields only.  Solves
//   Delta w1 = chi1 div u - chi0 c1,   -Delta w2 = chi1 div u_perp - chi0 c2,
// and returns v = u - (w1,1 - w2,2, w1,2 + w2,1).
inline Projection project_onto_V(const FourierField& u, const InclusionGeometry& geom) {
  require(u.components() == 2, "project_onto_V takes a 2-component field");
  require(u.theta.is_zero(), "project_onto_V is defined for periodic fields");
  validate(geom);
  const double area = inclusion_area(geom);
  IndexBox box = IndexBox::square(u.cutoff());
  ToeplitzConvolver conv(box, detail::indicator_table(geom, box));

  CMat d(u.box.size(), 2);
  d.col(0) = div(u).coeffs.col(0);
  d.col(1) = div_perp(u).coeffs.col(0);
  CMat chi1d = d - conv.apply(d);
  const Eigen::Index zero = u.box.index(0, 0);

  Projection out;
  out.c1 = chi1d(zero, 0) / area;
  out.c2 = chi1d(zero, 1) / area;
  FourierField r1(u.theta, u.cutoff(), 1), r2(u.theta, u.cutoff(), 1);
  for (Eigen::Index q = 0; q < u.box.size(); ++q) {
    cplx chi = indicator_fourier(geom, u.box.z1(q), u.box.z2(q));
    r1.coeffs(q, 0) = chi1d(q, 0) - out.c1 * chi;
    r2.coeffs(q, 0) = chi1d(q, 1) - out.c2 * chi;
  }
  r1.coeffs(zero, 0) = 0.0;  // vanishes up to rounding by the choice of c1, c2
  r2.coeffs(zero, 0) = 0.0;
  FourierField w1 = laplace_solve(r1);
  w1.coeffs *= -1.0;
  FourierField w2 = laplace_solve(r2);

  FourierField w1_1 = partial(w1, 0), w1_2 = partial(w1, 1);
  FourierField w2_1 = partial(w2, 0), w2_2 = partial(w2, 1);
  out.v = u;
  out.v.coeffs.col(0) -= w1_1.coeffs.col(0) - w2_2.coeffs.col(0);
  out.v.coeffs.col(1) -= w1_2.coeffs.col(0) + w2_1.coeffs.col(0);
  return out;
}

// ||div u||_{L2(Q1)} and ||div u_perp||_{L2(Q1)} of a truncated periodic or quasi-periodic field.
inline std::array<double, 2> matrix_divergence(const FourierField& u, const InclusionGeometry& geom) {
  IndexBox box = IndexBox::square(u.cutoff());
  ToeplitzConvolver conv(box, detail::indicator_table(geom, box));
  CMat d(u.box.size(), 2);
  d.col(0) = div(u).coeffs.col(0);
  d.col(1) = div_perp(u).coeffs.col(0);
  CMat cd = conv.apply(d);
  std::array<double, 2> out{};
  for (int c = 0; c < 2; ++c)
    out[c] = std::sqrt(std::max(0.0, d.col(c).squaredNorm() - d.col(c).dot(cd.col(c)).real()));
  return out;
}

}  // namespace pcf
