#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "core.hpp"

namespace pcf {

struct Resolution {
  int cutoff = 32;
  int source_cutoff = 4;
  int pw_cutoff = -1;
  double gram_threshold = 1e-10;
};

struct Spectrum {
  BlochTheta theta;
  std::array<int, 2> multicell{1, 1};
  std::string solver = "limit";
  double eps = std::numeric_limits<double>::quiet_NaN();
  Resolution resolution;
  Eigen::Index basis_raw = 0;
  Eigen::Index basis_retained = 0;
  std::vector<double> eigenvalues;
  CMat eigenvectors;  // columns in field coordinates
};

// Directions of a Hermitian Gram matrix kept after diagonal scaling and eigenvalue thresholding.
struct BasisFilter {
  CMat X;           // n x r, columns span the retained subspace
  RVec gram_eigs;   // eigenvalues of the scaled Gram, ascending
  Eigen::Index raw = 0;
  Eigen::Index retained() const { return X.cols(); }
};

namespace detail {

struct HermitianEig {
  RVec values;  // ascending
  CMat vectors;
};

// Eigen's tridiagonal QR occasionally reports NoConvergence on clustered spectra; a diagonal shift
// changes the iteration without changing the eigenvectors.
inline HermitianEig hermitian_eig(const CMat& A) {
  const double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
  for (double shift : {0.0, 1.0, 0.3183098861837907}) {
    CMat B = A;
    B.diagonal().array() += shift * scale;
    Eigen::SelfAdjointEigenSolver<CMat> es(B);
    if (es.info() == Eigen::Success)
      return {es.eigenvalues().array() - shift * scale, es.eigenvectors()};
  }
  throw Error(ErrorKind::eigensolver, "Hermitian eigensolver did not converge");
}

}  // namespace detail

inline BasisFilter filter_basis(const CMat& gram, double threshold) {
  const Eigen::Index n = gram.rows();
  RVec d = gram.diagonal().real();
  std::vector<Eigen::Index> live;
  for (Eigen::Index i = 0; i < n; ++i)
    if (d(i) > 1e-300) live.push_back(i);
  const Eigen::Index m = static_cast<Eigen::Index>(live.size());
  CMat S(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      S(i, j) = gram(live[i], live[j]) / std::sqrt(d(live[i]) * d(live[j]));
  detail::HermitianEig es = detail::hermitian_eig(S);
  BasisFilter f;
  f.raw = n;
  f.gram_eigs = es.values;
  const double top = m > 0 ? es.values(m - 1) : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < m; ++k)
    if (es.values(k) > threshold * top) keep.push_back(k);
  f.X = CMat::Zero(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    for (Eigen::Index i = 0; i < m; ++i)
      f.X(live[i], static_cast<Eigen::Index>(c)) = es.vectors(i, keep[c]) / std::sqrt(d(live[i]));
  if (f.retained() < 2) throw Error(ErrorKind::rank_collapse, "fewer than two independent fields survive filtering");
  return f;
}

struct EigenResult {
  std::vector<double> values;
  CMat vectors;  // original coordinates, B-normalised
};

// Smallest k_max eigenpairs of K x = lambda B x on the range of X (Cholesky reduction).
inline EigenResult solve_generalized(const CMat& K, const CMat& B, const CMat& X, Eigen::Index k_max) {
  CMat Kr = X.adjoint() * K * X;
  CMat Br = X.adjoint() * B * X;
  Kr = 0.5 * (Kr + Kr.adjoint()).eval();
  Br = 0.5 * (Br + Br.adjoint()).eval();
  Eigen::LLT<CMat> llt(Br);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::indefinite_mass, "mass matrix is not positive definite");
  require(k_max >= 1 && k_max <= Kr.rows(), "k_max exceeds the basis dimension");
  // Br = L L^H, C = L^-1 Kr L^-H, y = L^H x
  CMat C = llt.matrixL().solve(Kr);
  C = llt.matrixL().solve(C.adjoint().eval()).adjoint().eval();
  C = 0.5 * (C + C.adjoint()).eval();
  detail::HermitianEig es = detail::hermitian_eig(C);
  CMat Y = es.vectors.leftCols(k_max);
  CMat V = llt.matrixU().solve(Y);
  EigenResult r;
  for (Eigen::Index k = 0; k < k_max; ++k) r.values.push_back(es.values(k));
  r.vectors = X * V;
  return r;
}

}  // namespace pcf
