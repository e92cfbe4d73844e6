#pragma once

#include <ostream>
#include <vector>

#include "core.hpp"

namespace pcf {

// Mode box z in {-M..M}^2, flattened as (z1+M)*(2M+1) + (z2+M).
class ModeBox {
 public:
  ModeBox() = default;
  explicit ModeBox(int cutoff) : m_(cutoff), w_(2 * cutoff + 1) { require(cutoff >= 0, "cutoff must be non-negative"); }

  int cutoff() const { return m_; }
  int width() const { return w_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(w_) * w_; }
  Eigen::Index index(int z1, int z2) const { return static_cast<Eigen::Index>(z1 + m_) * w_ + (z2 + m_); }
  int z1(Eigen::Index k) const { return static_cast<int>(k / w_) - m_; }
  int z2(Eigen::Index k) const { return static_cast<int>(k % w_) - m_; }
  bool contains(int z1, int z2) const { return std::abs(z1) <= m_ && std::abs(z2) <= m_; }

 private:
  int m_ = 0;
  int w_ = 1;
};

// Truncated theta-quasi-periodic field sum_z c_z exp(2 pi i (theta+z).y); one column per component.
struct FourierField {
  BlochTheta theta;
  ModeBox box;
  CMat coeffs;

  FourierField() = default;
  FourierField(BlochTheta t, int cutoff, int components)
      : theta(t), box(cutoff), coeffs(CMat::Zero(ModeBox(cutoff).size(), components)) {}

  int cutoff() const { return box.cutoff(); }
  int components() const { return static_cast<int>(coeffs.cols()); }
  cplx& at(int z1, int z2, int c = 0) { return coeffs(box.index(z1, z2), c); }
  cplx at(int z1, int z2, int c = 0) const { return coeffs(box.index(z1, z2), c); }

  // 2 pi (theta + z)
  Vec2 xi(Eigen::Index k) const {
    return {two_pi * (theta[0] + box.z1(k)), two_pi * (theta[1] + box.z2(k))};
  }
  FourierField component(int c) const {
    FourierField f(theta, cutoff(), 1);
    f.coeffs.col(0) = coeffs.col(c);
    return f;
  }
};

inline FourierField make_vector(const FourierField& a, const FourierField& b) {
  require(a.theta == b.theta && a.cutoff() == b.cutoff(), "component fields must share theta and cutoff");
  FourierField f(a.theta, a.cutoff(), 2);
  f.coeffs.col(0) = a.coeffs.col(0);
  f.coeffs.col(1) = b.coeffs.col(0);
  return f;
}

inline FourierField single_mode(BlochTheta theta, int cutoff, int z1, int z2, cplx amp = 1.0) {
  FourierField f(theta, cutoff, 1);
  f.at(z1, z2) = amp;
  return f;
}

inline FourierField partial(const FourierField& f, int axis) {
  FourierField g = f;
  for (Eigen::Index k = 0; k < f.box.size(); ++k) g.coeffs.row(k) *= I * f.xi(k)[axis];
  return g;
}

inline FourierField grad(const FourierField& f) {
  require(f.components() == 1, "grad acts on scalar fields");
  return make_vector(partial(f, 0), partial(f, 1));
}

// (-f,2 , f,1)
inline FourierField grad_perp(const FourierField& f) {
  require(f.components() == 1, "grad_perp acts on scalar fields");
  FourierField d2 = partial(f, 1);
  d2.coeffs *= -1.0;
  return make_vector(d2, partial(f, 0));
}

// a_perp = (-a2, a1)
inline FourierField perp(const FourierField& u) {
  require(u.components() == 2, "perp acts on 2-component fields");
  FourierField v = u;
  v.coeffs.col(0) = -u.coeffs.col(1);
  v.coeffs.col(1) = u.coeffs.col(0);
  return v;
}

inline FourierField div(const FourierField& u) {
  require(u.components() == 2, "div acts on 2-component fields");
  FourierField f(u.theta, u.cutoff(), 1);
  for (Eigen::Index k = 0; k < u.box.size(); ++k) {
    Vec2 x = u.xi(k);
    f.coeffs(k, 0) = I * (x[0] * u.coeffs(k, 0) + x[1] * u.coeffs(k, 1));
  }
  return f;
}

inline FourierField div_perp(const FourierField& u) { return div(perp(u)); }

inline double lambda_z(const FourierField& f, Eigen::Index k) {
  Vec2 x = f.xi(k);
  return x[0] * x[0] + x[1] * x[1];
}

inline double l2_norm(const FourierField& f) { return f.coeffs.norm(); }

// Sobolev norms with weights (1 + 4 pi^2 |theta+z|^2)^s.
inline double sobolev_norm(const FourierField& f, int s) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < f.box.size(); ++k)
    acc += std::pow(1.0 + lambda_z(f, k), s) * f.coeffs.row(k).squaredNorm();
  return std::sqrt(acc);
}
inline double h1_norm(const FourierField& f) { return sobolev_norm(f, 1); }
inline double h2_norm(const FourierField& f) { return sobolev_norm(f, 2); }

inline cplx inner(const FourierField& a, const FourierField& b) {
  return (b.coeffs.conjugate().cwiseProduct(a.coeffs)).sum();
}

// Solves -Delta u = f.  At theta = 0 the zero-mean solution is returned.
inline FourierField laplace_solve(const FourierField& f) {
  require(f.components() == 1, "laplace_solve acts on scalar fields");
  FourierField u(f.theta, f.cutoff(), 1);
  for (Eigen::Index k = 0; k < f.box.size(); ++k) {
    double lam = lambda_z(f, k);
    if (lam == 0.0) {
      if (std::abs(f.coeffs(k, 0)) > 1e-14 * (1.0 + f.coeffs.norm()))
        throw Error(ErrorKind::non_solvable, "periodic source with non-zero mean");
      continue;
    }
    u.coeffs(k, 0) = f.coeffs(k, 0) / lam;
  }
  return u;
}

// The H^2 bound constant 1 + 1/|theta|^2, with |theta| the distance to the lattice.
inline double laplace_bound(const BlochTheta& t) {
  double d = t.lattice_distance();
  return 1.0 + 1.0 / (d * d);
}

// Periodic u, zero mean, solving Delta u + 4 pi i theta.grad u - 4 pi^2 |theta|^2 u = f
// for a periodic (theta = 0 carrier) field f with zero mean.
inline FourierField shifted_laplace_solve(const FourierField& f, const Vec2& theta) {
  require(f.theta.is_zero() && f.components() == 1, "shifted solve takes a periodic scalar field");
  FourierField u(f.theta, f.cutoff(), 1);
  for (Eigen::Index k = 0; k < f.box.size(); ++k) {
    int z1 = f.box.z1(k), z2 = f.box.z2(k);
    if (z1 == 0 && z2 == 0) {
      if (std::abs(f.coeffs(k, 0)) > 1e-14 * (1.0 + f.coeffs.norm()))
        throw Error(ErrorKind::non_solvable, "shifted solve needs a zero-mean source");
      continue;
    }
    double s1 = theta[0] + z1, s2 = theta[1] + z2;
    double lam = 4.0 * pi * pi * (s1 * s1 + s2 * s2);
    require(lam > 0.0, "theta + z vanishes for a non-zero mode");
    u.coeffs(k, 0) = -f.coeffs(k, 0) / lam;
  }
  return u;
}

inline FourierField apply_shifted_operator(const FourierField& u, const Vec2& theta) {
  FourierField f = u;
  for (Eigen::Index k = 0; k < u.box.size(); ++k) {
    double s1 = theta[0] + u.box.z1(k), s2 = theta[1] + u.box.z2(k);
    f.coeffs(k, 0) = -4.0 * pi * pi * (s1 * s1 + s2 * s2) * u.coeffs(k, 0);
  }
  return f;
}

// Values on the uniform grid y = (j1, j2)/G; result is G x G per component, row j1.
inline std::vector<CMat> evaluate_grid(const FourierField& f, int G) {
  const int w = f.box.width(), m = f.cutoff();
  CMat e1(G, w), e2(G, w);
  for (int j = 0; j < G; ++j)
    for (int z = -m; z <= m; ++z) {
      double y = double(j) / G;
      e1(j, z + m) = std::polar(1.0, two_pi * (f.theta[0] + z) * y);
      e2(j, z + m) = std::polar(1.0, two_pi * (f.theta[1] + z) * y);
    }
  std::vector<CMat> out;
  for (int c = 0; c < f.components(); ++c) {
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> C(
        f.coeffs.col(c).data(), w, w);
    out.push_back(e1 * C * e2.transpose());
  }
  return out;
}

inline void write_csv(std::ostream& os, const FourierField& f) {
  os.precision(17);
  os << "z1,z2";
  for (int c = 0; c < f.components(); ++c)
    os << (f.components() == 1 ? std::string(",re,im") : ",re" + std::to_string(c + 1) + ",im" + std::to_string(c + 1));
  os << "\n";
  for (Eigen::Index k = 0; k < f.box.size(); ++k) {
    os << f.box.z1(k) << ',' << f.box.z2(k);
    for (int c = 0; c < f.components(); ++c) os << ',' << f.coeffs(k, c).real() << ',' << f.coeffs(k, c).imag();
    os << "\n";
  }
}

}  // namespace pcf
