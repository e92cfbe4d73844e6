#pragma once

#include <vector>

#include "cell.hpp"
#include "toeplitz.hpp"

namespace pcf {

// Frequencies 2 pi (theta + p) / N on the torus NQ with normalised measure.  N = (1,1) is the unit cell.
struct Lattice {
  BlochTheta theta;
  std::array<int, 2> N{1, 1};

  double xi(int p, int a) const { return two_pi * (theta[a] + p) / N[a]; }
  bool periodic() const { return theta.is_zero(); }
  IndexBox window(int m) const {
    return {{-N[0] * m, -N[1] * m}, {N[0] * m + N[0] - 1, N[1] * m + N[1] - 1}};
  }
  // normalised integral of chi0 exp(-2 pi i d.y / N) over NQ
  cplx indicator(const InclusionGeometry& g, int d1, int d2) const {
    if (d1 % N[0] != 0 || d2 % N[1] != 0) return 0.0;
    return indicator_fourier(g, d1 / N[0], d2 / N[1]);
  }
};

enum class FieldKind { plane_wave, source, constant };

struct FieldLabel {
  FieldKind kind = FieldKind::source;
  int slot = 0;  // 0: div u = f, 1: div u_perp = -f; constants: component index
  int p1 = 0, p2 = 0;
};

struct FieldSystemOptions {
  int cutoff = 32;
  int source_cutoff = 4;  // < 0: no chi0 sources
  int pw_cutoff = -1;     // < 0: no plane-wave sources
};

// Fields u = grad a + grad_perp b with Delta a = f (slot 0) or Delta b = f (slot 1), plus the
// constants when the zero frequency is present.  Stores the epsilon-independent form pieces
//   Dfull = int div u conj(div v) + div u_perp conj(div v_perp)   (exact, from source Grams)
//   D0    = same restricted to Q0                                (exact)
//   T1,T2 = int chi0 grad u_p . conj(grad v_p)                    (truncated fields)
//   M0    = int u . conj(v),  M1 = int chi0 u1 conj(v1)           (truncated fields)
// Matrix entry (i,j) is the form evaluated at (u_j, u_i).
struct FieldSystem {
  Lattice lattice;
  FieldSystemOptions options;
  IndexBox box;
  double area = 0.0;
  std::vector<FieldLabel> labels;
  CMat U1, U2;  // box x (fields without constants)
  CMat Dfull, D0, T1, T2, M0, M1;

  Eigen::Index size() const { return static_cast<Eigen::Index>(labels.size()); }
  std::vector<Eigen::Index> select(bool plane_waves, bool sources) const {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < size(); ++i) {
      FieldKind k = labels[i].kind;
      if (k == FieldKind::constant || (k == FieldKind::plane_wave && plane_waves) ||
          (k == FieldKind::source && sources))
        idx.push_back(i);
    }
    return idx;
  }
};

namespace detail {

inline CMat hermitian_part(const CMat& A) { return 0.5 * (A + A.adjoint()); }

inline CMat restrict(const CMat& A, const std::vector<Eigen::Index>& idx) {
  CMat R(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) R(i, j) = A(idx[i], idx[j]);
  return R;
}

}  // namespace detail

inline FieldSystem build_field_system(const Lattice& lat, const InclusionGeometry& geom,
                                      const FieldSystemOptions& opt) {
  validate(geom);
  require(opt.cutoff >= 1, "cutoff must be at least 1");
  require(opt.source_cutoff <= opt.cutoff && opt.pw_cutoff <= opt.cutoff,
          "source and plane-wave cutoffs may not exceed the field cutoff");
  require(opt.source_cutoff >= 0 || opt.pw_cutoff >= 0, "no field family selected");
  require(lat.N[0] >= 1 && lat.N[1] >= 1, "multicell sizes must be positive");

  FieldSystem fs;
  fs.lattice = lat;
  fs.options = opt;
  fs.box = lat.window(opt.cutoff);
  fs.area = inclusion_area(geom);
  const IndexBox& box = fs.box;
  KernelTable ker(box, [&](int d1, int d2) { return lat.indicator(geom, d1, d2); });
  const bool per = lat.periodic();

  // atoms: plane waves e_p and chi0 e_p
  struct Atom {
    bool plane;
    int p1, p2;
  };
  std::vector<Atom> atoms;
  struct Source {
    FieldLabel label;
    std::vector<std::pair<cplx, std::size_t>> combo;
  };
  std::vector<Source> sources;

  if (opt.pw_cutoff >= 0) {
    IndexBox w = lat.window(opt.pw_cutoff);
    for (int p1 = w.lo[0]; p1 <= w.hi[0]; ++p1)
      for (int p2 = w.lo[1]; p2 <= w.hi[1]; ++p2) {
        if (per && p1 == 0 && p2 == 0) continue;
        atoms.push_back({true, p1, p2});
        for (int slot : {0, 1})
          sources.push_back({{FieldKind::plane_wave, slot, p1, p2}, {{1.0, atoms.size() - 1}}});
      }
  }
  if (opt.source_cutoff >= 0) {
    std::size_t first = atoms.size();
    IndexBox w = lat.window(opt.source_cutoff);
    for (int p1 = w.lo[0]; p1 <= w.hi[0]; ++p1)
      for (int p2 = w.lo[1]; p2 <= w.hi[1]; ++p2) atoms.push_back({false, p1, p2});
    std::size_t zero = per ? first + static_cast<std::size_t>(w.index(0, 0)) : 0;
    for (std::size_t a = first; a < atoms.size(); ++a) {
      if (per && a == zero) continue;
      std::vector<std::pair<cplx, std::size_t>> combo{{1.0, a}};
      if (per) {
        // keep the support in Q0 while removing the mean
        cplx c = ker(-atoms[a].p1, -atoms[a].p2) / fs.area;
        if (c != 0.0) combo.push_back({-c, zero});
      }
      for (int slot : {0, 1}) sources.push_back({{FieldKind::source, slot, atoms[a].p1, atoms[a].p2}, combo});
    }
  }

  const Eigen::Index na = static_cast<Eigen::Index>(atoms.size());
  const Eigen::Index ns = static_cast<Eigen::Index>(sources.size());
  const Eigen::Index n = ns + (per ? 2 : 0);

  CMat G(na, na), Gw(na, na);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < na; ++j) {
      cplx k = ker(atoms[i].p1 - atoms[j].p1, atoms[i].p2 - atoms[j].p2);
      Gw(i, j) = k;
      if (atoms[i].plane && atoms[j].plane)
        G(i, j) = (i == j) ? 1.0 : 0.0;
      else
        G(i, j) = k;
    }
  CMat C = CMat::Zero(ns, na);
  for (Eigen::Index i = 0; i < ns; ++i)
    for (auto& [c, a] : sources[i].combo) C(i, static_cast<Eigen::Index>(a)) += c;

  CMat A(box.size(), na);
  for (Eigen::Index a = 0; a < na; ++a)
    for (Eigen::Index q = 0; q < box.size(); ++q) {
      int q1 = box.p(q, 0), q2 = box.p(q, 1);
      A(q, a) = atoms[a].plane ? cplx(q1 == atoms[a].p1 && q2 == atoms[a].p2 ? 1.0 : 0.0)
                               : ker(q1 - atoms[a].p1, q2 - atoms[a].p2);
    }
  CMat F = A * C.transpose();  // box x ns

  fs.U1.resize(box.size(), ns);
  fs.U2.resize(box.size(), ns);
  for (Eigen::Index q = 0; q < box.size(); ++q) {
    double x1 = lat.xi(box.p(q, 0), 0), x2 = lat.xi(box.p(q, 1), 1);
    double r = x1 * x1 + x2 * x2;
    for (Eigen::Index i = 0; i < ns; ++i) {
      if (r == 0.0) {
        fs.U1(q, i) = fs.U2(q, i) = 0.0;
        continue;
      }
      cplx f = F(q, i);
      if (sources[i].label.slot == 0) {
        fs.U1(q, i) = -I * x1 * f / r;
        fs.U2(q, i) = -I * x2 * f / r;
      } else {
        fs.U1(q, i) = I * x2 * f / r;
        fs.U2(q, i) = -I * x1 * f / r;
      }
    }
  }

  auto pad = [&](const CMat& X) {
    CMat Y = CMat::Zero(n, n);
    Y.topLeftCorner(ns, ns) = X;
    return Y;
  };
  CMat same(ns, ns);
  for (Eigen::Index i = 0; i < ns; ++i)
    for (Eigen::Index j = 0; j < ns; ++j)
      same(i, j) = sources[i].label.slot == sources[j].label.slot ? 1.0 : 0.0;
  fs.Dfull = pad(detail::hermitian_part((C.conjugate() * G * C.transpose()).cwiseProduct(same)));
  fs.D0 = pad(detail::hermitian_part((C.conjugate() * Gw * C.transpose()).cwiseProduct(same)));

  ToeplitzConvolver conv(box, ker);
  auto scaled = [&](const CMat& U, int axis) {
    CMat Gx(U.rows(), U.cols());
    for (Eigen::Index q = 0; q < box.size(); ++q) Gx.row(q) = (I * lat.xi(box.p(q, axis), axis)) * U.row(q);
    return Gx;
  };
  auto chi_gram = [&](const CMat& X) -> CMat { return X.adjoint() * conv.apply(X); };
  CMat T1 = chi_gram(scaled(fs.U1, 0)) + chi_gram(scaled(fs.U1, 1));
  CMat T2 = chi_gram(scaled(fs.U2, 0)) + chi_gram(scaled(fs.U2, 1));
  fs.T1 = pad(detail::hermitian_part(T1));
  fs.T2 = pad(detail::hermitian_part(T2));
  fs.M0 = pad(detail::hermitian_part(fs.U1.adjoint() * fs.U1 + fs.U2.adjoint() * fs.U2));
  fs.M1 = pad(detail::hermitian_part(chi_gram(fs.U1)));

  for (auto& s : sources) fs.labels.push_back(s.label);
  if (per) {
    fs.labels.push_back({FieldKind::constant, 0, 0, 0});
    fs.labels.push_back({FieldKind::constant, 1, 0, 0});
    fs.M0(ns, ns) = 1.0;
    fs.M0(ns + 1, ns + 1) = 1.0;
    fs.M1(ns, ns) = fs.area;
    for (Eigen::Index j = 0; j < ns; ++j) {
      cplx v = 0.0;
      for (Eigen::Index q = 0; q < box.size(); ++q) v += fs.U1(q, j) * ker(-box.p(q, 0), -box.p(q, 1));
      fs.M1(ns, j) = v;
      fs.M1(j, ns) = std::conj(v);
    }
  }
  return fs;
}

// Field u_j as a 2-component FourierField on the unit cell (N = (1,1) only).
inline FourierField field_of(const FieldSystem& fs, Eigen::Index j) {
  require(fs.lattice.N[0] == 1 && fs.lattice.N[1] == 1, "field_of is defined on the unit cell");
  FourierField u(fs.lattice.theta, fs.options.cutoff, 2);
  const Eigen::Index ns = fs.U1.cols();
  if (j < ns) {
    u.coeffs.col(0) = fs.U1.col(j);
    u.coeffs.col(1) = fs.U2.col(j);
  } else {
    u.at(0, 0, static_cast<int>(j - ns)) = 1.0;
  }
  return u;
}

}  // namespace pcf
