#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "core.hpp"

namespace pcf {

// One-dimensional limit problem: v constant (= C) on [a,b], -v'' = lambda v outside (after the
// material scaling below), quasi-periodic with e^{2 pi i theta1}.  For eps0 = 2, eps1 = 1 the jump
// weights are 2 (v1, TM) and 1 (v2, TE) and the exterior wavenumber is sqrt(lambda).
struct SlabProblem {
  double a = 0.25;
  double b = 0.75;
  double eps0 = 2.0;
  double eps1 = 1.0;

  double gamma() const { return eps0 / eps1 - 1.0; }
  double weight(int c) const { return c == 0 ? 1.0 + 1.0 / gamma() : 1.0 / gamma(); }
  double wave_scale() const { return eps1 * gamma(); }  // kappa^2 = lambda * wave_scale
  void validate() const {
    require(0.0 < a && a < b && b < 1.0, "slab requires 0 < a < b < 1");
    require(eps0 > eps1 && eps1 > 0.0, "slab requires eps0 > eps1 > 0");
  }
};

using Mat10 = Eigen::Matrix<cplx, 10, 10>;
using Mat5 = Eigen::Matrix<cplx, 5, 5>;

namespace detail {

struct ExteriorBasis {
  cplx kappa;
  bool affine;
  cplx f(int s, double y) const {
    if (affine) return s == 0 ? cplx(1.0) : cplx(y);
    return std::exp((s == 0 ? 1.0 : -1.0) * I * kappa * y);
  }
  cplx df(int s, double y) const {
    if (affine) return s == 0 ? cplx(0.0) : cplx(1.0);
    double sg = s == 0 ? 1.0 : -1.0;
    return sg * I * kappa * std::exp(sg * I * kappa * y);
  }
};

inline ExteriorBasis exterior_basis(double lambda, const SlabProblem& p) {
  if (lambda == 0.0) return {0.0, true};
  return {std::sqrt(cplx(lambda * p.wave_scale(), 0.0)), false};
}

}  // namespace detail

// Unknowns X = (C1, C2, A1_1, A1_2, A2_1, A2_2, B1_1, B1_2, B2_1, B2_2); rows: v(a) = C (2), v(b) = C (2),
// v(1) = e^{i tau} v(0) (2), v'(1) = e^{i tau} v'(0) (2), jump conditions (2).
inline Mat10 build_M(double lambda, double theta1, const SlabProblem& p) {
  p.validate();
  auto e = detail::exterior_basis(lambda, p);
  const cplx ph = std::polar(1.0, two_pi * theta1);
  Mat10 M = Mat10::Zero();
  auto C = [](int c) { return c; };
  auto A = [](int s, int c) { return 2 + 2 * s + c; };
  auto B = [](int s, int c) { return 6 + 2 * s + c; };
  for (int c = 0; c < 2; ++c) {
    M(0 + c, C(c)) = -1.0;
    M(2 + c, C(c)) = -1.0;
    M(8 + c, C(c)) = lambda * p.eps1 * (p.b - p.a);
    for (int s = 0; s < 2; ++s) {
      M(0 + c, A(s, c)) = e.f(s, p.a);
      M(2 + c, B(s, c)) = e.f(s, p.b);
      M(4 + c, B(s, c)) = e.f(s, 1.0);
      M(4 + c, A(s, c)) = -ph * e.f(s, 0.0);
      M(6 + c, B(s, c)) = e.df(s, 1.0);
      M(6 + c, A(s, c)) = -ph * e.df(s, 0.0);
      M(8 + c, A(s, c)) = -p.weight(c) * e.df(s, p.a);
      M(8 + c, B(s, c)) = p.weight(c) * e.df(s, p.b);
    }
  }
  return M;
}

// Polarisation block: c = 0 (TM, unknowns C1, A1_1, A2_1, B1_1, B2_1) or c = 1 (TE).
inline Mat5 build_block(double lambda, double theta1, const SlabProblem& p, int c) {
  Mat10 M = build_M(lambda, theta1, p);
  Mat5 out;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) out(i, j) = M(2 * i + c, 2 * j + c);
  return out;
}

inline cplx F(double lambda, double theta1, const SlabProblem& p) {
  return Eigen::PartialPivLU<Mat10>(build_M(lambda, theta1, p)).determinant();
}

template <class Mat>
inline RVec singular_values(const Mat& M) {
  return Eigen::JacobiSVD<Mat>(M).singularValues();
}

inline double smin(double lambda, double theta1, const SlabProblem& p) {
  RVec s = singular_values(build_M(lambda, theta1, p));
  return s(s.size() - 1);
}

inline double smin_block(double lambda, double theta1, const SlabProblem& p, int c) {
  RVec s = singular_values(build_block(lambda, theta1, p, c));
  return s(s.size() - 1);
}

struct SlabTraceOptions {
  double lambda_lo = 0.0;
  double lambda_hi = 200.0;
  double step = 0.05;
  int max_refinements = 4;
  double root_tol = 1e-7;       // smin at an accepted root, relative to ||M||
  double multiplicity_tol = 1e-6;
};

struct SlabRoots {
  double theta1 = 0.0;
  std::vector<double> roots;  // ascending, repeated by multiplicity
  int refinements = 0;
  std::vector<std::string> warnings;
};

namespace detail {

// Golden-section minimisation of a unimodal function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol * std::max(1.0, std::abs(lo) + std::abs(hi))) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  double xm = 0.5 * (lo + hi);
  double best = xm, fb = f(xm);
  for (double x : {lo, hi})
    if (double fx = f(x); fx < fb) best = x, fb = fx;
  return best;
}

inline std::vector<double> scan_roots(const std::function<RVec(double)>& sv, const SlabTraceOptions& o, double step) {
  auto sm = [&](double x) {
    RVec s = sv(x);
    return s(s.size() - 1) / std::max(1.0, s(0));
  };
  const int n = static_cast<int>(std::ceil((o.lambda_hi - o.lambda_lo) / step));
  std::vector<double> xs(n + 1), fs(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = std::min(o.lambda_lo + i * step, o.lambda_hi);
    fs[i] = sm(xs[i]);
  }
  std::vector<double> roots;
  for (int i = 0; i <= n; ++i) {
    bool left = i == 0 || fs[i] <= fs[i - 1];
    bool right = i == n || fs[i] < fs[i + 1];
    if (!(left && right)) continue;
    double lo = xs[std::max(i - 1, 0)], hi = xs[std::min(i + 1, n)];
    double x = xs[i];
    if (x != 0.0) {
      // exponentials coalesce as lambda -> 0, so keep the search away from 0+
      if (lo <= 0.0 && hi > 0.0) lo = 1e-3 * step;
      x = golden_min(sm, lo, hi);
    }
    if (sm(x) > o.root_tol) continue;
    RVec s = sv(x);
    int mult = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s(k) <= o.multiplicity_tol * std::max(1.0, s(0))) ++mult;
    for (int k = 0; k < std::max(mult, 1); ++k) roots.push_back(x);
  }
  return roots;
}

}  // namespace detail

// Roots of smin(., theta1) in the window, refining the scan grid until the root count is stable.
// block < 0 gives the full system as the union of the two polarisation blocks: M is block diagonal, and
// near lambda = 0 a TM and a TE root can sit closer than any fixed scan step.
inline SlabRoots slab_roots(double theta1, const SlabProblem& p, const SlabTraceOptions& o = {},
                            int block = -1) {
  if (block < 0) {
    SlabRoots out;
    out.theta1 = theta1;
    for (int c = 0; c < 2; ++c) {
      SlabRoots r = slab_roots(theta1, p, o, c);
      out.roots.insert(out.roots.end(), r.roots.begin(), r.roots.end());
      out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
      out.refinements = std::max(out.refinements, r.refinements);
    }
    std::sort(out.roots.begin(), out.roots.end());
    return out;
  }
  auto sv = [&](double x) -> RVec { return singular_values(build_block(x, theta1, p, block)); };
  SlabRoots out;
  out.theta1 = theta1;
  double step = o.step;
  std::vector<double> prev = detail::scan_roots(sv, o, step);
  for (int r = 0; r < o.max_refinements; ++r) {
    bool close = false;
    for (std::size_t i = 1; i < prev.size(); ++i)
      if (prev[i] - prev[i - 1] > 0.0 && prev[i] - prev[i - 1] < 2.0 * step) close = true;
    std::vector<double> next = detail::scan_roots(sv, o, step / 2.0);
    if (next.size() == prev.size() && !close) break;
    out.warnings.push_back("root count changed or roots closer than the scan step at theta1 = " +
                           std::to_string(theta1) + "; refining the scan");
    step /= 2.0;
    prev = std::move(next);
    ++out.refinements;
  }
  out.roots = std::move(prev);
  return out;
}

}  // namespace pcf
