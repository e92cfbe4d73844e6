#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "cell.hpp"
#include "limit.hpp"

namespace pcf {

struct GreenResolution {
  std::vector<double> sigmas{1.0 / 64.0, 1.0 / 128.0};
  std::vector<double> radii{1.0 / 16.0, 1.0 / 32.0};
  int cutoff = 128;
  int order = 3;       // mollifier smoothness p
  double tol = 1e-4;   // accepted tableau spread
};

struct GreenConstant {
  BlochTheta theta;
  double k = 0.0;
  double value = 0.0;
  double error = 0.0;  // spread of the (sigma, r) tableau
  GreenResolution resolution;
  std::vector<double> tableau;  // row-major over (sigma, r)
};

// Bottom of the spectrum of -Delta on theta-quasi-periodic functions.
inline double spectrum_bottom(const BlochTheta& theta) {
  double d = theta.lattice_distance();
  return 4.0 * pi * pi * d * d;
}

namespace detail {

inline double factorial(int n) { return std::tgamma(n + 1.0); }

// Fourier transform of the unit-mass mollifier (1 - |x|^2/R^2)^p, normalised, at q = |xi| R.
inline double mollifier_hat(double q, int p) {
  if (q < 1e-6) return 1.0;
  return std::pow(2.0, p + 1) * factorial(p + 1) * std::cyl_bessel_j(p + 1.0, q) / std::pow(q, p + 1);
}

// Radial free-space Green's function pieces for -Delta - k with kappa = sqrt|k|.
inline double mollifier_gain(double k, double R, int p) {
  if (k == 0.0) return 1.0;
  double x = std::sqrt(std::abs(k)) * R;
  if (x < 1e-6) return 1.0;
  double b = k < 0.0 ? std::cyl_bessel_i(p + 1.0, x) : std::cyl_bessel_j(p + 1.0, x);
  return std::pow(2.0, p + 1) * factorial(p + 1) * b / std::pow(x, p + 1);
}

inline void check_green_args(const BlochTheta& theta, double k) {
  require(!theta.is_zero(), "g0 is undefined at theta = 0");
  if (!(k < spectrum_bottom(theta)))
    throw Error(ErrorKind::spectrum_bottom, "k must lie below 4 pi^2 min_z |theta + z|^2");
}

// g0 from one mollifier width and probe radius: circle average of G_sigma at radius r,
// with the smooth local part of the free-space kernel removed analytically.
inline double g0_entry(const BlochTheta& theta, double k, double sigma, double r, int M, int p) {
  const double R = 2.0 * sigma;
  double avg = 0.0;
  for (int z1 = -M; z1 <= M; ++z1)
    for (int z2 = -M; z2 <= M; ++z2) {
      double q = two_pi * std::hypot(theta[0] + z1, theta[1] + z2);
      avg += mollifier_hat(q * R, p) * std::cyl_bessel_j(0.0, q * r) / (q * q - k);
    }
  const double euler = std::numbers::egamma;
  if (k == 0.0) return avg + std::log(r) / two_pi;
  double kap = std::sqrt(std::abs(k));
  double g = avg / mollifier_gain(k, R, p);
  double h0 = k < 0.0 ? (g - std::cyl_bessel_k(0.0, kap * r) / two_pi) / std::cyl_bessel_i(0.0, kap * r)
                      : (g + std::cyl_neumann(0.0, kap * r) / 4.0) / std::cyl_bessel_j(0.0, kap * r);
  return h0 - (std::log(kap / 2.0) + euler) / two_pi;
}

}  // namespace detail

inline GreenConstant green_g0(const BlochTheta& theta, double k, const GreenResolution& res = {}) {
  detail::check_green_args(theta, k);
  require(!res.sigmas.empty() && !res.radii.empty(), "green resolution needs widths and radii");
  for (double s : res.sigmas)
    for (double r : res.radii) require(s > 0.0 && 2.0 * s <= r && r < 0.5, "need 0 < 2 sigma <= r < 1/2");
  GreenConstant g;
  g.theta = theta;
  g.k = k;
  g.resolution = res;
  for (double s : res.sigmas)
    for (double r : res.radii) g.tableau.push_back(detail::g0_entry(theta, k, s, r, res.cutoff, res.order));
  auto [lo, hi] = std::minmax_element(g.tableau.begin(), g.tableau.end());
  double sum = 0.0;
  for (double v : g.tableau) sum += v;
  g.value = sum / static_cast<double>(g.tableau.size());
  g.error = *hi - *lo;
  if (g.error > res.tol)
    throw Error(ErrorKind::extrapolation, "g0 tableau spread " + std::to_string(g.error) + " exceeds tolerance");
  return g;
}

struct DerivativeIdentity {
  double finite_difference = 0.0;
  double spectral_sum = 0.0;  // truncated sum plus tail_bound
  double tail_bound = 0.0;
  std::vector<double> partial_sums;  // over |z|_inf <= 25, 50, 100, ...
};

inline DerivativeIdentity green_derivative_identity(const BlochTheta& theta, double k, double h = 1e-3,
                                                    const GreenResolution& res = {}, int sum_cutoff = 400) {
  detail::check_green_args(theta, k + h);
  require(h > 0.0 && sum_cutoff >= 2, "need h > 0 and a sum cutoff of at least 2");
  DerivativeIdentity out;
  // one (sigma, r) pair on both sides so the regularisation error cancels
  GreenResolution one = res;
  one.sigmas = {res.sigmas.front()};
  one.radii = {res.radii.front()};
  one.tol = std::numeric_limits<double>::infinity();
  out.finite_difference = (green_g0(theta, k + h, one).value - green_g0(theta, k - h, one).value) / (2.0 * h);

  std::vector<int> marks;
  for (int m = 25; m < sum_cutoff; m *= 2) marks.push_back(m);
  marks.push_back(sum_cutoff);
  // shells |z|_inf = m, accumulated in order
  auto term = [&](int z1, int z2) {
    double lam = 4.0 * pi * pi * (std::pow(theta[0] + z1, 2) + std::pow(theta[1] + z2, 2));
    return 1.0 / ((lam - k) * (lam - k));
  };
  double acc = term(0, 0);
  std::size_t next = 0;
  for (int m = 1; m <= sum_cutoff; ++m) {
    for (int j = -m; j <= m; ++j) {
      acc += term(m, j) + term(-m, j);
      if (std::abs(j) < m) acc += term(j, m) + term(j, -m);
    }
    if (next < marks.size() && m == marks[next]) {
      out.partial_sums.push_back(acc);
      ++next;
    }
  }
  const double M1 = sum_cutoff - 1.0;
  double tail = 8.0 / (16.0 * std::pow(pi, 4)) * (1.0 / (2.0 * M1 * M1) + 1.0 / (3.0 * M1 * M1 * M1));
  if (k > 0.0) tail /= std::pow(1.0 - k / (4.0 * pi * pi * M1 * M1), 2);
  out.tail_bound = tail;
  out.spectral_sum = acc + tail;
  return out;
}

struct DiscIntegral {
  double lhs = 0.0;  // int_{B_delta} u with -Delta u = chi0
  double rhs = 0.0;  // pi/8 delta^4 - pi^2 delta^4 (ln(delta)/2pi - g0)
  GreenConstant g0;
};

// Direct side only.
inline double disc_integral_direct(double delta, const BlochTheta& theta, int cutoff = 64) {
  require(!theta.is_zero(), "disc integral needs theta != 0");
  require(delta > 0.0 && delta < 0.5, "disc radius must lie in (0, 1/2)");
  InclusionGeometry disc = Disc{delta};
  FourierField f(theta, cutoff, 1);
  for (Eigen::Index q = 0; q < f.box.size(); ++q)
    f.coeffs(q, 0) = indicator_fourier(disc, theta[0] + f.box.z1(q), theta[1] + f.box.z2(q));
  return inner(laplace_solve(f), f).real();
}

inline DiscIntegral disc_integral_u(double delta, const BlochTheta& theta, int cutoff = 64,
                                    const GreenResolution& res = {}) {
  DiscIntegral d;
  d.lhs = disc_integral_direct(delta, theta, cutoff);
  d.g0 = green_g0(theta, 0.0, res);
  double d4 = std::pow(delta, 4);
  d.rhs = pi / 8.0 * d4 - pi * pi * d4 * (std::log(delta) / two_pi - d.g0.value);
  return d;
}

// J_n by its power series; adequate for the small arguments used here.
inline double bessel_j_series(int n, double x) {
  double term = std::pow(0.5 * x, n) / detail::factorial(n), sum = term;
  for (int m = 1; m < 60; ++m) {
    term *= -0.25 * x * x / (m * static_cast<double>(m + n));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

inline double bessel_j1_prime(double x) { return 0.5 * (bessel_j_series(0, x) - bessel_j_series(2, x)); }

// First non-zero Neumann eigenvalue of the unit disc, (j'_{1,1})^2.
inline double neumann_mu2() {
  double lo = 1.5, hi = 2.2;
  while (hi - lo > 1e-14) {
    double mid = 0.5 * (lo + hi);
    (bessel_j1_prime(lo) * bessel_j1_prime(mid) <= 0.0 ? hi : lo) = mid;
  }
  double x = 0.5 * (lo + hi);
  return x * x;
}

struct ArrowRow {
  BlochTheta theta;
  bool from_limit_solve = false;  // theta = 0: eigenvalues of the limit problem, not bounds
  double disc_integral = 0.0;
  double lambda1_upper = 0.0;
  double lambda2_upper = 0.0;
  double lambda3_lower = 0.0;
};

struct ArrowBoundsReport {
  double delta = 0.0;
  double mu2 = 0.0;
  double c_upper = 0.0;  // lambda2 <= c_upper |Q0| / int N
  double c_lower = 0.0;  // lambda3 >= c_lower mu2 delta^-2
  std::vector<ArrowRow> rows;
  double max_lambda2_upper = 0.0;
  double min_lambda3_lower = 0.0;
  bool gap = false;
};

struct ArrowOptions {
  int cutoff = 64;           // direct solve for N
  Resolution limit;          // used only for theta = 0 rows
};

// Upper bound from the Rayleigh quotient on span{grad N, grad_perp N}, -Delta N = chi0; the lower bound
// rescales mu2 delta^-2 by the ellipticity of the limit form on the inclusion relative to its mass.
inline ArrowBoundsReport arrow_bounds(const CellSpec& cell, const std::vector<BlochTheta>& thetas,
                                      const ArrowOptions& opt = {}) {
  validate(cell);
  const auto* disc = std::get_if<Disc>(&cell.geometry);
  require(disc != nullptr, "arrow bounds need a disc inclusion");
  require(!thetas.empty(), "arrow bounds need at least one theta");
  const double g = gamma(cell), delta = disc->radius, area = pi * delta * delta;
  ArrowBoundsReport rep;
  rep.delta = delta;
  rep.mu2 = neumann_mu2();
  rep.c_upper = (1.0 + 1.0 / g) / cell.eps1;
  rep.c_lower = 1.0 / (g * cell.eps0);
  rep.max_lambda2_upper = -std::numeric_limits<double>::infinity();
  rep.min_lambda3_lower = std::numeric_limits<double>::infinity();
  const double low = rep.c_lower * rep.mu2 / (delta * delta);
  for (const BlochTheta& t : thetas) {
    ArrowRow row;
    row.theta = t;
    if (t.is_zero()) {
      Spectrum s = solve_limit_spectrum(t, cell, 3, opt.limit);
      row.from_limit_solve = true;
      row.lambda1_upper = s.eigenvalues[0];
      row.lambda2_upper = s.eigenvalues[1];
      row.lambda3_lower = s.eigenvalues[2];
    } else {
      row.disc_integral = disc_integral_direct(delta, t, opt.cutoff);
      row.lambda1_upper = row.lambda2_upper = rep.c_upper * area / row.disc_integral;
      row.lambda3_lower = low;
      rep.max_lambda2_upper = std::max(rep.max_lambda2_upper, row.lambda2_upper);
      rep.min_lambda3_lower = std::min(rep.min_lambda3_lower, row.lambda3_lower);
    }
    rep.rows.push_back(row);
  }
  rep.gap = rep.max_lambda2_upper < rep.min_lambda3_lower;
  return rep;
}

}  // namespace pcf
