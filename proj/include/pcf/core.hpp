#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pcf {

using cplx = std::complex<double>;
using Vec2 = std::array<double, 2>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

enum class ErrorKind {
  invalid_argument,
  critical_dispersion,
  non_solvable,
  rank_collapse,
  indefinite_mass,
  eigensolver,
  spectrum_bottom,
  extrapolation,
  empty_window,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::critical_dispersion: return "critical dispersion";
    case ErrorKind::non_solvable: return "non-solvable";
    case ErrorKind::rank_collapse: return "rank collapse";
    case ErrorKind::indefinite_mass: return "indefinite mass matrix";
    case ErrorKind::eigensolver: return "eigensolver failure";
    case ErrorKind::spectrum_bottom: return "k above spectrum bottom";
    case ErrorKind::extrapolation: return "non-converged extrapolation";
    case ErrorKind::empty_window: return "window too small";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::invalid_argument, what);
}

// Quasi-momentum in [0,1)^2.
class BlochTheta {
 public:
  BlochTheta() = default;
  BlochTheta(double t1, double t2) : t_{reduce(t1), reduce(t2)} {}

  double operator[](int i) const { return t_[i]; }
  const Vec2& values() const { return t_; }
  bool is_zero() const { return t_[0] == 0.0 && t_[1] == 0.0; }

  // Representative in [-1/2, 1/2)^2.
  Vec2 centered() const {
    Vec2 c = t_;
    for (double& x : c)
      if (x >= 0.5) x -= 1.0;
    return c;
  }
  // Distance from theta to the integer lattice.
  double lattice_distance() const {
    Vec2 c = centered();
    return std::hypot(c[0], c[1]);
  }

  static double reduce(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
  }

 private:
  Vec2 t_{0.0, 0.0};
};

inline bool operator==(const BlochTheta& a, const BlochTheta& b) {
  return a[0] == b[0] && a[1] == b[1];
}

}  // namespace pcf
