#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "core.hpp"

namespace pcf {

struct Disc {
  double radius = 0.3;
  Vec2 center{0.5, 0.5};
};

// Inclusion [a,b] x [0,1).
struct Slab {
  double a = 0.25;
  double b = 0.75;
};

// Binary grid over Q; cell (i,j) covers [i/n1,(i+1)/n1) x [j/n2,(j+1)/n2).
struct Raster {
  int n1 = 0;
  int n2 = 0;
  std::vector<std::uint8_t> cells;  // row-major, index i*n2 + j
  bool at(int i, int j) const { return cells[static_cast<std::size_t>(i) * n2 + j] != 0; }
};

using InclusionGeometry = std::variant<Disc, Slab, Raster>;

namespace detail {

inline bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// sin(pi x)/(pi x)
inline double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - (pi * x) * (pi * x) / 6.0;
  return std::sin(pi * x) / (pi * x);
}

// int_a^b exp(-2 pi i k y) dy
inline cplx interval_fourier(double k, double a, double b) {
  double w = b - a;
  return std::polar(w * sinc(k * w), -pi * k * (a + b));
}

inline double wrap_distance(double x, double c) {
  double d = std::abs(x - c);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

}  // namespace detail

inline void validate(const InclusionGeometry& g) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disc>) {
          require(s.radius > 0.0 && s.radius < 0.5, "disc radius must lie in (0, 1/2)");
        } else if constexpr (std::is_same_v<T, Slab>) {
          require(0.0 < s.a && s.a < s.b && s.b < 1.0, "slab requires 0 < a < b < 1");
        } else {
          require(detail::power_of_two(s.n1) && detail::power_of_two(s.n2),
                  "raster dimensions must be powers of two");
          require(s.cells.size() == static_cast<std::size_t>(s.n1) * s.n2,
                  "raster cell count does not match its dimensions");
          std::size_t on = 0;
          for (auto c : s.cells) on += c != 0;
          require(on > 0 && on < s.cells.size(), "raster must have both phases present");
        }
      },
      g);
}

inline double inclusion_area(const InclusionGeometry& g) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return pi * s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, Slab>) {
          return s.b - s.a;
        } else {
          std::size_t on = 0;
          for (auto c : s.cells) on += c != 0;
          return static_cast<double>(on) / static_cast<double>(s.cells.size());
        }
      },
      g);
}

// int_{Q0} exp(-2 pi i k.y) dy for real frequencies k.
inline cplx indicator_fourier(const InclusionGeometry& g, double k1, double k2) {
  return std::visit(
      [k1, k2](const auto& s) -> cplx {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disc>) {
          double k = std::hypot(k1, k2);
          double d = s.radius;
          cplx phase = std::polar(1.0, -two_pi * (k1 * s.center[0] + k2 * s.center[1]));
          if (k == 0.0) return pi * d * d;
          double x = two_pi * d * k;
          double amp = x < 1e-6 ? pi * d * d * (1.0 - x * x / 8.0) : d * std::cyl_bessel_j(1.0, x) / k;
          return amp * phase;
        } else if constexpr (std::is_same_v<T, Slab>) {
          return detail::interval_fourier(k1, s.a, s.b) * detail::interval_fourier(k2, 0.0, 1.0);
        } else {
          std::vector<cplx> row(s.n1), col(s.n2);
          for (int i = 0; i < s.n1; ++i)
            row[i] = detail::interval_fourier(k1, double(i) / s.n1, double(i + 1) / s.n1);
          for (int j = 0; j < s.n2; ++j)
            col[j] = detail::interval_fourier(k2, double(j) / s.n2, double(j + 1) / s.n2);
          cplx sum = 0.0;
          for (int i = 0; i < s.n1; ++i) {
            cplx acc = 0.0;
            for (int j = 0; j < s.n2; ++j)
              if (s.at(i, j)) acc += col[j];
            sum += row[i] * acc;
          }
          return sum;
        }
      },
      g);
}

inline cplx indicator_fourier(const InclusionGeometry& g, int n1, int n2) {
  return indicator_fourier(g, static_cast<double>(n1), static_cast<double>(n2));
}

// Membership of a point of Q in the inclusion Q0.
inline bool inside(const InclusionGeometry& g, double y1, double y2) {
  return std::visit(
      [y1, y2](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disc>) {
          double d1 = detail::wrap_distance(y1, s.center[0]);
          double d2 = detail::wrap_distance(y2, s.center[1]);
          return d1 * d1 + d2 * d2 < s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, Slab>) {
          double x = y1 - std::floor(y1);
          return s.a <= x && x <= s.b;
        } else {
          double x = y1 - std::floor(y1), y = y2 - std::floor(y2);
          int i = std::min(static_cast<int>(x * s.n1), s.n1 - 1);
          int j = std::min(static_cast<int>(y * s.n2), s.n2 - 1);
          return s.at(i, j);
        }
      },
      g);
}

}  // namespace pcf
