#pragma once

#include <functional>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "core.hpp"

namespace pcf {

// Rectangular block of integer 2-indices lo..hi per axis, flattened row-major.
struct IndexBox {
  std::array<int, 2> lo{0, 0};
  std::array<int, 2> hi{0, 0};

  static IndexBox square(int m) { return {{-m, -m}, {m, m}}; }
  int n(int a) const { return hi[a] - lo[a] + 1; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(n(0)) * n(1); }
  Eigen::Index index(int p1, int p2) const {
    return static_cast<Eigen::Index>(p1 - lo[0]) * n(1) + (p2 - lo[1]);
  }
  int p(Eigen::Index k, int a) const {
    return a == 0 ? static_cast<int>(k / n(1)) + lo[0] : static_cast<int>(k % n(1)) + lo[1];
  }
  bool contains(int p1, int p2) const {
    return lo[0] <= p1 && p1 <= hi[0] && lo[1] <= p2 && p2 <= hi[1];
  }
};

// Kernel values for every index difference realisable inside a box.
class KernelTable {
 public:
  KernelTable() = default;
  KernelTable(const IndexBox& box, const std::function<cplx(int, int)>& kernel)
      : r1_(box.n(0) - 1), r2_(box.n(1) - 1), v_((2 * r1_ + 1) * (2 * r2_ + 1)) {
    for (int d1 = -r1_; d1 <= r1_; ++d1)
      for (int d2 = -r2_; d2 <= r2_; ++d2) v_[slot(d1, d2)] = kernel(d1, d2);
  }
  cplx operator()(int d1, int d2) const { return v_[slot(d1, d2)]; }
  int reach(int a) const { return a == 0 ? r1_ : r2_; }

 private:
  std::size_t slot(int d1, int d2) const {
    return static_cast<std::size_t>(d1 + r1_) * (2 * r2_ + 1) + (d2 + r2_);
  }
  int r1_ = 0, r2_ = 0;
  std::vector<cplx> v_;
};

namespace detail {
inline int fft_size(int n) {
  for (int L = n;; ++L) {
    int r = L;
    for (int f : {2, 3, 5}) while (r % f == 0) r /= f;
    if (r == 1) return L;
  }
}
}  // namespace detail

// Galerkin product with a piecewise-constant coefficient: (T x)_q = sum_p ker(q - p) x_p, q, p in the box.
class ToeplitzConvolver {
 public:
  ToeplitzConvolver(const IndexBox& box, const KernelTable& ker) : box_(box) {
    L1_ = detail::fft_size(2 * box.n(0) - 1);
    L2_ = detail::fft_size(2 * box.n(1) - 1);
    khat_.assign(static_cast<std::size_t>(L1_) * L2_, 0.0);
    for (int d1 = -ker.reach(0); d1 <= ker.reach(0); ++d1)
      for (int d2 = -ker.reach(1); d2 <= ker.reach(1); ++d2)
        khat_[wrap(d1, L1_) * L2_ + wrap(d2, L2_)] = ker(d1, d2);
    Eigen::FFT<double> fft;
    std::vector<cplx> in(std::max(L1_, L2_)), out(std::max(L1_, L2_));
    for (int i = 0; i < L1_; ++i) {
      fft.fwd(out.data(), &khat_[static_cast<std::size_t>(i) * L2_], L2_);
      std::copy(out.begin(), out.begin() + L2_, khat_.begin() + static_cast<std::ptrdiff_t>(i) * L2_);
    }
    for (int j = 0; j < L2_; ++j) {
      for (int i = 0; i < L1_; ++i) in[i] = khat_[static_cast<std::size_t>(i) * L2_ + j];
      fft.fwd(out.data(), in.data(), L1_);
      for (int i = 0; i < L1_; ++i) khat_[static_cast<std::size_t>(i) * L2_ + j] = out[i];
    }
  }

  const IndexBox& box() const { return box_; }

  CMat apply(const CMat& x) const {
    require(x.rows() == box_.size(), "convolver input does not match its box");
    const int n1 = box_.n(0), n2 = box_.n(1);
    Eigen::FFT<double> fft;
    std::vector<cplx> a(static_cast<std::size_t>(n1) * L2_);
    std::vector<cplx> col(L1_), tmp(std::max(L1_, L2_)), row(L2_);
    CMat y(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      for (int i = 0; i < n1; ++i) {
        std::fill(row.begin(), row.end(), cplx(0.0));
        for (int j = 0; j < n2; ++j) row[j] = x(static_cast<Eigen::Index>(i) * n2 + j, c);
        fft.fwd(&a[static_cast<std::size_t>(i) * L2_], row.data(), L2_);
      }
      for (int j = 0; j < L2_; ++j) {
        std::fill(col.begin(), col.end(), cplx(0.0));
        for (int i = 0; i < n1; ++i) col[i] = a[static_cast<std::size_t>(i) * L2_ + j];
        fft.fwd(tmp.data(), col.data(), L1_);
        for (int i = 0; i < L1_; ++i) tmp[i] *= khat_[static_cast<std::size_t>(i) * L2_ + j];
        fft.inv(col.data(), tmp.data(), L1_);
        for (int i = 0; i < n1; ++i) a[static_cast<std::size_t>(i) * L2_ + j] = col[i];
      }
      for (int i = 0; i < n1; ++i) {
        fft.inv(tmp.data(), &a[static_cast<std::size_t>(i) * L2_], L2_);
        for (int j = 0; j < n2; ++j) y(static_cast<Eigen::Index>(i) * n2 + j, c) = tmp[j];
      }
    }
    return y;
  }

 private:
  static std::size_t wrap(int d, int L) { return static_cast<std::size_t>(((d % L) + L) % L); }

  IndexBox box_;
  int L1_ = 1, L2_ = 1;
  std::vector<cplx> khat_;
};

}  // namespace pcf
