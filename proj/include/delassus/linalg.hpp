#pragma once

#include <cassert>
#include <utility>
#include <vector>

#include "delassus/scalar.hpp"

namespace delassus {

/// Dense row-major matrix over the project scalar types.
template <typename S>
class MatX {
 public:
  MatX() = default;
  MatX(int rows, int cols)
      : r_(rows), c_(cols), d_(static_cast<std::size_t>(rows) * cols, S(0)) {}

  static MatX identity(int n) {
    MatX m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  bool empty() const { return r_ == 0 || c_ == 0; }

  S& operator()(int i, int j) {
    assert(i >= 0 && i < r_ && j >= 0 && j < c_);
    return d_[static_cast<std::size_t>(i) * c_ + j];
  }
  const S& operator()(int i, int j) const {
    assert(i >= 0 && i < r_ && j >= 0 && j < c_);
    return d_[static_cast<std::size_t>(i) * c_ + j];
  }

  S* row_ptr(int i) { return d_.data() + static_cast<std::size_t>(i) * c_; }
  const S* row_ptr(int i) const {
    return d_.data() + static_cast<std::size_t>(i) * c_;
  }

  void set_zero() {
    for (auto& x : d_) x = S(0);
  }

  MatX transposed() const {
    MatX t(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Copies src into this matrix with its top-left corner at (r0, c0).
  void set_block(int r0, int c0, const MatX& src) {
    for (int i = 0; i < src.rows(); ++i)
      for (int j = 0; j < src.cols(); ++j) (*this)(r0 + i, c0 + j) = src(i, j);
  }

  MatX block(int r0, int c0, int nr, int nc) const {
    MatX b(nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

 private:
  int r_ = 0, c_ = 0;
  std::vector<S> d_;
};

// Dot-product loops assign the first term instead of accumulating onto a
// zero seed, so metered counts carry no spurious additions.
template <typename S>
MatX<S> operator*(const MatX<S>& a, const MatX<S>& b) {
  assert(a.cols() == b.rows());
  MatX<S> c(a.rows(), b.cols());
  if (a.cols() == 0) return c;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      S s = a(i, 0) * b(0, j);
      for (int k = 1; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

template <typename S>
MatX<S> operator+(const MatX<S>& a, const MatX<S>& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  MatX<S> c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

template <typename S>
MatX<S> operator-(const MatX<S>& a, const MatX<S>& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  MatX<S> c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

/// In-place lower Cholesky A = L L^T. Returns false on a nonpositive pivot.
/// No pivoting, so the operation count depends only on n.
template <typename S>
bool llt_in_place(MatX<S>& a) {
  const int n = a.rows();
  assert(a.cols() == n);
  for (int j = 0; j < n; ++j) {
    S d = a(j, j);
    for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(to_double(d) > 0.0)) return false;
    using std::sqrt;
    const S l = sqrt(d);
    a(j, j) = l;
    for (int i = j + 1; i < n; ++i) {
      S s = a(i, j);
      for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / l;
    }
    for (int i = 0; i < j; ++i) a(i, j) = S(0);
  }
  return true;
}

/// Solves L X = B in place (L lower triangular from llt_in_place).
template <typename S>
void forward_solve_in_place(const MatX<S>& l, MatX<S>& b) {
  const int n = l.rows();
  for (int c = 0; c < b.cols(); ++c) {
    for (int i = 0; i < n; ++i) {
      S s = b(i, c);
      for (int k = 0; k < i; ++k) s -= l(i, k) * b(k, c);
      b(i, c) = s / l(i, i);
    }
  }
}

/// Solves L^T X = B in place.
template <typename S>
void backward_solve_in_place(const MatX<S>& l, MatX<S>& b) {
  const int n = l.rows();
  for (int c = 0; c < b.cols(); ++c) {
    for (int i = n - 1; i >= 0; --i) {
      S s = b(i, c);
      for (int k = i + 1; k < n; ++k) s -= l(k, i) * b(k, c);
      b(i, c) = s / l(i, i);
    }
  }
}

/// Explicit inverse of a small symmetric positive-definite matrix via
/// Cholesky. Returns false if the matrix is not PD. For n == 1 this is a
/// single reciprocal.
template <typename S>
bool sym_pd_inverse(const MatX<S>& a, MatX<S>& inv) {
  const int n = a.rows();
  assert(a.cols() == n);
  if (n == 1) {
    if (!(to_double(a(0, 0)) > 0.0)) return false;
    inv = MatX<S>(1, 1);
    inv(0, 0) = S(1) / a(0, 0);
    return true;
  }
  MatX<S> l = a;
  if (!llt_in_place(l)) return false;
  // Invert L in place (forward), then inv = L^-T L^-1.
  MatX<S> li = MatX<S>::identity(n);
  forward_solve_in_place(l, li);
  inv = MatX<S>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      S s = li(i, i) * li(i, j);
      for (int k = i + 1; k < n; ++k) s += li(k, i) * li(k, j);
      inv(i, j) = s;
      inv(j, i) = s;
    }
  return true;
}

}  // namespace delassus
