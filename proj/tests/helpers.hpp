// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared test utilities.  Oracles here intentionally avoid the library's
// own code paths: inverses come from hand-rolled Gauss-Jordan elimination
// and randomness from a different engine than the generators use.

#pragma once

#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>
#include <complex>
#include <random>

#include "somor/error.hpp"

namespace somor_test {

/// Matcher for REQUIRE_THROWS_MATCHES asserting a specific failure code.
inline auto HasCode(somor::ErrorCode code) {
  return Catch::Matchers::Predicate<somor::Error>(
      [code](const somor::Error& e) { return e.code() == code; },
      "has the expected error code");
}

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

class Rng {
 public:
  explicit Rng(std::uint32_t seed) : eng_(seed) {}
  double unit() {
    return static_cast<double>(eng_()) / static_cast<double>(eng_.max());
  }
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
  Complex cplx() { return {range(-1.0, 1.0), range(-1.0, 1.0)}; }

 private:
  std::mt19937 eng_;
};

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = rng.cplx();
  return a;
}

inline RealMatrix random_real_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  RealMatrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = rng.range(-1.0, 1.0);
  return a;
}

// Gauss-Jordan with partial pivoting; an inverse oracle independent of the
// library's LU route.
inline Matrix gauss_jordan_inverse(Matrix a) {
  const Eigen::Index n = a.rows();
  Matrix inv = Matrix::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    a.row(col).swap(a.row(piv));
    inv.row(col).swap(inv.row(piv));
    Complex d = a(col, col);
    a.row(col) /= d;
    inv.row(col) /= d;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      Complex f = a(r, col);
      if (f != Complex(0.0)) {
        a.row(r) -= f * a.row(col);
        inv.row(r) -= f * inv.row(col);
      }
    }
  }
  return inv;
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  double scale = b.norm();
  if (scale == 0.0) return a.norm();
  return (a - b).norm() / scale;
}

// Largest principal angle between the column spans of two full-column-rank
// matrices of equal width; orthonormalization here is plain Householder QR,
// not the library's pivoted route.
inline double max_principal_angle(const Matrix& a, const Matrix& b) {
  Eigen::HouseholderQR<Matrix> qa(a);
  Eigen::HouseholderQR<Matrix> qb(b);
  Matrix q1 = qa.householderQ() * Matrix::Identity(a.rows(), a.cols());
  Matrix q2 = qb.householderQ() * Matrix::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<Matrix> dec(q1.adjoint() * q2);
  double cosine = dec.singularValues().minCoeff();
  cosine = std::min(1.0, std::max(-1.0, cosine));
  return std::acos(cosine);
}

}  // namespace somor_test
