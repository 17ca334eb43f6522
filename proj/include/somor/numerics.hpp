// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense linear-algebra kernels the rest of the library builds on: guarded
// LU solves, column-pivoted QR, SVD with relative-threshold truncation, and
// column orthonormalization.  Everything is double precision and sized for
// desk-scale systems (n up to a few thousand).

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "somor/error.hpp"

namespace somor {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;

inline constexpr double kRankTol = 1e-12;     // relative rank threshold
inline constexpr double kRcondFloor = 1e-14;  // below this a solve is refused

// One LU factorization reused across many right-hand sides.  The reciprocal
// condition estimate guards against silently amplifying noise through a
// near-singular operator.
class OperatorFactor {
 public:
  explicit OperatorFactor(const Matrix& a) : rows_(a.rows()), lu_(a) {
    require(a.rows() == a.cols(), ErrorCode::DimensionMismatch,
            "operator factorization needs a square matrix");
    rcond_ = lu_.rcond();
    Eigen::VectorXd upiv = lu_.matrixLU().diagonal().cwiseAbs();
    // rcond degenerates to 1 on an exact zero pivot, so check both
    require(std::isfinite(rcond_) && rcond_ > kRcondFloor && upiv.maxCoeff() > 0.0 &&
                upiv.minCoeff() > kRcondFloor * upiv.maxCoeff(),
            ErrorCode::SingularOperator,
            "operator is singular to working precision (rcond = " +
                std::to_string(rcond_) + ")");
  }

  Matrix solve(const Matrix& b) const {
    require(b.rows() == rows_, ErrorCode::DimensionMismatch,
            "right-hand side rows do not match the factored operator");
    return lu_.solve(b);
  }

  // Solves A^H x = b with the same factorization.
  Matrix solve_adjoint(const Matrix& b) const {
    require(b.rows() == rows_, ErrorCode::DimensionMismatch,
            "right-hand side rows do not match the factored operator");
    return lu_.adjoint().solve(b);
  }

  double rcond() const { return rcond_; }

 private:
  Eigen::Index rows_;
  Eigen::PartialPivLU<Matrix> lu_;
  double rcond_;
};

inline Matrix solve_linear(const Matrix& a, const Matrix& b) {
  return OperatorFactor(a).solve(b);
}

struct PivotedQr {
  Matrix q;                      // orthonormal, one column per kept direction
  Matrix r;                      // upper triangular, same column count as input
  std::vector<Eigen::Index> pivots;
  Eigen::Index rank = 0;
};

// Column-pivoted Householder QR.  Rank counts diagonal entries above
// tol * |r_11|; the diagonal magnitudes are non-increasing by construction.
inline PivotedQr qr_pivoted(const Matrix& a, double tol = kRankTol) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  Eigen::Index k = std::min(a.rows(), a.cols());
  PivotedQr out;
  out.q = qr.householderQ() * Matrix::Identity(a.rows(), k);
  out.r = qr.matrixR().topRows(k).template triangularView<Eigen::Upper>();
  const auto& idx = qr.colsPermutation().indices();
  out.pivots.assign(idx.data(), idx.data() + idx.size());
  double head = (k > 0) ? std::abs(out.r(0, 0)) : 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    if (std::abs(out.r(i, i)) > tol * head) ++out.rank;
  return out;
}

struct SvdFactors {
  Matrix u;
  Eigen::VectorXd sigma;  // non-increasing
  Matrix t;               // right factor, a = u * sigma * t^H
};

inline SvdFactors svd(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

// Keeps min(r, numerical rank) singular triplets; values at or below
// tol * sigma_1 are treated as noise.  Asking for more than the numerical
// rank is an error so callers cannot silently project onto noise.
inline SvdFactors svd_truncate(const SvdFactors& f, Eigen::Index r, double tol = kRankTol) {
  Eigen::Index rank = 0;
  double head = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
  for (Eigen::Index i = 0; i < f.sigma.size(); ++i)
    if (f.sigma(i) > tol * head) ++rank;
  require(rank > 0, ErrorCode::RankDeficient, "matrix has numerical rank zero");
  require(r <= rank, ErrorCode::RankDeficient,
          "requested " + std::to_string(r) + " directions, numerical rank is " +
              std::to_string(rank));
  return {f.u.leftCols(r), f.sigma.head(r), f.t.leftCols(r)};
}

// Orthonormal basis for the column span, dropping numerically dependent
// directions.  The result has orthonormal columns to machine precision.
inline Matrix orthonormalize(const Matrix& a, double tol = kRankTol) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  PivotedQr qr = qr_pivoted(a, tol);
  return qr.q.leftCols(qr.rank);
}

inline double binomial(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / i;
  return v;
}

}  // namespace somor
