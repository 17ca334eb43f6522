// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense generalized Lyapunov solver
//
//   A P E^T + E P A^T + Z Z^T = 0          (controllability side)
//   A^T Q E + E^T Q A + Z Z^T = 0          (observability side, Z = D^T)
//
// solved by reduction to standard form with E's LU factors, one complex
// Schur decomposition, and triangular back-substitution.  A short iterative
// refinement loop pushes the residual to the representable floor, and the
// Gramian comes back as a Cholesky-like factor R with P ~= R R^T.

#pragma once

#include <Eigen/Dense>
#include <string>

#include "somor/error.hpp"
#include "somor/numerics.hpp"

namespace somor {

enum class LyapunovSide { Controllability, Observability };

namespace detail {

// Solves T X + X T^H = -Q for upper triangular T (all diagonal entries in
// the open left half-plane) and Hermitian Q, by columns from the last.
inline Matrix triangular_lyapunov(const Matrix& t, const Matrix& q) {
  const Eigen::Index n = t.rows();
  Matrix x = Matrix::Zero(n, n);
  Matrix shifted(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    Vector rhs = -q.col(j);
    if (j + 1 < n)
      rhs -= x.rightCols(n - 1 - j) * t.row(j).tail(n - 1 - j).conjugate().transpose();
    shifted = t;
    shifted.diagonal().array() += std::conj(t(j, j));
    x.col(j) = shifted.template triangularView<Eigen::Upper>().solve(rhs);
  }
  return x;
}

}  // namespace detail

// Returns R (N x r, r = count of positive Gramian eigenvalues, ordered by
// decreasing eigenvalue).  Throws UnstablePencil when any pencil eigenvalue
// leaves the open left half-plane, SingularE when E cannot be factored, and
// NoConvergence when refinement cannot reach the residual target.
inline RealMatrix lyapunov_solve(const RealMatrix& a_in, const RealMatrix& e_in,
                                 const RealMatrix& z_in, LyapunovSide side) {
  require(a_in.rows() == a_in.cols() && e_in.rows() == e_in.cols() &&
              a_in.rows() == e_in.rows() && z_in.rows() == a_in.rows(),
          ErrorCode::DimensionMismatch, "Lyapunov inputs must share the state dimension");
  const Eigen::Index n = a_in.rows();

  // the observability equation is the controllability one for (A^T, E^T)
  RealMatrix a = (side == LyapunovSide::Controllability) ? a_in : a_in.transpose();
  RealMatrix e = (side == LyapunovSide::Controllability) ? e_in : e_in.transpose();
  const RealMatrix& z = z_in;

  Eigen::PartialPivLU<RealMatrix> lu_e(e);
  Eigen::VectorXd upiv = lu_e.matrixLU().diagonal().cwiseAbs();
  double rc = lu_e.rcond();
  // rcond degenerates to 1 on an exact zero pivot, so check both
  require(std::isfinite(rc) && rc > kRcondFloor &&
              upiv.minCoeff() > kRcondFloor * upiv.maxCoeff(),
          ErrorCode::SingularMass, "descriptor matrix is singular to working precision");

  RealMatrix a_std = lu_e.solve(a);
  Eigen::ComplexSchur<Matrix> schur(a_std.cast<Complex>());
  require(schur.info() == Eigen::Success, ErrorCode::NoConvergence,
          "Schur decomposition did not converge");
  const Matrix& t = schur.matrixT();
  const Matrix& u = schur.matrixU();
  for (Eigen::Index i = 0; i < n; ++i)
    require(t(i, i).real() < 0.0, ErrorCode::UnstablePencil,
            "pencil eigenvalue with nonnegative real part at index " + std::to_string(i));

  RealMatrix rhs = z * z.transpose();
  const double rhs_norm = rhs.norm();
  RealMatrix p = RealMatrix::Zero(n, n);

  // refinement reuses the Schur factors; each pass solves for the residual
  double residual = rhs_norm;
  for (int pass = 0; pass < 5; ++pass) {
    RealMatrix res = a * p * e.transpose() + e * p * a.transpose() + rhs;
    residual = res.norm();
    if (residual <= 1e-10 * rhs_norm || rhs_norm == 0.0) break;
    RealMatrix w = lu_e.solve(res);
    RealMatrix res_std = lu_e.solve(w.transpose()).transpose();  // E^-1 Res E^-T
    Matrix q = u.adjoint() * res_std.cast<Complex>() * u;
    Matrix y = detail::triangular_lyapunov(t, q);
    RealMatrix dp = (u * y * u.adjoint()).real();
    p += 0.5 * (dp + dp.transpose());
  }
  {
    RealMatrix res = a * p * e.transpose() + e * p * a.transpose() + rhs;
    residual = res.norm();
  }
  require(rhs_norm == 0.0 || residual <= 1e-8 * rhs_norm, ErrorCode::NoConvergence,
          "Lyapunov residual stalled at " + std::to_string(residual / rhs_norm) +
              " relative");

  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(p);
  require(eig.info() == Eigen::Success, ErrorCode::NoConvergence,
          "Gramian eigendecomposition failed");
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (eig.eigenvalues()(i) > 0.0) ++count;
  RealMatrix r(n, count);
  Eigen::Index col = 0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {  // descending eigenvalue order
    double lambda = eig.eigenvalues()(i);
    if (lambda > 0.0) r.col(col++) = eig.eigenvectors().col(i) * std::sqrt(lambda);
  }
  return r;
}

}  // namespace somor
