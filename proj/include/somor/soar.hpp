// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <functional>

#include "somor/error.hpp"
#include "somor/numerics.hpp"

namespace somor {

// Orthonormal basis of the second-order Krylov space
//   span{v0, v1, v2, ...},  v1 = A v0,  v_i = A v_{i-1} + B v_{i-2},
// computed with the two-sequence recurrence that avoids forming the
// doubled-size linearization. A deflated step contributes no basis column
// but keeps its auxiliary vector, so later directions are still generated.
struct SoarBasis {
  Matrix q;                    // orthonormal columns; may be fewer than requested
  Eigen::Index requested = 0;
  Eigen::Index deflations = 0;
  bool breakdown = false;      // residual and auxiliary both vanished early
};

struct SoarOptions {
  // Deflation when the post-orthogonalization residual drops below this
  // fraction of the pre-orthogonalization norm.
  double deflation_tol = 1e-10;
};

using VectorMap = std::function<Vector(const Vector&)>;

inline SoarBasis soar(const VectorMap& apply_a, const VectorMap& apply_b,
                      const Vector& v0, Eigen::Index count,
                      const SoarOptions& opts = {}) {
  require(count >= 1, ErrorCode::BadConfig, "soar: requested dimension must be positive");
  const double v0_norm = v0.norm();
  require(v0_norm > 0.0, ErrorCode::Breakdown, "soar: start vector is zero");

  const Eigen::Index n = v0.size();
  Matrix q = Matrix::Zero(n, count);
  Matrix p = Matrix::Zero(n, count);
  q.col(0) = v0 / v0_norm;

  SoarBasis out;
  out.requested = count;
  Eigen::Index built = 1;

  for (Eigen::Index j = 1; j < count; ++j) {
    Vector r = apply_a(q.col(j - 1)) + apply_b(p.col(j - 1));
    Vector s = q.col(j - 1);
    const double before = r.norm();
    // MGS with a second pass; coefficients are mirrored onto the auxiliary
    // sequence so (q, p) stays a valid Arnoldi pair of the linearization.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const Complex t = q.col(i).dot(r);
        r -= t * q.col(i);
        s -= t * p.col(i);
      }
    }
    const double after = r.norm();
    if (after > opts.deflation_tol * before) {
      q.col(j) = r / after;
      p.col(j) = s / after;
      ++built;
      continue;
    }
    ++out.deflations;
    if (s.norm() <= opts.deflation_tol) {
      out.breakdown = true;  // nothing left to propagate
      break;
    }
    // q stays zero: no new direction, but the recurrence continues through p.
    p.col(j) = s;
  }

  out.q.resize(n, built);
  Eigen::Index w = 0;
  for (Eigen::Index j = 0; j < count && w < built; ++j) {
    if (q.col(j).norm() > 0.0) out.q.col(w++) = q.col(j);
  }
  out.q.conservativeResize(n, w);
  return out;
}

// Shifted second-order Krylov basis for K0 x'' ... the usual moment-matching
// choice A = -K0\K1, B = -K0\K2, v0 = K0\f, with K0/K1/K2 the local operator,
// slope and curvature at the shift. `adjoint` runs the dual recurrence
// (conjugate-transposed maps) for left-side bases.
inline SoarBasis soar_shifted(const OperatorFactor& k0, const Matrix& k1,
                              const Matrix& k2, const Vector& f,
                              Eigen::Index count, bool adjoint = false,
                              const SoarOptions& opts = {}) {
  if (!adjoint) {
    auto a = [&](const Vector& x) { return Vector(-k0.solve(k1 * x)); };
    auto b = [&](const Vector& x) { return Vector(-k0.solve(k2 * x)); };
    return soar(a, b, k0.solve(f), count, opts);
  }
  auto a = [&](const Vector& x) { return Vector(-k0.solve_adjoint(k1.adjoint() * x)); };
  auto b = [&](const Vector& x) { return Vector(-k0.solve_adjoint(k2.adjoint() * x)); };
  return soar(a, b, k0.solve_adjoint(f), count, opts);
}

}  // namespace somor
