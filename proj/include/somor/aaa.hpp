// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "somor/error.hpp"
#include "somor/numerics.hpp"
#include "somor/system.hpp"

namespace somor {

/// Rational approximant in barycentric form. Degrees of freedom are the
/// support points, the data values held there, and one weight per support
/// point. Evaluation is numerically safe at and near support points.
struct BarycentricApproximant {
  std::vector<Complex> support;
  std::vector<Complex> values;
  std::vector<Complex> weights;
  /// Largest absolute misfit over the sample set at acceptance time.
  double max_residual = 0.0;
  /// Largest absolute data value, the reference for the relative tolerance.
  double scale = 0.0;

  Eigen::Index order() const { return static_cast<Eigen::Index>(support.size()); }

  Complex eval(Complex s) const {
    // Snap to the stored value when s collides with a support point.
    for (std::size_t j = 0; j < support.size(); ++j) {
      double gap = std::abs(s - support[j]);
      if (gap <= 1e-13 * std::max(1.0, std::abs(support[j]))) return values[j];
    }
    Complex num = 0.0;
    Complex den = 0.0;
    for (std::size_t j = 0; j < support.size(); ++j) {
      Complex c = weights[j] / (s - support[j]);
      num += c * values[j];
      den += c;
    }
    return num / den;
  }
};

struct AaaOptions {
  double tol = 1e-12;          // relative to the largest sample magnitude
  Eigen::Index max_order = 60; // support points before giving up
};

/// Adaptive rational fit of scalar samples. Support points are picked
/// greedily at the largest current misfit; weights minimize the linearized
/// residual via a singular vector of the divided-difference matrix.
/// Throws NoConvergence when max_order support points do not reach tol.
inline BarycentricApproximant aaa_fit(const std::vector<Complex>& points,
                                      const std::vector<Complex>& values,
                                      const AaaOptions& opts = {}) {
  require(!points.empty(), ErrorCode::BadConfig, "aaa_fit: empty sample set");
  require(points.size() == values.size(), ErrorCode::BadConfig,
          "aaa_fit: points/values size mismatch");
  require(opts.max_order >= 1, ErrorCode::BadConfig, "aaa_fit: max_order < 1");
  {
    std::vector<Complex> sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](Complex a, Complex b) {
      if (a.real() != b.real()) return a.real() < b.real();
      return a.imag() < b.imag();
    });
    for (std::size_t i = 1; i < sorted.size(); ++i)
      require(sorted[i] != sorted[i - 1], ErrorCode::BadConfig,
              "aaa_fit: duplicate sample points");
  }

  const std::size_t n = points.size();
  BarycentricApproximant out;
  for (Complex f : values) out.scale = std::max(out.scale, std::abs(f));
  if (out.scale == 0.0) {
    // All-zero data: a single support point with value zero reproduces it.
    out.support = {points[0]};
    out.values = {Complex(0.0, 0.0)};
    out.weights = {Complex(1.0, 0.0)};
    return out;
  }

  Complex mean = 0.0;
  for (Complex f : values) mean += f;
  mean /= static_cast<double>(n);

  std::vector<bool> in_support(n, false);
  std::vector<Complex> approx(n, mean);

  for (Eigen::Index q = 1; q <= opts.max_order; ++q) {
    // Next support point: strictly largest misfit, earliest index on ties.
    std::size_t pick = n;
    double worst = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (in_support[i]) continue;
      double r = std::abs(values[i] - approx[i]);
      if (r > worst) {
        worst = r;
        pick = i;
      }
    }
    require(pick < n, ErrorCode::NoConvergence, "aaa_fit: no free sample left");
    in_support[pick] = true;
    out.support.push_back(points[pick]);
    out.values.push_back(values[pick]);

    std::vector<std::size_t> rest;
    rest.reserve(n - static_cast<std::size_t>(q));
    for (std::size_t i = 0; i < n; ++i)
      if (!in_support[i]) rest.push_back(i);

    if (rest.empty()) {
      // Every sample is a support point; any nonzero weights interpolate.
      out.weights.assign(out.support.size(), Complex(1.0, 0.0));
      out.max_residual = 0.0;
      return out;
    }

    Matrix loewner(static_cast<Eigen::Index>(rest.size()), q);
    for (std::size_t r = 0; r < rest.size(); ++r) {
      std::size_t i = rest[r];
      for (Eigen::Index k = 0; k < q; ++k) {
        std::size_t kk = static_cast<std::size_t>(k);
        loewner(static_cast<Eigen::Index>(r), k) =
            (values[i] - out.values[kk]) / (points[i] - out.support[kk]);
      }
    }
    Eigen::JacobiSVD<Matrix> dec(loewner, Eigen::ComputeFullV);
    Vector w = dec.matrixV().col(q - 1);
    out.weights.assign(w.data(), w.data() + q);

    double max_res = 0.0;
    for (std::size_t i : rest) {
      Complex num = 0.0;
      Complex den = 0.0;
      for (Eigen::Index k = 0; k < q; ++k) {
        std::size_t kk = static_cast<std::size_t>(k);
        Complex c = out.weights[kk] / (points[i] - out.support[kk]);
        num += c * out.values[kk];
        den += c;
      }
      approx[i] = num / den;
      max_res = std::max(max_res, std::abs(values[i] - approx[i]));
    }
    if (max_res <= opts.tol * out.scale) {
      out.max_residual = max_res;
      return out;
    }
  }
  fail(ErrorCode::NoConvergence,
       "aaa_fit: residual above tolerance at maximum order " +
           std::to_string(opts.max_order));
}

/// State-space form of a barycentric approximant: r(s) = a (D + s E)^{-1} b
/// plus the resolvent rewrite around an expansion point s0,
/// r(s) = a (I - (s - s0) d_tilde)^{-1} b_tilde, whose powers give the
/// coefficients of the series in (s - s0).
struct MatrixRealization {
  Eigen::RowVectorXcd a;
  Matrix d;
  Matrix e;
  Vector b;
  Complex s0{0.0, 0.0};
  Matrix d_tilde;
  Vector b_tilde;

  Eigen::Index order() const { return d.rows(); }

  Complex eval(Complex s) const {
    Matrix pencil = d + s * e;
    Vector x = solve_linear(pencil, b);
    return (a * x)(0);
  }

  Complex eval_shifted(Complex s) const {
    Matrix lhs = Matrix::Identity(d_tilde.rows(), d_tilde.cols()) - (s - s0) * d_tilde;
    Vector x = solve_linear(lhs, b_tilde);
    return (a * x)(0);
  }
};

/// Build the pencil realization of a barycentric approximant and factor it
/// at the expansion point s0. Row 0 of D carries the weights; row i couples
/// support points i-1 and i so that the cleared-denominator interpolation
/// conditions hold. Throws SingularShift when D + s0 E is not invertible,
/// which happens when s0 sits on a pole of the approximant.
inline MatrixRealization to_matrix_realization(const BarycentricApproximant& bary,
                                               Complex s0) {
  const Eigen::Index q = bary.order();
  require(q >= 1, ErrorCode::BadConfig, "to_matrix_realization: empty approximant");

  MatrixRealization real;
  real.s0 = s0;
  real.a.resize(q);
  real.d = Matrix::Zero(q, q);
  real.e = Matrix::Zero(q, q);
  real.b = Vector::Zero(q);
  real.b(0) = 1.0;
  for (Eigen::Index k = 0; k < q; ++k) {
    std::size_t kk = static_cast<std::size_t>(k);
    real.a(k) = bary.weights[kk] * bary.values[kk];
    real.d(0, k) = bary.weights[kk];
  }
  for (Eigen::Index i = 1; i < q; ++i) {
    real.d(i, i - 1) = -bary.support[static_cast<std::size_t>(i - 1)];
    real.d(i, i) = bary.support[static_cast<std::size_t>(i)];
    real.e(i, i - 1) = 1.0;
    real.e(i, i) = -1.0;
  }

  Matrix pencil = real.d + s0 * real.e;
  try {
    OperatorFactor factor(pencil);
    real.d_tilde = -factor.solve(real.e);
    real.b_tilde = factor.solve(real.b);
  } catch (const Error&) {
    fail(ErrorCode::SingularShift,
         "to_matrix_realization: pencil singular at the expansion point");
  }
  return real;
}

/// Coefficients c_0..c_{count-1} of the series of r in powers of (s - s0):
/// c_l = a d_tilde^l b_tilde, accumulated by repeated application.
inline std::vector<Complex> series_coefficients(const MatrixRealization& real,
                                                Eigen::Index count) {
  require(count >= 0, ErrorCode::BadConfig, "series_coefficients: negative count");
  require(real.d_tilde.rows() == real.order(), ErrorCode::MissingRealization,
          "series_coefficients: realization lacks the shifted factorization");
  std::vector<Complex> coeffs;
  coeffs.reserve(static_cast<std::size_t>(count));
  Vector x = real.b_tilde;
  for (Eigen::Index l = 0; l < count; ++l) {
    coeffs.push_back((real.a * x)(0));
    x = real.d_tilde * x;
  }
  return coeffs;
}

/// Matrix coefficients of the operator, input, and output maps expanded in
/// powers of (s - s0). Entry l multiplies (s - s0)^l.
struct SeriesExpansion {
  std::vector<Matrix> k;
  std::vector<Matrix> f;
  std::vector<Matrix> g;
};

/// Expand a system with irrational operator coefficients around s0 up to
/// order l_max. Polynomial and closed-form parts are differentiated exactly;
/// each irrational coefficient contributes through the series of its
/// rational surrogate, one realization per nonlinear term in declaration
/// order, all expanded at the same s0.
inline SeriesExpansion case_c_expansion(const StructuredSystem& sys,
                                        const std::vector<MatrixRealization>& fits,
                                        Complex s0, Eigen::Index l_max) {
  require(l_max >= 0, ErrorCode::BadConfig, "case_c_expansion: negative order");
  require(fits.size() == sys.nonlinear_terms.size(), ErrorCode::MissingRealization,
          "case_c_expansion: need one realization per nonlinear term");
  for (const MatrixRealization& fit : fits)
    require(std::abs(fit.s0 - s0) <= 1e-12 * std::max(1.0, std::abs(s0)),
            ErrorCode::MissingRealization,
            "case_c_expansion: realization expanded at a different point");

  const std::size_t depth = static_cast<std::size_t>(l_max) + 1;
  std::vector<std::vector<Complex>> nl_coeffs(fits.size());
  for (std::size_t i = 0; i < fits.size(); ++i)
    nl_coeffs[i] = series_coefficients(fits[i], l_max + 1);

  SeriesExpansion exp;
  exp.k.reserve(depth);
  exp.f.reserve(depth);
  exp.g.reserve(depth);
  double factorial = 1.0;
  for (Eigen::Index l = 0; l <= l_max; ++l) {
    if (l > 0) factorial *= static_cast<double>(l);
    Matrix kl = Matrix::Zero(sys.n, sys.n);
    detail::accumulate_group(kl, sys.mass_terms, s0, 2, static_cast<int>(l));
    detail::accumulate_group(kl, sys.damping_terms, s0, 1, static_cast<int>(l));
    detail::accumulate_group(kl, sys.stiffness_terms, s0, 0, static_cast<int>(l));
    kl /= factorial;
    for (std::size_t i = 0; i < fits.size(); ++i)
      kl += nl_coeffs[i][static_cast<std::size_t>(l)] * sys.nonlinear_terms[i].matrix;
    exp.k.push_back(std::move(kl));

    Matrix fl = Matrix::Zero(sys.n, sys.m);
    for (const AffineTerm& term : sys.input_terms)
      fl += (term.coeff.derivative(s0, static_cast<int>(l)) / factorial) * term.matrix;
    exp.f.push_back(std::move(fl));

    exp.g.push_back(l == 0 ? sys.output : Matrix::Zero(sys.p, sys.n));
  }
  return exp;
}

}  // namespace somor
