// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0
//
// Frequency-affine second-order systems.  The operator is kept as tagged
// term groups
//
//   K(s) = s^2 * sum_k g_k(s) M_k + s * sum_k g_k(s) C_k + sum_k g_k(s) K_k
//          + sum_i phi_i(s) N_i
//
// with matching input columns F(s) and a constant output row map.  Keeping
// the groups separate (instead of collapsing to one matrix pencil) is what
// lets projection preserve the structure term by term.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "somor/coefficient.hpp"
#include "somor/error.hpp"
#include "somor/numerics.hpp"

namespace somor {

struct AffineTerm {
  Coefficient coeff;
  Matrix matrix;
};

enum class CaseTag { A, B, C };

inline const char* name(CaseTag c) {
  switch (c) {
    case CaseTag::A: return "A";
    case CaseTag::B: return "B";
    case CaseTag::C: return "C";
  }
  return "?";
}

struct StructuredSystem {
  CaseTag case_tag = CaseTag::A;
  Eigen::Index n = 0;  // state dimension
  Eigen::Index m = 0;  // inputs
  Eigen::Index p = 0;  // outputs

  std::vector<AffineTerm> mass_terms;
  std::vector<AffineTerm> damping_terms;
  std::vector<AffineTerm> stiffness_terms;
  std::vector<AffineTerm> nonlinear_terms;  // coefficient must be a catalog function
  std::vector<AffineTerm> input_terms;      // n x m blocks with scalar coefficients
  Matrix output;                            // p x n, constant

  // Declared frequency at which K(s) is invertible; used as the default
  // probe point for structural checks.
  Complex regular_point{0.0, 1.0};
};

inline void validate_dimensions(const StructuredSystem& sys) {
  require(sys.n > 0 && sys.m > 0 && sys.p > 0, ErrorCode::DimensionMismatch,
          "system dimensions must be positive");
  auto check_group = [&](const std::vector<AffineTerm>& terms, const char* which) {
    for (const AffineTerm& t : terms)
      require(t.matrix.rows() == sys.n && t.matrix.cols() == sys.n,
              ErrorCode::DimensionMismatch,
              std::string(which) + " term is not n x n");
  };
  check_group(sys.mass_terms, "mass");
  check_group(sys.damping_terms, "damping");
  check_group(sys.stiffness_terms, "stiffness");
  check_group(sys.nonlinear_terms, "nonlinear");
  for (const AffineTerm& t : sys.nonlinear_terms)
    require(t.coeff.kind() == CoeffKind::Function, ErrorCode::UnsupportedSpec,
            "nonlinear terms carry catalog-function coefficients");
  require(!sys.input_terms.empty(), ErrorCode::DimensionMismatch, "no input terms");
  for (const AffineTerm& t : sys.input_terms)
    require(t.matrix.rows() == sys.n && t.matrix.cols() == sys.m,
            ErrorCode::DimensionMismatch, "input term is not n x m");
  require(sys.output.rows() == sys.p && sys.output.cols() == sys.n,
          ErrorCode::DimensionMismatch, "output map is not p x n");
}

namespace detail {

// d^i/ds^i of s^b for b in {0, 1, 2}
inline Complex monomial_derivative(Complex s, int b, int i) {
  if (i > b) return 0.0;
  if (b == 0) return 1.0;
  if (b == 1) return i == 0 ? s : Complex(1.0);
  if (i == 0) return s * s;
  return i == 1 ? 2.0 * s : Complex(2.0);
}

// d^order/ds^order of s^b * g(s) via Leibniz; exact because coefficient
// derivatives are analytic.
inline Complex term_scalar_derivative(const Coefficient& g, Complex s, int b, int order) {
  Complex acc = 0.0;
  for (int i = 0; i <= std::min(order, b); ++i)
    acc += binomial(order, i) * monomial_derivative(s, b, i) * g.derivative(s, order - i);
  return acc;
}

inline void accumulate_group(Matrix& acc, const std::vector<AffineTerm>& terms, Complex s,
                             int base_power, int order) {
  for (const AffineTerm& t : terms) {
    Complex w = term_scalar_derivative(t.coeff, s, base_power, order);
    if (w != Complex(0.0)) acc += w * t.matrix;
  }
}

}  // namespace detail

// d^order/ds^order of the assembled operator at s; order 0 is K(s) itself.
inline Matrix operator_derivative(const StructuredSystem& sys, Complex s, int order) {
  Matrix acc = Matrix::Zero(sys.n, sys.n);
  detail::accumulate_group(acc, sys.mass_terms, s, 2, order);
  detail::accumulate_group(acc, sys.damping_terms, s, 1, order);
  detail::accumulate_group(acc, sys.stiffness_terms, s, 0, order);
  detail::accumulate_group(acc, sys.nonlinear_terms, s, 0, order);
  return acc;
}

inline Matrix assemble_operator(const StructuredSystem& sys, Complex s) {
  return operator_derivative(sys, s, 0);
}

inline Matrix input_derivative(const StructuredSystem& sys, Complex s, int order) {
  Matrix acc = Matrix::Zero(sys.n, sys.m);
  for (const AffineTerm& t : sys.input_terms) {
    Complex w = t.coeff.derivative(s, order);
    if (w != Complex(0.0)) acc += w * t.matrix;
  }
  return acc;
}

inline Matrix input_at(const StructuredSystem& sys, Complex s) {
  return input_derivative(sys, s, 0);
}

// H(s) = G K(s)^{-1} F(s), a p x m matrix.
inline Matrix eval_transfer(const StructuredSystem& sys, Complex s) {
  OperatorFactor op(assemble_operator(sys, s));
  return sys.output * op.solve(input_at(sys, s));
}

inline bool all_constant_coefficients(const StructuredSystem& sys) {
  auto group_constant = [](const std::vector<AffineTerm>& terms) {
    for (const AffineTerm& t : terms)
      if (!t.coeff.is_constant()) return false;
    return true;
  };
  return sys.nonlinear_terms.empty() && group_constant(sys.mass_terms) &&
         group_constant(sys.damping_terms) && group_constant(sys.stiffness_terms);
}

inline bool constant_input(const StructuredSystem& sys) {
  for (const AffineTerm& t : sys.input_terms)
    if (!t.coeff.is_constant()) return false;
  return true;
}

inline double max_imaginary_part(const StructuredSystem& sys) {
  double v = sys.output.imag().cwiseAbs().maxCoeff();
  auto scan = [&](const std::vector<AffineTerm>& terms) {
    for (const AffineTerm& t : terms) {
      if (t.matrix.size() > 0) v = std::max(v, t.matrix.imag().cwiseAbs().maxCoeff());
      v = std::max(v, std::abs(t.coeff.scale().imag()));
    }
  };
  scan(sys.mass_terms);
  scan(sys.damping_terms);
  scan(sys.stiffness_terms);
  scan(sys.nonlinear_terms);
  scan(sys.input_terms);
  return v;
}

// True when the damping group contributes nothing at any frequency.  Uses
// per-term magnitudes, so an exact alpha = beta = 0 system reports true
// without relying on floating-point cancellation.
inline bool zero_damping(const StructuredSystem& sys) {
  for (const AffineTerm& t : sys.damping_terms) {
    double g = std::abs(t.coeff.eval(sys.regular_point));
    if (g > 0.0 && t.matrix.cwiseAbs().maxCoeff() > 0.0) return false;
  }
  return true;
}

// Largest power of s in the assembled operator and input when every factor
// is a monomial; nullopt as soon as a catalog function appears.  Drives the
// derivative-order choice for presampling: derivatives above this degree
// vanish identically.
inline std::optional<int> polynomial_degree(const StructuredSystem& sys) {
  int deg = 0;
  bool laurent = false;
  auto scan = [&](const std::vector<AffineTerm>& terms, int base) -> bool {
    for (const AffineTerm& t : terms) {
      std::optional<int> pw = t.coeff.monomial_power();
      if (!pw) return false;
      int total = base + *pw;
      if (total < 0) laurent = true;
      deg = std::max(deg, total);
    }
    return true;
  };
  if (!scan(sys.mass_terms, 2)) return std::nullopt;
  if (!scan(sys.damping_terms, 1)) return std::nullopt;
  if (!scan(sys.stiffness_terms, 0)) return std::nullopt;
  if (!sys.nonlinear_terms.empty()) return std::nullopt;
  if (!scan(sys.input_terms, 0)) return std::nullopt;
  if (laurent) return std::nullopt;
  return deg;
}

// Declared coefficient singularities, used to keep grids and shifts away
// from non-analytic points.
inline std::vector<Complex> declared_poles(const StructuredSystem& sys) {
  std::vector<Complex> out;
  auto scan = [&](const std::vector<AffineTerm>& terms) {
    for (const AffineTerm& t : terms)
      for (Complex p : t.coeff.poles()) out.push_back(p);
  };
  scan(sys.mass_terms);
  scan(sys.damping_terms);
  scan(sys.stiffness_terms);
  scan(sys.nonlinear_terms);
  scan(sys.input_terms);
  return out;
}

}  // namespace somor
