// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "somor/aaa.hpp"
#include "somor/error.hpp"
#include "somor/numerics.hpp"
#include "somor/soar.hpp"
#include "somor/system.hpp"

namespace somor {

enum class PresampleStrategy { standard, sp, soa };
enum class BasisSide { input, output, both };

inline const char* strategy_name(PresampleStrategy s) {
  switch (s) {
    case PresampleStrategy::standard: return "standard";
    case PresampleStrategy::sp: return "sp";
    case PresampleStrategy::soa: return "soa";
  }
  return "?";
}

/// Interpolation points on the imaginary axis. Frequencies arrive in Hz and
/// are converted to shifts exactly once here; entries flagged extra sit after
/// the equidistant base points and take priority when the plan is thinned.
struct ShiftPlan {
  std::vector<double> hz;
  std::vector<Complex> shifts;
  std::vector<int> orders;      // per-shift derivative order, default 0
  std::vector<bool> extra;
  BasisSide side = BasisSide::both;

  static ShiftPlan from_hz(const std::vector<double>& base,
                           const std::vector<double>& extras = {}) {
    require(!base.empty() || !extras.empty(), ErrorCode::BadConfig,
            "ShiftPlan: no frequencies given");
    ShiftPlan plan;
    auto push = [&plan](double f, bool is_extra) {
      plan.hz.push_back(f);
      plan.shifts.emplace_back(0.0, 2.0 * std::numbers::pi * f);
      plan.orders.push_back(0);
      plan.extra.push_back(is_extra);
    };
    for (double f : base) push(f, false);
    for (double f : extras) push(f, true);
    return plan;
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(shifts.size()); }

  Eigen::Index extra_count() const {
    return static_cast<Eigen::Index>(std::count(extra.begin(), extra.end(), true));
  }

  /// Thin the plan to count shifts: the first extras (in declaration order)
  /// go first, the remainder are equidistant picks over the base points.
  /// Index arithmetic is integer, so picks never collide while the requested
  /// count fits.
  ShiftPlan subsample(Eigen::Index count) const {
    require(count >= 1, ErrorCode::BadConfig, "ShiftPlan::subsample: count < 1");
    if (count >= size()) return *this;

    std::vector<std::size_t> base_idx;
    std::vector<std::size_t> extra_idx;
    for (std::size_t i = 0; i < shifts.size(); ++i)
      (extra[i] ? extra_idx : base_idx).push_back(i);

    const Eigen::Index e =
        std::min<Eigen::Index>(count, static_cast<Eigen::Index>(extra_idx.size()));
    const Eigen::Index k = count - e;

    std::vector<std::size_t> chosen(extra_idx.begin(),
                                    extra_idx.begin() + static_cast<std::size_t>(e));
    const Eigen::Index n_base = static_cast<Eigen::Index>(base_idx.size());
    for (Eigen::Index j = 0; j < k; ++j) {
      Eigen::Index pos = k == 1 ? 0 : j * (n_base - 1) / (k - 1);
      chosen.push_back(base_idx[static_cast<std::size_t>(pos)]);
    }

    ShiftPlan out;
    out.side = side;
    for (std::size_t i : chosen) {
      out.hz.push_back(hz[i]);
      out.shifts.push_back(shifts[i]);
      out.orders.push_back(orders[i]);
      out.extra.push_back(extra[i]);
    }
    return out;
  }
};

/// Practical Hermite derivative span at one shift: columns are the exact
/// derivatives d^j/ds^j of operator-inverse times input map for j = 0..order,
/// from the recurrence obtained by differentiating the defining identity.
/// One factorization per shift, one solve per order.
inline Matrix interp_basis_right(const StructuredSystem& sys, Complex shift, int order) {
  require(order >= 0, ErrorCode::BadConfig, "interp_basis_right: negative order");
  OperatorFactor factor(assemble_operator(sys, shift));
  std::vector<Matrix> op_deriv;
  op_deriv.reserve(static_cast<std::size_t>(order));
  for (int i = 1; i <= order; ++i)
    op_deriv.push_back(operator_derivative(sys, shift, i));

  Matrix block(sys.n, static_cast<Eigen::Index>(order + 1) * sys.m);
  std::vector<Matrix> xs;
  xs.reserve(static_cast<std::size_t>(order) + 1);
  for (int j = 0; j <= order; ++j) {
    Matrix rhs = input_derivative(sys, shift, j);
    for (int i = 1; i <= j; ++i)
      rhs.noalias() -=
          binomial(j, i) * (op_deriv[static_cast<std::size_t>(i - 1)] *
                            xs[static_cast<std::size_t>(j - i)]);
    xs.push_back(factor.solve(rhs));
    block.middleCols(static_cast<Eigen::Index>(j) * sys.m, sys.m) = xs.back();
  }
  return block;
}

/// Output-side mirror: derivatives of adjoint-operator-inverse times the
/// adjoint output map. The output map is constant, so only the zeroth
/// right-hand side carries it.
inline Matrix interp_basis_left(const StructuredSystem& sys, Complex shift, int order) {
  require(order >= 0, ErrorCode::BadConfig, "interp_basis_left: negative order");
  OperatorFactor factor(assemble_operator(sys, shift));
  std::vector<Matrix> op_deriv;
  op_deriv.reserve(static_cast<std::size_t>(order));
  for (int i = 1; i <= order; ++i)
    op_deriv.push_back(operator_derivative(sys, shift, i).adjoint());

  Matrix block(sys.n, static_cast<Eigen::Index>(order + 1) * sys.p);
  std::vector<Matrix> ys;
  ys.reserve(static_cast<std::size_t>(order) + 1);
  for (int j = 0; j <= order; ++j) {
    Matrix rhs = j == 0 ? Matrix(sys.output.adjoint()) : Matrix::Zero(sys.n, sys.p);
    for (int i = 1; i <= j; ++i)
      rhs.noalias() -=
          binomial(j, i) * (op_deriv[static_cast<std::size_t>(i - 1)] *
                            ys[static_cast<std::size_t>(j - i)]);
    ys.push_back(factor.solve_adjoint(rhs));
    block.middleCols(static_cast<Eigen::Index>(j) * sys.p, sys.p) = ys.back();
  }
  return block;
}

/// Whole-plan variants: ordered concatenation (shift, then derivative order,
/// then input column), orthonormalized so spans are returned with unit basis.
inline Matrix interp_basis_right(const StructuredSystem& sys, const ShiftPlan& plan) {
  require(plan.size() >= 1, ErrorCode::BadConfig, "interp_basis_right: empty plan");
  Matrix all(sys.n, 0);
  for (Eigen::Index j = 0; j < plan.size(); ++j) {
    Matrix block = interp_basis_right(sys, plan.shifts[static_cast<std::size_t>(j)],
                                      plan.orders[static_cast<std::size_t>(j)]);
    all.conservativeResize(sys.n, all.cols() + block.cols());
    all.rightCols(block.cols()) = block;
  }
  return orthonormalize(all);
}

inline Matrix interp_basis_left(const StructuredSystem& sys, const ShiftPlan& plan) {
  require(plan.size() >= 1, ErrorCode::BadConfig, "interp_basis_left: empty plan");
  Matrix all(sys.n, 0);
  for (Eigen::Index j = 0; j < plan.size(); ++j) {
    Matrix block = interp_basis_left(sys, plan.shifts[static_cast<std::size_t>(j)],
                                     plan.orders[static_cast<std::size_t>(j)]);
    all.conservativeResize(sys.n, all.cols() + block.cols());
    all.rightCols(block.cols()) = block;
  }
  return orthonormalize(all);
}

namespace detail {

/// Quadratic local model of the operator at s0: value, first derivative, and
/// half the second derivative, the coefficients of the Taylor polynomial the
/// second-order Arnoldi recurrence works on. Closed-form coefficient
/// derivatives cover all kinds, including the irrational catalog entries.
struct QuadraticOperatorModel {
  Matrix k0, k1, k2;
  Matrix f0;
};

inline QuadraticOperatorModel quadratic_model(const StructuredSystem& sys, Complex s0) {
  QuadraticOperatorModel q;
  q.k0 = assemble_operator(sys, s0);
  q.k1 = operator_derivative(sys, s0, 1);
  q.k2 = 0.5 * operator_derivative(sys, s0, 2);
  q.f0 = input_at(sys, s0);
  return q;
}

/// Same local model but with every irrational coefficient replaced by the
/// series of its rational surrogate, truncated after the quadratic term.
inline QuadraticOperatorModel quadratic_model_surrogate(
    const StructuredSystem& sys, Complex s0,
    const std::vector<BarycentricApproximant>& fits) {
  std::vector<MatrixRealization> reals;
  reals.reserve(fits.size());
  for (const BarycentricApproximant& fit : fits)
    reals.push_back(to_matrix_realization(fit, s0));
  SeriesExpansion exp = case_c_expansion(sys, reals, s0, 2);
  QuadraticOperatorModel q;
  q.k0 = std::move(exp.k[0]);
  q.k1 = std::move(exp.k[1]);
  q.k2 = std::move(exp.k[2]);
  q.f0 = std::move(exp.f[0]);
  return q;
}

inline std::vector<BarycentricApproximant> fit_nonlinear_coefficients(
    const StructuredSystem& sys, double lo_hz, double hi_hz, Eigen::Index samples,
    const AaaOptions& opts) {
  // Sample past both band edges so surrogates hold at every expansion point.
  double lo = 0.5 * lo_hz;
  double hi = 1.25 * hi_hz;
  if (!(hi > lo)) hi = lo + 1.0;
  std::vector<Complex> pts;
  pts.reserve(static_cast<std::size_t>(samples));
  for (Eigen::Index i = 0; i < samples; ++i) {
    double t = samples == 1 ? 0.0
                            : static_cast<double>(i) / static_cast<double>(samples - 1);
    pts.emplace_back(0.0, 2.0 * std::numbers::pi * (lo + t * (hi - lo)));
  }
  std::vector<BarycentricApproximant> fits;
  fits.reserve(sys.nonlinear_terms.size());
  for (const AffineTerm& term : sys.nonlinear_terms) {
    std::vector<Complex> vals;
    vals.reserve(pts.size());
    for (Complex s : pts) vals.push_back(term.coeff.eval(s));
    fits.push_back(aaa_fit(pts, vals, opts));
  }
  return fits;
}

}  // namespace detail

/// Orthonormal basis of the second-order Krylov subspace at s0 built from the
/// quadratic local model of the operator. Single-input only.
inline Matrix soar_basis(const StructuredSystem& sys, Complex s0, Eigen::Index r,
                         const SoarOptions& opts = {}) {
  require(sys.m == 1, ErrorCode::UnsupportedSpec,
          "soar_basis: single-input systems only");
  detail::QuadraticOperatorModel q = detail::quadratic_model(sys, s0);
  OperatorFactor factor(q.k0);
  SoarBasis basis = soar_shifted(factor, q.k1, q.k2, q.f0.col(0), r, false, opts);
  return basis.q;
}

struct ColumnProvenance {
  Eigen::Index shift = 0;   // index into the plan
  int order = 0;            // derivative order or Krylov step
  Eigen::Index column = 0;  // input/output column within the block
  int part = 0;             // 0 original, 1 imaginary half of a realified copy
};

/// Raw frequency samples of the transfer-function factors: the pool that the
/// compression and greedy stages draw from. Column scaling is intentional
/// per strategy: plain samples stay unscaled so resonant shifts dominate
/// pivoting, Hermite blocks carry Taylor weights, Arnoldi blocks arrive
/// orthonormal per shift.
struct PresampleBasis {
  Matrix columns;
  std::vector<ColumnProvenance> provenance;
  PresampleStrategy strategy = PresampleStrategy::standard;
  BasisSide side = BasisSide::input;
  ShiftPlan plan;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;  // offset, count
};

struct PresampleOptions {
  PresampleStrategy strategy = PresampleStrategy::standard;
  Eigen::Index soa_order = 10;  // Krylov columns per shift
  int sp_order_case_c = 6;      // Hermite order when coefficients are irrational
  Eigen::Index aaa_samples = 400;
  AaaOptions aaa;
  SoarOptions soar;
};

/// Build the presample pool for one side of the projection.
///   standard: one block of samples per shift (m or p columns).
///   sp:       Hermite blocks, derivative orders 0..l scaled 1/j!; l is 2 for
///             polynomial coefficient structures and sp_order_case_c when
///             irrational coefficients are present.
///   soa:      soa_order Krylov columns per shift; single-input/single-output
///             only; irrational coefficients enter through rational
///             surrogates truncated after the quadratic term.
inline PresampleBasis presample(const StructuredSystem& sys, const ShiftPlan& plan,
                                BasisSide side, const PresampleOptions& opts = {}) {
  require(side != BasisSide::both, ErrorCode::BadConfig,
          "presample: build one side at a time");
  require(plan.size() >= 1, ErrorCode::BadConfig, "presample: empty plan");
  const bool left = side == BasisSide::output;

  PresampleBasis out;
  out.strategy = opts.strategy;
  out.side = side;
  out.plan = plan;

  std::vector<BarycentricApproximant> fits;
  const bool surrogate = opts.strategy == PresampleStrategy::soa &&
                         !sys.nonlinear_terms.empty();
  if (surrogate) {
    auto [lo, hi] = std::minmax_element(plan.hz.begin(), plan.hz.end());
    fits = detail::fit_nonlinear_coefficients(sys, *lo, *hi, opts.aaa_samples,
                                              opts.aaa);
  }
  if (opts.strategy == PresampleStrategy::soa)
    require(sys.m == 1 && sys.p == 1, ErrorCode::UnsupportedSpec,
            "presample: strategy soa needs a single input and a single output");

  int sp_order = sys.nonlinear_terms.empty() ? 2 : opts.sp_order_case_c;

  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(plan.size()));
  Eigen::Index total = 0;
  for (Eigen::Index j = 0; j < plan.size(); ++j) {
    Complex shift = plan.shifts[static_cast<std::size_t>(j)];
    Matrix block;
    switch (opts.strategy) {
      case PresampleStrategy::standard:
        block = left ? interp_basis_left(sys, shift, 0)
                     : interp_basis_right(sys, shift, 0);
        break;
      case PresampleStrategy::sp: {
        block = left ? interp_basis_left(sys, shift, sp_order)
                     : interp_basis_right(sys, shift, sp_order);
        const Eigen::Index width = left ? sys.p : sys.m;
        // Unit-normalize each column, then grade the derivative orders by
        // Taylor weights.  Raw moment columns already decay by orders of
        // magnitude per derivative order; weighting them without the
        // normalization buries the high-order directions below the rank
        // threshold of the downstream compression.
        double factorial = 1.0;
        for (int d = 0; d <= sp_order; ++d) {
          if (d > 0) factorial *= static_cast<double>(d);
          for (Eigen::Index c = 0; c < width; ++c) {
            auto col = block.col(static_cast<Eigen::Index>(d) * width + c);
            double norm = col.norm();
            if (norm > 0.0) col *= 1.0 / (factorial * norm);
          }
        }
        break;
      }
      case PresampleStrategy::soa: {
        detail::QuadraticOperatorModel q =
            surrogate ? detail::quadratic_model_surrogate(sys, shift, fits)
                      : detail::quadratic_model(sys, shift);
        OperatorFactor factor(q.k0);
        Vector start = left ? Vector(sys.output.adjoint().col(0)) : Vector(q.f0.col(0));
        SoarBasis soa =
            soar_shifted(factor, q.k1, q.k2, start, opts.soa_order, left, opts.soar);
        block = soa.q;
        break;
      }
    }
    const Eigen::Index width = opts.strategy == PresampleStrategy::soa
                                   ? 1
                                   : (left ? sys.p : sys.m);
    out.blocks.emplace_back(total, block.cols());
    for (Eigen::Index c = 0; c < block.cols(); ++c)
      out.provenance.push_back(
          {j, static_cast<int>(c / width), c % width, 0});
    total += block.cols();
    blocks.push_back(std::move(block));
  }

  out.columns.resize(sys.n, total);
  Eigen::Index at = 0;
  for (const Matrix& block : blocks) {
    out.columns.middleCols(at, block.cols()) = block;
    at += block.cols();
  }
  return out;
}

}  // namespace somor
