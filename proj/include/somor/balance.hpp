// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0
//
// Second-order balanced truncation.  The constant-coefficient system is
// lifted to its first-order descriptor realization, the two dual Lyapunov
// equations deliver partitioned Gramian factors, and a family of truncation
// formulas (plus a structure-recovering two-stage projection and a one-sided
// dominant-subspace fallback) turns those factors into reduced models.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "somor/error.hpp"
#include "somor/lyapunov.hpp"
#include "somor/numerics.hpp"
#include "somor/reduce.hpp"
#include "somor/system.hpp"

namespace somor {

/// Assembled constant real blocks of a frequency-independent system.
struct ConstantSecondOrder {
  RealMatrix m;
  RealMatrix c;
  RealMatrix k;
  RealMatrix f;
  RealMatrix g;
};

/// Collapses the term groups to plain constant matrices. Fails with
/// NotConstantCoefficient on frequency-dependent terms (catalog functions,
/// frequency-dependent inputs) and on complex-valued data such as a
/// hysteretic stiffness, since the balancing pipeline is real-only.
inline ConstantSecondOrder constant_second_order(const StructuredSystem& sys) {
  validate_dimensions(sys);
  require(all_constant_coefficients(sys) && constant_input(sys),
          ErrorCode::NotConstantCoefficient,
          "balancing needs frequency-independent coefficients throughout");
  require(max_imaginary_part(sys) == 0.0, ErrorCode::NotConstantCoefficient,
          "balancing needs real-valued system matrices");
  ConstantSecondOrder out;
  auto assemble = [&](const std::vector<AffineTerm>& terms, Eigen::Index cols) {
    RealMatrix acc = RealMatrix::Zero(sys.n, cols);
    for (const AffineTerm& t : terms)
      acc += t.coeff.scale().real() * t.matrix.real();
    return acc;
  };
  out.m = assemble(sys.mass_terms, sys.n);
  out.c = assemble(sys.damping_terms, sys.n);
  out.k = assemble(sys.stiffness_terms, sys.n);
  out.f = assemble(sys.input_terms, sys.m);
  out.g = sys.output.real();
  return out;
}

/// First-order descriptor form of the second-order system, size N = 2n:
///   E = [[I,0],[0,M]], A = [[0,I],[-K,-C]], B = [0;F], D = [G 0].
struct FirstOrderRealization {
  RealMatrix e;
  RealMatrix a;
  RealMatrix b;
  RealMatrix d;
  Eigen::Index n = 0;  // second-order dimension; the realization is 2n
};

inline FirstOrderRealization first_order_realize(const StructuredSystem& sys) {
  ConstantSecondOrder blk = constant_second_order(sys);
  const Eigen::Index n = sys.n;
  FirstOrderRealization fo;
  fo.n = n;
  fo.e = RealMatrix::Identity(2 * n, 2 * n);
  fo.e.bottomRightCorner(n, n) = blk.m;
  fo.a = RealMatrix::Zero(2 * n, 2 * n);
  fo.a.topRightCorner(n, n) = RealMatrix::Identity(n, n);
  fo.a.bottomLeftCorner(n, n) = -blk.k;
  fo.a.bottomRightCorner(n, n) = -blk.c;
  fo.b = RealMatrix::Zero(2 * n, sys.m);
  fo.b.bottomRows(n) = blk.f;
  fo.d = RealMatrix::Zero(sys.p, 2 * n);
  fo.d.leftCols(n) = blk.g;
  return fo;
}

/// Low-rank Gramian factors split into position rows (1..n) and velocity
/// rows (n+1..2n): P ~= [R_p; R_v][R_p; R_v]^T and likewise Q from L.
struct PartitionedGramianFactors {
  RealMatrix r_p;
  RealMatrix r_v;
  RealMatrix l_p;
  RealMatrix l_v;
};

/// Solves the dual Lyapunov equations of the realization and partitions the
/// factors. UnstablePencil propagates from the solver when the pencil has
/// eigenvalues outside the open left half-plane.
inline PartitionedGramianFactors gramian_factors(const FirstOrderRealization& fo) {
  RealMatrix r = lyapunov_solve(fo.a, fo.e, fo.b, LyapunovSide::Controllability);
  RealMatrix l =
      lyapunov_solve(fo.a, fo.e, RealMatrix(fo.d.transpose()), LyapunovSide::Observability);
  PartitionedGramianFactors out;
  out.r_p = r.topRows(fo.n);
  out.r_v = r.bottomRows(fo.n);
  out.l_p = l.topRows(fo.n);
  out.l_v = l.bottomRows(fo.n);
  return out;
}

enum class SobtVariant { v, fv, vpm, pm, pv, vp, p, so };

inline const char* sobt_variant_name(SobtVariant v) {
  switch (v) {
    case SobtVariant::v: return "v";
    case SobtVariant::fv: return "fv";
    case SobtVariant::vpm: return "vpm";
    case SobtVariant::pm: return "pm";
    case SobtVariant::pv: return "pv";
    case SobtVariant::vp: return "vp";
    case SobtVariant::p: return "p";
    case SobtVariant::so: return "so";
  }
  return "?";
}

inline SobtVariant sobt_variant_from_name(const std::string& name) {
  if (name == "v") return SobtVariant::v;
  if (name == "fv") return SobtVariant::fv;
  if (name == "vpm") return SobtVariant::vpm;
  if (name == "pm") return SobtVariant::pm;
  if (name == "pv") return SobtVariant::pv;
  if (name == "vp") return SobtVariant::vp;
  if (name == "p") return SobtVariant::p;
  if (name == "so") return SobtVariant::so;
  fail(ErrorCode::BadConfig, "unknown balancing variant '" + name + "'");
}

inline const std::vector<SobtVariant>& all_sobt_variants() {
  static const std::vector<SobtVariant> all = {
      SobtVariant::v,  SobtVariant::fv, SobtVariant::vpm, SobtVariant::pm,
      SobtVariant::pv, SobtVariant::vp, SobtVariant::p,   SobtVariant::so};
  return all;
}

namespace detail {

struct RealSvd {
  RealMatrix u;
  Eigen::VectorXd sigma;
  RealMatrix t;
  Eigen::Index rank = 0;  // count of sigma_i > 1e-12 * sigma_1
};

inline RealSvd balanced_svd(const RealMatrix& product) {
  Eigen::JacobiSVD<RealMatrix> dec(product, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RealSvd out;
  out.u = dec.matrixU();
  out.sigma = dec.singularValues();
  out.t = dec.matrixV();
  double head = out.sigma.size() > 0 ? out.sigma(0) : 0.0;
  for (Eigen::Index i = 0; i < out.sigma.size(); ++i)
    if (out.sigma(i) > 1e-12 * head) ++out.rank;
  return out;
}

// factor * dirs_1 * Sigma_1^{-1/2}
inline RealMatrix balanced_scale(const RealMatrix& factor, const RealMatrix& dirs,
                                 const Eigen::VectorXd& sigma, Eigen::Index eff) {
  return factor * dirs.leftCols(eff) *
         sigma.head(eff).array().rsqrt().matrix().asDiagonal();
}

inline RealMatrix apply_inverse_transpose(const RealMatrix& m, const RealMatrix& rhs) {
  Eigen::PartialPivLU<RealMatrix> lu(RealMatrix(m.transpose()));
  Eigen::VectorXd upiv = lu.matrixLU().diagonal().cwiseAbs();
  double rc = lu.rcond();
  require(std::isfinite(rc) && rc > kRcondFloor &&
              upiv.minCoeff() > kRcondFloor * upiv.maxCoeff(),
          ErrorCode::SingularMass, "mass matrix is singular to working precision");
  return lu.solve(rhs);
}

}  // namespace detail

/// Truncation bases and the order actually realized after dropping singular
/// values at or below 1e-12 of the leading one.
struct SobtBases {
  ProjectionPair pair;
  Eigen::Index effective_r = 0;
};

/// Balancing formulas for the single-stage variants. An empty W in the pair
/// means W = V (the fv formula). The "so" variant is two-stage and lives in
/// sobt() directly.
inline SobtBases sobt_bases(const StructuredSystem& sys,
                            const PartitionedGramianFactors& factors,
                            SobtVariant variant, Eigen::Index r) {
  require(r >= 1, ErrorCode::BadConfig, "sobt: r < 1");
  require(variant != SobtVariant::so, ErrorCode::BadConfig,
          "sobt_bases: the so variant has no single projection pair");
  require(factors.r_p.rows() == sys.n && factors.l_p.rows() == sys.n &&
              factors.r_v.rows() == sys.n && factors.l_v.rows() == sys.n,
          ErrorCode::DimensionMismatch, "sobt: factors do not match the system");
  ConstantSecondOrder blk = constant_second_order(sys);

  RealMatrix w;
  RealMatrix v;
  Eigen::Index eff = 0;
  using detail::balanced_scale;
  using detail::balanced_svd;
  switch (variant) {
    case SobtVariant::v: {
      detail::RealSvd d = balanced_svd(factors.l_v.transpose() * blk.m * factors.r_v);
      eff = std::min(r, d.rank);
      require(eff >= 1, ErrorCode::RankDeficient, "sobt: balancing product has rank zero");
      w = balanced_scale(factors.l_v, d.u, d.sigma, eff);
      v = balanced_scale(factors.r_v, d.t, d.sigma, eff);
      break;
    }
    case SobtVariant::fv: {
      detail::RealSvd d = balanced_svd(factors.l_p.transpose() * factors.r_p);
      eff = std::min(r, d.rank);
      require(eff >= 1, ErrorCode::RankDeficient, "sobt: balancing product has rank zero");
      v = balanced_scale(factors.r_p, d.t, d.sigma, eff);
      break;
    }
    case SobtVariant::vpm: {
      detail::RealSvd d = balanced_svd(factors.l_p.transpose() * factors.r_v);
      eff = std::min(r, d.rank);
      require(eff >= 1, ErrorCode::RankDeficient, "sobt: balancing product has rank zero");
      w = detail::apply_inverse_transpose(
          blk.m, balanced_scale(factors.l_p, d.u, d.sigma, eff));
      v = balanced_scale(factors.r_v, d.t, d.sigma, eff);
      break;
    }
    case SobtVariant::pm: {
      detail::RealSvd d = balanced_svd(factors.l_p.transpose() * factors.r_p);
      eff = std::min(r, d.rank);
      require(eff >= 1, ErrorCode::RankDeficient, "sobt: balancing product has rank zero");
      w = detail::apply_inverse_transpose(
          blk.m, balanced_scale(factors.l_p, d.u, d.sigma, eff));
      v = balanced_scale(factors.r_p, d.t, d.sigma, eff);
      break;
    }
    case SobtVariant::pv: {
      detail::RealSvd d = balanced_svd(factors.l_v.transpose() * blk.m * factors.r_p);
      eff = std::min(r, d.rank);
      require(eff >= 1, ErrorCode::RankDeficient, "sobt: balancing product has rank zero");
      w = balanced_scale(factors.l_v, d.u, d.sigma, eff);
      v = balanced_scale(factors.r_p, d.t, d.sigma, eff);
      break;
    }
    case SobtVariant::vp: {
      detail::RealSvd d1 = balanced_svd(factors.l_p.transpose() * factors.r_v);
      detail::RealSvd d2 = balanced_svd(factors.l_v.transpose() * blk.m * factors.r_p);
      eff = std::min({r, d1.rank, d2.rank});
      require(eff >= 1, ErrorCode::RankDeficient, "sobt: balancing product has rank zero");
      w = balanced_scale(factors.l_v, d2.u, d1.sigma, eff);
      v = balanced_scale(factors.r_v, d1.t, d1.sigma, eff);
      break;
    }
    case SobtVariant::p: {
      detail::RealSvd d1 = balanced_svd(factors.l_p.transpose() * factors.r_p);
      detail::RealSvd d2 = balanced_svd(factors.l_v.transpose() * blk.m * factors.r_v);
      eff = std::min({r, d1.rank, d2.rank});
      require(eff >= 1, ErrorCode::RankDeficient, "sobt: balancing product has rank zero");
      w = balanced_scale(factors.l_v, d2.u, d1.sigma, eff);
      v = balanced_scale(factors.r_p, d1.t, d1.sigma, eff);
      break;
    }
    case SobtVariant::so:
      break;  // unreachable, guarded above
  }

  SobtBases out;
  out.effective_r = eff;
  out.pair.v = v.cast<Complex>();
  if (w.size() > 0) out.pair.w = w.cast<Complex>();
  out.pair.variant = (w.size() > 0) ? ProjectionVariant::tsreal
                                    : ProjectionVariant::osrealinput;
  return out;
}

/// Balanced truncation to order r (clamped to the numerical rank of the
/// balancing products; the provenance records the order realized). The
/// scaled bases are applied verbatim, since the scaling is the balancing.
/// The "so" variant projects on the first-order realization and recovers
/// second-order structure through the coupling S = W_p^T V_v.
inline ReducedModel sobt(const StructuredSystem& sys,
                         const PartitionedGramianFactors& factors,
                         SobtVariant variant, Eigen::Index r) {
  if (variant != SobtVariant::so) {
    SobtBases bases = sobt_bases(sys, factors, variant, r);
    ReducedModel rom = project(sys, bases.pair, false);
    rom.provenance.method = "sobt";
    rom.provenance.strategy = sobt_variant_name(variant);
    rom.provenance.variant = variant_name(bases.pair.variant);
    rom.provenance.effective_r = bases.effective_r;
    return rom;
  }

  require(r >= 1, ErrorCode::BadConfig, "sobt: r < 1");
  require(factors.r_p.rows() == sys.n && factors.l_p.rows() == sys.n &&
              factors.r_v.rows() == sys.n && factors.l_v.rows() == sys.n,
          ErrorCode::DimensionMismatch, "sobt: factors do not match the system");
  ConstantSecondOrder blk = constant_second_order(sys);

  detail::RealSvd dp = detail::balanced_svd(factors.l_p.transpose() * factors.r_p);
  detail::RealSvd dv =
      detail::balanced_svd(factors.l_v.transpose() * blk.m * factors.r_v);
  Eigen::Index eff = std::min({r, dp.rank, dv.rank});
  require(eff >= 1, ErrorCode::RankDeficient, "sobt: balancing product has rank zero");

  RealMatrix w_p = detail::balanced_scale(factors.l_p, dp.u, dp.sigma, eff);
  RealMatrix v_p = detail::balanced_scale(factors.r_p, dp.t, dp.sigma, eff);
  RealMatrix w_v = detail::balanced_scale(factors.l_v, dv.u, dv.sigma, eff);
  RealMatrix v_v = detail::balanced_scale(factors.r_v, dv.t, dv.sigma, eff);

  RealMatrix s = w_p.transpose() * v_v;
  {
    Eigen::JacobiSVD<RealMatrix> cond(s);
    double lo = cond.singularValues()(eff - 1);
    double hi = cond.singularValues()(0);
    require(lo > 0.0 && hi / lo <= 1e12, ErrorCode::SingularCoupling,
            "sobt: position/velocity coupling is numerically singular");
  }
  Eigen::PartialPivLU<RealMatrix> s_lu_t(RealMatrix(s.transpose()));
  auto right_inverse = [&](const RealMatrix& x) {
    // x S^{-1} via S^T y^T = x^T
    return RealMatrix(s_lu_t.solve(RealMatrix(x.transpose())).transpose());
  };

  ReducedModel rom;
  rom.sys.case_tag = sys.case_tag;
  rom.sys.n = eff;
  rom.sys.m = sys.m;
  rom.sys.p = sys.p;
  rom.sys.regular_point = sys.regular_point;
  auto project_state = [&](const std::vector<AffineTerm>& terms, const RealMatrix& right,
                           bool couple) {
    std::vector<AffineTerm> out;
    out.reserve(terms.size());
    for (const AffineTerm& t : terms) {
      RealMatrix core = s * (w_v.transpose() * t.matrix.real() * right);
      if (couple) core = right_inverse(core);
      out.push_back({t.coeff, core.cast<Complex>()});
    }
    return out;
  };
  rom.sys.mass_terms = project_state(sys.mass_terms, v_v, true);
  rom.sys.damping_terms = project_state(sys.damping_terms, v_v, true);
  rom.sys.stiffness_terms = project_state(sys.stiffness_terms, v_p, false);
  for (const AffineTerm& t : sys.input_terms)
    rom.sys.input_terms.push_back(
        {t.coeff, RealMatrix(s * (w_v.transpose() * t.matrix.real())).cast<Complex>()});
  rom.sys.output = (blk.g * v_p).cast<Complex>();

  rom.provenance.method = "sobt";
  rom.provenance.strategy = sobt_variant_name(variant);
  rom.provenance.variant = variant_name(ProjectionVariant::tsreal);
  rom.provenance.effective_r = eff;
  return rom;
}

/// One-sided dominant subspace of a Gramian factor: the leading left
/// singular directions of its position rows (pivoted QR behind the flag).
/// Used when only one Gramian is available or a Galerkin projection is
/// wanted; the pair leaves W empty, meaning W = V.
inline ProjectionPair dominant_onesided(const PartitionedGramianFactors& factors,
                                        LyapunovSide side, Eigen::Index r,
                                        bool use_qr = false) {
  require(r >= 1, ErrorCode::BadConfig, "dominant_onesided: r < 1");
  const RealMatrix& rows =
      side == LyapunovSide::Controllability ? factors.r_p : factors.l_p;
  ProjectionPair pair;
  pair.variant = side == LyapunovSide::Controllability
                     ? ProjectionVariant::osrealinput
                     : ProjectionVariant::osrealoutput;
  if (use_qr) {
    PivotedQr qr = qr_pivoted(rows.cast<Complex>());
    require(r <= qr.rank, ErrorCode::RankDeficient,
            "dominant_onesided: requested order exceeds the factor rank");
    pair.v = qr.q.leftCols(r);
  } else {
    detail::RealSvd d = detail::balanced_svd(rows);
    require(r <= d.rank, ErrorCode::RankDeficient,
            "dominant_onesided: requested order exceeds the factor rank");
    pair.v = d.u.leftCols(r).cast<Complex>();
  }
  return pair;
}

}  // namespace somor
