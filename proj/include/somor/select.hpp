// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "somor/error.hpp"
#include "somor/interp.hpp"
#include "somor/metrics.hpp"
#include "somor/numerics.hpp"
#include "somor/reduce.hpp"
#include "somor/system.hpp"

namespace somor {

/// Linearly equidistant interpolation frequencies over [f_min, f_max] plus
/// hand-picked extras. Extras sit at the end of the plan but win first when
/// the plan is later thinned to a small count.
inline ShiftPlan equi_shifts(double f_min, double f_max, Eigen::Index count,
                             const std::vector<double>& extras = {}) {
  require(f_min < f_max, ErrorCode::BadConfig, "equi_shifts: f_min must be < f_max");
  require(count >= 1, ErrorCode::BadConfig, "equi_shifts: count < 1");
  std::vector<double> base;
  base.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    double t = count == 1 ? 0.0
                          : static_cast<double>(i) / static_cast<double>(count - 1);
    base.push_back(f_min + t * (f_max - f_min));
  }
  return ShiftPlan::from_hz(base, extras);
}

/// Outcome of a compression or selection step: the basis, where it came
/// from, and (for the greedy loop) the error recorded after each iteration.
struct SelectionResult {
  Matrix v;
  Matrix w;  // only for two-sided greedy selection
  std::string method;
  std::vector<Eigen::Index> picked_columns;  // presample indices, pick order
  std::vector<Eigen::Index> picked_shifts;   // plan indices, pick order
  std::vector<double> picked_hz;
  ErrorCurve history;
  std::string stop_reason;
};

/// Doubled real presample [Re P, Im P]; provenance entries repeat with the
/// imaginary halves tagged, so every column stays attributable.
inline PresampleBasis realify_presample(const PresampleBasis& pre) {
  PresampleBasis out;
  out.strategy = pre.strategy;
  out.side = pre.side;
  out.plan = pre.plan;
  const Eigen::Index q = pre.columns.cols();
  out.columns.resize(pre.columns.rows(), 2 * q);
  out.columns.leftCols(q) = pre.columns.real().cast<Complex>();
  out.columns.rightCols(q) = pre.columns.imag().cast<Complex>();
  out.provenance = pre.provenance;
  out.provenance.reserve(2 * static_cast<std::size_t>(q));
  for (ColumnProvenance p : pre.provenance) {
    p.part = 1;
    out.provenance.push_back(p);
  }
  out.blocks = pre.blocks;
  for (auto [offset, count] : pre.blocks) out.blocks.emplace_back(offset + q, count);
  return out;
}

/// Real span of a complex basis: orthonormalized [Re V, Im V] with rank
/// deflation. The result has exactly zero imaginary part.
inline Matrix realify(const Matrix& v) {
  Matrix stacked(v.rows(), 2 * v.cols());
  stacked.leftCols(v.cols()) = v.real().cast<Complex>();
  stacked.rightCols(v.cols()) = v.imag().cast<Complex>();
  return orthonormalize(stacked);
}

/// Pivoted-QR compression: the leading r orthonormal directions after
/// column pivoting, i.e. the r most independent presample columns in norm
/// order. Pivot provenance maps straight back to shifts.
inline SelectionResult avg_compress(const PresampleBasis& pre, Eigen::Index r) {
  require(r >= 1, ErrorCode::BadConfig, "avg_compress: r < 1");
  require(pre.columns.cols() >= 1, ErrorCode::BadConfig, "avg_compress: empty presample");
  PivotedQr qr = qr_pivoted(pre.columns);
  require(r <= qr.rank, ErrorCode::RankDeficient,
          "avg_compress: requested order exceeds the presample rank");
  SelectionResult out;
  out.method = "avg";
  out.v = qr.q.leftCols(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    Eigen::Index col = qr.pivots[static_cast<std::size_t>(i)];
    out.picked_columns.push_back(col);
    const ColumnProvenance& p = pre.provenance[static_cast<std::size_t>(col)];
    out.picked_shifts.push_back(p.shift);
    out.picked_hz.push_back(pre.plan.hz[static_cast<std::size_t>(p.shift)]);
  }
  return out;
}

/// SVD compression: the r dominant left singular directions of the
/// presample, the best rank-r subspace in the least-squares sense.
inline SelectionResult minrel_compress(const PresampleBasis& pre, Eigen::Index r) {
  require(r >= 1, ErrorCode::BadConfig, "minrel_compress: r < 1");
  require(pre.columns.cols() >= 1, ErrorCode::BadConfig,
          "minrel_compress: empty presample");
  SvdFactors dec = svd_truncate(svd(pre.columns), r);
  SelectionResult out;
  out.method = "minrel";
  out.v = dec.u;
  return out;
}

/// One candidate unit for the greedy loop: every basis column associated
/// with one shift, for one or both sides.
struct GreedyBlock {
  Eigen::Index shift_index = 0;
  double hz = 0.0;
  Matrix right;
  Matrix left;  // empty for one-sided selection
};

/// Candidate blocks from presample(s). Right and left pools must come from
/// the same plan. With realify_columns set, each block is realified
/// independently so selected spans stay real.
inline std::vector<GreedyBlock> greedy_blocks(const PresampleBasis& right,
                                              const PresampleBasis* left = nullptr,
                                              bool realify_columns = false) {
  if (left != nullptr)
    require(left->plan.hz == right.plan.hz, ErrorCode::BadConfig,
            "greedy_blocks: sides presampled on different plans");
  std::vector<GreedyBlock> blocks;
  blocks.reserve(right.blocks.size());
  for (std::size_t j = 0; j < right.blocks.size(); ++j) {
    GreedyBlock b;
    b.shift_index = static_cast<Eigen::Index>(j);
    b.hz = right.plan.hz[j];
    auto [off, count] = right.blocks[j];
    b.right = right.columns.middleCols(off, count);
    if (realify_columns) b.right = realify(b.right);
    if (left != nullptr) {
      auto [loff, lcount] = left->blocks[j];
      b.left = left->columns.middleCols(loff, lcount);
      if (realify_columns) b.left = realify(b.left);
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

struct GreedyOptions {
  Eigen::Index r_target = 0;
  double tol = 0.0;  // zero disables the error-based stop
  int jobs = 1;
};

namespace detail {

inline Matrix concat_columns(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

}  // namespace detail

/// Greedy discrete worst-case selection. Seeded with the block whose shift
/// lies nearest the grid point of maximum response magnitude; afterwards the
/// next block is the unselected shift nearest the current error peak, whole
/// blocks at a time. The discrete relative error is recorded after every
/// iteration; the loop stops when it drops below tol or the basis reaches
/// r_target columns, whichever happens first. Fails with Exhausted when the
/// candidate pool runs dry with neither satisfied.
inline SelectionResult greedy_linf(const StructuredSystem& sys, const Sweep& fom,
                                   const std::vector<GreedyBlock>& blocks,
                                   const GreedyOptions& opts) {
  require(!blocks.empty(), ErrorCode::BadConfig, "greedy_linf: no candidate blocks");
  require(opts.r_target >= 1, ErrorCode::BadConfig, "greedy_linf: r_target < 1");
  require(fom.entries.size() == static_cast<std::size_t>(fom.grid.size()),
          ErrorCode::DimensionMismatch, "greedy_linf: malformed reference sweep");
  const bool two_sided = blocks[0].left.size() > 0;

  auto nearest_unselected = [&](double target_hz,
                                const std::vector<bool>& used) -> std::size_t {
    std::size_t best = blocks.size();
    double best_dist = 0.0;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      if (used[j]) continue;
      double dist = std::abs(blocks[j].hz - target_hz);
      // Strict improvement, then prefer the lower frequency.
      if (best == blocks.size() || dist < best_dist ||
          (dist == best_dist && blocks[j].hz < blocks[best].hz)) {
        best = j;
        best_dist = dist;
      }
    }
    return best;
  };

  // Seed at the loudest reference point.
  double peak = -1.0;
  double peak_hz = fom.grid.hz.front();
  for (Eigen::Index i = 0; i < fom.grid.size(); ++i) {
    const SweepEntry& e = fom.entries[static_cast<std::size_t>(i)];
    if (!e.ok) continue;
    double mag = spectral_norm(e.h);
    if (mag > peak) {
      peak = mag;
      peak_hz = fom.grid.hz[static_cast<std::size_t>(i)];
    }
  }
  require(peak > 0.0, ErrorCode::ZeroReference,
          "greedy_linf: reference sweep has no usable magnitude");

  SelectionResult out;
  out.method = "greedy";
  std::vector<bool> used(blocks.size(), false);
  Matrix v(sys.n, 0);
  Matrix w(sys.n, 0);
  std::size_t next = nearest_unselected(peak_hz, used);

  while (true) {
    used[next] = true;
    out.picked_shifts.push_back(blocks[next].shift_index);
    out.picked_hz.push_back(blocks[next].hz);
    v = detail::concat_columns(v, blocks[next].right);
    if (two_sided) w = detail::concat_columns(w, blocks[next].left);

    ProjectionPair pair;
    pair.v = v;
    if (two_sided) pair.w = w;
    ReducedModel rom = project(sys, pair);
    Sweep approx = sweep(rom.sys, fom.grid, opts.jobs);
    double eps = linf_rel_error(fom, approx);
    out.history.add(v.cols(), eps);

    if (opts.tol > 0.0 && eps < opts.tol) {
      out.stop_reason = "tol";
      break;
    }
    if (v.cols() >= opts.r_target) {
      out.stop_reason = "r_target";
      break;
    }
    if (std::find(used.begin(), used.end(), false) == used.end())
      fail(ErrorCode::Exhausted,
           "greedy_linf: candidate blocks exhausted before the target order");

    // Peak of the pointwise absolute mismatch decides the next shift.
    double worst = -1.0;
    double worst_hz = peak_hz;
    for (Eigen::Index i = 0; i < fom.grid.size(); ++i) {
      const SweepEntry& ref = fom.entries[static_cast<std::size_t>(i)];
      const SweepEntry& app = approx.entries[static_cast<std::size_t>(i)];
      if (!ref.ok || !app.ok) continue;
      double err = spectral_norm(ref.h - app.h);
      if (err > worst) {
        worst = err;
        worst_hz = fom.grid.hz[static_cast<std::size_t>(i)];
      }
    }
    next = nearest_unselected(worst_hz, used);
  }

  out.v = orthonormalize(v);
  if (two_sided) out.w = orthonormalize(w);
  return out;
}

}  // namespace somor
