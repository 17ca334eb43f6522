// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <thread>
#include <vector>

#include "somor/error.hpp"
#include "somor/numerics.hpp"
#include "somor/system.hpp"

namespace somor {

/// Strictly increasing evaluation frequencies in Hz; points map onto the
/// imaginary axis as 2*pi*f*i.
struct FrequencyGrid {
  std::vector<double> hz;

  static FrequencyGrid linspace_hz(double lo, double hi, Eigen::Index count) {
    require(count >= 1, ErrorCode::BadConfig, "FrequencyGrid: count < 1");
    require(count == 1 || hi > lo, ErrorCode::BadConfig,
            "FrequencyGrid: range must increase");
    FrequencyGrid grid;
    grid.hz.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) {
      double t = count == 1 ? 0.0
                            : static_cast<double>(i) / static_cast<double>(count - 1);
      grid.hz.push_back(lo + t * (hi - lo));
    }
    return grid;
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(hz.size()); }

  Complex point(Eigen::Index i) const {
    return Complex(0.0, 2.0 * std::numbers::pi * hz[static_cast<std::size_t>(i)]);
  }
};

/// One evaluated grid point. A point where the operator could not be solved
/// is flagged rather than failing the whole sweep.
struct SweepEntry {
  Matrix h;
  bool ok = true;
};

struct Sweep {
  FrequencyGrid grid;
  std::vector<SweepEntry> entries;
};

/// Evaluate the transfer function over the grid. Deterministic slot order
/// regardless of the worker count.
inline Sweep sweep(const StructuredSystem& sys, const FrequencyGrid& grid,
                   int jobs = 1) {
  require(grid.size() >= 1, ErrorCode::BadConfig, "sweep: empty grid");
  Sweep out;
  out.grid = grid;
  out.entries.resize(static_cast<std::size_t>(grid.size()));
  auto eval_point = [&](Eigen::Index i) {
    SweepEntry& entry = out.entries[static_cast<std::size_t>(i)];
    try {
      entry.h = eval_transfer(sys, grid.point(i));
      entry.ok = true;
    } catch (const Error&) {
      entry.h = Matrix::Zero(sys.p, sys.m);
      entry.ok = false;
    }
  };
  if (jobs <= 1) {
    for (Eigen::Index i = 0; i < grid.size(); ++i) eval_point(i);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&, w]() {
        for (Eigen::Index i = w; i < grid.size(); i += jobs) eval_point(i);
      });
    for (std::thread& t : workers) t.join();
  }
  return out;
}

inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> dec(a);
  return dec.singularValues().size() == 0 ? 0.0 : dec.singularValues()(0);
}

/// Discrete relative worst-case error: the ratio of the largest pointwise
/// spectral norm of the mismatch to the largest pointwise spectral norm of
/// the reference. Flagged points on either side are skipped.
inline double linf_rel_error(const Sweep& fom, const Sweep& rom) {
  require(fom.grid.hz == rom.grid.hz, ErrorCode::DimensionMismatch,
          "linf_rel_error: sweeps use different grids");
  double max_ref = 0.0;
  double max_err = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < fom.entries.size(); ++i) {
    if (!fom.entries[i].ok || !rom.entries[i].ok) continue;
    any = true;
    max_ref = std::max(max_ref, spectral_norm(fom.entries[i].h));
    max_err = std::max(max_err, spectral_norm(fom.entries[i].h - rom.entries[i].h));
  }
  require(any && max_ref > 0.0, ErrorCode::ZeroReference,
          "linf_rel_error: reference sweep has no usable magnitude");
  return max_err / max_ref;
}

struct ErrorSample {
  Eigen::Index r = 0;
  double eps = 1.0;
  double seconds = 0.0;
};

/// Relative error per reduced order, kept sorted by r. Re-adding an order
/// keeps the better (smaller) error.
struct ErrorCurve {
  std::vector<ErrorSample> samples;

  void add(Eigen::Index r, double eps, double seconds = 0.0) {
    auto at = std::lower_bound(
        samples.begin(), samples.end(), r,
        [](const ErrorSample& s, Eigen::Index key) { return s.r < key; });
    if (at != samples.end() && at->r == r) {
      if (eps < at->eps) {
        at->eps = eps;
        at->seconds = seconds;
      }
      return;
    }
    samples.insert(at, {r, eps, seconds});
  }
};

struct MorScore {
  double score = 0.0;
  double eps = 1e-16;
  Eigen::Index r_max = 0;
};

/// Area below the normalized error graph: orders scale to r/r_max, errors to
/// log10(e)/floor(log10(eps)) after clamping into [eps, 1], and the curve is
/// anchored at order zero with full error. Trapezoidal rule over the
/// available samples; nothing is extrapolated past the last order.
inline MorScore morscore(const ErrorCurve& curve, double eps, Eigen::Index r_max) {
  require(!curve.samples.empty(), ErrorCode::EmptyCurve, "morscore: empty curve");
  require(eps > 0.0 && eps < 1.0, ErrorCode::BadConfig,
          "morscore: eps must sit in (0, 1)");
  require(r_max >= 1, ErrorCode::BadConfig, "morscore: r_max < 1");
  const double denom = std::floor(std::log10(eps));

  double score = 0.0;
  double x_prev = 0.0;
  double y_prev = 0.0;  // anchor: zero order, full error
  Eigen::Index r_prev = 0;
  for (const ErrorSample& s : curve.samples) {
    require(s.r >= 1 && s.r <= r_max, ErrorCode::BadConfig,
            "morscore: order outside [1, r_max]");
    require(s.r > r_prev, ErrorCode::BadConfig, "morscore: orders must increase");
    r_prev = s.r;
    double clamped = std::clamp(s.eps, eps, 1.0);
    double x = static_cast<double>(s.r) / static_cast<double>(r_max);
    double y = std::log10(clamped) / denom;
    score += 0.5 * (x - x_prev) * (y + y_prev);
    x_prev = x;
    y_prev = y;
  }
  MorScore out;
  out.score = score;
  out.eps = eps;
  out.r_max = r_max;
  return out;
}

}  // namespace somor
