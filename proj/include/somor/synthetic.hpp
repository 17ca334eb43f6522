// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded benchmark generators.  All of them build anchored spring-mass
// chains whose resonances fill a requested frequency band; the variants
// differ in damping model, coefficient structure, and forcing.  Generation
// is a single fixed-order RNG sweep, so one (spec, seed) pair reproduces
// bit-identical matrices on every run.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "somor/error.hpp"
#include "somor/system.hpp"

namespace somor {

struct SyntheticModelSpec {
  std::string kind;  // chainA-rayleigh | chainA-hysteretic | cavityB | chainC
  Eigen::Index n = 0;
  std::uint64_t seed = 1;

  double alpha = 0.01;   // Rayleigh mass-proportional damping
  double beta = 1e-4;    // Rayleigh stiffness-proportional damping
  double eta = 0.1;      // hysteretic loss factor
  double speed = 343.0;  // cavityB wave speed
  double admittance = 0.2;
  int nonlinear_count = 2;
  double nonlinear_scale = 0.1;

  // Tuned absorber attachments create sharp local resonances.  -1 picks the
  // kind default (n/16 for structural chains, none for cavityB); explicit
  // tunings override the seeded placement in the band.
  int tva_count = -1;
  std::vector<double> tva_tune_hz;

  double band_lo_hz = 1.0;
  double band_hi_hz = 250.0;

  std::vector<Eigen::Index> input_nodes;   // default {0}
  std::vector<Eigen::Index> output_nodes;  // default {last main node}
};

namespace detail {

// Uniform doubles from the top 53 bits of mt19937_64 output; avoids
// std::uniform_real_distribution, whose stream is not pinned by the
// standard.
class SeededDraw {
 public:
  explicit SeededDraw(std::uint64_t seed) : eng_(seed) {}
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
  Eigen::Index index(Eigen::Index bound) {
    return static_cast<Eigen::Index>(unit() * static_cast<double>(bound)) % bound;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace detail

inline StructuredSystem generate_synthetic(const SyntheticModelSpec& spec) {
  require(spec.n >= 2, ErrorCode::UnsupportedSpec, "synthetic models need n >= 2");
  require(spec.band_hi_hz > spec.band_lo_hz && spec.band_lo_hz > 0.0,
          ErrorCode::UnsupportedSpec, "synthetic band must be positive and increasing");
  const bool rayleigh = spec.kind == "chainA-rayleigh";
  const bool hysteretic = spec.kind == "chainA-hysteretic";
  const bool cavity = spec.kind == "cavityB";
  const bool chain_c = spec.kind == "chainC";
  require(rayleigh || hysteretic || cavity || chain_c, ErrorCode::UnsupportedSpec,
          "unknown synthetic kind '" + spec.kind + "'");

  detail::SeededDraw draw(spec.seed ^ 0x9e3779b97f4a7c15ull);

  int tva_requested = spec.tva_count;
  if (tva_requested < 0) tva_requested = cavity ? 0 : static_cast<int>(spec.n / 16);
  Eigen::Index n_tva = std::min<Eigen::Index>(tva_requested, spec.n / 2 - 1);
  if (n_tva < 0) n_tva = 0;
  Eigen::Index n_main = spec.n - n_tva;

  const double pi = std::numbers::pi;
  const double w_top = 2.0 * pi * spec.band_hi_hz * 1.05;
  // Uniform anchored chain tops out at 2*sqrt(k/m); cavityB resonates at
  // speed-scaled pencil eigenvalues instead.
  double k0 = cavity ? 0.25 * w_top * w_top / (spec.speed * spec.speed)
                     : 0.25 * w_top * w_top;

  RealMatrix m = RealMatrix::Zero(spec.n, spec.n);
  RealMatrix k = RealMatrix::Zero(spec.n, spec.n);
  for (Eigen::Index i = 0; i < n_main; ++i) m(i, i) = draw.range(0.85, 1.15);
  std::vector<double> springs(static_cast<std::size_t>(n_main) + 1);
  for (auto& s : springs) s = k0 * draw.range(0.85, 1.15);
  // springs[i] couples node i-1 to node i; both chain ends are anchored
  for (Eigen::Index i = 0; i < n_main; ++i) {
    k(i, i) += springs[static_cast<std::size_t>(i)] + springs[static_cast<std::size_t>(i) + 1];
    if (i + 1 < n_main) {
      k(i, i + 1) -= springs[static_cast<std::size_t>(i) + 1];
      k(i + 1, i) -= springs[static_cast<std::size_t>(i) + 1];
    }
  }
  for (Eigen::Index t = 0; t < n_tva; ++t) {
    Eigen::Index node = n_main + t;
    Eigen::Index host = draw.index(n_main);
    double tune_hz = (static_cast<std::size_t>(t) < spec.tva_tune_hz.size())
                         ? spec.tva_tune_hz[static_cast<std::size_t>(t)]
                         : spec.band_lo_hz +
                               (0.15 + 0.7 * draw.unit()) * (spec.band_hi_hz - spec.band_lo_hz);
    double mu = 0.04 * draw.range(0.8, 1.2);
    double mt = mu * m(host, host);
    double wt = 2.0 * pi * tune_hz;
    double kt = cavity ? wt * wt * mt / (spec.speed * spec.speed) : wt * wt * mt;
    m(node, node) = mt;
    k(node, node) += kt;
    k(host, host) += kt;
    k(host, node) -= kt;
    k(node, host) -= kt;
  }

  StructuredSystem sys;
  sys.n = spec.n;
  sys.mass_terms.push_back(
      {Coefficient::constant(cavity ? 1.0 / (spec.speed * spec.speed) : 1.0),
       m.cast<Complex>()});
  sys.stiffness_terms.push_back({Coefficient::constant(1.0), k.cast<Complex>()});

  if (rayleigh || chain_c) {
    sys.case_tag = chain_c ? CaseTag::C : CaseTag::A;
    RealMatrix c = spec.alpha * m + spec.beta * k;
    sys.damping_terms.push_back({Coefficient::constant(1.0), c.cast<Complex>()});
  } else if (hysteretic) {
    sys.case_tag = CaseTag::A;
    // structural damping s * (eta*i/s) * K = i*eta*K, declared pole at 0
    sys.damping_terms.push_back(
        {Coefficient::inverse_s(Complex(0.0, spec.eta)), k.cast<Complex>()});
  } else {
    sys.case_tag = CaseTag::B;
    RealMatrix c = RealMatrix::Zero(spec.n, spec.n);
    double c_b = spec.admittance * w_top / (spec.speed * spec.speed);
    c(0, 0) = c_b * draw.range(0.9, 1.1);
    c(n_main - 1, n_main - 1) = c_b * draw.range(0.9, 1.1);
    sys.damping_terms.push_back({Coefficient::constant(1.0), c.cast<Complex>()});
  }

  if (chain_c) {
    for (int i = 0; i < spec.nonlinear_count; ++i) {
      Eigen::Index len = std::max<Eigen::Index>(2, n_main / 4);
      Eigen::Index start = draw.index(std::max<Eigen::Index>(1, n_main - len));
      RealMatrix patch = RealMatrix::Zero(spec.n, spec.n);
      for (Eigen::Index j = start; j < start + len; ++j) {
        double kp = spec.nonlinear_scale * k0 * draw.range(0.7, 1.3);
        patch(j, j) += 2.0 * kp;
        if (j + 1 < start + len) {
          patch(j, j + 1) -= kp;
          patch(j + 1, j) -= kp;
        }
      }
      auto fn = (i % 2 == 0)
                    ? FunctionCatalog::make_sqrt1p(w_top * draw.range(1.5, 2.5))
                    : FunctionCatalog::make_relax(0.5 * w_top * draw.range(0.8, 1.2));
      sys.nonlinear_terms.push_back({Coefficient::function(fn), patch.cast<Complex>()});
    }
  }

  std::vector<Eigen::Index> in_nodes = spec.input_nodes.empty()
                                           ? std::vector<Eigen::Index>{0}
                                           : spec.input_nodes;
  std::vector<Eigen::Index> out_nodes = spec.output_nodes.empty()
                                            ? std::vector<Eigen::Index>{n_main - 1}
                                            : spec.output_nodes;
  sys.m = static_cast<Eigen::Index>(in_nodes.size());
  sys.p = static_cast<Eigen::Index>(out_nodes.size());
  Matrix f = Matrix::Zero(spec.n, sys.m);
  for (Eigen::Index j = 0; j < sys.m; ++j) {
    require(in_nodes[static_cast<std::size_t>(j)] < spec.n, ErrorCode::DimensionMismatch,
            "input node out of range");
    f(in_nodes[static_cast<std::size_t>(j)], j) = 1.0;
  }
  // cavityB and chainC force with an acoustic-style source, linear in s
  sys.input_terms.push_back(
      {(cavity || chain_c) ? Coefficient::linear(1.0) : Coefficient::constant(1.0), f});
  sys.output = Matrix::Zero(sys.p, spec.n);
  for (Eigen::Index j = 0; j < sys.p; ++j) {
    require(out_nodes[static_cast<std::size_t>(j)] < spec.n, ErrorCode::DimensionMismatch,
            "output node out of range");
    sys.output(j, out_nodes[static_cast<std::size_t>(j)]) = 1.0;
  }

  sys.regular_point = Complex(0.0, 2.0 * pi * 0.5137 * (spec.band_lo_hz + spec.band_hi_hz));
  validate_dimensions(sys);
  return sys;
}

}  // namespace somor
