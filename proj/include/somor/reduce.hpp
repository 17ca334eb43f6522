// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "somor/error.hpp"
#include "somor/numerics.hpp"
#include "somor/system.hpp"

namespace somor {

/// How reduction bases are applied. Two-sided uses separate input and output
/// spans; one-sided reuses a single span for both. The real forms realify
/// the bases so reduced matrices stay real whenever the originals are.
enum class ProjectionVariant {
  tsimag,
  tsreal,
  osimaginput,
  osrealinput,
  osimagoutput,
  osrealoutput,
};

inline const char* variant_name(ProjectionVariant v) {
  switch (v) {
    case ProjectionVariant::tsimag: return "tsimag";
    case ProjectionVariant::tsreal: return "tsreal";
    case ProjectionVariant::osimaginput: return "osimaginput";
    case ProjectionVariant::osrealinput: return "osrealinput";
    case ProjectionVariant::osimagoutput: return "osimagoutput";
    case ProjectionVariant::osrealoutput: return "osrealoutput";
  }
  return "?";
}

inline bool variant_is_real(ProjectionVariant v) {
  return v == ProjectionVariant::tsreal || v == ProjectionVariant::osrealinput ||
         v == ProjectionVariant::osrealoutput;
}

inline bool variant_two_sided(ProjectionVariant v) {
  return v == ProjectionVariant::tsimag || v == ProjectionVariant::tsreal;
}

/// Trial and test bases. An empty w means Galerkin: the trial span tests
/// itself.
struct ProjectionPair {
  Matrix v;
  Matrix w;
  ProjectionVariant variant = ProjectionVariant::osimaginput;
};

/// Where a reduced model came from, carried along for reporting and export.
struct Provenance {
  std::string method;
  std::string strategy;
  std::string variant;
  std::vector<double> shifts_hz;
  Eigen::Index effective_r = 0;
};

struct ReducedModel {
  StructuredSystem sys;
  Provenance provenance;
};

/// Apply the projection term by term so every coefficient tag survives:
/// each operator summand becomes Wᴴ X V under its original scalar, inputs
/// become Wᴴ F, outputs G V. Bases are orthonormalized first unless the
/// caller supplies bases whose scaling is meaningful (balancing does).
/// If orthonormalization drops the two sides to different ranks, both are
/// truncated to the smaller one so the reduced operator stays square.
inline ReducedModel project(const StructuredSystem& sys, const ProjectionPair& pair,
                            bool orthonormalize_bases = true) {
  Matrix v = pair.v;
  Matrix w = pair.w.size() > 0 ? pair.w : pair.v;
  require(v.cols() > 0, ErrorCode::BadConfig, "project: empty trial basis");
  require(v.rows() == sys.n && w.rows() == sys.n, ErrorCode::DimensionMismatch,
          "project: basis rows disagree with the state dimension");

  if (orthonormalize_bases) {
    v = orthonormalize(v);
    w = orthonormalize(w);
    Eigen::Index r = std::min(v.cols(), w.cols());
    require(r > 0, ErrorCode::RankDeficient, "project: basis has rank zero");
    v = v.leftCols(r).eval();
    w = w.leftCols(r).eval();
  }
  require(v.cols() == w.cols(), ErrorCode::DimensionMismatch,
          "project: trial and test widths differ");

  ReducedModel rom;
  rom.sys.case_tag = sys.case_tag;
  rom.sys.n = v.cols();
  rom.sys.m = sys.m;
  rom.sys.p = sys.p;
  rom.sys.regular_point = sys.regular_point;

  auto compress = [&](const std::vector<AffineTerm>& terms) {
    std::vector<AffineTerm> out;
    out.reserve(terms.size());
    for (const AffineTerm& term : terms)
      out.push_back({term.coeff, w.adjoint() * term.matrix * v});
    return out;
  };
  rom.sys.mass_terms = compress(sys.mass_terms);
  rom.sys.damping_terms = compress(sys.damping_terms);
  rom.sys.stiffness_terms = compress(sys.stiffness_terms);
  rom.sys.nonlinear_terms = compress(sys.nonlinear_terms);
  rom.sys.input_terms.reserve(sys.input_terms.size());
  for (const AffineTerm& term : sys.input_terms)
    rom.sys.input_terms.push_back({term.coeff, w.adjoint() * term.matrix});
  rom.sys.output = sys.output * v;

  rom.provenance.variant = variant_name(pair.variant);
  rom.provenance.effective_r = v.cols();
  return rom;
}

inline Matrix eval_reduced_transfer(const ReducedModel& rom, Complex s) {
  return eval_transfer(rom.sys, s);
}

}  // namespace somor
