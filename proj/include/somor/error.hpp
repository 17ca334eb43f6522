// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace somor {

// Failure identities thrown across the library.  The batch runner and the
// validators branch on these, so every throw site picks the code that names
// the actual defect rather than a generic one.
enum class ErrorCode {
  DimensionMismatch,
  PoleAtFrequency,
  SingularOperator,
  SingularMass,
  SingularShift,
  SingularCoupling,
  UnsupportedSpec,
  RankDeficient,
  UnstablePencil,
  Breakdown,
  NoConvergence,
  MissingRealization,
  NotConstantCoefficient,
  ZeroReference,
  EmptyCurve,
  Exhausted,
  IoFailure,
  BadConfig,
};

inline const char* name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PoleAtFrequency: return "PoleAtFrequency";
    case ErrorCode::SingularOperator: return "SingularOperator";
    case ErrorCode::SingularMass: return "SingularMass";
    case ErrorCode::SingularShift: return "SingularShift";
    case ErrorCode::SingularCoupling: return "SingularCoupling";
    case ErrorCode::UnsupportedSpec: return "UnsupportedSpec";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::UnstablePencil: return "UnstablePencil";
    case ErrorCode::Breakdown: return "Breakdown";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::MissingRealization: return "MissingRealization";
    case ErrorCode::NotConstantCoefficient: return "NotConstantCoefficient";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::EmptyCurve: return "EmptyCurve";
    case ErrorCode::Exhausted: return "Exhausted";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace somor
