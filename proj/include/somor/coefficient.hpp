// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0
//
// Scalar frequency coefficients attached to operator terms.  Every
// coefficient is either a monomial in s (including 1/s) or a named smooth
// function drawn from a catalog; both routes expose exact derivatives so
// basis construction never falls back to finite differences.

#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "somor/error.hpp"

namespace somor {

using Complex = std::complex<double>;

struct FunctionDef {
  std::string id;
  std::function<Complex(Complex)> eval;
  // d^order/ds^order at s; order >= 1.  Absent means the function can only
  // be used where no derivatives are requested (or through a rational
  // surrogate realization).
  std::function<Complex(Complex, int)> derivative;
  std::vector<Complex> poles;  // declared singularities, kept off sampling grids
};

inline std::string format_parameter(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Named function catalog.  Ids of the form "family:param" are built on
// demand, so a system written to disk can name its coefficient functions and
// get bit-identical behavior back on import.
class FunctionCatalog {
 public:
  // sqrt1p:w  ->  sqrt(1 + s/w)
  // relax:w   ->  s / (s + w)
  static std::shared_ptr<const FunctionDef> make_sqrt1p(double w) {
    auto def = std::make_shared<FunctionDef>();
    def->id = "sqrt1p:" + format_parameter(w);
    def->eval = [w](Complex s) { return std::sqrt(Complex(1.0) + s / w); };
    def->derivative = [w](Complex s, int order) {
      Complex base = Complex(1.0) + s / w;
      double coeff = 1.0;
      for (int i = 0; i < order; ++i) coeff *= 0.5 - i;
      return coeff * std::pow(base, 0.5 - order) / std::pow(w, order);
    };
    // branch point at s = -w, away from the imaginary axis for w > 0
    def->poles = {Complex(-w, 0.0)};
    return def;
  }

  static std::shared_ptr<const FunctionDef> make_relax(double w) {
    auto def = std::make_shared<FunctionDef>();
    def->id = "relax:" + format_parameter(w);
    def->eval = [w](Complex s) { return s / (s + w); };
    def->derivative = [w](Complex s, int order) {
      double fact = 1.0;
      for (int i = 2; i <= order; ++i) fact *= i;
      double sign = (order % 2 == 0) ? -1.0 : 1.0;
      return sign * w * fact / std::pow(s + w, order + 1);
    };
    def->poles = {Complex(-w, 0.0)};
    return def;
  }

  std::shared_ptr<const FunctionDef> lookup(const std::string& id) const {
    auto it = registered_.find(id);
    if (it != registered_.end()) return it->second;
    auto colon = id.find(':');
    if (colon != std::string::npos) {
      std::string family = id.substr(0, colon);
      char* end = nullptr;
      double w = std::strtod(id.c_str() + colon + 1, &end);
      if (end && *end == '\0') {
        if (family == "sqrt1p") return make_sqrt1p(w);
        if (family == "relax") return make_relax(w);
      }
    }
    fail(ErrorCode::BadConfig, "unknown coefficient function id '" + id + "'");
  }

  void register_function(std::shared_ptr<const FunctionDef> def) {
    registered_[def->id] = std::move(def);
  }

  static const FunctionCatalog& builtins() {
    static FunctionCatalog cat;
    return cat;
  }

 private:
  std::map<std::string, std::shared_ptr<const FunctionDef>> registered_;
};

enum class CoeffKind { Constant, Linear, Quadratic, InverseS, Function };

class Coefficient {
 public:
  static Coefficient constant(Complex c) { return Coefficient(CoeffKind::Constant, c, nullptr); }
  static Coefficient linear(Complex c = 1.0) { return Coefficient(CoeffKind::Linear, c, nullptr); }
  static Coefficient quadratic(Complex c = 1.0) {
    return Coefficient(CoeffKind::Quadratic, c, nullptr);
  }
  static Coefficient inverse_s(Complex c) { return Coefficient(CoeffKind::InverseS, c, nullptr); }
  static Coefficient function(std::shared_ptr<const FunctionDef> f, Complex c = 1.0) {
    return Coefficient(CoeffKind::Function, c, std::move(f));
  }

  Complex eval(Complex s) const {
    switch (kind_) {
      case CoeffKind::Constant: return scale_;
      case CoeffKind::Linear: return scale_ * s;
      case CoeffKind::Quadratic: return scale_ * s * s;
      case CoeffKind::InverseS:
        require(s != Complex(0.0), ErrorCode::PoleAtFrequency,
                "coefficient 1/s evaluated at s = 0");
        return scale_ / s;
      case CoeffKind::Function:
        for (Complex p : fn_->poles)
          require(s != p, ErrorCode::PoleAtFrequency,
                  "coefficient '" + fn_->id + "' evaluated at a declared singularity");
        return scale_ * fn_->eval(s);
    }
    fail(ErrorCode::UnsupportedSpec, "corrupt coefficient kind");
  }

  // Exact d^order/ds^order; order 0 falls through to eval.
  Complex derivative(Complex s, int order) const {
    if (order == 0) return eval(s);
    switch (kind_) {
      case CoeffKind::Constant: return 0.0;
      case CoeffKind::Linear: return order == 1 ? scale_ : Complex(0.0);
      case CoeffKind::Quadratic:
        if (order == 1) return 2.0 * scale_ * s;
        return order == 2 ? 2.0 * scale_ : Complex(0.0);
      case CoeffKind::InverseS: {
        require(s != Complex(0.0), ErrorCode::PoleAtFrequency,
                "coefficient 1/s differentiated at s = 0");
        double fact = 1.0;
        for (int i = 2; i <= order; ++i) fact *= i;
        double sign = (order % 2 == 0) ? 1.0 : -1.0;
        return scale_ * sign * fact / std::pow(s, order + 1);
      }
      case CoeffKind::Function:
        require(static_cast<bool>(fn_->derivative), ErrorCode::UnsupportedSpec,
                "coefficient '" + fn_->id + "' has no registered derivative");
        return scale_ * fn_->derivative(s, order);
    }
    fail(ErrorCode::UnsupportedSpec, "corrupt coefficient kind");
  }

  // s-exponent for monomial kinds; nullopt for catalog functions.
  std::optional<int> monomial_power() const {
    switch (kind_) {
      case CoeffKind::Constant: return 0;
      case CoeffKind::Linear: return 1;
      case CoeffKind::Quadratic: return 2;
      case CoeffKind::InverseS: return -1;
      case CoeffKind::Function: return std::nullopt;
    }
    return std::nullopt;
  }

  bool is_constant() const { return kind_ == CoeffKind::Constant; }

  std::vector<Complex> poles() const {
    if (kind_ == CoeffKind::InverseS) return {Complex(0.0)};
    if (kind_ == CoeffKind::Function) return fn_->poles;
    return {};
  }

  CoeffKind kind() const { return kind_; }
  Complex scale() const { return scale_; }
  const std::shared_ptr<const FunctionDef>& fn() const { return fn_; }

 private:
  Coefficient(CoeffKind kind, Complex scale, std::shared_ptr<const FunctionDef> fn)
      : kind_(kind), scale_(scale), fn_(std::move(fn)) {}

  CoeffKind kind_;
  Complex scale_;
  std::shared_ptr<const FunctionDef> fn_;
};

}  // namespace somor
