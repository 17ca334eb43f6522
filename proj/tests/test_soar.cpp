// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "helpers.hpp"
#include "somor/interp.hpp"
#include "somor/reduce.hpp"
#include "somor/soar.hpp"
#include "somor/synthetic.hpp"
#include "somor/system.hpp"

using somor::Complex;
using somor::Matrix;
using somor::Vector;
using somor_test::rel_diff;

namespace {

somor::StructuredSystem make_chain(Eigen::Index n, std::uint64_t seed) {
  somor::SyntheticModelSpec spec;
  spec.kind = "chainA-rayleigh";
  spec.n = n;
  spec.seed = seed;
  spec.tva_count = 0;
  spec.band_lo_hz = 1.0;
  spec.band_hi_hz = 120.0;
  spec.alpha = 0.02;
  spec.beta = 2e-4;
  return somor::generate_synthetic(spec);
}

// Pascal triangle, independent of the library's binomial helper.
double choose(int n, int k) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    rows[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(i) + 1, 1.0);
    for (int j = 1; j < i; ++j)
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          rows[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] +
          rows[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
  }
  return rows[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

// Taylor coefficients of the transfer function of a constant-coefficient
// second-order system at s0, from the recurrence obtained by repeatedly
// differentiating the defining linear identity. Everything here is test
// code: hand-rolled inverse and hand-rolled binomials.
std::vector<Matrix> taylor_coefficients(const Matrix& m, const Matrix& c,
                                        const Matrix& k, const Matrix& f,
                                        const Matrix& g, Complex s0, int count) {
  Matrix k0 = s0 * s0 * m + s0 * c + k;
  Matrix kinv = somor_test::gauss_jordan_inverse(k0);
  Matrix k1 = 2.0 * s0 * m + c;
  Matrix k2 = 2.0 * m;
  std::vector<Matrix> xs;
  std::vector<Matrix> out;
  double factorial = 1.0;
  for (int j = 0; j < count; ++j) {
    if (j > 0) factorial *= j;
    Matrix rhs = Matrix::Zero(k.rows(), f.cols());
    if (j == 0) rhs = f;
    if (j >= 1) rhs -= choose(j, 1) * (k1 * xs[static_cast<std::size_t>(j - 1)]);
    if (j >= 2) rhs -= choose(j, 2) * (k2 * xs[static_cast<std::size_t>(j - 2)]);
    xs.push_back(kinv * rhs);
    out.push_back(g * xs.back() / factorial);
  }
  return out;
}

}  // namespace

TEST_CASE("order one basis is the normalized shifted solve", "[soar]") {
  auto sys = make_chain(12, 5);
  Complex s0(0.0, 2.0 * std::numbers::pi * 40.0);
  Matrix q = somor::soar_basis(sys, s0, 1);
  REQUIRE(q.cols() == 1);
  Matrix x = somor_test::gauss_jordan_inverse(somor::assemble_operator(sys, s0)) *
             somor::input_at(sys, s0);
  Vector expected = x.col(0) / x.col(0).norm();
  // Direction equality up to a unimodular factor.
  Complex phase = q.col(0).dot(expected);
  REQUIRE(std::abs(std::abs(phase) - 1.0) < 1e-12);
}

TEST_CASE("zero damping deflates the first step and recurrence continues", "[soar]") {
  somor_test::Rng rng(11);
  const Eigen::Index n = 8;
  Matrix m = somor_test::random_matrix(rng, n, n);
  m = (m * m.adjoint() + 4.0 * Matrix::Identity(n, n)).eval();
  Matrix k = somor_test::random_matrix(rng, n, n);
  k = (k * k.adjoint() + 9.0 * Matrix::Identity(n, n)).eval();
  Matrix kinv = somor_test::gauss_jordan_inverse(k);
  Vector f = Vector::Ones(n);

  // s0 = 0 and C = 0 make the one-step map vanish identically.
  somor::OperatorFactor factor(k);
  auto basis = somor::soar_shifted(factor, Matrix::Zero(n, n), m, f, 3);
  REQUIRE(basis.deflations == 1);
  REQUIRE_FALSE(basis.breakdown);
  REQUIRE(basis.q.cols() == 2);

  Vector v0 = kinv * f;
  Vector v2 = -(kinv * (m * v0));
  Matrix raw(n, 2);
  raw.col(0) = v0;
  raw.col(1) = v2;
  REQUIRE(somor_test::max_principal_angle(basis.q, raw) < 1e-10);
}

TEST_CASE("span matches the raw Krylov sequence on a seeded chain", "[soar]") {
  auto sys = make_chain(6, 21);
  Complex s0(0.0, 2.0 * std::numbers::pi * 50.0);
  Matrix q = somor::soar_basis(sys, s0, 3);
  REQUIRE(q.cols() == 3);

  Matrix m = sys.mass_terms[0].matrix;
  Matrix c = sys.damping_terms[0].matrix;
  Matrix k = sys.stiffness_terms[0].matrix;
  Matrix kt = s0 * s0 * m + s0 * c + k;
  Matrix kinv = somor_test::gauss_jordan_inverse(kt);
  Matrix a = -(kinv * (2.0 * s0 * m + c));
  Matrix b = -(kinv * m);
  Vector v0 = kinv * somor::input_at(sys, s0).col(0);
  Vector v1 = a * v0;
  Vector v2 = a * v1 + b * v0;
  Matrix raw(sys.n, 3);
  raw.col(0) = v0;
  raw.col(1) = v1;
  raw.col(2) = v2;
  REQUIRE(somor_test::max_principal_angle(q, raw) < 1e-10);
}

TEST_CASE("basis is orthonormal and contains the shifted solve", "[soar]") {
  auto sys = make_chain(24, 3);
  Complex s0(0.0, 2.0 * std::numbers::pi * 70.0);
  Matrix q = somor::soar_basis(sys, s0, 6);
  Matrix gram = q.adjoint() * q;
  REQUIRE((gram - Matrix::Identity(q.cols(), q.cols())).norm() < 1e-12);

  Vector v0 = somor_test::gauss_jordan_inverse(somor::assemble_operator(sys, s0)) *
              somor::input_at(sys, s0).col(0);
  Vector residual = v0 - q * (q.adjoint() * v0);
  REQUIRE(residual.norm() < 1e-12 * v0.norm());
}

TEST_CASE("projection matches leading Taylor coefficients", "[soar]") {
  auto sys = make_chain(20, 9);
  Complex s0(0.0, 2.0 * std::numbers::pi * 45.0);
  const int r = 5;
  Matrix q = somor::soar_basis(sys, s0, r);
  REQUIRE(q.cols() == r);

  somor::ProjectionPair pair;
  pair.v = q;
  auto rom = somor::project(sys, pair);

  auto fom_coeffs = taylor_coefficients(
      sys.mass_terms[0].matrix, sys.damping_terms[0].matrix,
      sys.stiffness_terms[0].matrix, sys.input_terms[0].matrix, sys.output, s0, r);
  auto rom_coeffs = taylor_coefficients(
      rom.sys.mass_terms[0].matrix, rom.sys.damping_terms[0].matrix,
      rom.sys.stiffness_terms[0].matrix, rom.sys.input_terms[0].matrix,
      rom.sys.output, s0, r);
  for (int j = 0; j < r; ++j) {
    double rel = rel_diff(rom_coeffs[static_cast<std::size_t>(j)],
                          fom_coeffs[static_cast<std::size_t>(j)]);
    INFO("coefficient " << j);
    REQUIRE(rel < 1e-6);
  }
}

TEST_CASE("degenerate starts are reported", "[soar]") {
  auto sys = make_chain(10, 2);
  Complex s0(0.0, 2.0 * std::numbers::pi * 30.0);
  somor::OperatorFactor factor(somor::assemble_operator(sys, s0));
  Matrix k1 = somor::operator_derivative(sys, s0, 1);
  Matrix k2 = 0.5 * somor::operator_derivative(sys, s0, 2);
  SECTION("zero start vector breaks down") {
    REQUIRE_THROWS_MATCHES(
        somor::soar_shifted(factor, k1, k2, Vector::Zero(sys.n), 3), somor::Error,
        somor_test::HasCode(somor::ErrorCode::Breakdown));
  }
  SECTION("nonpositive count is rejected") {
    REQUIRE_THROWS_MATCHES(
        somor::soar_shifted(factor, k1, k2, Vector::Ones(sys.n), 0), somor::Error,
        somor_test::HasCode(somor::ErrorCode::BadConfig));
  }
}
