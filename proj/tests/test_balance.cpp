// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "helpers.hpp"
#include "somor/balance.hpp"
#include "somor/metrics.hpp"
#include "somor/reduce.hpp"
#include "somor/synthetic.hpp"
#include "somor/system.hpp"

using somor::Complex;
using somor::ErrorCode;
using somor::LyapunovSide;
using somor::Matrix;
using somor::RealMatrix;
using somor::SobtVariant;
using somor_test::HasCode;
using somor_test::max_principal_angle;
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

somor::StructuredSystem make_scalar(double m, double c, double k, double f, double g) {
  somor::StructuredSystem sys;
  sys.case_tag = somor::CaseTag::A;
  sys.n = sys.m = sys.p = 1;
  sys.mass_terms.push_back({somor::Coefficient::constant(1.0), Matrix::Constant(1, 1, m)});
  if (c != 0.0)
    sys.damping_terms.push_back(
        {somor::Coefficient::constant(1.0), Matrix::Constant(1, 1, c)});
  sys.stiffness_terms.push_back(
      {somor::Coefficient::constant(1.0), Matrix::Constant(1, 1, k)});
  sys.input_terms.push_back({somor::Coefficient::constant(1.0), Matrix::Constant(1, 1, f)});
  sys.output = Matrix::Constant(1, 1, g);
  return sys;
}

RealMatrix kron(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Dense vectorized solve of A P E^T + E P A^T + Z Z^T = 0.
RealMatrix lyapunov_oracle(const RealMatrix& a, const RealMatrix& e, const RealMatrix& z) {
  const Eigen::Index n = a.rows();
  RealMatrix lhs = kron(e, a) + kron(a, e);
  RealMatrix rhs = z * z.transpose();
  Eigen::VectorXd vec_rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) vec_rhs.segment(j * n, n) = -rhs.col(j);
  Eigen::VectorXd vec_p = lhs.lu().solve(vec_rhs);
  RealMatrix p(n, n);
  for (Eigen::Index j = 0; j < n; ++j) p.col(j) = vec_p.segment(j * n, n);
  return p;
}

double sobt_transfer_gap(const somor::StructuredSystem& sys, const somor::ReducedModel& rom,
                         double hz) {
  Complex s(0.0, 2.0 * std::numbers::pi * hz);
  return rel_diff(somor::eval_reduced_transfer(rom, s), somor::eval_transfer(sys, s));
}

}  // namespace

TEST_CASE("first-order realization has the exact block layout", "[balance]") {
  auto sys = make_scalar(1.0, 1.0, 1.0, 1.0, 1.0);
  somor::FirstOrderRealization fo = somor::first_order_realize(sys);
  REQUIRE(fo.n == 1);
  RealMatrix a_expect(2, 2);
  a_expect << 0.0, 1.0, -1.0, -1.0;
  CHECK((fo.a - a_expect).norm() == 0.0);
  CHECK((fo.e - RealMatrix::Identity(2, 2)).norm() == 0.0);
  RealMatrix b_expect(2, 1);
  b_expect << 0.0, 1.0;
  CHECK((fo.b - b_expect).norm() == 0.0);
  RealMatrix d_expect(1, 2);
  d_expect << 1.0, 0.0;
  CHECK((fo.d - d_expect).norm() == 0.0);
}

TEST_CASE("realization eigenvalues solve the quadratic pencil", "[balance]") {
  auto sys = make_chain(3, 17);
  somor::FirstOrderRealization fo = somor::first_order_realize(sys);
  RealMatrix a_std = fo.e.lu().solve(fo.a);
  Eigen::EigenSolver<RealMatrix> eig(a_std);
  REQUIRE(eig.info() == Eigen::Success);
  for (Eigen::Index i = 0; i < a_std.rows(); ++i) {
    Complex lambda = eig.eigenvalues()(i);
    Matrix op = somor::assemble_operator(sys, lambda);
    Eigen::JacobiSVD<Matrix> dec(op);
    double spread = dec.singularValues()(0);
    double floor = dec.singularValues()(op.rows() - 1);
    CHECK(floor < 1e-8 * spread);
  }
}

TEST_CASE("scalar Gramians match the hand-solved Lyapunov equations", "[balance]") {
  auto sys = make_scalar(1.0, 1.0, 1.0, 1.0, 1.0);
  somor::PartitionedGramianFactors f =
      somor::gramian_factors(somor::first_order_realize(sys));
  RealMatrix r(2, f.r_p.cols());
  r.row(0) = f.r_p;
  r.row(1) = f.r_v;
  RealMatrix l(2, f.l_p.cols());
  l.row(0) = f.l_p;
  l.row(1) = f.l_v;
  RealMatrix p = r * r.transpose();
  RealMatrix q = l * l.transpose();
  RealMatrix p_expect(2, 2);
  p_expect << 0.5, 0.0, 0.0, 0.5;
  RealMatrix q_expect(2, 2);
  q_expect << 1.0, 0.5, 0.5, 0.5;
  CHECK((p - p_expect).norm() < 1e-10);
  CHECK((q - q_expect).norm() < 1e-10);
}

// With unit mass, symmetric C and K, and matched ports F = G^T, the dual
// realization is similar to the primal one through T = [[0,I],[I,-C]], so
// the observability Gramian is the transformed controllability Gramian:
// Q = T^{-1} P T^{-T} with T^{-1} = [[C,I],[I,0]].
TEST_CASE("port-symmetric systems obey transform duality", "[balance]") {
  somor::ConstantSecondOrder blk = somor::constant_second_order(make_chain(8, 23));
  const Eigen::Index n = 8;
  RealMatrix c = 0.02 * RealMatrix::Identity(n, n) + 2e-4 * blk.k;

  somor::StructuredSystem sys;
  sys.case_tag = somor::CaseTag::A;
  sys.n = n;
  sys.m = sys.p = 1;
  sys.mass_terms.push_back({somor::Coefficient::constant(1.0),
                            Matrix::Identity(n, n)});
  sys.damping_terms.push_back({somor::Coefficient::constant(1.0), c.cast<Complex>()});
  sys.stiffness_terms.push_back({somor::Coefficient::constant(1.0),
                                 blk.k.cast<Complex>()});
  sys.input_terms.push_back({somor::Coefficient::constant(1.0), blk.f.cast<Complex>()});
  sys.output = blk.f.transpose().cast<Complex>();

  somor::PartitionedGramianFactors f =
      somor::gramian_factors(somor::first_order_realize(sys));
  RealMatrix r(2 * n, f.r_p.cols());
  r.topRows(n) = f.r_p;
  r.bottomRows(n) = f.r_v;
  RealMatrix l(2 * n, f.l_p.cols());
  l.topRows(n) = f.l_p;
  l.bottomRows(n) = f.l_v;
  RealMatrix p = r * r.transpose();
  RealMatrix q = l * l.transpose();

  RealMatrix t_inv = RealMatrix::Zero(2 * n, 2 * n);
  t_inv.topLeftCorner(n, n) = c;
  t_inv.topRightCorner(n, n) = RealMatrix::Identity(n, n);
  t_inv.bottomLeftCorner(n, n) = RealMatrix::Identity(n, n);
  RealMatrix q_expect = t_inv * p * t_inv.transpose();
  CHECK((q - q_expect).norm() < 1e-8 * q.norm());
}

TEST_CASE("chain Gramians match a vectorized dense oracle", "[balance]") {
  auto sys = make_chain(10, 31);
  somor::FirstOrderRealization fo = somor::first_order_realize(sys);
  somor::PartitionedGramianFactors f = somor::gramian_factors(fo);

  RealMatrix r(2 * sys.n, f.r_p.cols());
  r.topRows(sys.n) = f.r_p;
  r.bottomRows(sys.n) = f.r_v;
  RealMatrix l(2 * sys.n, f.l_p.cols());
  l.topRows(sys.n) = f.l_p;
  l.bottomRows(sys.n) = f.l_v;
  RealMatrix p = r * r.transpose();
  RealMatrix q = l * l.transpose();

  RealMatrix p_oracle = lyapunov_oracle(fo.a, fo.e, fo.b);
  RealMatrix q_oracle =
      lyapunov_oracle(fo.a.transpose(), fo.e.transpose(), fo.d.transpose());
  CHECK((p - p_oracle).norm() < 1e-8 * p_oracle.norm());
  CHECK((q - q_oracle).norm() < 1e-8 * q_oracle.norm());

  RealMatrix bbt = fo.b * fo.b.transpose();
  RealMatrix res_p =
      fo.a * p * fo.e.transpose() + fo.e * p * fo.a.transpose() + bbt;
  CHECK(res_p.norm() < 1e-8 * bbt.norm());
  RealMatrix ddt = fo.d.transpose() * fo.d;
  RealMatrix res_q =
      fo.a.transpose() * q * fo.e + fo.e.transpose() * q * fo.a + ddt;
  CHECK(res_q.norm() < 1e-8 * ddt.norm());
}

TEST_CASE("full-order balanced truncation reproduces a scalar oscillator", "[balance]") {
  auto sys = make_scalar(1.0, 0.4, 4.0, 2.0, 3.0);
  somor::PartitionedGramianFactors f =
      somor::gramian_factors(somor::first_order_realize(sys));
  for (SobtVariant variant : somor::all_sobt_variants()) {
    somor::ReducedModel rom = somor::sobt(sys, f, variant, 1);
    for (int i = 0; i < 50; ++i) {
      double hz = 0.05 + 0.1 * i;
      INFO("variant " << somor::sobt_variant_name(variant) << " at " << hz << " Hz");
      CHECK(sobt_transfer_gap(sys, rom, hz) < 1e-10);
    }
  }
}

TEST_CASE("velocity-family bases balance the mass matrix", "[balance]") {
  auto sys = make_chain(12, 41);
  somor::PartitionedGramianFactors f =
      somor::gramian_factors(somor::first_order_realize(sys));
  for (SobtVariant variant :
       {SobtVariant::v, SobtVariant::vpm, SobtVariant::pm, SobtVariant::pv}) {
    somor::ReducedModel rom = somor::sobt(sys, f, variant, 4);
    somor::ConstantSecondOrder red = somor::constant_second_order(rom.sys);
    INFO("variant " << somor::sobt_variant_name(variant));
    REQUIRE(red.m.rows() == 4);
    CHECK((red.m - RealMatrix::Identity(4, 4)).norm() < 1e-10);
  }
}

TEST_CASE("the free-velocity variant is one-sided", "[balance]") {
  auto sys = make_chain(12, 41);
  somor::PartitionedGramianFactors f =
      somor::gramian_factors(somor::first_order_realize(sys));
  somor::SobtBases bases = somor::sobt_bases(sys, f, SobtVariant::fv, 4);
  CHECK(bases.pair.w.size() == 0);
  CHECK(bases.pair.variant == somor::ProjectionVariant::osrealinput);
  CHECK(bases.effective_r == 4);
  somor::SobtBases two = somor::sobt_bases(sys, f, SobtVariant::v, 4);
  CHECK(two.pair.w.size() > 0);
  CHECK(two.pair.variant == somor::ProjectionVariant::tsreal);
}

TEST_CASE("every balancing variant yields a real reduced model", "[balance]") {
  auto sys = make_chain(30, 3);
  somor::PartitionedGramianFactors f =
      somor::gramian_factors(somor::first_order_realize(sys));
  somor::FrequencyGrid grid = somor::FrequencyGrid::linspace_hz(40.0, 120.0, 40);
  somor::Sweep fom = somor::sweep(sys, grid);
  for (SobtVariant variant : somor::all_sobt_variants()) {
    somor::ReducedModel rom = somor::sobt(sys, f, variant, 10);
    INFO("variant " << somor::sobt_variant_name(variant));
    CHECK(rom.sys.n == 10);
    CHECK(somor::max_imaginary_part(rom.sys) == 0.0);
    CHECK(rom.provenance.method == "sobt");
    CHECK(rom.provenance.strategy == somor::sobt_variant_name(variant));
    somor::Sweep approx = somor::sweep(rom.sys, grid);
    double eps = somor::linf_rel_error(fom, approx);
    CHECK(std::isfinite(eps));
  }
}

TEST_CASE("structure recovery is exact at full rank", "[balance]") {
  auto sys = make_chain(6, 29);
  somor::PartitionedGramianFactors f =
      somor::gramian_factors(somor::first_order_realize(sys));
  somor::ReducedModel rom = somor::sobt(sys, f, SobtVariant::so, 6);
  CHECK(rom.provenance.effective_r == 6);
  for (int i = 0; i < 50; ++i) {
    double hz = 1.0 + 2.4 * i;
    INFO("at " << hz << " Hz");
    CHECK(sobt_transfer_gap(sys, rom, hz) < 1e-8);
  }

  SECTION("orders beyond the product rank clamp and report") {
    somor::ReducedModel wide = somor::sobt(sys, f, SobtVariant::so, 11);
    CHECK(wide.provenance.effective_r == 6);
    CHECK(sobt_transfer_gap(sys, wide, 35.0) < 1e-8);
  }
}

TEST_CASE("dominant subspaces come from the position rows", "[balance]") {
  auto sys = make_chain(20, 7);
  somor::PartitionedGramianFactors f =
      somor::gramian_factors(somor::first_order_realize(sys));

  SECTION("svd path matches a dense oracle") {
    somor::ProjectionPair pair =
        somor::dominant_onesided(f, LyapunovSide::Controllability, 6);
    CHECK(pair.w.size() == 0);
    CHECK(pair.variant == somor::ProjectionVariant::osrealinput);
    REQUIRE(pair.v.cols() == 6);
    Eigen::JacobiSVD<RealMatrix> dec(f.r_p, Eigen::ComputeThinU);
    Matrix oracle = dec.matrixU().leftCols(6).cast<Complex>();
    CHECK(max_principal_angle(pair.v, oracle) < 1e-7);
  }

  SECTION("qr path spans a subset of the factor") {
    somor::ProjectionPair pair =
        somor::dominant_onesided(f, LyapunovSide::Controllability, 6, true);
    REQUIRE(pair.v.cols() == 6);
    Matrix gram = pair.v.adjoint() * pair.v;
    CHECK((gram - Matrix::Identity(6, 6)).norm() < 1e-12);
    Matrix pool = f.r_p.cast<Complex>();
    Matrix coeff = pool.colPivHouseholderQr().solve(pair.v);
    CHECK((pool * coeff - pair.v).norm() < 1e-10 * pair.v.norm());
  }

  SECTION("observability side draws from the output factor") {
    somor::ProjectionPair pair =
        somor::dominant_onesided(f, LyapunovSide::Observability, 4);
    CHECK(pair.w.size() == 0);
    CHECK(pair.variant == somor::ProjectionVariant::osrealoutput);
    REQUIRE(pair.v.cols() == 4);
    Eigen::JacobiSVD<RealMatrix> dec(f.l_p, Eigen::ComputeThinU);
    Matrix oracle = dec.matrixU().leftCols(4).cast<Complex>();
    CHECK(max_principal_angle(pair.v, oracle) < 1e-7);
  }

  SECTION("larger dominant bases do not approximate worse") {
    somor::FrequencyGrid grid = somor::FrequencyGrid::linspace_hz(40.0, 120.0, 60);
    somor::Sweep fom = somor::sweep(sys, grid);
    auto run = [&](Eigen::Index r) {
      somor::ProjectionPair pair =
          somor::dominant_onesided(f, LyapunovSide::Controllability, r);
      somor::ReducedModel rom = somor::project(sys, pair);
      return somor::linf_rel_error(fom, somor::sweep(rom.sys, grid));
    };
    double coarse = run(5);
    double fine = run(10);
    CHECK(std::isfinite(coarse));
    CHECK(fine <= coarse);
  }

  SECTION("rank limits are enforced") {
    CHECK_THROWS_MATCHES(somor::dominant_onesided(f, LyapunovSide::Controllability, 21),
                         somor::Error, HasCode(ErrorCode::RankDeficient));
    CHECK_THROWS_MATCHES(
        somor::dominant_onesided(f, LyapunovSide::Controllability, 21, true),
        somor::Error, HasCode(ErrorCode::RankDeficient));
    CHECK_THROWS_MATCHES(somor::dominant_onesided(f, LyapunovSide::Controllability, 0),
                         somor::Error, HasCode(ErrorCode::BadConfig));
  }
}

TEST_CASE("balancing rejects what it cannot represent", "[balance]") {
  SECTION("frequency-dependent terms") {
    somor::SyntheticModelSpec spec;
    spec.kind = "chainC";
    spec.n = 10;
    spec.seed = 5;
    spec.band_lo_hz = 1.0;
    spec.band_hi_hz = 120.0;
    auto sys = somor::generate_synthetic(spec);
    CHECK_THROWS_MATCHES(somor::first_order_realize(sys), somor::Error,
                         HasCode(ErrorCode::NotConstantCoefficient));
  }
  SECTION("complex-valued stiffness") {
    somor::SyntheticModelSpec spec;
    spec.kind = "chainA-hysteretic";
    spec.n = 10;
    spec.seed = 5;
    spec.band_lo_hz = 1.0;
    spec.band_hi_hz = 120.0;
    auto sys = somor::generate_synthetic(spec);
    CHECK_THROWS_MATCHES(somor::first_order_realize(sys), somor::Error,
                         HasCode(ErrorCode::NotConstantCoefficient));
  }
  SECTION("undamped pencils are unstable") {
    auto sys = make_scalar(1.0, 0.0, 1.0, 1.0, 1.0);
    CHECK_THROWS_MATCHES(somor::gramian_factors(somor::first_order_realize(sys)),
                         somor::Error, HasCode(ErrorCode::UnstablePencil));
  }
  SECTION("singular position/velocity coupling") {
    auto sys = make_scalar(1.0, 1.0, 1.0, 1.0, 1.0);
    sys.n = 2;
    sys.mass_terms[0].matrix = Matrix::Identity(2, 2);
    sys.damping_terms[0].matrix = Matrix::Identity(2, 2);
    sys.stiffness_terms[0].matrix = Matrix::Identity(2, 2);
    sys.input_terms[0].matrix = Matrix::Ones(2, 1);
    sys.output = Matrix::Ones(1, 2);
    somor::PartitionedGramianFactors f;
    f.r_p = RealMatrix::Zero(2, 1);
    f.r_p(0, 0) = 1.0;
    f.r_v = RealMatrix::Zero(2, 1);
    f.r_v(1, 0) = 1.0;
    f.l_p = f.r_p;
    f.l_v = f.r_v;
    CHECK_THROWS_MATCHES(somor::sobt(sys, f, SobtVariant::so, 1), somor::Error,
                         HasCode(ErrorCode::SingularCoupling));
  }
  SECTION("names round-trip and unknown names fail") {
    for (SobtVariant v : somor::all_sobt_variants())
      CHECK(somor::sobt_variant_from_name(somor::sobt_variant_name(v)) == v);
    CHECK_THROWS_MATCHES(somor::sobt_variant_from_name("vv"), somor::Error,
                         HasCode(ErrorCode::BadConfig));
    auto sys = make_scalar(1.0, 1.0, 1.0, 1.0, 1.0);
    somor::PartitionedGramianFactors f =
        somor::gramian_factors(somor::first_order_realize(sys));
    CHECK_THROWS_MATCHES(somor::sobt(sys, f, SobtVariant::v, 0), somor::Error,
                         HasCode(ErrorCode::BadConfig));
  }
}
