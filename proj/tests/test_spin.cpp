#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "chibounds/spin.hpp"
#include "oracles.hpp"

using namespace chibounds;
using namespace chibounds::spin;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

SpinState ghz(int two_j) { return ghz_family(two_j, 0.0); }

}  // namespace

TEST(Operators, SpinHalfIsPauliOverTwo) {
  const auto ops = spin_operators(1);
  MatrixXcd sx(2, 2), sy(2, 2), sz(2, 2);
  const std::complex<double> i(0, 1);
  sx << 0, 1, 1, 0;
  sy << 0, -i, i, 0;
  sz << 1, 0, 0, -1;
  EXPECT_LT((ops.jx - 0.5 * sx).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((ops.jy - 0.5 * sy).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((ops.jz - 0.5 * sz).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Operators, MatchOracleAndCloseAlgebra) {
  for (int two_j = 0; two_j <= max_two_j; two_j += 7) {
    const auto ops = spin_operators(two_j);
    const auto o = oracle::spin_matrices(two_j);
    EXPECT_LT((ops.jx - o.jx).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((ops.jy - o.jy).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((ops.jz - o.jz).cwiseAbs().maxCoeff(), 1e-12);
    const double scale = std::max(1.0, 0.25 * two_j * (two_j + 2.0));
    EXPECT_LT(commutator_residual(ops) / scale, 1e-12);
    EXPECT_LT(casimir_residual(ops, two_j) / scale, 1e-12);
  }
}

TEST(Operators, RejectsBadSpin) {
  EXPECT_THROW(spin_operators(-1), Error);
  EXPECT_THROW(spin_operators(max_two_j + 1), Error);
}

TEST(State, Validation) {
  EXPECT_THROW(SpinState(2, VectorXcd::Ones(2)), Error);
  EXPECT_THROW(SpinState(1, VectorXcd::Ones(2)), Error);
  EXPECT_THROW(SpinState::normalized(1, VectorXcd::Zero(2)), Error);
  EXPECT_NO_THROW(SpinState::normalized(1, VectorXcd::Ones(2)));
}

TEST(Qfi, EigenstateHasZero) {
  const auto ops = spin_operators(6);
  for (Eigen::Index row = 0; row <= 6; ++row) EXPECT_NEAR(qfi_pure(dicke(6, row), ops.jz), 0.0, 1e-14);
}

TEST(Qfi, GhzAndCoherent) {
  for (int two_j : {1, 2, 4, 9, 20}) {
    const double j = 0.5 * two_j;
    const auto ops = spin_operators(two_j);
    EXPECT_NEAR(qfi_pure(ghz(two_j), ops.jz), 4 * j * j, 1e-11);
    EXPECT_NEAR(qfi_pure(coherent_top(two_j), ops.jx), 2 * j, 1e-11);
  }
}

TEST(Qfi, MatchesDirectVariance) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int two_j = 1 + trial % 12;
    const auto s = haar_random(two_j, rng);
    const auto o = oracle::spin_matrices(two_j);
    const auto ops = spin_operators(two_j);
    for (int a = 0; a < 3; ++a) {
      const MatrixXcd& h = a == 0 ? o.jx : a == 1 ? o.jy : o.jz;
      EXPECT_NEAR(qfi_pure(s, ops[a]), 4 * oracle::variance(s.amps(), h), 1e-11);
    }
  }
}

TEST(Qfi, Validation) {
  EXPECT_THROW(qfi_pure(ghz(2), spin_operators(3).jz), Error);
  MatrixXcd nh = spin_operators(2).jz;
  nh(0, 1) = 1.0;
  try {
    qfi_pure(ghz(2), nh);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
  }
}

TEST(Polarization, ClosedForms) {
  for (int two_j : {1, 2, 5, 40}) EXPECT_EQ(polarization(coherent_top(two_j)).s, 1.0);
  for (int two_j : {2, 3, 10}) EXPECT_NEAR(polarization(ghz(two_j)).s, 0.0, 1e-15);
  EXPECT_EQ(polarization(dicke(0, 0)).s, 0.0);
}

TEST(Polarization, HaarMatchesDirectExpectation) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = haar_random(10, rng);
    const auto o = oracle::spin_matrices(10);
    const Eigen::Vector3d mean(oracle::expect(s.amps(), o.jx), oracle::expect(s.amps(), o.jy),
                               oracle::expect(s.amps(), o.jz));
    const auto pol = polarization(s);
    EXPECT_NEAR(pol.s, mean.norm() / 5.0, 1e-12);
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(pol.mean(a), mean(a), 1e-12);
  }
}

TEST(VarianceIdentity, ClosedForms) {
  for (int two_j : {1, 2, 7, 30}) {
    const double j = 0.5 * two_j;
    const auto mc = spin_moments(coherent_top(two_j));
    EXPECT_NEAR(mc.covariance.trace(), j, 1e-12);
    EXPECT_LT(variance_identity_check(coherent_top(two_j)), 1e-12);
    if (two_j >= 2) {
      EXPECT_NEAR(spin_moments(ghz(two_j)).covariance.trace(), j * (j + 1), 1e-11);
      EXPECT_LT(variance_identity_check(ghz(two_j)), 1e-12);
    }
  }
}

TEST(VarianceIdentity, HaarBattery) {
  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int two_j = 2 * (1 + trial % 20);
    worst = std::max(worst, variance_identity_check(haar_random(two_j, rng)));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Ceiling, Coherent) {
  const auto rep = su2_ceiling(coherent_top(4));
  EXPECT_NEAR(rep.fq_max, 4.0, 1e-12);
  EXPECT_NEAR(rep.ceiling, 8.0, 1e-12);
  EXPECT_NEAR(rep.margin, 4.0, 1e-12);
  EXPECT_NEAR(std::abs(rep.direction(2)), 0.0, 1e-12);
}

TEST(Ceiling, GhzRatio) {
  const auto rep = su2_ceiling(ghz(4));
  EXPECT_NEAR(rep.fq_max, 16.0, 1e-12);
  EXPECT_NEAR(rep.ceiling, 24.0, 1e-12);
  EXPECT_NEAR(rep.margin, 8.0, 1e-12);
  EXPECT_NEAR(rep.direction(2), 1.0, 1e-12);
  for (int j : {2, 10, 50}) {
    const auto r = su2_ceiling(ghz(2 * j));
    EXPECT_NEAR(r.fq_max / r.ceiling, j / (j + 1.0), 1e-9);
  }
  EXPECT_GT(su2_ceiling(ghz(100)).fq_max / su2_ceiling(ghz(100)).ceiling, 0.98);
}

TEST(Ceiling, DominatesEveryDirection) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    const int two_j = 1 + trial % 20;
    const auto s = haar_random(two_j, rng);
    const auto o = oracle::spin_matrices(two_j);
    const auto rep = su2_ceiling(s);
    EXPECT_GE(rep.margin, -1e-9);
    for (int d = 0; d < 5; ++d) {
      Eigen::Vector3d n(normal(rng), normal(rng), normal(rng));
      n.normalize();
      const MatrixXcd h = n(0) * o.jx + n(1) * o.jy + n(2) * o.jz;
      EXPECT_LE(4 * oracle::variance(s.amps(), h), rep.fq_max + 1e-9);
    }
    const MatrixXcd top = rep.direction(0) * o.jx + rep.direction(1) * o.jy + rep.direction(2) * o.jz;
    EXPECT_NEAR(4 * oracle::variance(s.amps(), top), rep.fq_max, 1e-9);
    EXPECT_DOUBLE_EQ(rep.ceiling, su2_ceiling_value(s.j(), rep.s));
  }
}

TEST(Ceiling, HaarBattery) {
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) worst = std::min(worst, su2_ceiling(haar_random(2 + 2 * (trial % 20), rng)).margin);
  EXPECT_GE(worst, -1e-9);
}

TEST(GhzFamily, Endpoints) {
  EXPECT_EQ(ghz_family(4, 0.0).amps(), ghz(4).amps());
  EXPECT_NEAR(polarization(ghz_family(4, 0.0)).s, 0.0, 1e-15);
  EXPECT_NEAR(std::abs(ghz_family(4, std::numbers::pi / 4).amps()(4)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(ghz_family(4, -std::numbers::pi / 4).amps()(0)), 1.0, 1e-15);
  EXPECT_THROW(ghz_family(4, 1.5), Error);
  EXPECT_THROW(ghz_family(0, 0.1), Error);
}

TEST(GhzFamily, ClosedForm) {
  for (double eps : {-0.3, -0.01, 0.002, 0.2}) {
    const int two_j = 8;
    const auto rep = su2_ceiling(ghz_family(two_j, eps));
    EXPECT_NEAR(rep.fq_max, 64 * std::pow(std::cos(2 * eps), 2), 1e-10);
    EXPECT_NEAR(rep.s, std::abs(std::sin(2 * eps)), 1e-12);
    EXPECT_NEAR(rep.margin, 4 * 4.0, 1e-10);
  }
}
