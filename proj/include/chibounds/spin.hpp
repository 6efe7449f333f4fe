#pragma once

// Collective SU(2) spin in the Dicke basis |J, m>, m = J, J-1, ..., -J.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "chibounds/error.hpp"
#include "chibounds/tolerances.hpp"

namespace chibounds::spin {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

inline constexpr int max_two_j = 100;

inline void check_two_j(int two_j) {
  if (two_j < 0 || two_j > max_two_j) {
    throw Error(ErrorKind::BadSpin, "2J = " + std::to_string(two_j) + " outside [0, 100]");
  }
}

struct SpinOperators {
  MatrixXcd jx, jy, jz;

  const MatrixXcd& operator[](int axis) const { return axis == 0 ? jx : axis == 1 ? jy : jz; }
};

/// Jx, Jy, Jz from the ladder operator J+|m> = sqrt(J(J+1) - m(m+1)) |m+1>.
inline SpinOperators spin_operators(int two_j) {
  check_two_j(two_j);
  const Index dim = two_j + 1;
  const double j = 0.5 * two_j;
  MatrixXcd jplus = MatrixXcd::Zero(dim, dim);
  MatrixXcd jz = MatrixXcd::Zero(dim, dim);
  for (Index row = 0; row < dim; ++row) {
    const double m = j - static_cast<double>(row);
    jz(row, row) = m;
    if (row > 0) jplus(row - 1, row) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const MatrixXcd jminus = jplus.adjoint();
  return {0.5 * (jplus + jminus), cplx(0.0, -0.5) * (jplus - jminus), jz};
}

/// Normalized amplitudes over the 2J+1 Dicke states.
class SpinState {
 public:
  SpinState(int two_j, VectorXcd amps, const Tolerances& tol = {}) : two_j_(two_j), amps_(std::move(amps)) {
    check_two_j(two_j);
    if (amps_.size() != two_j + 1) {
      throw Error(ErrorKind::DimensionMismatch, "need 2J+1 amplitudes");
    }
    if (!amps_.allFinite()) throw Error(ErrorKind::OutOfRange, "non-finite amplitude");
    if (std::abs(amps_.squaredNorm() - 1.0) > tol.rel_tol) {
      throw Error(ErrorKind::OutOfRange, "state is not normalized");
    }
  }

  /// Rescales `amps` to unit norm first.
  static SpinState normalized(int two_j, VectorXcd amps) {
    const double norm = amps.norm();
    if (!(norm > 0.0)) throw Error(ErrorKind::OutOfRange, "zero state vector");
    return SpinState(two_j, amps / norm);
  }

  int two_j() const { return two_j_; }
  double j() const { return 0.5 * two_j_; }
  const VectorXcd& amps() const { return amps_; }

 private:
  int two_j_;
  VectorXcd amps_;
};

/// |J, m>, given as the row index m = J - row.
inline SpinState dicke(int two_j, Index row) {
  check_two_j(two_j);
  VectorXcd v = VectorXcd::Zero(two_j + 1);
  v(row) = 1.0;
  return SpinState(two_j, v);
}

/// |J, J>
inline SpinState coherent_top(int two_j) { return dicke(two_j, 0); }

/// cos(theta)|J,J> + sin(theta)|J,-J>, theta = pi/4 + epsilon.
inline SpinState ghz_family(int two_j, double epsilon) {
  check_two_j(two_j);
  if (!(std::abs(epsilon) <= 1.0)) throw Error(ErrorKind::OutOfRange, "|epsilon| must be <= 1");
  if (two_j == 0) throw Error(ErrorKind::BadSpin, "GHZ family needs J > 0");
  const double theta = 0.25 * std::numbers::pi + epsilon;
  VectorXcd v = VectorXcd::Zero(two_j + 1);
  v(0) = std::cos(theta);
  v(two_j) = std::sin(theta);
  return SpinState::normalized(two_j, v);
}

/// Normalized complex-normal vector.
template <class Rng>
SpinState haar_random(int two_j, Rng& rng) {
  check_two_j(two_j);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXcd v(two_j + 1);
  for (Index i = 0; i < v.size(); ++i) v(i) = {normal(rng), normal(rng)};
  return SpinState::normalized(two_j, v);
}

/// 4 Var_psi(H) for a Hermitian generator.
inline double qfi_pure(const SpinState& state, const MatrixXcd& generator,
                       const Tolerances& tol = {}) {
  const auto& psi = state.amps();
  if (generator.rows() != psi.size() || generator.cols() != psi.size()) {
    throw Error(ErrorKind::DimensionMismatch, "generator dimension does not match the state");
  }
  const double scale = std::max(1.0, generator.cwiseAbs().maxCoeff());
  if ((generator - generator.adjoint()).cwiseAbs().maxCoeff() > tol.sym_tol * scale) {
    throw Error(ErrorKind::NotHermitian, "generator is not Hermitian");
  }
  const VectorXcd h_psi = generator * psi;
  const double mean = psi.dot(h_psi).real();
  return 4.0 * (h_psi - mean * psi).squaredNorm();
}

/// First and second moments of (Jx, Jy, Jz).
struct SpinMoments {
  Eigen::Vector3d mean;
  Eigen::Matrix3d covariance;  // symmetrized: Re<J_i J_j> - <J_i><J_j>
};

inline SpinMoments spin_moments(const SpinState& state, const SpinOperators& ops) {
  const auto& psi = state.amps();
  std::array<VectorXcd, 3> images;
  for (int a = 0; a < 3; ++a) images[static_cast<std::size_t>(a)] = ops[a] * psi;
  SpinMoments mom;
  for (int a = 0; a < 3; ++a) mom.mean(a) = psi.dot(images[static_cast<std::size_t>(a)]).real();
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      const double second =
          images[static_cast<std::size_t>(a)].dot(images[static_cast<std::size_t>(b)]).real();
      mom.covariance(a, b) = mom.covariance(b, a) = second - mom.mean(a) * mom.mean(b);
    }
  }
  return mom;
}

inline SpinMoments spin_moments(const SpinState& state) {
  return spin_moments(state, spin_operators(state.two_j()));
}

struct Polarization {
  double s = 0.0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
};

inline double clamp_unit(double s, double rel_tol) {
  if (s < rel_tol) return std::max(s, 0.0);
  if (s > 1.0 - rel_tol) return std::min(s, 1.0);
  return s;
}

/// s = |<J>| / J, clamped into [0, 1] when within rel_tol of the ends.
/// J = 0 has s = 0.
inline Polarization polarization(const SpinState& state, const Tolerances& tol = {}) {
  const auto mom = spin_moments(state);
  Polarization pol;
  pol.mean = mom.mean;
  if (state.two_j() > 0) pol.s = clamp_unit(mom.mean.norm() / state.j(), tol.rel_tol);
  return pol;
}

/// |sum_i Var(J_i) - (J(J+1) - |<J>|^2)|
inline double variance_identity_residual(const SpinMoments& mom, double j) {
  const double lhs = mom.covariance.trace();
  const double rhs = j * (j + 1.0) - mom.mean.squaredNorm();
  return std::abs(lhs - rhs);
}

inline double variance_identity_check(const SpinState& state) {
  return variance_identity_residual(spin_moments(state), state.j());
}

struct CeilingReport {
  double fq_max = 0.0;
  double s = 0.0;
  double ceiling = 0.0;
  double margin = 0.0;  // ceiling - fq_max
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
};

/// 4 [J^2 (1 - s^2) + J]
inline double su2_ceiling_value(double j, double s) { return 4.0 * (j * j * (1.0 - s * s) + j); }

/// fq_max is 4x the top eigenvalue of the spin covariance, which is the
/// supremum of 4 Var(n.J) over unit directions n.
inline CeilingReport su2_ceiling(const SpinState& state, const SpinOperators& ops,
                                 const Tolerances& tol = {}) {
  const auto mom = spin_moments(state, ops);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(mom.covariance);
  CeilingReport rep;
  rep.fq_max = 4.0 * std::max(0.0, eig.eigenvalues()(2));
  rep.direction = eig.eigenvectors().col(2);
  // Fix the eigenvector sign so reports are reproducible.
  Index lead = 0;
  rep.direction.cwiseAbs().maxCoeff(&lead);
  if (rep.direction(lead) < 0.0) rep.direction = -rep.direction;
  if (state.two_j() > 0) rep.s = clamp_unit(mom.mean.norm() / state.j(), tol.rel_tol);
  rep.ceiling = su2_ceiling_value(state.j(), rep.s);
  rep.margin = rep.ceiling - rep.fq_max;
  return rep;
}

inline CeilingReport su2_ceiling(const SpinState& state, const Tolerances& tol = {}) {
  return su2_ceiling(state, spin_operators(state.two_j()), tol);
}

/// max |[Jx, Jy] - i Jz|, and cyclic, over all entries.
inline double commutator_residual(const SpinOperators& ops) {
  const cplx i(0.0, 1.0);
  double worst = 0.0;
  for (int a = 0; a < 3; ++a) {
    const auto& x = ops[a];
    const auto& y = ops[(a + 1) % 3];
    const auto& z = ops[(a + 2) % 3];
    worst = std::max(worst, (x * y - y * x - i * z).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// max |Jx^2 + Jy^2 + Jz^2 - J(J+1)|
inline double casimir_residual(const SpinOperators& ops, int two_j) {
  const double j = 0.5 * two_j;
  const MatrixXcd c = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
  return (c - j * (j + 1.0) * MatrixXcd::Identity(c.rows(), c.cols())).cwiseAbs().maxCoeff();
}

}  // namespace chibounds::spin
