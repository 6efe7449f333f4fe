#pragma once

// Noncompact SU(1,1) generators on truncated Fock spaces.
//
// One-mode:  Kz = (n + 1/2)/2,  K+ = a^dag^2 / 2       (k = 1/4 even, 3/4 odd sector)
// Two-mode:  Kz = (na + nb + 1)/2, K+ = a^dag b^dag    (k = 1/2, na = nb sector)
// In both cases Kx = (K+ + K-)/2, Ky = (K+ - K-)/(2i), so [Kx, Ky] = -i Kz.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "chibounds/error.hpp"
#include "chibounds/tolerances.hpp"

namespace chibounds::su11 {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

enum class Realization { OneMode, TwoMode };
enum class NormConvention { Minkowski, Euclidean };

constexpr std::string_view to_string(Realization r) {
  return r == Realization::OneMode ? "one-mode" : "two-mode";
}
constexpr std::string_view to_string(NormConvention n) {
  return n == NormConvention::Minkowski ? "minkowski" : "euclidean";
}

inline constexpr Index min_cutoff = 8;

/// Raising-operator step: K+ maps |n> to |n + step>.
constexpr Index ladder_step(Realization r) { return r == Realization::OneMode ? 2 : 1; }

/// k(k-1). Both one-mode sectors (k = 1/4, 3/4) give -3/16.
constexpr double casimir_value(Realization r) {
  return r == Realization::OneMode ? -3.0 / 16.0 : -0.25;
}

struct Su11Generators {
  Realization realization;
  MatrixXcd kx, ky, kz, kplus;

  const MatrixXcd& operator[](int axis) const { return axis == 0 ? kx : axis == 1 ? ky : kz; }
  Index dim() const { return kz.rows(); }
  /// Rows/cols below this index are unaffected by truncation in products.
  Index interior() const { return dim() - 2; }
};

inline Su11Generators su11_generators(Index cutoff, Realization realization) {
  if (cutoff < min_cutoff) {
    throw Error(ErrorKind::BadCutoff, "cutoff must be >= " + std::to_string(min_cutoff));
  }
  MatrixXcd kplus = MatrixXcd::Zero(cutoff, cutoff);
  MatrixXcd kz = MatrixXcd::Zero(cutoff, cutoff);
  for (Index n = 0; n < cutoff; ++n) {
    const double nd = static_cast<double>(n);
    if (realization == Realization::OneMode) {
      kz(n, n) = 0.5 * (nd + 0.5);
      if (n + 2 < cutoff) kplus(n + 2, n) = 0.5 * std::sqrt((nd + 1.0) * (nd + 2.0));
    } else {
      kz(n, n) = nd + 0.5;
      if (n + 1 < cutoff) kplus(n + 1, n) = nd + 1.0;
    }
  }
  const MatrixXcd kminus = kplus.adjoint();
  return {realization, 0.5 * (kplus + kminus), cplx(0.0, -0.5) * (kplus - kminus), kz, kplus};
}

/// Max interior residual of [Kx,Ky] + i Kz and [Kz,K+/-] -/+ K+/-.
inline double commutator_residual(const Su11Generators& g) {
  const Index m = g.interior();
  const MatrixXcd kminus = g.kplus.adjoint();
  auto interior_max = [m](const MatrixXcd& r) { return r.topLeftCorner(m, m).cwiseAbs().maxCoeff(); };
  const cplx i(0.0, 1.0);
  double worst = interior_max(g.kx * g.ky - g.ky * g.kx + i * g.kz);
  worst = std::max(worst, interior_max(g.kz * g.kplus - g.kplus * g.kz - g.kplus));
  worst = std::max(worst, interior_max(g.kz * kminus - kminus * g.kz + kminus));
  return worst;
}

/// Max interior deviation of Kz^2 - Kx^2 - Ky^2 from k(k-1).
inline double casimir_residual(const Su11Generators& g) {
  const Index m = g.interior();
  const MatrixXcd c = g.kz * g.kz - g.kx * g.kx - g.ky * g.ky -
                      casimir_value(g.realization) * MatrixXcd::Identity(g.dim(), g.dim());
  return c.topLeftCorner(m, m).cwiseAbs().maxCoeff();
}

/// Normalized state in a truncated Fock space. For the two-mode realization
/// the basis is |n, n>, n < cutoff.
class Su11State {
 public:
  Su11State(Realization realization, VectorXcd amps, const Tolerances& tol = {})
      : realization_(realization), amps_(std::move(amps)) {
    if (amps_.size() < min_cutoff) throw Error(ErrorKind::BadCutoff, "cutoff too small");
    if (!amps_.allFinite()) throw Error(ErrorKind::OutOfRange, "non-finite amplitude");
    if (std::abs(amps_.squaredNorm() - 1.0) > tol.rel_tol) {
      throw Error(ErrorKind::OutOfRange, "state is not normalized");
    }
    if (std::norm(amps_(amps_.size() - 1)) >= tol.trunc_tol) {
      throw Error(ErrorKind::TruncationOverflow, "amplitude at the cutoff is not negligible");
    }
    if (realization == Realization::TwoMode) {
      k_ = 0.5;
    } else {
      double even = 0.0, odd = 0.0;
      for (Index n = 0; n < amps_.size(); ++n) (n % 2 == 0 ? even : odd) += std::norm(amps_(n));
      if (std::min(even, odd) > tol.rel_tol) {
        throw Error(ErrorKind::OutOfRange, "one-mode state mixes the k = 1/4 and k = 3/4 sectors");
      }
      k_ = even >= odd ? 0.25 : 0.75;
    }
  }

  Realization realization() const { return realization_; }
  Index cutoff() const { return amps_.size(); }
  double k() const { return k_; }
  const VectorXcd& amps() const { return amps_; }

 private:
  Realization realization_;
  VectorXcd amps_;
  double k_ = 0.25;
};

/// Probability mass of the untruncated squeezed vacuum on levels >= cutoff.
inline double squeezed_vacuum_leakage(double r, Index cutoff, Realization realization) {
  const double t = std::tanh(r);
  if (t == 0.0) return 0.0;
  if (realization == Realization::TwoMode) return std::pow(t, 2.0 * static_cast<double>(cutoff));

  // p_n on |2n>: t^{2n} (2n)! / (4^n n!^2) / cosh r, via its ratio recurrence.
  const double t2 = t * t;
  double p = 1.0 / std::cosh(r);
  double tail = 0.0;
  for (Index n = 0;; ++n) {
    if (2 * n >= cutoff) tail += p;
    const double next = p * t2 * (2.0 * n + 1.0) / (2.0 * n + 2.0);
    if (2 * n >= cutoff && (next < 1e-18 * tail || n > 50'000'000)) {
      // Remaining terms decay at least geometrically with ratio t^2.
      tail += next / (1.0 - t2);
      break;
    }
    if (p == 0.0) break;
    p = next;
  }
  return tail;
}

/// Largest r whose squeezed vacuum leaks less than trunc_tol at this cutoff.
inline double max_squeezing(Index cutoff, Realization realization, double trunc_tol = 1e-12) {
  double lo = 0.0, hi = 1.0;
  while (squeezed_vacuum_leakage(hi, cutoff, realization) < trunc_tol && hi < 40.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (squeezed_vacuum_leakage(mid, cutoff, realization) < trunc_tol ? lo : hi) = mid;
  }
  return lo;
}

/// One-mode: sum_n t^n sqrt((2n)!)/(2^n n!) |2n>; two-mode: sum_n t^n |n,n>;
/// t = tanh r, normalized.
inline Su11State squeezed_vacuum(double r, Index cutoff, Realization realization,
                                 const Tolerances& tol = {}) {
  if (cutoff < min_cutoff) throw Error(ErrorKind::BadCutoff, "cutoff too small");
  if (!(r >= 0.0) || !std::isfinite(r)) throw Error(ErrorKind::OutOfRange, "need r >= 0");
  const double leak = squeezed_vacuum_leakage(r, cutoff, realization);
  if (!(leak < tol.trunc_tol)) {
    throw Error(ErrorKind::TruncationOverflow,
                "leakage " + std::to_string(leak) + " at cutoff " + std::to_string(cutoff));
  }
  const double t = std::tanh(r);
  VectorXcd amps = VectorXcd::Zero(cutoff);
  double c = 1.0;
  if (realization == Realization::OneMode) {
    for (Index n = 0; 2 * n < cutoff; ++n) {
      amps(2 * n) = c;
      c *= t * std::sqrt((2.0 * n + 1.0) / (2.0 * n + 2.0));
    }
  } else {
    for (Index n = 0; n < cutoff; ++n, c *= t) amps(n) = c;
  }
  amps /= amps.norm();
  return Su11State(realization, std::move(amps), tol);
}

struct Su11Moments {
  Eigen::Vector3d mean;
  Eigen::Matrix3d covariance;  // symmetrized
};

/// Moments of the truncated state, computed with generators padded past the
/// cutoff so that K_i|psi> is exact.
inline Su11Moments su11_moments(const Su11State& state) {
  const Index pad = ladder_step(state.realization());
  const auto g = su11_generators(state.cutoff() + pad, state.realization());
  VectorXcd psi = VectorXcd::Zero(state.cutoff() + pad);
  psi.head(state.cutoff()) = state.amps();
  std::array<VectorXcd, 3> images;
  for (int a = 0; a < 3; ++a) images[static_cast<std::size_t>(a)] = g[a] * psi;
  Su11Moments mom;
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

struct Su11CeilingReport {
  double fq = 0.0;
  double s = 0.0;
  NormConvention norm_convention = NormConvention::Minkowski;
  double ceiling = 0.0;
  double margin = 0.0;  // ceiling - fq
  double k = 0.0;
  std::array<double, 3> fq_generators{};  // 4 Var(Kx), 4 Var(Ky), 4 Var(Kz)
  bool flagged = false;                   // margin < -rel_tol
};

/// 4 [k^2 (1 + s^2) - k]
inline double su11_ceiling_value(double k, double s) { return 4.0 * (k * k * (1.0 + s * s) - k); }

/// Minkowski: s from sqrt|<Kz>^2 - <Kx>^2 - <Ky>^2|, fq from the stationary
/// values of the covariance against the metric diag(-1, -1, 1), i.e.
/// 4 max|eig(eta Gamma)|. Euclidean: s from the Euclidean norm, fq from the
/// top covariance eigenvalue.
inline Su11CeilingReport su11_ceiling(const Su11State& state, NormConvention norm,
                                      const Tolerances& tol = {}) {
  const auto mom = su11_moments(state);
  Su11CeilingReport rep;
  rep.norm_convention = norm;
  rep.k = state.k();
  for (int a = 0; a < 3; ++a) rep.fq_generators[static_cast<std::size_t>(a)] = 4.0 * mom.covariance(a, a);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(mom.covariance);
  if (norm == NormConvention::Euclidean) {
    rep.s = mom.mean.norm() / rep.k;
    rep.fq = 4.0 * std::max(0.0, eig.eigenvalues()(2));
  } else {
    const auto& m = mom.mean;
    rep.s = std::sqrt(std::abs(m(2) * m(2) - m(0) * m(0) - m(1) * m(1))) / rep.k;
    // eta Gamma shares its nonzero spectrum with Gamma^{1/2} eta Gamma^{1/2}.
    const Eigen::Matrix3d root = eig.eigenvectors() *
                                 eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                                 eig.eigenvectors().transpose();
    const Eigen::Matrix3d eta = Eigen::Vector3d(-1.0, -1.0, 1.0).asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> hyp(root * eta * root);
    rep.fq = 4.0 * hyp.eigenvalues().cwiseAbs().maxCoeff();
  }
  rep.ceiling = su11_ceiling_value(rep.k, rep.s);
  rep.margin = rep.ceiling - rep.fq;
  rep.flagged = rep.margin < -tol.rel_tol;
  return rep;
}

}  // namespace chibounds::su11
