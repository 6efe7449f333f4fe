#pragma once

// Gaussian states in vacuum-normalized units (vacuum covariance = identity)
// with interleaved quadrature ordering (x1, p1, x2, p2, ...).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chibounds/error.hpp"
#include "chibounds/poscone.hpp"
#include "chibounds/tolerances.hpp"

namespace chibounds::gaussian {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Default cap on squeezing parameters accepted by the constructors.
inline constexpr double default_r_max = 5.0;

/// Disjoint mode sets covering every mode. B may be empty only for a
/// single-block state, which has spectra but no bipartite quantities.
struct ModePartition {
  std::vector<Index> a;
  std::vector<Index> b;

  static ModePartition contiguous(Index na, Index nb) {
    auto p = poscone::Bipartition::contiguous(na, nb);
    return {std::move(p.a), std::move(p.b)};
  }

  bool bipartite() const { return !a.empty() && !b.empty(); }

  /// Quadrature-level partition: mode m owns rows 2m and 2m+1.
  poscone::Bipartition quadratures() const {
    poscone::Bipartition q;
    for (Index m : a) q.a.insert(q.a.end(), {2 * m, 2 * m + 1});
    for (Index m : b) q.b.insert(q.b.end(), {2 * m, 2 * m + 1});
    return q;
  }

  void validate(Index n_modes) const {
    if (a.empty()) throw Error(ErrorKind::BadPartition, "mode set A must be non-empty");
    std::vector<Index> all(a);
    all.insert(all.end(), b.begin(), b.end());
    if (!poscone::detail::is_sorted_unique(a) || !poscone::detail::is_sorted_unique(b)) {
      throw Error(ErrorKind::BadPartition, "mode sets must be sorted and duplicate-free");
    }
    std::sort(all.begin(), all.end());
    if (static_cast<Index>(all.size()) != n_modes) {
      throw Error(ErrorKind::BadPartition, "mode partition does not cover every mode");
    }
    for (Index i = 0; i < n_modes; ++i) {
      if (all[static_cast<std::size_t>(i)] != i) {
        throw Error(ErrorKind::BadPartition, "mode sets overlap or fall outside 0..n-1");
      }
    }
  }
};

/// Standard symplectic form, block diagonal in [[0, 1], [-1, 0]].
inline MatrixXd symplectic_form(Index n_modes) {
  MatrixXd omega = MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (Index m = 0; m < n_modes; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  return omega;
}

struct SymplecticSpectrum {
  std::vector<double> nus;  // non-increasing, one per mode
};

/// Moduli of the eigenvalues of i*Omega*cov, one per +/- pair.
///
/// Computed from the Hermitian matrix i V^{1/2} Omega V^{1/2}, which is similar
/// to i Omega V and has an exactly real spectrum.
inline SymplecticSpectrum symplectic_spectrum(const MatrixXd& cov, Index n_modes,
                                              const Tolerances& tol = {}) {
  if (n_modes < 1 || cov.rows() != 2 * n_modes || cov.cols() != 2 * n_modes) {
    throw Error(ErrorKind::BadShape, "covariance must be 2n x 2n");
  }
  if (!poscone::check_positive_definite(cov, tol).positive_definite) {
    throw Error(ErrorKind::NotPositiveDefinite, "covariance is not positive definite");
  }
  const MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
  const MatrixXd root = eig.eigenvectors() *
                        eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                        eig.eigenvectors().transpose();
  const MatrixXd kernel = root * symplectic_form(n_modes) * root;
  const Eigen::MatrixXcd herm =
      std::complex<double>(0.0, 1.0) * kernel.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> heig(herm, Eigen::EigenvaluesOnly);
  const VectorXd& lam = heig.eigenvalues();  // ascending

  const Index dim = 2 * n_modes;
  const double scale = lam.cwiseAbs().maxCoeff();
  SymplecticSpectrum spec;
  spec.nus.reserve(static_cast<std::size_t>(n_modes));
  for (Index k = 0; k < n_modes; ++k) {
    const double hi = lam(dim - 1 - k);
    const double lo = lam(k);
    if (std::abs(hi + lo) > tol.rel_tol * scale || hi <= 0.0) {
      throw Error(ErrorKind::PairingFailure, "eigenvalues of i*Omega*V do not pair as +/-nu");
    }
    spec.nus.push_back(0.5 * (hi - lo));
  }
  return spec;
}

/// Physical Gaussian state: positive covariance with every symplectic
/// eigenvalue >= 1 - rel_tol.
class GaussianState {
 public:
  GaussianState(const MatrixXd& cov, Index n_modes, ModePartition partition,
                const Tolerances& tol = {})
      : n_modes_(n_modes), partition_(std::move(partition)) {
    if (n_modes < 1) throw Error(ErrorKind::BadShape, "need at least one mode");
    if (cov.rows() != 2 * n_modes || cov.cols() != 2 * n_modes) {
      throw Error(ErrorKind::BadShape, "covariance must be 2n x 2n");
    }
    if (!cov.allFinite()) throw Error(ErrorKind::OutOfRange, "covariance has non-finite entries");
    partition_.validate(n_modes);
    if (poscone::relative_asymmetry(cov) > 10.0 * tol.sym_tol) {
      throw Error(ErrorKind::Asymmetric, "covariance is not symmetric");
    }
    cov_ = 0.5 * (cov + cov.transpose());
    const auto spec = symplectic_spectrum(cov_, n_modes_, tol);
    // Computed nus carry an error of order eps * cond(cov).
    const Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<MatrixXd>(cov_, Eigen::EigenvaluesOnly).eigenvalues();
    const double slack = std::max(tol.rel_tol, 16.0 * std::numeric_limits<double>::epsilon() * lam.maxCoeff() /
                                                    lam.minCoeff());
    if (!(lam.minCoeff() > 0.0) || spec.nus.back() < 1.0 - slack) {
      throw Error(ErrorKind::OutOfRange,
                  "unphysical state: symplectic eigenvalue " + std::to_string(spec.nus.back()));
    }
  }

  Index n_modes() const { return n_modes_; }
  const MatrixXd& cov() const { return cov_; }
  const ModePartition& partition() const { return partition_; }

 private:
  Index n_modes_;
  MatrixXd cov_;
  ModePartition partition_;
};

namespace detail {

inline void check_squeezing(double r, double r_max) {
  if (!(r >= 0.0) || !(r <= r_max)) {
    throw Error(ErrorKind::OutOfRange,
                "squeezing r = " + std::to_string(r) + " outside [0, " + std::to_string(r_max) + "]");
  }
}

// Writes a two-mode squeezed pair with parameter r between modes i and j.
inline void place_tmsv(MatrixXd& cov, Index i, Index j, double r) {
  const double c = std::cosh(2.0 * r);
  const double s = std::sinh(2.0 * r);
  cov(2 * i, 2 * i) = cov(2 * i + 1, 2 * i + 1) = c;
  cov(2 * j, 2 * j) = cov(2 * j + 1, 2 * j + 1) = c;
  cov(2 * i, 2 * j) = cov(2 * j, 2 * i) = s;
  cov(2 * i + 1, 2 * j + 1) = cov(2 * j + 1, 2 * i + 1) = -s;
}

// Passive (orthogonal symplectic) action of a real orthogonal mode mixer.
inline MatrixXd passive_from_orthogonal(const MatrixXd& o) {
  const Index n = o.rows();
  MatrixXd s = MatrixXd::Zero(2 * n, 2 * n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) s(2 * j, 2 * k) = s(2 * j + 1, 2 * k + 1) = o(j, k);
  return s;
}

}  // namespace detail

/// Covariance = identity. Modes split {0..n/2-1} | {n/2..n-1}; a single mode
/// is all on A.
inline GaussianState vacuum(Index n_modes, const Tolerances& tol = {}) {
  if (n_modes < 1) throw Error(ErrorKind::BadShape, "need at least one mode");
  ModePartition p = n_modes == 1 ? ModePartition{{0}, {}}
                                 : ModePartition::contiguous(n_modes / 2, n_modes - n_modes / 2);
  return GaussianState(MatrixXd::Identity(2 * n_modes, 2 * n_modes), n_modes, std::move(p), tol);
}

/// Two-mode squeezed vacuum; partition {0}|{1}.
inline GaussianState two_mode_squeezed(double r, double r_max = default_r_max,
                                       const Tolerances& tol = {}) {
  detail::check_squeezing(r, r_max);
  MatrixXd cov = MatrixXd::Identity(4, 4);
  detail::place_tmsv(cov, 0, 1, r);
  return GaussianState(cov, 2, ModePartition::contiguous(1, 1), tol);
}

/// Squeezing network with per-pair parameters r*sigma_i, sigma_i the singular
/// values of `coupling` normalized so that max sigma = 1, rotated into the
/// coupling's singular bases by passive local transforms.
/// Modes: A = {0..na-1}, B = {na..na+nb-1}.
inline GaussianState squeezing_network(double r, const MatrixXd& coupling,
                                       double r_max = default_r_max, const Tolerances& tol = {}) {
  const Index na = coupling.rows();
  const Index nb = coupling.cols();
  if (na < 1 || nb < 1) throw Error(ErrorKind::BadShape, "coupling must be at least 1x1");
  if (!coupling.allFinite()) throw Error(ErrorKind::BadShape, "coupling has non-finite entries");
  detail::check_squeezing(r, r_max);

  const Index n = na + nb;
  const auto partition = ModePartition::contiguous(na, nb);
  Eigen::JacobiSVD<MatrixXd> svd(coupling, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& sigma = svd.singularValues();
  if (sigma(0) == 0.0) {
    return GaussianState(MatrixXd::Identity(2 * n, 2 * n), n, partition, tol);
  }

  MatrixXd cov = MatrixXd::Identity(2 * n, 2 * n);
  for (Index i = 0; i < sigma.size(); ++i) {
    detail::place_tmsv(cov, i, na + i, r * sigma(i) / sigma(0));
  }
  MatrixXd s = MatrixXd::Zero(2 * n, 2 * n);
  s.topLeftCorner(2 * na, 2 * na) = detail::passive_from_orthogonal(svd.matrixU());
  s.bottomRightCorner(2 * nb, 2 * nb) = detail::passive_from_orthogonal(svd.matrixV());
  return GaussianState(s * cov * s.transpose(), n, partition, tol);
}

/// Sign flip of the p quadrature of every listed mode (congruence by a
/// diagonal +/-1 matrix). The result need not be a physical covariance.
inline MatrixXd partial_transpose(MatrixXd cov, const std::vector<Index>& modes) {
  for (Index m : modes) {
    if (m < 0 || 2 * m + 1 >= cov.rows()) throw Error(ErrorKind::BadPartition, "mode index out of range");
    cov.row(2 * m + 1) *= -1.0;
    cov.col(2 * m + 1) *= -1.0;
  }
  return cov;
}

namespace detail {
// nu within rel_tol of 1 counts as separable.
inline double negativity_term(double nu, const Tolerances& tol) {
  return nu >= 1.0 - tol.rel_tol ? 0.0 : -std::log(nu);
}
}  // namespace detail

inline MatrixXd partial_transpose(const GaussianState& gs) {
  return partial_transpose(gs.cov(), gs.partition().b);
}

/// Sum over the partially transposed spectrum of max(0, -log nu).
inline double log_negativity(const GaussianState& gs, const Tolerances& tol = {}) {
  const auto spec = symplectic_spectrum(partial_transpose(gs), gs.n_modes(), tol);
  double e_n = 0.0;
  for (double nu : spec.nus) e_n += detail::negativity_term(nu, tol);
  return e_n;
}

struct FloorReport {
  double e_n = 0.0;
  double chi_mode = 0.0;
  double floor = 0.0;
  double margin = 0.0;                  // e_n - floor, reported even when negative
  std::vector<double> per_mode_taus;    // one per correlated mode pair, non-increasing
  std::vector<double> per_mode_nus;     // smallest transposed symplectic eigenvalues, ascending
  double chi_quadrature = 0.0;          // chi of the full quadrature covariance
  bool degenerate_pairs = true;         // quadrature taus came in equal pairs
};

/// Entanglement floor -1/2 log(1 - chi_mode) with chi_mode built from one tau
/// per mode pair.
///
/// The quadrature-level transfer operator has two singular values per
/// correlated pair. They are invariant under local linear maps, so the
/// standard form only fixes how they pair: descending values are grouped in
/// consecutive pairs and each pair contributes its geometric mean. For states
/// reducible to independent two-mode squeezed pairs the two members coincide.
inline FloorReport entanglement_floor(const GaussianState& gs, const Tolerances& tol = {}) {
  const auto& part = gs.partition();
  if (!part.bipartite()) {
    throw Error(ErrorKind::BadPartition, "entanglement floor needs non-empty A and B mode sets");
  }
  const poscone::PartitionedMatrix pm(gs.cov(), part.quadratures(), tol);
  const auto quad = poscone::correlation_spectrum(pm, tol);

  FloorReport rep;
  rep.chi_quadrature = quad.chi_det;
  double log_one_minus = 0.0;
  for (std::size_t i = 0; i + 1 < quad.taus.size(); i += 2) {
    const double t1 = quad.taus[i];
    const double t2 = quad.taus[i + 1];
    if (std::abs(t1 - t2) > 1e-8 * std::max(1.0, t1)) rep.degenerate_pairs = false;
    const double tau = std::sqrt(t1 * t2);
    rep.per_mode_taus.push_back(tau);
    log_one_minus += std::log1p(-tau) + std::log1p(tau);
  }
  rep.floor = -0.5 * log_one_minus;
  rep.chi_mode = poscone::chi_from_log(-log_one_minus);

  const auto pt = symplectic_spectrum(partial_transpose(gs), gs.n_modes(), tol);
  for (double nu : pt.nus) rep.e_n += detail::negativity_term(nu, tol);
  const std::size_t pairs = rep.per_mode_taus.size();
  rep.per_mode_nus.assign(pt.nus.rbegin(), pt.nus.rbegin() + static_cast<std::ptrdiff_t>(pairs));
  rep.margin = rep.e_n - rep.floor;
  return rep;
}

/// chi/2 + chi^2/4, the two-term expansion of -1/2 log(1 - chi); error O(chi^3).
inline double small_chi_floor(double chi) {
  if (!(chi >= 0.0 && chi < 1.0)) throw Error(ErrorKind::OutOfRange, "chi must lie in [0, 1)");
  return 0.5 * chi + 0.25 * chi * chi;
}

/// Exact floor -1/2 log(1 - chi).
inline double floor_from_chi(double chi) {
  if (!(chi >= 0.0 && chi < 1.0)) throw Error(ErrorKind::OutOfRange, "chi must lie in [0, 1)");
  return -0.5 * std::log1p(-chi);
}

/// Haar-random passive transform on n modes: the real form of a random
/// unitary, [[X, -Y], [Y, X]] per mode pair.
template <class Rng>
MatrixXd random_passive_symplectic(Rng& rng, Index n_modes) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd g(n_modes, n_modes);
  for (Index i = 0; i < n_modes; ++i)
    for (Index j = 0; j < n_modes; ++j) g(i, j) = {normal(rng), normal(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd u = qr.householderQ();
  for (Index j = 0; j < n_modes; ++j) {
    const auto d = qr.matrixQR()(j, j);
    if (std::abs(d) > 0.0) u.col(j) *= std::conj(d / std::abs(d));
  }
  MatrixXd s(2 * n_modes, 2 * n_modes);
  for (Index j = 0; j < n_modes; ++j) {
    for (Index k = 0; k < n_modes; ++k) {
      const double x = u(j, k).real();
      const double y = u(j, k).imag();
      s(2 * j, 2 * k) = x;
      s(2 * j, 2 * k + 1) = -y;
      s(2 * j + 1, 2 * k) = y;
      s(2 * j + 1, 2 * k + 1) = x;
    }
  }
  return s;
}

/// Applies S_A (+) S_B to the covariance, laid out on the state's mode sets.
inline GaussianState local_symplectic(const GaussianState& gs, const MatrixXd& sa,
                                      const MatrixXd& sb, const Tolerances& tol = {}) {
  const auto q = gs.partition().quadratures();
  if (sa.rows() != static_cast<Index>(q.a.size()) || sb.rows() != static_cast<Index>(q.b.size())) {
    throw Error(ErrorKind::BadShape, "local transforms do not match the mode sets");
  }
  MatrixXd s = MatrixXd::Zero(gs.cov().rows(), gs.cov().cols());
  s(q.a, q.a) = sa;
  if (!q.b.empty()) s(q.b, q.b) = sb;
  return GaussianState(s * gs.cov() * s.transpose(), gs.n_modes(), gs.partition(), tol);
}

}  // namespace chibounds::gaussian
