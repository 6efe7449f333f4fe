#pragma once

// Positivity geometry of partitioned symmetric matrices: positive-definiteness
// gatekeeping, Schur complements, the determinant-ratio invariant chi and its
// spectral (transfer-operator) form.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chibounds/error.hpp"
#include "chibounds/tolerances.hpp"

namespace chibounds::poscone {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Relative asymmetry max|M - M^T| / max|M| (0 for the zero matrix).
inline double relative_asymmetry(const MatrixXd& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

namespace detail {

struct Symmetrized {
  MatrixXd matrix;
  bool warned = false;  // asymmetry was above sym_tol but within 10x sym_tol
};

// Inputs within sym_tol are accepted, up to 10x sym_tol symmetrized with a
// warning, beyond that rejected.
inline Symmetrized symmetrize_checked(const MatrixXd& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::NonSquare, "matrix is " + std::to_string(m.rows()) + "x" +
                                          std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw Error(ErrorKind::OutOfRange, "matrix has non-finite entries");
  const double asym = relative_asymmetry(m);
  if (asym > 10.0 * tol.sym_tol) {
    throw Error(ErrorKind::Asymmetric,
                "relative asymmetry " + std::to_string(asym) + " exceeds tolerance");
  }
  return {0.5 * (m + m.transpose()), asym > tol.sym_tol};
}

inline bool is_sorted_unique(const std::vector<Index>& v) {
  return std::adjacent_find(v.begin(), v.end(), [](Index a, Index b) { return a >= b; }) ==
         v.end();
}

}  // namespace detail

struct PositivityReport {
  bool positive_definite = false;
  double min_pivot = 0.0;
  bool symmetrized = false;
};

/// Pivoted LDL^T factorization; positive definite iff every pivot > pd_tol.
inline PositivityReport check_positive_definite(const MatrixXd& m, const Tolerances& tol = {}) {
  auto sym = detail::symmetrize_checked(m, tol);
  PositivityReport report;
  report.symmetrized = sym.warned;
  if (sym.matrix.size() == 0) return report;
  Eigen::LDLT<MatrixXd> ldlt(sym.matrix);
  const VectorXd pivots = ldlt.vectorD();
  report.min_pivot = pivots.minCoeff();
  report.positive_definite = ldlt.info() == Eigen::Success && report.min_pivot > tol.pd_tol;
  return report;
}

/// log det m as the sum of log LDL^T pivots.
inline double log_det(const MatrixXd& m, const Tolerances& tol = {}) {
  auto sym = detail::symmetrize_checked(m, tol);
  Eigen::LDLT<MatrixXd> ldlt(sym.matrix);
  const VectorXd pivots = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || pivots.size() == 0 || pivots.minCoeff() <= tol.pd_tol) {
    throw Error(ErrorKind::NotPositiveDefinite, "log_det requires a positive-definite matrix");
  }
  return pivots.array().log().sum();
}

/// Disjoint, sorted, jointly exhaustive index sets.
struct Bipartition {
  std::vector<Index> a;
  std::vector<Index> b;

  /// {0..na-1} | {na..na+nb-1}
  static Bipartition contiguous(Index na, Index nb) {
    Bipartition p;
    p.a.resize(static_cast<std::size_t>(na));
    p.b.resize(static_cast<std::size_t>(nb));
    std::iota(p.a.begin(), p.a.end(), Index{0});
    std::iota(p.b.begin(), p.b.end(), na);
    return p;
  }

  Index size() const { return static_cast<Index>(a.size() + b.size()); }

  void validate(Index dim) const {
    if (a.empty() || b.empty()) throw Error(ErrorKind::BadPartition, "both blocks must be non-empty");
    if (!detail::is_sorted_unique(a) || !detail::is_sorted_unique(b)) {
      throw Error(ErrorKind::BadPartition, "index sets must be sorted and duplicate-free");
    }
    std::vector<Index> all(a);
    all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    if (static_cast<Index>(all.size()) != dim) {
      throw Error(ErrorKind::BadPartition, "partition does not cover the matrix dimension");
    }
    for (Index i = 0; i < dim; ++i) {
      if (all[static_cast<std::size_t>(i)] != i) {
        throw Error(ErrorKind::BadPartition, "index sets overlap or fall outside 0..dim-1");
      }
    }
  }

  friend bool operator==(const Bipartition&, const Bipartition&) = default;
};

enum class Block { A, B };

/// Symmetric positive-definite matrix with an A|B index partition.
class PartitionedMatrix {
 public:
  PartitionedMatrix(const MatrixXd& data, Bipartition partition, const Tolerances& tol = {})
      : partition_(std::move(partition)) {
    auto sym = detail::symmetrize_checked(data, tol);
    partition_.validate(sym.matrix.rows());
    const auto pd = check_positive_definite(sym.matrix, tol);
    if (!pd.positive_definite) {
      throw Error(ErrorKind::NotPositiveDefinite,
                  "minimum pivot " + std::to_string(pd.min_pivot));
    }
    data_ = std::move(sym.matrix);
    symmetrized_ = sym.warned;
    min_pivot_ = pd.min_pivot;
  }

  Index dim() const { return data_.rows(); }
  const MatrixXd& matrix() const { return data_; }
  const Bipartition& partition() const { return partition_; }
  bool symmetrized() const { return symmetrized_; }
  double min_pivot() const { return min_pivot_; }

  MatrixXd block_aa() const { return data_(partition_.a, partition_.a); }
  MatrixXd block_bb() const { return data_(partition_.b, partition_.b); }
  MatrixXd block_ab() const { return data_(partition_.a, partition_.b); }

 private:
  MatrixXd data_;
  Bipartition partition_;
  bool symmetrized_ = false;
  double min_pivot_ = 0.0;
};

/// K_AA - K_AB K_BB^-1 K_BA (keep = A) or its B counterpart.
inline MatrixXd schur_complement(const PartitionedMatrix& pm, Block keep,
                                 const Tolerances& tol = {}) {
  const bool keep_a = keep == Block::A;
  const MatrixXd kept = keep_a ? pm.block_aa() : pm.block_bb();
  const MatrixXd other = keep_a ? pm.block_bb() : pm.block_aa();
  const MatrixXd cross = keep_a ? pm.block_ab() : MatrixXd(pm.block_ab().transpose());

  Eigen::LLT<MatrixXd> llt(other);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularBlock, "eliminated block is not invertible");
  }
  MatrixXd s = kept - cross * llt.solve(cross.transpose());
  s = 0.5 * (s + s.transpose()).eval();
  if (!check_positive_definite(s, tol).positive_definite) {
    throw Error(ErrorKind::SingularBlock, "Schur complement lost positivity");
  }
  return s;
}

/// log det K_AA + log det K_BB - log det K (>= 0 for positive K).
inline double hadamard_fischer_gap(const PartitionedMatrix& pm, const Tolerances& tol = {}) {
  return log_det(pm.block_aa(), tol) + log_det(pm.block_bb(), tol) - log_det(pm.matrix(), tol);
}

/// Symmetric inverse square root by eigendecomposition, eigenvalues clamped
/// from below at pd_tol.
inline MatrixXd inverse_sqrt(const MatrixXd& block, const Tolerances& tol = {}) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(block);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorKind::SingularBlock, "diagonal block is not positive definite");
  }
  const VectorXd scale =
      eig.eigenvalues().cwiseMax(tol.pd_tol).cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * scale.asDiagonal() * eig.eigenvectors().transpose();
}

struct TransferOperator {
  MatrixXd matrix;  // |a| x |b|

  /// Non-increasing singular values (min(|a|, |b|) of them).
  VectorXd singular_values() const {
    Eigen::JacobiSVD<MatrixXd> svd(matrix);
    return svd.singularValues();
  }
};

/// T = K_AA^{-1/2} K_AB K_BB^{-1/2}
inline TransferOperator transfer_operator(const PartitionedMatrix& pm, const Tolerances& tol = {}) {
  return {inverse_sqrt(pm.block_aa(), tol) * pm.block_ab() * inverse_sqrt(pm.block_bb(), tol)};
}

/// Correlation spectrum {tau_i} with chi in determinant and log form.
struct CorrelationSpectrum {
  std::vector<double> taus;  // non-increasing, in [0, 1)
  double chi_det = 0.0;      // 1 - prod(1 - tau^2)
  double chi_log = 0.0;      // -log(1 - chi_det), primary near the boundary
  double route_gap = 0.0;    // Hadamard-Fischer gap from the determinant route
};

/// +inf-safe chi from its log form; clamped to the largest double below one
/// when 1 - chi is not representable.
inline double chi_from_log(double chi_log) {
  const double chi = -std::expm1(-chi_log);
  return chi < 1.0 ? chi : std::nextafter(1.0, 0.0);
}

inline CorrelationSpectrum correlation_spectrum(const PartitionedMatrix& pm,
                                                const Tolerances& tol = {}) {
  const VectorXd sv = transfer_operator(pm, tol).singular_values();
  CorrelationSpectrum spec;
  spec.taus.assign(sv.data(), sv.data() + sv.size());
  for (double tau : spec.taus) {
    if (!(tau < 1.0)) {
      throw Error(ErrorKind::RouteMismatch,
                  "singular value " + std::to_string(tau) + " reached the positivity boundary");
    }
    spec.chi_log -= std::log1p(-tau) + std::log1p(tau);
  }
  spec.chi_det = chi_from_log(spec.chi_log);
  spec.route_gap = hadamard_fischer_gap(pm, tol);

  // Relative disagreement of the two (1 - chi) routes.
  const double mismatch = std::abs(std::expm1(spec.chi_log - spec.route_gap));
  if (mismatch > 100.0 * tol.rel_tol) {
    throw Error(ErrorKind::RouteMismatch,
                "determinant and spectral routes disagree by " + std::to_string(mismatch));
  }
  return spec;
}

/// 1 - (1 - chi1)(1 - chi2) for independent blocks.
inline double compose_chi(double chi1, double chi2) {
  auto in_range = [](double c) { return c >= 0.0 && c < 1.0; };
  if (!in_range(chi1) || !in_range(chi2)) {
    throw Error(ErrorKind::OutOfRange, "chi arguments must lie in [0, 1)");
  }
  return chi1 + chi2 - chi1 * chi2;
}

/// Block-diagonal direct sum; the partitions are merged blockwise.
inline PartitionedMatrix direct_sum(const PartitionedMatrix& first, const PartitionedMatrix& second,
                                    const Tolerances& tol = {}) {
  const Index n1 = first.dim();
  const Index n = n1 + second.dim();
  MatrixXd data = MatrixXd::Zero(n, n);
  data.topLeftCorner(n1, n1) = first.matrix();
  data.bottomRightCorner(second.dim(), second.dim()) = second.matrix();

  Bipartition p = first.partition();
  for (Index i : second.partition().a) p.a.push_back(i + n1);
  for (Index i : second.partition().b) p.b.push_back(i + n1);
  return PartitionedMatrix(data, std::move(p), tol);
}

/// Seeded Wishart sample G G^T / dof with a contiguous na|nb partition.
/// A 1e-9 ridge is added when dof == na + nb.
inline PartitionedMatrix random_partitioned(std::uint64_t seed, Index na, Index nb, Index dof,
                                            const Tolerances& tol = {}) {
  if (na < 1 || nb < 1 || dof < na + nb) {
    throw Error(ErrorKind::BadShape, "need na, nb >= 1 and dof >= na + nb");
  }
  const Index n = na + nb;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd g(n, dof);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < dof; ++j) g(i, j) = normal(rng);

  MatrixXd k = g * g.transpose() / static_cast<double>(dof);
  if (dof == n) k.diagonal().array() += 1e-9;
  k = 0.5 * (k + k.transpose()).eval();
  return PartitionedMatrix(k, Bipartition::contiguous(na, nb), tol);
}

inline double condition_number(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / sv(sv.size() - 1);
}

/// (S_A + S_B) K (S_A + S_B)^T with the direct sum laid out on the partition's
/// index sets.
inline PartitionedMatrix local_transform(const PartitionedMatrix& pm, const MatrixXd& sa,
                                         const MatrixXd& sb, const Tolerances& tol = {}) {
  const auto& p = pm.partition();
  const auto na = static_cast<Index>(p.a.size());
  const auto nb = static_cast<Index>(p.b.size());
  if (sa.rows() != na || sa.cols() != na || sb.rows() != nb || sb.cols() != nb) {
    throw Error(ErrorKind::BadShape, "transform shapes do not match the partition blocks");
  }
  for (const MatrixXd* s : {&sa, &sb}) {
    const double cond = condition_number(*s);
    if (!(cond <= tol.cond_max)) {
      throw Error(ErrorKind::SingularTransform,
                  "condition number " + std::to_string(cond) + " exceeds cond_max");
    }
  }
  MatrixXd s = MatrixXd::Zero(pm.dim(), pm.dim());
  s(p.a, p.a) = sa;
  s(p.b, p.b) = sb;
  return PartitionedMatrix(s * pm.matrix() * s.transpose(), p, tol);
}

/// Random matrix U diag(sigma) V^T with Haar-orthogonal U, V and singular
/// values log-uniform in [1, max_cond]; its condition number is <= max_cond.
template <class Rng>
MatrixXd random_conditioned(Rng& rng, Index n, double max_cond) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto haar_orthogonal = [&] {
    MatrixXd g(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) g(i, j) = normal(rng);
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ();
    const VectorXd d = qr.matrixQR().diagonal();
    for (Index j = 0; j < n; ++j)
      if (d(j) < 0.0) q.col(j) *= -1.0;
    return q;
  };
  VectorXd sigma(n);
  for (Index i = 0; i < n; ++i) sigma(i) = std::pow(max_cond, unit(rng));
  if (n > 1) {
    sigma(0) = 1.0;
    sigma(n - 1) = max_cond;
  }
  return haar_orthogonal() * sigma.asDiagonal() * haar_orthogonal().transpose();
}

}  // namespace chibounds::poscone
