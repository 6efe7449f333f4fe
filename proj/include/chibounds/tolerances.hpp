#pragma once

namespace chibounds {

/// Numerical thresholds shared by every module.
///
/// `sym_tol` is relative to the largest absolute entry; the rest are absolute
/// or relative as named.
struct Tolerances {
  double sym_tol = 1e-10;
  double pd_tol = 1e-12;
  double rel_tol = 1e-10;
  double cond_max = 1e6;
  double trunc_tol = 1e-12;
};

}  // namespace chibounds
