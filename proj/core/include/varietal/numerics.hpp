#pragma once

// Tolerance-aware dense linear algebra used throughout the clustering code.

#include "varietal/polynomials.hpp"

namespace varietal {

enum class RankRule {
  /// sigma_i > rank_rtol * sigma_max * max(rows, cols).
  kThreshold,
  /// Largest ratio sigma_i / sigma_{i+1}, if it exceeds gap_ratio; otherwise kThreshold.
  kGap,
};

struct ToleranceConfig {
  double rank_rtol = 1e-10;
  /// Radians; subspace equality.
  double angle_tol = 1e-6;
  /// Relative point-to-subspace residual for membership tests.
  double residual_tol = 1e-8;
  RankRule rank_rule = RankRule::kThreshold;
  double gap_ratio = 1e6;

  /// Throws std::invalid_argument unless every tolerance is positive and rank_rtol < 1.
  void validate() const;
};

/// Numerical rank of a matrix given its singular values in descending order.
int rank_from_singular_values(const Vector& singular_values, Eigen::Index rows, Eigen::Index cols,
                              const ToleranceConfig& tol);

int rank_with_tol(const Matrix& a, const ToleranceConfig& tol = {});

/// Orthonormal basis (cols(a) x s) of the right null space of `a`.
Matrix null_space(const Matrix& a, const ToleranceConfig& tol = {});

/// Null space plus the singular values it was cut from.
struct NullSpaceResult {
  Matrix basis;
  Vector singular_values;
  int rank = 0;
};
NullSpaceResult null_space_detail(const Matrix& a, const ToleranceConfig& tol = {});

/// Orthonormal basis of span(a) with rank decided by `tol`.
Matrix orthonormal_basis(const Matrix& a, const ToleranceConfig& tol = {});

/// Throws NotOrthonormalInput unless u^T u = I within `eps`.
void require_orthonormal(const Matrix& u, double eps = 1e-12);

/// Orthonormal basis of span(u)^perp for orthonormal u.
Matrix orthonormal_complement(const Matrix& u);

/// Principal angles between span(u) and span(v), ascending, in [0, pi/2].
/// Small angles are computed from sines so they keep full relative accuracy.
Vector principal_angles(const Matrix& u, const Matrix& v);

/// Largest principal angle, or pi/2 if the dimensions differ.
double subspace_distance(const Matrix& u, const Matrix& v);

/// b (b^T b)^{-1} g through a QR factorization of b. Throws RankDeficient.
Vector solve_normal(const Matrix& b, const Vector& g, const ToleranceConfig& tol = {});

}  // namespace varietal
