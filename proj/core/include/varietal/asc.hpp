#pragma once

// Algebraic subspace clustering: fit the degree-n polynomials that vanish on
// the data, read a subspace off their gradients at every point, group the
// points, and (for affine data) work on the embedded points (1, x).

#include <cstdint>
#include <optional>
#include <vector>

#include "varietal/numerics.hpp"
#include "varietal/polynomials.hpp"
#include "varietal/subspaces.hpp"

namespace varietal {

/// Orthonormal basis of the degree-n homogeneous polynomials vanishing on a
/// point set, one coefficient column per polynomial.
struct VanishingBasis {
  int degree = 0;
  int num_vars = 0;
  Matrix polys;
  /// Singular values of the row-normalized Veronese matrix, descending.
  Vector singular_values;

  int s() const noexcept { return static_cast<int>(polys.cols()); }
  HomogeneousPoly poly(int k) const { return HomogeneousPoly(num_vars, degree, polys.col(k)); }
};

/// Points are the columns of `points` (V x N). Throws DegenerateData when every
/// point is zero.
VanishingBasis fit_vanishing_basis(const Matrix& points, int degree, const ToleranceConfig& tol = {});

/// Gradient-based subspace estimate at one point.
struct PointEstimate {
  /// Empty when every gradient is negligible (the point sits on an
  /// intersection, or the basis is empty).
  std::optional<LinearSubspace> subspace;
  /// Gradients at x / |x|, V x s.
  Matrix gradients;
  /// Smallest retained singular value of the gradients at x / |x|.
  double conditioning = 0.0;
};

PointEstimate estimate_point(const VanishingBasis& basis, const Vector& x, const ToleranceConfig& tol = {});

/// span(grad p_1(x), ..., grad p_s(x))^perp. Throws ZeroGradients.
LinearSubspace estimate_subspace_at_point(const VanishingBasis& basis, const Vector& x,
                                          const ToleranceConfig& tol = {});

struct ClusterConfig {
  std::optional<int> n_subspaces;
  /// Defaults to n_subspaces, or to estimate_num_subspaces when both are absent.
  std::optional<int> degree;
  ToleranceConfig tolerances;
  double grouping_angle = 1e-3;
  bool affine = false;
  /// Search limit for the degree when it has to be estimated.
  int max_degree = 6;
  /// Worker threads for per-point estimation; < 1 means all hardware threads.
  int threads = 1;

  void validate() const;
};

struct ClusterDiagnostics {
  int degree = 0;
  int s = 0;
  Vector singular_values;
  /// Estimated dimension of the subspace through each point (affine
  /// dimension for affine clustering), -1 when the point was deferred.
  std::vector<int> per_point_dims;
  /// Distance of each point to the model it was assigned to.
  std::vector<double> residuals;
  /// Points assigned by distance after grouping.
  std::vector<std::size_t> deferred;
  std::size_t clusters_found = 0;
};

struct ClusteringResult {
  std::vector<int> labels;
  UnionModel models;
  ClusterDiagnostics diagnostics;
};

/// Clusters points (D x N) lying on a union of linear subspaces.
/// Throws TooFewPoints when N < n, GroupingFailure when the number of groups
/// differs from a requested n.
ClusteringResult cluster_linear(const Matrix& points, const ClusterConfig& config);

/// Clusters points (D x N) lying on a union of affine subspaces by working on
/// the embedded points (1, x).
ClusteringResult cluster_affine(const Matrix& points, const ClusterConfig& config);

/// Dispatches on config.affine.
ClusteringResult cluster(const Matrix& points, const ClusterConfig& config);

struct GeneralPositionReport {
  bool in_general_position = false;
  int s_data = 0;
  int s_model = 0;
  /// Largest principal angle between the two vanishing spaces (pi/2 when their
  /// dimensions differ).
  double max_angle = 0.0;
};

/// Seed of the sampling oracle that measures the model's vanishing space.
inline constexpr std::uint64_t kOracleSeed = 0xA5C;

/// Compares the degree-n vanishing space of the points with that of the model,
/// measured on 10 * (monomial count) fresh samples per subspace. For affine
/// models both sides use polynomials of degree <= n in the original
/// coordinates. Throws PointsOffModel.
GeneralPositionReport check_general_position(const Matrix& points, const UnionOfLinear& model, int degree,
                                             const ToleranceConfig& tol = {});
GeneralPositionReport check_general_position(const Matrix& points, const UnionOfAffine& model, int degree,
                                             const ToleranceConfig& tol = {});
GeneralPositionReport check_general_position(const Matrix& points, const UnionModel& model, int degree,
                                             const ToleranceConfig& tol = {});

/// Smallest n <= max_n with at least one degree-n polynomial vanishing on the
/// points; degrees with fewer points than monomials are skipped.
/// Throws NoVanishingDegree.
int estimate_num_subspaces(const Matrix& points, int max_n, const ToleranceConfig& tol = {});

}  // namespace varietal
