#pragma once

// Linear and affine subspaces, unions of them, and the homogenization
// embedding x -> (1, x) that turns affine unions in R^D into linear unions in
// R^{D+1}.

#include <cstddef>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "varietal/numerics.hpp"
#include "varietal/polynomials.hpp"

namespace varietal {

/// A linear subspace S of R^D stored with an orthonormal basis of S and an
/// orthonormal basis of its orthogonal complement.
class LinearSubspace {
 public:
  /// Both arguments must be orthonormal and mutually orthogonal, with
  /// cols(basis) + cols(complement) = rows.
  LinearSubspace(Matrix basis, Matrix complement);

  /// Subspace spanned by the columns of `spanning` (any spanning set).
  static LinearSubspace from_basis(const Matrix& spanning, const ToleranceConfig& tol = {});
  /// Subspace whose orthogonal complement is spanned by the columns of `normals`.
  static LinearSubspace from_complement(const Matrix& normals, const ToleranceConfig& tol = {});

  int ambient_dim() const noexcept { return static_cast<int>(basis_.rows()); }
  int dim() const noexcept { return static_cast<int>(basis_.cols()); }
  int codim() const noexcept { return static_cast<int>(complement_.cols()); }

  const Matrix& basis() const noexcept { return basis_; }
  const Matrix& complement() const noexcept { return complement_; }

  /// Euclidean distance from x to the subspace, |B^T x|.
  double distance(const Vector& x) const;

 private:
  Matrix basis_;
  Matrix complement_;
};

/// S + mu with mu reduced to the component in S^perp.
class AffineSubspace {
 public:
  AffineSubspace(LinearSubspace linear_part, const Vector& translation);

  int ambient_dim() const noexcept { return linear_.ambient_dim(); }
  int dim() const noexcept { return linear_.dim(); }
  const LinearSubspace& linear_part() const noexcept { return linear_; }
  const Vector& translation() const noexcept { return translation_; }
  /// a with translation = complement * a.
  Vector coordinates() const { return linear_.complement().transpose() * translation_; }

 private:
  LinearSubspace linear_;
  Vector translation_;
};

/// Pairwise distinct linear subspaces sharing one ambient space.
class UnionOfLinear {
 public:
  explicit UnionOfLinear(std::vector<LinearSubspace> subspaces, const ToleranceConfig& tol = {});

  /// Skips the distinctness check; used for linear parts of affine unions,
  /// where parallel members share a linear part.
  static UnionOfLinear allowing_duplicates(std::vector<LinearSubspace> subspaces);

  const std::vector<LinearSubspace>& subspaces() const noexcept { return subspaces_; }
  std::size_t size() const noexcept { return subspaces_.size(); }
  int ambient_dim() const { return subspaces_.front().ambient_dim(); }

 private:
  struct Unchecked {};
  UnionOfLinear(std::vector<LinearSubspace> subspaces, Unchecked);

  std::vector<LinearSubspace> subspaces_;
};

/// Pairwise distinct affine subspaces sharing one ambient space.
class UnionOfAffine {
 public:
  explicit UnionOfAffine(std::vector<AffineSubspace> subspaces, const ToleranceConfig& tol = {});

  const std::vector<AffineSubspace>& subspaces() const noexcept { return subspaces_; }
  std::size_t size() const noexcept { return subspaces_.size(); }
  int ambient_dim() const { return subspaces_.front().ambient_dim(); }

  /// Union of the linear parts; may contain repeated subspaces.
  UnionOfLinear linear_parts() const;

 private:
  std::vector<AffineSubspace> subspaces_;
};

using UnionModel = std::variant<UnionOfLinear, UnionOfAffine>;

struct LabeledSample {
  Vector point;
  int label = 0;
};

double distance_to_affine(const Vector& x, const AffineSubspace& a);

/// Distance from x to the subspace with index `i` of either union kind.
double distance_to_member(const Vector& x, const UnionModel& model, std::size_t i);
std::size_t model_size(const UnionModel& model);
int model_ambient_dim(const UnionModel& model);

/// Linear subspace of R^{D+1} containing (1, x) for every x in a.
LinearSubspace embed_affine(const AffineSubspace& a);
UnionOfLinear embed_affine_union(const UnionOfAffine& u);

/// Prepends a coordinate equal to 1 to every column of `points` (D x N).
Matrix homogenize_points(const Matrix& points);

struct TransversalityReport {
  bool transversal = true;
  /// Zero-based indices of the first violating subset, empty when transversal.
  std::vector<std::size_t> witness;
  /// min(D, sum of codims) - rank for the witness.
  int rank_deficit = 0;
};

/// Largest union size accepted by check_transversality (2^n - 1 subsets).
inline constexpr std::size_t kMaxTransversalitySubspaces = 10;

/// Tests rank([B_i : i in J]) == min(D, sum c_i) for every nonempty J, by
/// increasing size and then lexicographically. A member with codimension 0 or
/// D is reported as a singleton witness.
TransversalityReport check_transversality(const UnionOfLinear& u, const ToleranceConfig& tol = {});

inline constexpr std::size_t kDefaultGeneratorCap = 1'000'000;

/// All products prod_i (b_ij^T x - b_ij^T mu_i), one factor per member, over
/// every choice of complement vectors. Each vanishes on the union.
std::vector<InhomogeneousPoly> affine_vanishing_generators(const UnionOfAffine& u,
                                                           std::size_t cap = kDefaultGeneratorCap);

/// Affine subspace cut out by gradients (gamma_k; b_k) in R^{D+1} of
/// polynomials vanishing on an embedded affine subspace:
/// linear part span(B)^perp, translation -B (B^T B)^{-1} gamma.
AffineSubspace recover_affine_from_gradients(const Matrix& grads, const ToleranceConfig& tol = {});

/// Orthonormal random subspace of dimension `dim` (Gaussian then QR).
LinearSubspace random_linear_subspace(int ambient_dim, int dim, std::mt19937_64& rng);

/// Random affine subspace; translation coordinates uniform in [-1, 1]^c
/// excluding a 1e-6 ball around 0, or zero when `affine` is false.
AffineSubspace random_affine_subspace(int ambient_dim, int dim, bool affine, std::mt19937_64& rng);

/// `counts[i]` points from member i as U_i y + mu_i with y uniform in the
/// radius-`radius` ball. Deterministic for a given seed.
std::vector<LabeledSample> sample_union(const UnionOfAffine& u, std::span<const std::size_t> counts,
                                        std::uint64_t seed, double radius = 1.0);
std::vector<LabeledSample> sample_union(const UnionOfLinear& u, std::span<const std::size_t> counts,
                                        std::uint64_t seed, double radius = 1.0);

/// Stacks sample points as columns.
Matrix sample_matrix(std::span<const LabeledSample> samples);

}  // namespace varietal
