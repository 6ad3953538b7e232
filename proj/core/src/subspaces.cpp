#include "varietal/subspaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "varietal/errors.hpp"

namespace varietal {

namespace {

constexpr double kStructureEps = 1e-10;

void check_members(std::size_t count, auto&& ambient_of) {
  if (count == 0) throw InvalidModel("a union needs at least one subspace");
  const int dim = ambient_of(0);
  for (std::size_t i = 1; i < count; ++i) {
    if (ambient_of(i) != dim) throw InvalidModel("subspaces of a union must share the ambient dimension");
  }
}

Vector sample_ball(int dim, double radius, std::mt19937_64& rng) {
  Vector y(dim);
  if (dim == 0) return y;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double norm = 0.0;
  do {
    for (int k = 0; k < dim; ++k) y(k) = gauss(rng);
    norm = y.norm();
  } while (norm == 0.0);
  const double r = radius * std::pow(unit(rng), 1.0 / dim);
  return y * (r / norm);
}

template <typename Member>
std::vector<LabeledSample> sample_members(const std::vector<Member>& members,
                                          std::span<const std::size_t> counts, std::uint64_t seed,
                                          double radius, auto&& place) {
  if (counts.size() != members.size()) {
    throw DimensionMismatch("sample_union needs one count per subspace");
  }
  if (!(radius > 0.0)) throw std::invalid_argument("sampling radius must be positive");
  std::mt19937_64 rng(seed);
  std::vector<LabeledSample> out;
  out.reserve(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (counts[i] == 0) throw EmptyInput("every subspace needs at least one sample");
    for (std::size_t j = 0; j < counts[i]; ++j) {
      out.push_back({place(members[i], sample_ball(members[i].dim(), radius, rng)), static_cast<int>(i)});
    }
  }
  return out;
}

}  // namespace

LinearSubspace::LinearSubspace(Matrix basis, Matrix complement)
    : basis_(std::move(basis)), complement_(std::move(complement)) {
  if (basis_.rows() != complement_.rows() || basis_.cols() + complement_.cols() != basis_.rows()) {
    throw InvalidModel("basis and complement must split the ambient dimension");
  }
  require_orthonormal(basis_, kStructureEps);
  require_orthonormal(complement_, kStructureEps);
  if (basis_.cols() > 0 && complement_.cols() > 0 &&
      (basis_.transpose() * complement_).cwiseAbs().maxCoeff() > kStructureEps) {
    throw InvalidModel("basis and complement are not orthogonal");
  }
}

LinearSubspace LinearSubspace::from_basis(const Matrix& spanning, const ToleranceConfig& tol) {
  Matrix basis = orthonormal_basis(spanning, tol);
  Matrix complement = orthonormal_complement(basis);
  return LinearSubspace(std::move(basis), std::move(complement));
}

LinearSubspace LinearSubspace::from_complement(const Matrix& normals, const ToleranceConfig& tol) {
  Matrix complement = orthonormal_basis(normals, tol);
  Matrix basis = orthonormal_complement(complement);
  return LinearSubspace(std::move(basis), std::move(complement));
}

double LinearSubspace::distance(const Vector& x) const {
  if (x.size() != ambient_dim()) throw DimensionMismatch("point/subspace dimension mismatch");
  return (complement_.transpose() * x).norm();
}

AffineSubspace::AffineSubspace(LinearSubspace linear_part, const Vector& translation)
    : linear_(std::move(linear_part)) {
  if (translation.size() != linear_.ambient_dim()) {
    throw DimensionMismatch("translation length must equal the ambient dimension");
  }
  if (!translation.allFinite()) throw NonFiniteInput("translation has non-finite entries");
  const Matrix& b = linear_.complement();
  translation_ = b * (b.transpose() * translation);
}

UnionOfLinear::UnionOfLinear(std::vector<LinearSubspace> subspaces, const ToleranceConfig& tol)
    : subspaces_(std::move(subspaces)) {
  check_members(subspaces_.size(), [&](std::size_t i) { return subspaces_[i].ambient_dim(); });
  for (std::size_t i = 0; i < subspaces_.size(); ++i) {
    for (std::size_t j = i + 1; j < subspaces_.size(); ++j) {
      if (subspace_distance(subspaces_[i].basis(), subspaces_[j].basis()) <= tol.angle_tol) {
        throw InvalidModel("subspaces " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
}

UnionOfLinear::UnionOfLinear(std::vector<LinearSubspace> subspaces, Unchecked)
    : subspaces_(std::move(subspaces)) {
  check_members(subspaces_.size(), [&](std::size_t i) { return subspaces_[i].ambient_dim(); });
}

UnionOfLinear UnionOfLinear::allowing_duplicates(std::vector<LinearSubspace> subspaces) {
  return UnionOfLinear(std::move(subspaces), Unchecked{});
}

UnionOfAffine::UnionOfAffine(std::vector<AffineSubspace> subspaces, const ToleranceConfig& tol)
    : subspaces_(std::move(subspaces)) {
  check_members(subspaces_.size(), [&](std::size_t i) { return subspaces_[i].ambient_dim(); });
  for (std::size_t i = 0; i < subspaces_.size(); ++i) {
    for (std::size_t j = i + 1; j < subspaces_.size(); ++j) {
      const auto& a = subspaces_[i];
      const auto& b = subspaces_[j];
      const bool same_linear =
          subspace_distance(a.linear_part().basis(), b.linear_part().basis()) <= tol.angle_tol;
      const double scale = 1.0 + std::max(a.translation().norm(), b.translation().norm());
      const bool same_offset = (a.translation() - b.translation()).norm() <= tol.residual_tol * scale;
      if (same_linear && same_offset) {
        throw InvalidModel("affine subspaces " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
}

UnionOfLinear UnionOfAffine::linear_parts() const {
  std::vector<LinearSubspace> parts;
  parts.reserve(subspaces_.size());
  for (const auto& a : subspaces_) parts.push_back(a.linear_part());
  return UnionOfLinear::allowing_duplicates(std::move(parts));
}

double distance_to_affine(const Vector& x, const AffineSubspace& a) {
  if (x.size() != a.ambient_dim()) throw DimensionMismatch("point/subspace dimension mismatch");
  return (a.linear_part().complement().transpose() * (x - a.translation())).norm();
}

double distance_to_member(const Vector& x, const UnionModel& model, std::size_t i) {
  return std::visit(
      [&](const auto& u) -> double {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, UnionOfAffine>) {
          return distance_to_affine(x, u.subspaces().at(i));
        } else {
          return u.subspaces().at(i).distance(x);
        }
      },
      model);
}

std::size_t model_size(const UnionModel& model) {
  return std::visit([](const auto& u) { return u.size(); }, model);
}

int model_ambient_dim(const UnionModel& model) {
  return std::visit([](const auto& u) { return u.ambient_dim(); }, model);
}

LinearSubspace embed_affine(const AffineSubspace& a) {
  const int dim = a.ambient_dim();
  const Matrix& u = a.linear_part().basis();
  const Matrix& b = a.linear_part().complement();
  const Vector& mu = a.translation();

  // (1; mu) is already orthogonal to every (0; u_k) because mu lies in S^perp.
  Matrix basis = Matrix::Zero(dim + 1, u.cols() + 1);
  basis(0, 0) = 1.0;
  basis.col(0).tail(dim) = mu;
  basis.col(0).normalize();
  basis.bottomRightCorner(dim, u.cols()) = u;

  Matrix normals(dim + 1, b.cols());
  normals.row(0) = -(b.transpose() * mu).transpose();
  normals.bottomRows(dim) = b;
  Eigen::HouseholderQR<Matrix> qr(normals);
  Matrix complement = qr.householderQ() * Matrix::Identity(dim + 1, b.cols());
  return LinearSubspace(std::move(basis), std::move(complement));
}

UnionOfLinear embed_affine_union(const UnionOfAffine& u) {
  std::vector<LinearSubspace> embedded;
  embedded.reserve(u.size());
  for (const auto& a : u.subspaces()) embedded.push_back(embed_affine(a));
  return UnionOfLinear(std::move(embedded));
}

Matrix homogenize_points(const Matrix& points) {
  Matrix out(points.rows() + 1, points.cols());
  out.row(0).setOnes();
  out.bottomRows(points.rows()) = points;
  return out;
}

TransversalityReport check_transversality(const UnionOfLinear& u, const ToleranceConfig& tol) {
  const std::size_t n = u.size();
  if (n > kMaxTransversalitySubspaces) {
    throw InvalidModel("transversality check supports at most " +
                       std::to_string(kMaxTransversalitySubspaces) + " subspaces");
  }
  const int dim = u.ambient_dim();
  const auto& members = u.subspaces();
  for (std::size_t i = 0; i < n; ++i) {
    if (members[i].codim() == 0 || members[i].codim() == dim) return {false, {i}, 0};
  }

  std::vector<std::size_t> subset;
  for (std::size_t size = 1; size <= n; ++size) {
    // Lexicographic enumeration of size-element subsets of [0, n).
    subset.resize(size);
    std::iota(subset.begin(), subset.end(), std::size_t{0});
    while (true) {
      int total = 0;
      for (auto i : subset) total += members[i].codim();
      Matrix stacked(dim, total);
      int col = 0;
      for (auto i : subset) {
        stacked.middleCols(col, members[i].codim()) = members[i].complement();
        col += members[i].codim();
      }
      const int expected = std::min(dim, total);
      const int rank = rank_with_tol(stacked, tol);
      if (rank != expected) return {false, subset, expected - rank};

      std::size_t k = size;
      while (k > 0 && subset[k - 1] == n - size + k - 1) --k;
      if (k == 0) break;
      ++subset[k - 1];
      for (std::size_t m = k; m < size; ++m) subset[m] = subset[m - 1] + 1;
    }
  }
  return {};
}

std::vector<InhomogeneousPoly> affine_vanishing_generators(const UnionOfAffine& u, std::size_t cap) {
  const auto& members = u.subspaces();
  std::size_t count = 1;
  for (const auto& a : members) {
    if (__builtin_mul_overflow(count, static_cast<std::size_t>(a.linear_part().codim()), &count) ||
        count > cap) {
      throw ProductCountOverflow("number of product generators exceeds the cap of " + std::to_string(cap));
    }
  }

  const int dim = u.ambient_dim();
  // Homogenized factor (-b^T mu; b) for every member and complement vector.
  std::vector<std::vector<Vector>> factors(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Matrix& b = members[i].linear_part().complement();
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Vector f(dim + 1);
      f(0) = -b.col(j).dot(members[i].translation());
      f.tail(dim) = b.col(j);
      factors[i].push_back(std::move(f));
    }
  }

  std::vector<InhomogeneousPoly> out;
  out.reserve(count);
  std::vector<std::size_t> choice(members.size(), 0);
  std::vector<Vector> forms(members.size());
  for (std::size_t g = 0; g < count; ++g) {
    for (std::size_t i = 0; i < members.size(); ++i) forms[i] = factors[i][choice[i]];
    out.push_back(dehomogenize_poly(multiply_linear_forms(forms)));
    for (std::size_t i = members.size(); i-- > 0;) {
      if (++choice[i] < factors[i].size()) break;
      choice[i] = 0;
    }
  }
  return out;
}

AffineSubspace recover_affine_from_gradients(const Matrix& grads, const ToleranceConfig& tol) {
  if (grads.rows() < 2) throw DimensionMismatch("gradients must live in R^{D+1} with D >= 1");
  if (!grads.allFinite()) throw NonFiniteInput("gradients have non-finite entries");
  const Eigen::Index dim = grads.rows() - 1;
  const double largest = grads.size() == 0 ? 0.0 : grads.colwise().norm().maxCoeff();
  if (largest == 0.0) throw DegenerateGradients("all gradients vanish");

  // Greedy maximal independent subset in input order, ignoring columns that
  // are negligible next to the largest gradient.
  const double negligible = tol.rank_rtol * largest * static_cast<double>(grads.rows());
  Matrix selected(grads.rows(), 0);
  for (Eigen::Index k = 0; k < grads.cols(); ++k) {
    if (grads.col(k).norm() <= negligible) continue;
    Matrix candidate(grads.rows(), selected.cols() + 1);
    candidate << selected, grads.col(k);
    if (rank_with_tol(candidate, tol) == candidate.cols()) selected = std::move(candidate);
    if (selected.cols() == grads.rows()) break;
  }
  if (selected.cols() == 0) throw DegenerateGradients("no usable gradient");

  const Matrix normals = selected.bottomRows(dim);
  const Vector gamma = selected.row(0).transpose();
  const Vector mu = -solve_normal(normals, gamma, tol);
  return AffineSubspace(LinearSubspace::from_complement(normals, tol), mu);
}

LinearSubspace random_linear_subspace(int ambient_dim, int dim, std::mt19937_64& rng) {
  if (ambient_dim < 1 || dim < 0 || dim > ambient_dim) {
    throw DimensionMismatch("invalid subspace dimension " + std::to_string(dim) + " in R^" +
                            std::to_string(ambient_dim));
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(ambient_dim, ambient_dim);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ() * Matrix::Identity(ambient_dim, ambient_dim);
  return LinearSubspace(q.leftCols(dim), q.rightCols(ambient_dim - dim));
}

AffineSubspace random_affine_subspace(int ambient_dim, int dim, bool affine, std::mt19937_64& rng) {
  LinearSubspace linear = random_linear_subspace(ambient_dim, dim, rng);
  Vector a = Vector::Zero(linear.codim());
  if (affine && a.size() > 0) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    do {
      for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = unit(rng);
    } while (a.norm() < 1e-6);
  }
  const Vector mu = linear.complement() * a;
  return AffineSubspace(std::move(linear), mu);
}

std::vector<LabeledSample> sample_union(const UnionOfAffine& u, std::span<const std::size_t> counts,
                                        std::uint64_t seed, double radius) {
  return sample_members(u.subspaces(), counts, seed, radius, [](const AffineSubspace& a, const Vector& y) {
    return Vector(a.linear_part().basis() * y + a.translation());
  });
}

std::vector<LabeledSample> sample_union(const UnionOfLinear& u, std::span<const std::size_t> counts,
                                        std::uint64_t seed, double radius) {
  return sample_members(u.subspaces(), counts, seed, radius,
                        [](const LinearSubspace& s, const Vector& y) { return Vector(s.basis() * y); });
}

Matrix sample_matrix(std::span<const LabeledSample> samples) {
  if (samples.empty()) return Matrix(0, 0);
  Matrix out(samples.front().point.size(), static_cast<Eigen::Index>(samples.size()));
  for (std::size_t j = 0; j < samples.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = samples[j].point;
  return out;
}

}  // namespace varietal
