#include "varietal/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "varietal/errors.hpp"

namespace varietal {

namespace {

void require_finite(const Matrix& a) {
  if (!a.allFinite()) throw NonFiniteInput("matrix has non-finite entries");
}

Vector singular_values_of(const Matrix& a) {
  if (a.size() == 0) return Vector(0);
  return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

}  // namespace

void ToleranceConfig::validate() const {
  if (!(rank_rtol > 0.0 && rank_rtol < 1.0)) throw std::invalid_argument("rank_rtol must lie in (0, 1)");
  if (!(angle_tol > 0.0)) throw std::invalid_argument("angle_tol must be positive");
  if (!(residual_tol > 0.0)) throw std::invalid_argument("residual_tol must be positive");
  if (rank_rule == RankRule::kGap && !(gap_ratio > 1.0)) {
    throw std::invalid_argument("gap_ratio must exceed 1");
  }
}

int rank_from_singular_values(const Vector& sv, Eigen::Index rows, Eigen::Index cols,
                              const ToleranceConfig& tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  if (tol.rank_rule == RankRule::kGap && sv.size() > 1) {
    const double floor = sv(0) * std::numeric_limits<double>::epsilon();
    double best_ratio = 0.0;
    int best_rank = 0;
    for (Eigen::Index i = 0; i + 1 < sv.size(); ++i) {
      const double ratio = sv(i) / std::max(sv(i + 1), floor);
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best_rank = static_cast<int>(i) + 1;
      }
    }
    if (best_ratio > tol.gap_ratio) return best_rank;
  }
  const double cutoff = tol.rank_rtol * sv(0) * static_cast<double>(std::max(rows, cols));
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return rank;
}

int rank_with_tol(const Matrix& a, const ToleranceConfig& tol) {
  require_finite(a);
  return rank_from_singular_values(singular_values_of(a), a.rows(), a.cols(), tol);
}

NullSpaceResult null_space_detail(const Matrix& a, const ToleranceConfig& tol) {
  require_finite(a);
  NullSpaceResult out;
  if (a.rows() == 0 || a.cols() == 0) {
    out.basis = Matrix::Identity(a.cols(), a.cols());
    out.singular_values = Vector(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  out.rank = rank_from_singular_values(out.singular_values, a.rows(), a.cols(), tol);
  out.basis = svd.matrixV().rightCols(a.cols() - out.rank);
  return out;
}

Matrix null_space(const Matrix& a, const ToleranceConfig& tol) { return null_space_detail(a, tol).basis; }

Matrix orthonormal_basis(const Matrix& a, const ToleranceConfig& tol) {
  require_finite(a);
  if (a.size() == 0) return Matrix(a.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const int rank = rank_from_singular_values(svd.singularValues(), a.rows(), a.cols(), tol);
  return svd.matrixU().leftCols(rank);
}

void require_orthonormal(const Matrix& u, double eps) {
  require_finite(u);
  if (u.cols() == 0) return;
  const double err = (u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
  if (err > eps) {
    throw NotOrthonormalInput("columns are not orthonormal (max |U^T U - I| = " + std::to_string(err) + ")");
  }
}

Matrix orthonormal_complement(const Matrix& u) {
  require_orthonormal(u);
  const Eigen::Index dim = u.rows();
  if (u.cols() == 0) return Matrix::Identity(dim, dim);
  if (u.cols() > dim) throw NotOrthonormalInput("more orthonormal columns than the ambient dimension");
  Eigen::HouseholderQR<Matrix> qr(u);
  const Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  return q.rightCols(dim - u.cols());
}

Vector principal_angles(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows()) throw DimensionMismatch("subspaces live in different ambient spaces");
  require_orthonormal(u);
  require_orthonormal(v);
  // After the swap `small` has the fewer columns; the angles are symmetric.
  const bool swap = u.cols() < v.cols();
  const Matrix& large = swap ? v : u;
  const Matrix& small = swap ? u : v;
  const Eigen::Index count = small.cols();
  if (count == 0) return Vector(0);

  const Matrix overlap = large.transpose() * small;
  const Vector cosines = singular_values_of(overlap);
  const Vector sines = singular_values_of(small - large * overlap);
  Vector angles(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double c = std::min(cosines(i), 1.0);
    const double s = std::min(sines(count - 1 - i), 1.0);
    angles(i) = c * c >= 0.5 ? std::asin(s) : std::acos(c);
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

double subspace_distance(const Matrix& u, const Matrix& v) {
  if (u.cols() != v.cols()) return std::numbers::pi / 2;
  const Vector angles = principal_angles(u, v);
  return angles.size() == 0 ? 0.0 : angles.maxCoeff();
}

Vector solve_normal(const Matrix& b, const Vector& g, const ToleranceConfig& tol) {
  if (b.cols() != g.size()) throw DimensionMismatch("solve_normal: g must have one entry per column of B");
  require_finite(b);
  require_finite(g);
  const Eigen::Index cols = b.cols();
  if (cols == 0) return Vector::Zero(b.rows());
  const int rank = rank_with_tol(b, tol);
  if (rank < cols) {
    throw RankDeficient("solve_normal: B has rank " + std::to_string(rank) + " < " + std::to_string(cols));
  }
  // B = QR  =>  B (B^T B)^{-1} g = Q R^{-T} g.
  Eigen::HouseholderQR<Matrix> qr(b);
  const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  Vector y = Vector::Zero(b.rows());
  y.head(cols) = r.transpose().triangularView<Eigen::Lower>().solve(g);
  return qr.householderQ() * y;
}

}  // namespace varietal
