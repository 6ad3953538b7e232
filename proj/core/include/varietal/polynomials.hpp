#pragma once

// Dense multivariate polynomials over the reals in a fixed monomial order.
//
// Monomials of one degree are ordered graded-lexicographically with variable 0
// most significant, e.g. for two variables and degree 2: x0^2, x0*x1, x1^2.
// When a polynomial lives in D+1 variables produced by homogenization, variable
// 0 is the homogenizing coordinate.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace varietal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Number of monomials of degree `degree` in `num_vars` variables,
/// C(degree + num_vars - 1, degree). Throws OverflowError instead of wrapping.
std::size_t monomial_basis_size(int degree, int num_vars);

class Monomial {
 public:
  explicit Monomial(std::vector<int> exponents);

  const std::vector<int>& exponents() const noexcept { return exponents_; }
  int num_vars() const noexcept { return static_cast<int>(exponents_.size()); }
  int degree() const noexcept { return degree_; }

  double evaluate(const Vector& x) const;

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// All monomials of `degree` in `num_vars` variables, in the library order.
std::vector<Monomial> monomials(int degree, int num_vars);

/// Position of an exponent vector inside its own degree block.
std::size_t monomial_index(std::span<const int> exponents);

/// Homogeneous polynomial of a fixed degree; coefficients follow monomials().
class HomogeneousPoly {
 public:
  HomogeneousPoly(int num_vars, int degree, Vector coeffs);

  static HomogeneousPoly zero(int num_vars, int degree);

  int num_vars() const noexcept { return num_vars_; }
  int degree() const noexcept { return degree_; }
  const Vector& coeffs() const noexcept { return coeffs_; }

 private:
  int num_vars_;
  int degree_;
  Vector coeffs_;
};

/// Polynomial of degree at most `max_degree`. Coefficients are stored in
/// blocks of ascending degree (constant term first); each block uses the
/// homogeneous order.
class InhomogeneousPoly {
 public:
  InhomogeneousPoly(int num_vars, int max_degree, Vector coeffs);

  static InhomogeneousPoly zero(int num_vars, int max_degree);

  int num_vars() const noexcept { return num_vars_; }
  int max_degree() const noexcept { return max_degree_; }
  const Vector& coeffs() const noexcept { return coeffs_; }

  /// Offset of the degree-k block inside coeffs().
  std::size_t block_offset(int k) const;

  /// Highest degree with a nonzero coefficient, or -1 for the zero polynomial.
  int effective_degree() const;

 private:
  int num_vars_;
  int max_degree_;
  Vector coeffs_;
};

/// Length of an InhomogeneousPoly coefficient vector: sum of M_k(V), k = 0..n.
std::size_t inhomogeneous_basis_size(int max_degree, int num_vars);

/// Vector of all degree-n monomials evaluated at x.
Vector veronese_embed(const Vector& x, int degree);

/// Monomials of every degree 0..max_degree evaluated at x, in InhomogeneousPoly layout.
Vector inhomogeneous_veronese_embed(const Vector& x, int max_degree);

/// d(monomial_k)/d(x_j); one row per monomial.
Matrix veronese_jacobian(const Vector& x, int degree);

/// Embeds every column of `points` (V x N). Returns N x M_n(V), one row per point.
Matrix veronese_matrix(const Matrix& points, int degree);

/// Inhomogeneous counterpart of veronese_matrix.
Matrix inhomogeneous_veronese_matrix(const Matrix& points, int max_degree);

double evaluate(const HomogeneousPoly& p, const Vector& x);
double evaluate(const InhomogeneousPoly& p, const Vector& x);

Vector gradient(const HomogeneousPoly& p, const Vector& x);

/// Gradients of several polynomials given as coefficient columns (M x s).
/// Returns V x s, column k being the gradient of column k at x.
Matrix gradients(const Matrix& coeffs, int degree, const Vector& x);

HomogeneousPoly multiply(const HomogeneousPoly& a, const HomogeneousPoly& b);

/// Expanded product of the linear forms b_1^T x, ..., b_k^T x.
HomogeneousPoly multiply_linear_forms(std::span<const Vector> forms);

/// Raises every monomial to `target_degree` with powers of a new variable x0
/// placed at index 0.
HomogeneousPoly homogenize_poly(const InhomogeneousPoly& p, int target_degree);

/// Substitutes x0 = 1.
InhomogeneousPoly dehomogenize_poly(const HomogeneousPoly& p);

}  // namespace varietal
