#include "varietal/polynomials.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "varietal/errors.hpp"

namespace varietal {

namespace {

void require_finite(const Vector& x) {
  if (!x.allFinite()) throw NonFiniteInput("point has non-finite coordinates");
}

// Number of monomials of degree `degree` in `vars` variables, allowing vars == 0.
std::size_t block_count(int degree, int vars) {
  if (vars == 0) return degree == 0 ? 1 : 0;
  return monomial_basis_size(degree, vars);
}

// Exponents of all degree-n monomials in V variables, flattened row-major (M x V).
std::vector<int> exponent_table(int degree, int num_vars) {
  std::vector<int> table;
  table.reserve(monomial_basis_size(degree, num_vars) * static_cast<std::size_t>(num_vars));
  std::vector<int> current(static_cast<std::size_t>(num_vars), 0);
  auto fill = [&](auto&& self, int var, int remaining) -> void {
    if (var == num_vars - 1) {
      current[static_cast<std::size_t>(var)] = remaining;
      table.insert(table.end(), current.begin(), current.end());
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[static_cast<std::size_t>(var)] = e;
      self(self, var + 1, remaining - e);
    }
  };
  fill(fill, 0, degree);
  return table;
}

// powers(j, e) = x_j^e for e = 0..degree.
Matrix power_table(const Vector& x, int degree) {
  Matrix powers(x.size(), degree + 1);
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    powers(j, 0) = 1.0;
    for (int e = 1; e <= degree; ++e) powers(j, e) = powers(j, e - 1) * x(j);
  }
  return powers;
}

void embed_into(const std::vector<int>& table, int num_vars, const Matrix& powers,
                double* out) {
  const std::size_t count = table.size() / static_cast<std::size_t>(num_vars);
  for (std::size_t k = 0; k < count; ++k) {
    const int* e = table.data() + k * static_cast<std::size_t>(num_vars);
    double value = 1.0;
    for (int j = 0; j < num_vars; ++j) value *= powers(j, e[j]);
    out[k] = value;
  }
}

void check_degree(int degree) {
  if (degree < 0) throw DegreeError("degree must be non-negative, got " + std::to_string(degree));
}

}  // namespace

std::size_t monomial_basis_size(int degree, int num_vars) {
  check_degree(degree);
  if (num_vars < 1) throw DimensionMismatch("at least one variable is required");
  const std::size_t top = static_cast<std::size_t>(degree) + static_cast<std::size_t>(num_vars) - 1;
  const std::size_t k = std::min(static_cast<std::size_t>(degree), top - static_cast<std::size_t>(degree));
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    // result * (top - k + i) / i is exact; divide first to delay overflow.
    const std::size_t g = std::gcd(result, i);
    const std::size_t factor = (top - k + i) / (i / g);
    if (__builtin_mul_overflow(result / g, factor, &result)) {
      throw OverflowError("monomial count C(" + std::to_string(top) + ", " +
                          std::to_string(degree) + ") overflows");
    }
  }
  return result;
}

Monomial::Monomial(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  if (exponents_.empty()) throw DimensionMismatch("monomial needs at least one variable");
  for (int e : exponents_) {
    if (e < 0) throw DegreeError("monomial exponents must be non-negative");
    degree_ += e;
  }
}

double Monomial::evaluate(const Vector& x) const {
  if (x.size() != num_vars()) throw DimensionMismatch("monomial/point dimension mismatch");
  double value = 1.0;
  for (int j = 0; j < num_vars(); ++j) value *= std::pow(x(j), exponents_[static_cast<std::size_t>(j)]);
  return value;
}

std::vector<Monomial> monomials(int degree, int num_vars) {
  const auto table = exponent_table(degree, num_vars);
  std::vector<Monomial> out;
  out.reserve(table.size() / static_cast<std::size_t>(num_vars));
  for (auto it = table.begin(); it != table.end(); it += num_vars) {
    out.emplace_back(std::vector<int>(it, it + num_vars));
  }
  return out;
}

std::size_t monomial_index(std::span<const int> exponents) {
  const int vars = static_cast<int>(exponents.size());
  int remaining = 0;
  for (int e : exponents) remaining += e;
  std::size_t index = 0;
  for (int i = 0; i + 1 < vars; ++i) {
    const int e = exponents[static_cast<std::size_t>(i)];
    // Monomials with a larger exponent at position i come first.
    for (int v = remaining; v > e; --v) index += block_count(remaining - v, vars - i - 1);
    remaining -= e;
  }
  return index;
}

HomogeneousPoly::HomogeneousPoly(int num_vars, int degree, Vector coeffs)
    : num_vars_(num_vars), degree_(degree), coeffs_(std::move(coeffs)) {
  const auto expected = monomial_basis_size(degree, num_vars);
  if (static_cast<std::size_t>(coeffs_.size()) != expected) {
    throw DimensionMismatch("homogeneous polynomial expects " + std::to_string(expected) +
                            " coefficients, got " + std::to_string(coeffs_.size()));
  }
}

HomogeneousPoly HomogeneousPoly::zero(int num_vars, int degree) {
  return HomogeneousPoly(num_vars, degree,
                         Vector::Zero(static_cast<Eigen::Index>(monomial_basis_size(degree, num_vars))));
}

std::size_t inhomogeneous_basis_size(int max_degree, int num_vars) {
  check_degree(max_degree);
  std::size_t total = 0;
  for (int k = 0; k <= max_degree; ++k) {
    if (__builtin_add_overflow(total, monomial_basis_size(k, num_vars), &total)) {
      throw OverflowError("inhomogeneous monomial count overflows");
    }
  }
  return total;
}

InhomogeneousPoly::InhomogeneousPoly(int num_vars, int max_degree, Vector coeffs)
    : num_vars_(num_vars), max_degree_(max_degree), coeffs_(std::move(coeffs)) {
  const auto expected = inhomogeneous_basis_size(max_degree, num_vars);
  if (static_cast<std::size_t>(coeffs_.size()) != expected) {
    throw DimensionMismatch("inhomogeneous polynomial expects " + std::to_string(expected) +
                            " coefficients, got " + std::to_string(coeffs_.size()));
  }
}

InhomogeneousPoly InhomogeneousPoly::zero(int num_vars, int max_degree) {
  return InhomogeneousPoly(
      num_vars, max_degree,
      Vector::Zero(static_cast<Eigen::Index>(inhomogeneous_basis_size(max_degree, num_vars))));
}

std::size_t InhomogeneousPoly::block_offset(int k) const {
  if (k < 0 || k > max_degree_ + 1) throw DegreeError("block degree out of range");
  return k == 0 ? 0 : inhomogeneous_basis_size(k - 1, num_vars_);
}

int InhomogeneousPoly::effective_degree() const {
  for (int k = max_degree_; k >= 0; --k) {
    const auto begin = static_cast<Eigen::Index>(block_offset(k));
    const auto len = static_cast<Eigen::Index>(monomial_basis_size(k, num_vars_));
    if ((coeffs_.segment(begin, len).array() != 0.0).any()) return k;
  }
  return -1;
}

Vector veronese_embed(const Vector& x, int degree) {
  check_degree(degree);
  require_finite(x);
  const int vars = static_cast<int>(x.size());
  const auto table = exponent_table(degree, vars);
  Vector out(static_cast<Eigen::Index>(table.size() / static_cast<std::size_t>(vars)));
  embed_into(table, vars, power_table(x, degree), out.data());
  return out;
}

Vector inhomogeneous_veronese_embed(const Vector& x, int max_degree) {
  check_degree(max_degree);
  require_finite(x);
  const int vars = static_cast<int>(x.size());
  Vector out(static_cast<Eigen::Index>(inhomogeneous_basis_size(max_degree, vars)));
  const Matrix powers = power_table(x, max_degree);
  double* cursor = out.data();
  for (int k = 0; k <= max_degree; ++k) {
    const auto table = exponent_table(k, vars);
    embed_into(table, vars, powers, cursor);
    cursor += table.size() / static_cast<std::size_t>(vars);
  }
  return out;
}

Matrix veronese_jacobian(const Vector& x, int degree) {
  check_degree(degree);
  require_finite(x);
  const int vars = static_cast<int>(x.size());
  const auto table = exponent_table(degree, vars);
  const auto count = static_cast<Eigen::Index>(table.size() / static_cast<std::size_t>(vars));
  const Matrix powers = power_table(x, degree);
  Matrix jac = Matrix::Zero(count, vars);
  for (Eigen::Index k = 0; k < count; ++k) {
    const int* e = table.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(vars);
    for (int j = 0; j < vars; ++j) {
      if (e[j] == 0) continue;
      double value = e[j] * powers(j, e[j] - 1);
      for (int i = 0; i < vars; ++i) {
        if (i != j) value *= powers(i, e[i]);
      }
      jac(k, j) = value;
    }
  }
  return jac;
}

Matrix veronese_matrix(const Matrix& points, int degree) {
  check_degree(degree);
  if (!points.allFinite()) throw NonFiniteInput("point matrix has non-finite entries");
  const int vars = static_cast<int>(points.rows());
  const auto table = exponent_table(degree, vars);
  const auto count = static_cast<Eigen::Index>(table.size() / static_cast<std::size_t>(vars));
  // Row-major scratch so each embedded point is contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(points.cols(), count);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    embed_into(table, vars, power_table(points.col(i), degree), out.row(i).data());
  }
  return out;
}

Matrix inhomogeneous_veronese_matrix(const Matrix& points, int max_degree) {
  Matrix out(points.cols(),
             static_cast<Eigen::Index>(inhomogeneous_basis_size(max_degree, static_cast<int>(points.rows()))));
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    out.row(i) = inhomogeneous_veronese_embed(points.col(i), max_degree).transpose();
  }
  return out;
}

double evaluate(const HomogeneousPoly& p, const Vector& x) {
  if (x.size() != p.num_vars()) throw DimensionMismatch("polynomial/point dimension mismatch");
  return p.coeffs().dot(veronese_embed(x, p.degree()));
}

double evaluate(const InhomogeneousPoly& p, const Vector& x) {
  if (x.size() != p.num_vars()) throw DimensionMismatch("polynomial/point dimension mismatch");
  return p.coeffs().dot(inhomogeneous_veronese_embed(x, p.max_degree()));
}

Vector gradient(const HomogeneousPoly& p, const Vector& x) {
  if (x.size() != p.num_vars()) throw DimensionMismatch("polynomial/point dimension mismatch");
  return veronese_jacobian(x, p.degree()).transpose() * p.coeffs();
}

Matrix gradients(const Matrix& coeffs, int degree, const Vector& x) {
  const Matrix jac = veronese_jacobian(x, degree);
  if (coeffs.rows() != jac.rows()) throw DimensionMismatch("coefficient rows do not match monomial count");
  return jac.transpose() * coeffs;
}

HomogeneousPoly multiply(const HomogeneousPoly& a, const HomogeneousPoly& b) {
  if (a.num_vars() != b.num_vars()) throw DimensionMismatch("cannot multiply polynomials in different rings");
  const int vars = a.num_vars();
  const int degree = a.degree() + b.degree();
  const auto ta = exponent_table(a.degree(), vars);
  const auto tb = exponent_table(b.degree(), vars);
  Vector out = Vector::Zero(static_cast<Eigen::Index>(monomial_basis_size(degree, vars)));
  std::vector<int> sum(static_cast<std::size_t>(vars));
  for (Eigen::Index i = 0; i < a.coeffs().size(); ++i) {
    const double ca = a.coeffs()(i);
    if (ca == 0.0) continue;
    for (Eigen::Index k = 0; k < b.coeffs().size(); ++k) {
      const double cb = b.coeffs()(k);
      if (cb == 0.0) continue;
      for (int j = 0; j < vars; ++j) {
        sum[static_cast<std::size_t>(j)] = ta[static_cast<std::size_t>(i * vars + j)] +
                                           tb[static_cast<std::size_t>(k * vars + j)];
      }
      out(static_cast<Eigen::Index>(monomial_index(sum))) += ca * cb;
    }
  }
  return HomogeneousPoly(vars, degree, std::move(out));
}

HomogeneousPoly multiply_linear_forms(std::span<const Vector> forms) {
  if (forms.empty()) throw EmptyInput("multiply_linear_forms needs at least one form");
  const auto vars = static_cast<int>(forms.front().size());
  HomogeneousPoly product(vars, 1, forms.front());
  for (const auto& form : forms.subspan(1)) {
    if (form.size() != vars) throw DimensionMismatch("linear forms must share one dimension");
    product = multiply(product, HomogeneousPoly(vars, 1, form));
  }
  return product;
}

HomogeneousPoly homogenize_poly(const InhomogeneousPoly& p, int target_degree) {
  if (p.effective_degree() > target_degree) {
    throw DegreeError("cannot homogenize a degree-" + std::to_string(p.effective_degree()) +
                      " polynomial to degree " + std::to_string(target_degree));
  }
  const int vars = p.num_vars();
  auto out = HomogeneousPoly::zero(vars + 1, target_degree).coeffs();
  std::vector<int> lifted(static_cast<std::size_t>(vars) + 1);
  for (int k = 0; k <= std::min(p.max_degree(), target_degree); ++k) {
    const auto table = exponent_table(k, vars);
    const auto offset = p.block_offset(k);
    const std::size_t count = table.size() / static_cast<std::size_t>(vars);
    lifted[0] = target_degree - k;
    for (std::size_t m = 0; m < count; ++m) {
      std::copy_n(table.begin() + static_cast<std::ptrdiff_t>(m * static_cast<std::size_t>(vars)), vars,
                  lifted.begin() + 1);
      out(static_cast<Eigen::Index>(monomial_index(lifted))) =
          p.coeffs()(static_cast<Eigen::Index>(offset + m));
    }
  }
  return HomogeneousPoly(vars + 1, target_degree, std::move(out));
}

InhomogeneousPoly dehomogenize_poly(const HomogeneousPoly& p) {
  if (p.num_vars() < 2) throw DimensionMismatch("dehomogenization needs at least two variables");
  const int vars = p.num_vars() - 1;
  const int degree = p.degree();
  const auto table = exponent_table(degree, p.num_vars());
  auto result = InhomogeneousPoly::zero(vars, degree);
  Vector coeffs = result.coeffs();
  for (Eigen::Index m = 0; m < p.coeffs().size(); ++m) {
    const int* e = table.data() + static_cast<std::size_t>(m) * static_cast<std::size_t>(p.num_vars());
    const std::span<const int> rest(e + 1, static_cast<std::size_t>(vars));
    const auto pos = result.block_offset(degree - e[0]) + monomial_index(rest);
    coeffs(static_cast<Eigen::Index>(pos)) += p.coeffs()(m);
  }
  return InhomogeneousPoly(vars, degree, std::move(coeffs));
}

}  // namespace varietal
