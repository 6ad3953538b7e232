#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "oracles.hpp"
#include "varietal/errors.hpp"
#include "varietal/polynomials.hpp"

namespace varietal {
namespace {

using testing::brute_force_monomials;
using testing::dense_coeffs;
using testing::eval_sparse;
using testing::linear_form;
using testing::multiply_sparse;
using testing::random_vector;
using testing::SparsePoly;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(MonomialBasisSize, KnownValues) {
  EXPECT_EQ(monomial_basis_size(2, 4), 10u);
  EXPECT_EQ(monomial_basis_size(3, 2), 4u);
  for (int d = 1; d < 12; ++d) EXPECT_EQ(monomial_basis_size(1, d), static_cast<std::size_t>(d));
  EXPECT_EQ(monomial_basis_size(0, 7), 1u);
  EXPECT_EQ(monomial_basis_size(3, 6), 56u);
}

TEST(MonomialBasisSize, OverflowIsAnError) {
  EXPECT_THROW(monomial_basis_size(200, 200), OverflowError);
  EXPECT_THROW(monomial_basis_size(std::numeric_limits<int>::max(), 4), OverflowError);
  // C(67, 33) still fits in 64 bits.
  EXPECT_EQ(monomial_basis_size(33, 35), 14226520737620288370ull);
}

TEST(MonomialBasisSize, RejectsBadArguments) {
  EXPECT_THROW(monomial_basis_size(-1, 3), DegreeError);
  EXPECT_THROW(monomial_basis_size(2, 0), DimensionMismatch);
}

TEST(Monomials, OrderMatchesBruteForceGradedLex) {
  for (int vars = 1; vars <= 5; ++vars) {
    for (int degree = 0; degree <= 4; ++degree) {
      const auto expected = brute_force_monomials(degree, vars);
      const auto got = monomials(degree, vars);
      ASSERT_EQ(got.size(), expected.size());
      for (std::size_t k = 0; k < got.size(); ++k) {
        EXPECT_EQ(got[k].exponents(), expected[k]);
        EXPECT_EQ(got[k].degree(), degree);
        EXPECT_EQ(monomial_index(got[k].exponents()), k);
      }
    }
  }
}

TEST(VeroneseEmbed, DirectMonomials) {
  const Vector v = veronese_embed(vec({2, 3}), 2);
  EXPECT_EQ(v, vec({4, 6, 9}));
  std::mt19937_64 rng(1);
  const Vector x = random_vector(5, rng);
  EXPECT_TRUE(veronese_embed(x, 1).isApprox(x, 0.0));
}

TEST(VeroneseEmbed, RejectsNonFinite) {
  EXPECT_THROW(veronese_embed(vec({1.0, std::numeric_limits<double>::quiet_NaN()}), 2), NonFiniteInput);
}

TEST(VeroneseEmbed, DotProductMatchesSymbolicEvaluation) {
  std::mt19937_64 rng(2);
  const auto order = brute_force_monomials(3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector coeffs = random_vector(static_cast<Eigen::Index>(order.size()), rng);
    const Vector x = random_vector(3, rng, -2.0, 2.0);
    SparsePoly sparse;
    for (std::size_t k = 0; k < order.size(); ++k) sparse[order[k]] = coeffs(static_cast<Eigen::Index>(k));
    const HomogeneousPoly p(3, 3, coeffs);
    const double oracle = eval_sparse(sparse, x);
    EXPECT_NEAR(coeffs.dot(veronese_embed(x, 3)), oracle, 1e-12 * (1 + std::abs(oracle)));
    EXPECT_NEAR(evaluate(p, x), oracle, 1e-12 * (1 + std::abs(oracle)));
  }
}

TEST(VeroneseJacobian, HandCalculus) {
  const double a = 1.5, b = -0.25;
  Matrix expected(3, 2);
  expected << 2 * a, 0, b, a, 0, 2 * b;
  EXPECT_TRUE(veronese_jacobian(vec({a, b}), 2).isApprox(expected));
  EXPECT_TRUE(veronese_jacobian(vec({0.3, -0.7, 2.0}), 1).isApprox(Matrix::Identity(3, 3)));
}

TEST(VeroneseJacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int vars = 1 + trial % 4;
    const Vector x = random_vector(vars, rng, -2.0, 2.0);
    const Matrix jac = veronese_jacobian(x, 4);
    for (Eigen::Index k = 0; k < jac.rows(); ++k) {
      auto f = [&](const Vector& y) { return veronese_embed(y, 4)(k); };
      const Vector fd = testing::finite_difference_gradient(f, x, 1e-5);
      const double scale = std::max(1.0, jac.row(k).norm());
      EXPECT_LT((fd - jac.row(k).transpose()).norm() / scale, 1e-6);
    }
  }
}

TEST(Evaluate, SmallCases) {
  EXPECT_DOUBLE_EQ(evaluate(HomogeneousPoly(2, 2, vec({0, 1, 0})), vec({3, 5})), 15.0);
  EXPECT_DOUBLE_EQ(evaluate(HomogeneousPoly::zero(4, 3), vec({1, -2, 3, 4})), 0.0);
  EXPECT_THROW(evaluate(HomogeneousPoly::zero(2, 2), vec({1, 2, 3})), DimensionMismatch);
}

// x0^2 x1 + x0 x2^2 + x1 x2 x3 in (x0, x1, x2, x3).
HomogeneousPoly dehomogenization_example() {
  Vector c = Vector::Zero(static_cast<Eigen::Index>(monomial_basis_size(3, 4)));
  c(static_cast<Eigen::Index>(monomial_index(std::vector<int>{2, 1, 0, 0}))) = 1;
  c(static_cast<Eigen::Index>(monomial_index(std::vector<int>{1, 0, 2, 0}))) = 1;
  c(static_cast<Eigen::Index>(monomial_index(std::vector<int>{0, 1, 1, 1}))) = 1;
  return HomogeneousPoly(4, 3, c);
}

TEST(Evaluate, DehomogenizationExampleAtOnes) {
  EXPECT_DOUBLE_EQ(evaluate(dehomogenization_example(), vec({1, 1, 1, 1})), 3.0);
}

TEST(Gradient, ProductOfCoordinates) {
  const HomogeneousPoly p(2, 2, vec({0, 1, 0}));
  EXPECT_EQ(gradient(p, vec({0, 3})), vec({3, 0}));
}

TEST(Gradient, ProductOfFormsOnHyperplane) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector b1 = random_vector(4, rng), b2 = random_vector(4, rng);
    const std::vector<Vector> forms{b1, b2};
    const HomogeneousPoly p = multiply_linear_forms(forms);
    Vector x = random_vector(4, rng);
    x -= b1 * (b1.dot(x) / b1.squaredNorm());  // b1^T x = 0
    // Product rule: grad = b1 (b2^T x) + b2 (b1^T x) = b1 (b2^T x).
    EXPECT_LT((gradient(p, x) - b1 * b2.dot(x)).norm(), 1e-12);
  }
}

TEST(Gradient, EulerIdentity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int vars = 1 + trial % 5, degree = 1 + trial % 4;
    const HomogeneousPoly p(vars, degree,
                            random_vector(static_cast<Eigen::Index>(monomial_basis_size(degree, vars)), rng));
    const Vector x = random_vector(vars, rng, -2.0, 2.0);
    const double lhs = x.dot(gradient(p, x));
    const double rhs = degree * evaluate(p, x);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(MultiplyLinearForms, SmallCases) {
  EXPECT_EQ(multiply_linear_forms(std::vector<Vector>{vec({1, 0}), vec({0, 1})}).coeffs(), vec({0, 1, 0}));
  const Vector b = vec({0.5, -2, 3});
  const auto single = multiply_linear_forms(std::vector<Vector>{b});
  EXPECT_EQ(single.degree(), 1);
  EXPECT_EQ(single.coeffs(), b);
  const auto diff = multiply_linear_forms(std::vector<Vector>{vec({1, 1}), vec({1, -1})});
  SparsePoly oracle = multiply_sparse(linear_form(vec({1, 1})), linear_form(vec({1, -1})));
  EXPECT_EQ(diff.coeffs(), dense_coeffs(oracle, 2, 2));
  EXPECT_EQ(diff.coeffs(), vec({1, 0, -1}));
  EXPECT_THROW(multiply_linear_forms(std::vector<Vector>{}), EmptyInput);
  EXPECT_THROW(multiply_linear_forms(std::vector<Vector>{vec({1, 2}), vec({1})}), DimensionMismatch);
}

TEST(MultiplyLinearForms, MatchesConvolutionOracle) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const int vars = 2 + trial % 4, count = 1 + trial % 4;
    std::vector<Vector> forms{random_vector(vars, rng)};
    SparsePoly oracle = linear_form(forms.back());
    for (int k = 1; k < count; ++k) {
      forms.push_back(random_vector(vars, rng));
      oracle = multiply_sparse(oracle, linear_form(forms.back()));
    }
    const Vector expected = dense_coeffs(oracle, count, vars);
    EXPECT_LT((multiply_linear_forms(forms).coeffs() - expected).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(MultiplyLinearForms, VanishesOnKernels) {
  std::mt19937_64 rng(7);
  std::vector<Vector> forms;
  for (int k = 0; k < 3; ++k) forms.push_back(random_vector(4, rng));
  const HomogeneousPoly p = multiply_linear_forms(forms);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector& b = forms[static_cast<std::size_t>(trial % 3)];
    Vector x = random_vector(4, rng, -2.0, 2.0);
    x -= b * (b.dot(x) / b.squaredNorm());
    const double scale = p.coeffs().norm() * veronese_embed(x, 3).norm();
    EXPECT_LT(std::abs(evaluate(p, x)), 1e-12 * scale);
  }
}

TEST(Homogenize, DehomogenizationExample) {
  const HomogeneousPoly big = dehomogenization_example();
  const InhomogeneousPoly small = dehomogenize_poly(big);
  EXPECT_EQ(small.num_vars(), 3);
  EXPECT_EQ(small.max_degree(), 3);
  // x1 + x2^2 + x1 x2 x3 in variables (x1, x2, x3).
  Vector expected = Vector::Zero(small.coeffs().size());
  expected(static_cast<Eigen::Index>(small.block_offset(1) + monomial_index(std::vector<int>{1, 0, 0}))) = 1;
  expected(static_cast<Eigen::Index>(small.block_offset(2) + monomial_index(std::vector<int>{0, 2, 0}))) = 1;
  expected(static_cast<Eigen::Index>(small.block_offset(3) + monomial_index(std::vector<int>{1, 1, 1}))) = 1;
  EXPECT_EQ(small.coeffs(), expected);
  const HomogeneousPoly back = homogenize_poly(small, 3);
  EXPECT_EQ(back.num_vars(), 4);
  EXPECT_EQ(back.coeffs(), big.coeffs());
}

TEST(Homogenize, AlreadyHomogeneousKeepsCoefficients) {
  std::mt19937_64 rng(8);
  const Vector top = random_vector(static_cast<Eigen::Index>(monomial_basis_size(2, 3)), rng);
  auto p = InhomogeneousPoly::zero(3, 2);
  Vector c = p.coeffs();
  c.tail(top.size()) = top;
  const HomogeneousPoly h = homogenize_poly(InhomogeneousPoly(3, 2, c), 2);
  const auto mons = monomials(2, 4);
  for (std::size_t k = 0; k < mons.size(); ++k) {
    const auto& e = mons[k].exponents();
    if (e[0] != 0) {
      EXPECT_EQ(h.coeffs()(static_cast<Eigen::Index>(k)), 0.0);
    } else {
      EXPECT_EQ(h.coeffs()(static_cast<Eigen::Index>(k)),
                top(static_cast<Eigen::Index>(monomial_index(std::span<const int>(e).subspan(1)))));
    }
  }
}

TEST(Homogenize, DegreeTooHighIsAnError) {
  auto p = InhomogeneousPoly::zero(2, 3);
  Vector c = p.coeffs();
  c(c.size() - 1) = 1.0;
  EXPECT_THROW(homogenize_poly(InhomogeneousPoly(2, 3, c), 2), DegreeError);
  // Zero blocks above the target degree are fine.
  c.setZero();
  c(1) = 1.0;
  EXPECT_EQ(homogenize_poly(InhomogeneousPoly(2, 3, c), 1).degree(), 1);
}

TEST(Homogenize, RoundTripsAreIdentities) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const int vars = 1 + trial % 4;
    const InhomogeneousPoly p(vars, 4,
                              random_vector(static_cast<Eigen::Index>(inhomogeneous_basis_size(4, vars)), rng));
    const InhomogeneousPoly back = dehomogenize_poly(homogenize_poly(p, 4));
    EXPECT_EQ(back.coeffs(), p.coeffs());

    const HomogeneousPoly h(vars + 1, 3,
                            random_vector(static_cast<Eigen::Index>(monomial_basis_size(3, vars + 1)), rng));
    EXPECT_EQ(homogenize_poly(dehomogenize_poly(h), 3).coeffs(), h.coeffs());

    // Dehomogenization agrees with substituting x0 = 1.
    Vector x = random_vector(vars, rng);
    Vector lifted(vars + 1);
    lifted << 1.0, x;
    EXPECT_NEAR(evaluate(dehomogenize_poly(h), x), evaluate(h, lifted), 1e-12);
  }
}

TEST(Dehomogenize, PowerOfHomogenizingVariable) {
  Vector c = Vector::Zero(static_cast<Eigen::Index>(monomial_basis_size(3, 3)));
  c(0) = 1.0;  // x0^3
  const InhomogeneousPoly p = dehomogenize_poly(HomogeneousPoly(3, 3, c));
  EXPECT_EQ(p.effective_degree(), 0);
  EXPECT_EQ(p.coeffs()(0), 1.0);
}

TEST(Dehomogenize, FactorOfHomogenizingVariableDrops) {
  // P = x0^2 * Q with Q = x1 x2 - 3 x2^2 (x0-free); dehomogenization is Q.
  std::mt19937_64 rng(10);
  SparsePoly q{{{0, 1, 1}, 1.0}, {{0, 0, 2}, -3.0}};
  SparsePoly x0sq{{{2, 0, 0}, 1.0}};
  const SparsePoly big = multiply_sparse(x0sq, q);
  const InhomogeneousPoly d = dehomogenize_poly(HomogeneousPoly(3, 4, dense_coeffs(big, 4, 3)));
  for (int trial = 0; trial < 10; ++trial) {
    const Vector y = random_vector(2, rng);
    Vector lifted(3);
    lifted << 0.0, y;
    EXPECT_NEAR(evaluate(d, y), eval_sparse(q, lifted), 1e-12);
  }
  EXPECT_EQ(d.effective_degree(), 2);
  EXPECT_THROW(dehomogenize_poly(HomogeneousPoly(1, 2, vec({1}))), DimensionMismatch);
}

TEST(InhomogeneousPoly, EvaluationMatchesBlocks) {
  // 2 - x + 3 x y in (x, y)
  auto p = InhomogeneousPoly::zero(2, 2);
  Vector c = p.coeffs();
  c(0) = 2;
  c(static_cast<Eigen::Index>(p.block_offset(1))) = -1;
  c(static_cast<Eigen::Index>(p.block_offset(2) + 1)) = 3;
  EXPECT_DOUBLE_EQ(evaluate(InhomogeneousPoly(2, 2, c), vec({2, 5})), 2 - 2 + 30);
  EXPECT_THROW(InhomogeneousPoly(2, 2, Vector::Zero(5)), DimensionMismatch);
}

}  // namespace
}  // namespace varietal
