#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "varietal/asc.hpp"
#include "varietal/errors.hpp"

using namespace varietal;
using varietal::testing::random_vector;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Generic points on the plane with unit normal b.
Matrix points_on_plane(const Vector& b, int count, std::mt19937_64& rng) {
  const auto s = LinearSubspace::from_complement(b.normalized());
  return s.basis() * varietal::testing::random_matrix(s.dim(), count, rng);
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

VanishingBasis basis_from(int vars, int degree, std::initializer_list<Vector> polys) {
  VanishingBasis out;
  out.degree = degree;
  out.num_vars = vars;
  out.polys.resize(static_cast<Eigen::Index>(monomial_basis_size(degree, vars)),
                   static_cast<Eigen::Index>(polys.size()));
  Eigen::Index k = 0;
  for (const auto& p : polys) out.polys.col(k++) = p.normalized();
  return out;
}

// Coefficient vector of the single monomial with the given exponents.
Vector monomial(std::vector<int> exponents) {
  int degree = 0;
  for (int e : exponents) degree += e;
  Vector c = Vector::Zero(static_cast<Eigen::Index>(monomial_basis_size(degree, static_cast<int>(exponents.size()))));
  c(static_cast<Eigen::Index>(monomial_index(exponents))) = 1.0;
  return c;
}

// Ground-truth labels are recovered up to a relabeling.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> fwd, back;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [f, fnew] = fwd.emplace(a[i], b[i]);
    auto [r, rnew] = back.emplace(b[i], a[i]);
    if (f->second != b[i] || r->second != a[i]) return false;
  }
  return true;
}

std::vector<int> labels_of(const std::vector<LabeledSample>& samples) {
  std::vector<int> out;
  for (const auto& s : samples) out.push_back(s.label);
  return out;
}

}  // namespace

TEST(FitVanishingBasis, OnePlaneDegreeOne) {
  std::mt19937_64 rng(1);
  const auto basis = fit_vanishing_basis(points_on_plane(vec({1, 0, 0}), 30, rng), 1);
  ASSERT_EQ(basis.s(), 1);
  EXPECT_NEAR(std::abs(basis.polys(0, 0)), 1.0, 1e-12);
}

TEST(FitVanishingBasis, TwoPlanesGiveTheProductOfNormals) {
  std::mt19937_64 rng(2);
  const Vector b1 = random_vector(3, rng).normalized();
  const Vector b2 = random_vector(3, rng).normalized();
  const Matrix x = hstack(points_on_plane(b1, 30, rng), points_on_plane(b2, 30, rng));
  const auto basis = fit_vanishing_basis(x, 2);
  ASSERT_EQ(basis.s(), 1);
  const std::vector<Vector> forms{b1, b2};
  const Vector product = multiply_linear_forms(forms).coeffs().normalized();
  EXPECT_LT(subspace_distance(basis.polys, product), 1e-8);
  // Each basis column vanishes on the data.
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    EXPECT_LT(std::abs(evaluate(basis.poly(0), x.col(j))), 1e-12 * (1 + x.col(j).squaredNorm()));
  }
}

TEST(FitVanishingBasis, FourPointsOnTwoPlanesAdmitExtraPolynomials) {
  std::mt19937_64 rng(3);
  const Matrix x = hstack(points_on_plane(vec({1, 0, 0}), 2, rng), points_on_plane(vec({0, 1, 0}), 2, rng));
  EXPECT_GE(fit_vanishing_basis(x, 2).s(), 2);
}

TEST(FitVanishingBasis, Errors) {
  EXPECT_THROW(fit_vanishing_basis(Matrix::Zero(3, 4), 2), DegenerateData);
  EXPECT_THROW(fit_vanishing_basis(Matrix::Ones(3, 4), 0), DegreeError);
}

TEST(FitVanishingBasis, PropertyRowScalingDoesNotChangeTheBasis) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector b1 = random_vector(3, rng).normalized();
    const Vector b2 = random_vector(3, rng).normalized();
    const Matrix x = hstack(points_on_plane(b1, 20, rng), points_on_plane(b2, 20, rng));
    Matrix scaled = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) scaled.col(j) *= std::pow(10.0, static_cast<double>(j % 5) - 2);
    const auto a = fit_vanishing_basis(x, 2);
    const auto b = fit_vanishing_basis(scaled, 2);
    ASSERT_EQ(a.s(), b.s());
    EXPECT_LT(subspace_distance(a.polys, b.polys), 1e-8);
  }
}

TEST(EstimateSubspaceAtPoint, SingleProduct) {
  const auto basis = basis_from(2, 2, {monomial({1, 1})});
  const auto s = estimate_subspace_at_point(basis, vec({0, 3}));
  ASSERT_EQ(s.dim(), 1);
  EXPECT_LT(subspace_distance(s.basis(), vec({0, 1})), 1e-14);
}

TEST(EstimateSubspaceAtPoint, DuplicateGradientsCollapse) {
  const auto basis = basis_from(3, 2, {monomial({1, 1, 0}), monomial({1, 0, 1})});
  const auto s = estimate_subspace_at_point(basis, vec({0, 1, 1}));
  ASSERT_EQ(s.dim(), 2);
  Matrix expected(3, 2);
  expected << 0, 0, 1, 0, 0, 1;
  EXPECT_LT(subspace_distance(s.basis(), expected), 1e-14);
}

TEST(EstimateSubspaceAtPoint, IntersectionPointsAreFlagged) {
  // x1 x2 vanishes on both axes; its gradient vanishes where they meet.
  const auto basis = basis_from(3, 2, {monomial({1, 1, 0})});
  EXPECT_THROW(estimate_subspace_at_point(basis, vec({0, 0, 2})), ZeroGradients);
  EXPECT_FALSE(estimate_point(basis, vec({0, 0, 2})).subspace.has_value());
  EXPECT_THROW(estimate_subspace_at_point(basis, vec({0, 0, 0})), ZeroGradients);
}

TEST(EstimateSubspaceAtPoint, PropertyRecoversTheTrueSubspace) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 3 + static_cast<int>(rng() % 3);
    const UnionOfLinear u({random_linear_subspace(dim, 1 + static_cast<int>(rng() % static_cast<unsigned>(dim - 1)), rng),
                           random_linear_subspace(dim, 1 + static_cast<int>(rng() % static_cast<unsigned>(dim - 1)), rng)});
    const std::size_t per = 3 * monomial_basis_size(2, dim);
    const std::vector<std::size_t> counts{per, per};
    const auto samples = sample_union(u, counts, trial);
    const auto basis = fit_vanishing_basis(sample_matrix(samples), 2);
    for (std::size_t k = 0; k < samples.size(); k += 7) {
      const auto est = estimate_subspace_at_point(basis, samples[k].point);
      const auto& truth = u.subspaces()[static_cast<std::size_t>(samples[k].label)];
      ASSERT_EQ(est.dim(), truth.dim());
      EXPECT_LT(subspace_distance(est.basis(), truth.basis()), 1e-7);
    }
  }
}

TEST(ClusterLinear, TwoOrthogonalLines) {
  Matrix x(2, 40);
  for (int j = 0; j < 20; ++j) {
    x.col(j) = vec({0.1 * (j + 1), 0});
    x.col(20 + j) = vec({0, -0.15 * (j + 1)});
  }
  ClusterConfig config;
  config.n_subspaces = 2;
  const auto result = cluster_linear(x, config);
  std::vector<int> truth(40, 0);
  std::fill(truth.begin() + 20, truth.end(), 1);
  EXPECT_TRUE(same_partition(result.labels, truth));
  const auto& models = std::get<UnionOfLinear>(result.models);
  ASSERT_EQ(models.size(), 2u);
  const auto& first = models.subspaces()[static_cast<std::size_t>(result.labels[0])];
  const auto& second = models.subspaces()[static_cast<std::size_t>(result.labels[20])];
  EXPECT_LT(subspace_distance(first.basis(), vec({1, 0})), 1e-12);
  EXPECT_LT(subspace_distance(second.basis(), vec({0, 1})), 1e-12);
  EXPECT_EQ(result.diagnostics.s, 1);
  EXPECT_EQ(result.diagnostics.clusters_found, 2u);
}

TEST(ClusterLinear, OnePlaneWithTwoRequestedFails) {
  std::mt19937_64 rng(6);
  ClusterConfig config;
  config.n_subspaces = 2;
  EXPECT_THROW(cluster_linear(points_on_plane(vec({1, 2, 3}), 30, rng), config), GroupingFailure);
}

TEST(ClusterLinear, FourPointsOnTwoPlanes) {
  std::mt19937_64 rng(7);
  const Matrix x = hstack(points_on_plane(vec({1, 0, 0}), 2, rng), points_on_plane(vec({0, 1, 0}), 2, rng));
  ClusterConfig config;
  config.n_subspaces = 2;
  try {
    const auto result = cluster_linear(x, config);
    EXPECT_GE(result.diagnostics.s, 2);
  } catch (const GroupingFailure&) {
    // Too few points to pin down the planes; grouping may legitimately fail.
  }
  const UnionOfLinear truth({LinearSubspace::from_complement(vec({1, 0, 0})),
                             LinearSubspace::from_complement(vec({0, 1, 0}))});
  EXPECT_FALSE(check_general_position(x, truth, 2).in_general_position);
}

TEST(ClusterLinear, Errors) {
  ClusterConfig config;
  config.n_subspaces = 3;
  EXPECT_THROW(cluster_linear(Matrix::Ones(3, 2), config), TooFewPoints);
  EXPECT_THROW(cluster_linear(Matrix(3, 0), config), TooFewPoints);
  config.n_subspaces = 0;
  EXPECT_THROW(cluster_linear(Matrix::Ones(3, 5), config), std::invalid_argument);
}

TEST(ClusterLinear, PropertyExactRecoveryOnRandomUnions) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 3 + static_cast<int>(rng() % 3);
    const int n = 2 + static_cast<int>(rng() % 2);
    std::vector<LinearSubspace> members;
    for (int i = 0; i < n; ++i) {
      members.push_back(random_linear_subspace(dim, 1 + static_cast<int>(rng() % static_cast<unsigned>(dim - 1)), rng));
    }
    const UnionOfLinear u(std::move(members));
    const std::vector<std::size_t> counts(static_cast<std::size_t>(n), 2 * monomial_basis_size(n, dim));
    const auto samples = sample_union(u, counts, trial);
    ClusterConfig config;
    config.n_subspaces = n;
    const auto result = cluster_linear(sample_matrix(samples), config);
    EXPECT_TRUE(same_partition(result.labels, labels_of(samples))) << "trial " << trial;
    const auto& models = std::get<UnionOfLinear>(result.models).subspaces();
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const auto& truth = u.subspaces()[static_cast<std::size_t>(samples[k].label)];
      const auto& got = models[static_cast<std::size_t>(result.labels[k])];
      EXPECT_LT(subspace_distance(truth.basis(), got.basis()), 1e-8);
    }
  }
}

TEST(ClusterLinear, ThreadCountDoesNotChangeTheResult) {
  std::mt19937_64 rng(9);
  const UnionOfLinear u({random_linear_subspace(4, 2, rng), random_linear_subspace(4, 3, rng)});
  const std::vector<std::size_t> counts{40, 40};
  const Matrix x = sample_matrix(sample_union(u, counts, 1));
  ClusterConfig config;
  config.n_subspaces = 2;
  const auto one = cluster_linear(x, config);
  config.threads = 4;
  const auto four = cluster_linear(x, config);
  EXPECT_EQ(one.labels, four.labels);
  EXPECT_EQ(one.diagnostics.residuals, four.diagnostics.residuals);
}

TEST(ClusterAffine, ParallelLines) {
  std::mt19937_64 rng(10);
  const auto dir = random_linear_subspace(2, 1, rng);
  const Vector normal = dir.complement().col(0);
  const UnionOfAffine u({AffineSubspace(dir, 0.7 * normal), AffineSubspace(dir, -0.4 * normal)});
  const std::vector<std::size_t> counts{20, 20};
  const auto samples = sample_union(u, counts, 2);
  ClusterConfig config;
  config.n_subspaces = 2;
  config.affine = true;
  const auto result = cluster_affine(sample_matrix(samples), config);
  EXPECT_TRUE(same_partition(result.labels, labels_of(samples)));
  const auto& models = std::get<UnionOfAffine>(result.models).subspaces();
  ASSERT_EQ(models.size(), 2u);
  EXPECT_LT(subspace_distance(models[0].linear_part().basis(), models[1].linear_part().basis()), 1e-8);
  EXPECT_GT((models[0].translation() - models[1].translation()).norm(), 1.0);
}

TEST(ClusterAffine, PlaneAndLine) {
  std::mt19937_64 rng(11);
  const UnionOfAffine u({random_affine_subspace(3, 2, true, rng), random_affine_subspace(3, 1, true, rng)});
  const std::vector<std::size_t> counts{40, 40};
  const auto samples = sample_union(u, counts, 3);
  ClusterConfig config;
  config.n_subspaces = 2;
  config.affine = true;
  const auto result = cluster(sample_matrix(samples), config);
  ASSERT_TRUE(same_partition(result.labels, labels_of(samples)));
  const auto& models = std::get<UnionOfAffine>(result.models).subspaces();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& truth = u.subspaces()[static_cast<std::size_t>(samples[k].label)];
    const auto& got = models[static_cast<std::size_t>(result.labels[k])];
    EXPECT_LT(subspace_distance(truth.linear_part().basis(), got.linear_part().basis()), 1e-8);
    EXPECT_LT((truth.translation() - got.translation()).norm(), 1e-8);
  }
  for (int d : result.diagnostics.per_point_dims) EXPECT_TRUE(d == 1 || d == 2);
}

TEST(ClusterAffine, LineThroughTheOriginAndAnAffineLine) {
  std::mt19937_64 rng(12);
  const UnionOfAffine u({random_affine_subspace(3, 1, false, rng), random_affine_subspace(3, 1, true, rng)});
  ASSERT_TRUE(check_transversality(embed_affine_union(u)).transversal);
  const std::vector<std::size_t> counts{30, 30};
  const auto samples = sample_union(u, counts, 4);
  ClusterConfig config;
  config.n_subspaces = 2;
  config.affine = true;
  const auto result = cluster_affine(sample_matrix(samples), config);
  EXPECT_TRUE(same_partition(result.labels, labels_of(samples)));
  const auto& models = std::get<UnionOfAffine>(result.models).subspaces();
  const auto& through_origin = models[static_cast<std::size_t>(result.labels[0])];
  EXPECT_LT(through_origin.translation().norm(), 1e-8);
}

TEST(CheckGeneralPosition, TwoPlanesInR3) {
  const UnionOfLinear planes({LinearSubspace::from_complement(vec({1, 0, 0})),
                              LinearSubspace::from_complement(vec({0, 1, 0}))});
  Matrix four(3, 4);
  four << 0, 0, 1, -2, 1, 2, 0, 0, 1, -1, 3, 1;
  const auto starved = check_general_position(four, planes, 2);
  EXPECT_FALSE(starved.in_general_position);
  EXPECT_GE(starved.s_data, 2);
  EXPECT_EQ(starved.s_model, 1);

  Matrix five(3, 5);
  five << four, vec({0, 0.5, -0.7});
  const auto enough = check_general_position(five, planes, 2);
  EXPECT_TRUE(enough.in_general_position);
  EXPECT_EQ(enough.s_data, 1);
  EXPECT_LT(enough.max_angle, 1e-10);
}

TEST(CheckGeneralPosition, PointsOffTheModelAreReported) {
  const UnionOfLinear plane({LinearSubspace::from_complement(vec({0, 0, 1}))});
  Matrix x(3, 3);
  x << 1, 0, 1, 0, 1, 1, 0, 0.5, 0;
  try {
    check_general_position(x, plane, 1);
    FAIL() << "expected PointsOffModel";
  } catch (const PointsOffModel& e) {
    EXPECT_EQ(e.rows(), std::vector<std::size_t>{1});
  }
}

TEST(CheckGeneralPosition, DenseAffineSamplesAgreeWithTheEmbeddedSide) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const UnionOfAffine u({random_affine_subspace(3, 2, true, rng), random_affine_subspace(3, 1, true, rng)});
    const std::vector<std::size_t> counts{30, 30};
    const Matrix x = sample_matrix(sample_union(u, counts, trial));
    const auto affine_side = check_general_position(x, u, 2);
    const auto embedded_side = check_general_position(homogenize_points(x), embed_affine_union(u), 2);
    EXPECT_TRUE(affine_side.in_general_position);
    EXPECT_TRUE(embedded_side.in_general_position);
    EXPECT_EQ(affine_side.s_data, embedded_side.s_data);
  }
}

TEST(EstimateNumSubspaces, Examples) {
  std::mt19937_64 rng(14);
  EXPECT_EQ(estimate_num_subspaces(points_on_plane(vec({1, 1, 0}), 20, rng), 4), 1);
  const Matrix two = hstack(points_on_plane(random_vector(3, rng), 20, rng),
                            points_on_plane(random_vector(3, rng), 20, rng));
  EXPECT_EQ(estimate_num_subspaces(two, 4), 2);
  EXPECT_THROW(estimate_num_subspaces(Matrix::Ones(3, 2), 3), NoVanishingDegree);
}

TEST(ClusterConfig, EstimatesTheDegreeWhenNothingIsGiven) {
  std::mt19937_64 rng(15);
  const UnionOfLinear u({random_linear_subspace(3, 2, rng), random_linear_subspace(3, 2, rng)});
  const std::vector<std::size_t> counts{20, 20};
  const auto samples = sample_union(u, counts, 5);
  const auto result = cluster_linear(sample_matrix(samples), ClusterConfig{});
  EXPECT_EQ(result.diagnostics.degree, 2);
  EXPECT_TRUE(same_partition(result.labels, labels_of(samples)));
}
