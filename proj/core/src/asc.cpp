#include "varietal/asc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "varietal/errors.hpp"
#include "varietal/parallel.hpp"

namespace varietal {

namespace {

// Null space of the Veronese rows after scaling each nonzero row to unit length.
NullSpaceResult vanishing_space(const Matrix& rows, const ToleranceConfig& tol) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    if (rows.row(i).norm() > 0.0) keep.push_back(i);
  }
  if (keep.empty()) throw DegenerateData("every data point is zero");
  Matrix scaled(static_cast<Eigen::Index>(keep.size()), rows.cols());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto i = keep[k];
    scaled.row(static_cast<Eigen::Index>(k)) = rows.row(i) / rows.row(i).norm();
  }
  return null_space_detail(scaled, tol);
}

bool within_residual(double distance, const Vector& x, const ToleranceConfig& tol) {
  return distance <= tol.residual_tol * (1.0 + x.norm());
}

struct Grouping {
  std::vector<std::vector<std::size_t>> clusters;
  /// Unassigned after grouping; placed by distance once models exist.
  std::vector<std::size_t> leftovers;
};

// Greedy grouping of per-point estimates living in the same space as `points`.
Grouping group_points(const Matrix& points, const std::vector<PointEstimate>& estimates,
                      const ClusterConfig& config) {
  const auto count = static_cast<std::size_t>(points.cols());
  std::vector<bool> assigned(count, false);
  Grouping out;
  for (std::size_t i = 0; i < count; ++i) {
    if (!estimates[i].subspace) {
      assigned[i] = true;
      out.leftovers.push_back(i);
    }
  }

  const auto cap = config.n_subspaces ? static_cast<std::size_t>(*config.n_subspaces) : count;
  while (out.clusters.size() < cap) {
    std::optional<std::size_t> seed;
    for (std::size_t i = 0; i < count; ++i) {
      if (assigned[i]) continue;
      if (!seed || estimates[i].conditioning > estimates[*seed].conditioning) seed = i;
    }
    if (!seed) break;

    const LinearSubspace& model = *estimates[*seed].subspace;
    std::vector<std::size_t> members{*seed};
    assigned[*seed] = true;
    for (std::size_t i = 0; i < count; ++i) {
      if (assigned[i]) continue;
      const Vector x = points.col(static_cast<Eigen::Index>(i));
      const LinearSubspace& candidate = *estimates[i].subspace;
      const bool same_subspace = candidate.dim() == model.dim() &&
                                 subspace_distance(candidate.basis(), model.basis()) <= config.grouping_angle;
      if (same_subspace || within_residual(model.distance(x), x, config.tolerances)) {
        members.push_back(i);
        assigned[i] = true;
      }
    }
    std::sort(members.begin(), members.end());
    out.clusters.push_back(std::move(members));
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!assigned[i]) out.leftovers.push_back(i);
  }
  std::sort(out.leftovers.begin(), out.leftovers.end());
  return out;
}

int resolve_degree(const Matrix& work_points, const ClusterConfig& config) {
  if (config.degree) return *config.degree;
  if (config.n_subspaces) return *config.n_subspaces;
  return estimate_num_subspaces(work_points, config.max_degree, config.tolerances);
}

struct Pipeline {
  VanishingBasis basis;
  std::vector<PointEstimate> estimates;
  Grouping grouping;
};

// Steps shared by the linear and affine paths, run on points in the space
// where the union is linear.
Pipeline run_pipeline(const Matrix& work_points, const ClusterConfig& config) {
  config.validate();
  const auto count = static_cast<std::size_t>(work_points.cols());
  if (count == 0 || (config.n_subspaces && count < static_cast<std::size_t>(*config.n_subspaces))) {
    throw TooFewPoints("need at least one point per subspace, got " + std::to_string(count));
  }
  Pipeline p;
  p.basis = fit_vanishing_basis(work_points, resolve_degree(work_points, config), config.tolerances);
  if (p.basis.s() == 0) {
    throw GroupingFailure("no polynomial of degree " + std::to_string(p.basis.degree) +
                          " vanishes on the data");
  }
  p.estimates.resize(count);
  parallel_for(count, config.threads, [&](std::size_t i) {
    p.estimates[i] = estimate_point(p.basis, work_points.col(static_cast<Eigen::Index>(i)), config.tolerances);
  });
  p.grouping = group_points(work_points, p.estimates, config);
  if (config.n_subspaces && p.grouping.clusters.size() != static_cast<std::size_t>(*config.n_subspaces)) {
    throw GroupingFailure("found " + std::to_string(p.grouping.clusters.size()) + " groups, expected " +
                          std::to_string(*config.n_subspaces));
  }
  return p;
}

Matrix select_columns(const Matrix& m, const std::vector<std::size_t>& cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(static_cast<Eigen::Index>(cols[k]));
  return out;
}

// Labels cluster members, then places leftovers at their nearest model.
ClusteringResult finish(const Matrix& points, Pipeline&& p, UnionModel models, int dim_offset) {
  const auto count = static_cast<std::size_t>(points.cols());
  ClusteringResult result{std::vector<int>(count, -1), std::move(models), {}};
  for (std::size_t c = 0; c < p.grouping.clusters.size(); ++c) {
    for (auto i : p.grouping.clusters[c]) result.labels[i] = static_cast<int>(c);
  }
  const std::size_t n = model_size(result.models);
  for (auto i : p.grouping.leftovers) {
    const Vector x = points.col(static_cast<Eigen::Index>(i));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      const double d = distance_to_member(x, result.models, c);
      if (d < best) {
        best = d;
        result.labels[i] = static_cast<int>(c);
      }
    }
  }

  auto& diag = result.diagnostics;
  diag.degree = p.basis.degree;
  diag.s = p.basis.s();
  diag.singular_values = p.basis.singular_values;
  diag.deferred = p.grouping.leftovers;
  diag.clusters_found = p.grouping.clusters.size();
  diag.per_point_dims.resize(count);
  diag.residuals.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& est = p.estimates[i].subspace;
    diag.per_point_dims[i] = est ? est->dim() - dim_offset : -1;
    diag.residuals[i] = distance_to_member(points.col(static_cast<Eigen::Index>(i)), result.models,
                                           static_cast<std::size_t>(result.labels[i]));
  }
  return result;
}

void require_on_model(const Matrix& points, const UnionModel& model, const ToleranceConfig& tol) {
  if (points.rows() != model_ambient_dim(model)) throw DimensionMismatch("points and model dimensions differ");
  std::vector<std::size_t> off;
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const Vector x = points.col(j);
    bool on = false;
    for (std::size_t i = 0; i < model_size(model) && !on; ++i) {
      on = within_residual(distance_to_member(x, model, i), x, tol);
    }
    if (!on) off.push_back(static_cast<std::size_t>(j));
  }
  if (!off.empty()) {
    throw PointsOffModel(std::to_string(off.size()) + " point(s) do not lie on the model", std::move(off));
  }
}

GeneralPositionReport compare_vanishing_spaces(const Matrix& data_space, const Matrix& model_space,
                                               const ToleranceConfig& tol) {
  GeneralPositionReport report;
  report.s_data = static_cast<int>(data_space.cols());
  report.s_model = static_cast<int>(model_space.cols());
  report.max_angle = subspace_distance(data_space, model_space);
  report.in_general_position = report.s_data == report.s_model && report.max_angle < tol.angle_tol;
  return report;
}

}  // namespace

VanishingBasis fit_vanishing_basis(const Matrix& points, int degree, const ToleranceConfig& tol) {
  if (degree < 1) throw DegreeError("vanishing basis degree must be at least 1");
  if (points.cols() == 0) throw DegenerateData("no data points");
  auto ns = vanishing_space(veronese_matrix(points, degree), tol);
  return {degree, static_cast<int>(points.rows()), std::move(ns.basis), std::move(ns.singular_values)};
}

PointEstimate estimate_point(const VanishingBasis& basis, const Vector& x, const ToleranceConfig& tol) {
  if (x.size() != basis.num_vars) throw DimensionMismatch("point/basis dimension mismatch");
  PointEstimate out;
  const double norm = x.norm();
  if (norm == 0.0 || basis.s() == 0) {
    out.gradients = Matrix::Zero(x.size(), basis.s());
    return out;
  }
  out.gradients = gradients(basis.polys, basis.degree, x / norm);
  Eigen::JacobiSVD<Matrix> svd(out.gradients, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  // Unit-norm coefficients at a unit point give O(1) gradients off the
  // intersections; anything below residual_tol counts as vanishing.
  if (sv.size() == 0 || sv(0) <= tol.residual_tol) return out;
  const int rank = rank_from_singular_values(sv, out.gradients.rows(), out.gradients.cols(), tol);
  Matrix complement = svd.matrixU().leftCols(rank);
  Matrix span = orthonormal_complement(complement);
  out.subspace.emplace(std::move(span), std::move(complement));
  out.conditioning = sv(rank - 1);
  return out;
}

LinearSubspace estimate_subspace_at_point(const VanishingBasis& basis, const Vector& x, const ToleranceConfig& tol) {
  auto est = estimate_point(basis, x, tol);
  if (!est.subspace) throw ZeroGradients("all gradients vanish at the point");
  return std::move(*est.subspace);
}

void ClusterConfig::validate() const {
  tolerances.validate();
  if (n_subspaces && *n_subspaces < 1) throw std::invalid_argument("n_subspaces must be positive");
  if (degree && *degree < 1) throw std::invalid_argument("degree must be at least 1");
  if (!(grouping_angle > 0.0 && grouping_angle < std::numbers::pi / 2)) {
    throw std::invalid_argument("grouping_angle must lie in (0, pi/2)");
  }
  if (max_degree < 1) throw std::invalid_argument("max_degree must be at least 1");
}

ClusteringResult cluster_linear(const Matrix& points, const ClusterConfig& config) {
  Pipeline p = run_pipeline(points, config);
  std::vector<LinearSubspace> models;
  for (const auto& members : p.grouping.clusters) {
    models.push_back(LinearSubspace::from_basis(select_columns(points, members), config.tolerances));
  }
  try {
    UnionOfLinear u(std::move(models), config.tolerances);
    return finish(points, std::move(p), std::move(u), 0);
  } catch (const InvalidModel& e) {
    throw GroupingFailure(std::string("groups do not form a valid union: ") + e.what());
  }
}

ClusteringResult cluster_affine(const Matrix& points, const ClusterConfig& config) {
  const Matrix embedded = homogenize_points(points);
  Pipeline p = run_pipeline(embedded, config);
  std::vector<AffineSubspace> models;
  try {
    for (const auto& members : p.grouping.clusters) {
      Matrix pooled(embedded.rows(), 0);
      for (auto i : members) {
        const Matrix& g = p.estimates[i].gradients;
        pooled.conservativeResize(Eigen::NoChange, pooled.cols() + g.cols());
        pooled.rightCols(g.cols()) = g;
      }
      models.push_back(recover_affine_from_gradients(orthonormal_basis(pooled, config.tolerances),
                                                     config.tolerances));
    }
    UnionOfAffine u(std::move(models), config.tolerances);
    return finish(points, std::move(p), std::move(u), 1);
  } catch (const RankDeficient& e) {
    throw GroupingFailure(std::string("cannot extract an affine model: ") + e.what());
  } catch (const DegenerateGradients& e) {
    throw GroupingFailure(std::string("cannot extract an affine model: ") + e.what());
  } catch (const InvalidModel& e) {
    throw GroupingFailure(std::string("groups do not form a valid union: ") + e.what());
  }
}

ClusteringResult cluster(const Matrix& points, const ClusterConfig& config) {
  return config.affine ? cluster_affine(points, config) : cluster_linear(points, config);
}

GeneralPositionReport check_general_position(const Matrix& points, const UnionOfLinear& model, int degree,
                                             const ToleranceConfig& tol) {
  require_on_model(points, model, tol);
  const auto data = fit_vanishing_basis(points, degree, tol);
  const std::vector<std::size_t> counts(model.size(), 10 * monomial_basis_size(degree, model.ambient_dim()));
  const auto oracle = fit_vanishing_basis(sample_matrix(sample_union(model, counts, kOracleSeed)), degree, tol);
  return compare_vanishing_spaces(data.polys, oracle.polys, tol);
}

GeneralPositionReport check_general_position(const Matrix& points, const UnionOfAffine& model, int degree,
                                             const ToleranceConfig& tol) {
  require_on_model(points, model, tol);
  if (points.cols() == 0) throw DegenerateData("no data points");
  const auto data = vanishing_space(inhomogeneous_veronese_matrix(points, degree), tol);
  const std::vector<std::size_t> counts(model.size(),
                                        10 * inhomogeneous_basis_size(degree, model.ambient_dim()));
  const Matrix samples = sample_matrix(sample_union(model, counts, kOracleSeed));
  const auto oracle = vanishing_space(inhomogeneous_veronese_matrix(samples, degree), tol);
  return compare_vanishing_spaces(data.basis, oracle.basis, tol);
}

GeneralPositionReport check_general_position(const Matrix& points, const UnionModel& model, int degree,
                                             const ToleranceConfig& tol) {
  return std::visit([&](const auto& u) { return check_general_position(points, u, degree, tol); }, model);
}

int estimate_num_subspaces(const Matrix& points, int max_n, const ToleranceConfig& tol) {
  if (max_n < 1) throw std::invalid_argument("max_n must be at least 1");
  const auto count = static_cast<std::size_t>(points.cols());
  std::size_t needed = 0;
  for (int n = 1; n <= max_n; ++n) {
    const auto monomials = monomial_basis_size(n, static_cast<int>(points.rows()));
    if (count < monomials) {
      if (needed == 0) needed = monomials;
      continue;
    }
    if (fit_vanishing_basis(points, n, tol).s() >= 1) return n;
  }
  std::string msg = "no degree <= " + std::to_string(max_n) + " polynomial vanishes on the data";
  if (needed != 0) {
    msg += "; degrees with fewer points than monomials were skipped (degree-n fits need at least "
           "M_n(V) points, e.g. " + std::to_string(needed) + " for the smallest skipped degree)";
  }
  throw NoVanishingDegree(msg);
}

}  // namespace varietal
