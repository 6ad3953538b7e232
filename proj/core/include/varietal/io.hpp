#pragma once

// File formats: polynomial, model and clustering-result JSON, and point CSV.
//
// Polynomial JSON: {"num_vars": V, "degree": n, "homogeneous": bool, "coeffs": [...]}
//   with coefficients in the library monomial order (variable 0 first; for
//   inhomogeneous polynomials, degree blocks ascending from the constant).
// Model JSON: {"ambient_dim": D, "affine": bool, "subspaces": [{"basis": [[...], ...],
//   "translation": [...]}]}; "basis" lists the spanning columns, "translation"
//   is omitted for linear models.
// Points CSV: one point per row, comma separated, optional header row,
//   optional trailing integer label column.
//
// Floating-point values are written with 17 significant digits.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "varietal/asc.hpp"
#include "varietal/polynomials.hpp"
#include "varietal/subspaces.hpp"

namespace varietal {

using AnyPoly = std::variant<HomogeneousPoly, InhomogeneousPoly>;

std::string poly_to_json(const AnyPoly& p);
AnyPoly poly_from_json(std::string_view text);

std::string model_to_json(const UnionModel& model);
UnionModel model_from_json(std::string_view text, const ToleranceConfig& tol = {});

std::string result_to_json(const ClusteringResult& result);

/// The parts of a result file needed for evaluation.
struct StoredResult {
  std::vector<int> labels;
  UnionModel models;
};
StoredResult result_from_json(std::string_view text, const ToleranceConfig& tol = {});

struct PointTable {
  /// One point per column (D x N).
  Matrix points;
  std::vector<int> labels;
  bool had_header = false;
};

/// Throws ParseError carrying the offending row/column. When `labeled` the
/// last column must hold integers and is returned in `labels`.
PointTable read_points_csv(std::istream& in, bool labeled);
PointTable read_points_csv_file(const std::string& path, bool labeled);

void write_points_csv(std::ostream& out, const Matrix& points, const std::vector<int>* labels = nullptr);

/// Reads a whole file; throws ParseError if it cannot be opened.
std::string read_text_file(const std::string& path);

}  // namespace varietal
