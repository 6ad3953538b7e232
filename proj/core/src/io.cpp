#include "varietal/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "varietal/errors.hpp"
#include "varietal/json_text.hpp"

namespace varietal {

namespace {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_scalar_array(const Json& v) {
  if (!v.is_array()) return false;
  for (const auto& e : v) {
    if (e.is_structured()) return false;
  }
  return true;
}

void write_json(std::string& out, const Json& v, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * level), ' ');
  const char* newline = indent > 0 ? "\n" : "";
  switch (v.type()) {
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      const bool inline_items = is_scalar_array(v) || indent == 0;
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += inline_items ? (indent > 0 ? ", " : ",") : ",";
        if (!inline_items) out += newline + pad;
        write_json(out, e, indent, level + 1);
        first = false;
      }
      if (!inline_items) out += newline + close_pad;
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, e] : v.items()) {
        if (!first) out += ',';
        out += newline + pad;
        out += Json(key).dump();
        out += indent > 0 ? ": " : ":";
        write_json(out, e, indent, level + 1);
        first = false;
      }
      out += newline + close_pad;
      out += '}';
      return;
    }
    default:
      out += v.dump();
  }
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of numbers");
  Vector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(std::string(what) + " must contain only numbers");
    out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return out;
}

Json parse(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ParseError(std::string("field \"") + key + "\" has the wrong type");
  }
}

Json model_json(const UnionModel& model) {
  Json out;
  out["ambient_dim"] = model_ambient_dim(model);
  out["affine"] = std::holds_alternative<UnionOfAffine>(model);
  Json subspaces = Json::array();
  auto basis_json = [](const Matrix& basis) {
    Json cols = Json::array();
    for (Eigen::Index j = 0; j < basis.cols(); ++j) cols.push_back(vector_json(basis.col(j)));
    return cols;
  };
  std::visit(
      [&](const auto& u) {
        for (const auto& s : u.subspaces()) {
          Json entry;
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, AffineSubspace>) {
            entry["basis"] = basis_json(s.linear_part().basis());
            entry["translation"] = vector_json(s.translation());
          } else {
            entry["basis"] = basis_json(s.basis());
          }
          subspaces.push_back(std::move(entry));
        }
      },
      model);
  out["subspaces"] = std::move(subspaces);
  return out;
}

// Orthonormal stored bases are used verbatim.
bool is_orthonormal(const Matrix& basis) {
  if (basis.cols() == 0 || basis.cols() > basis.rows()) return false;
  return (basis.transpose() * basis - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff() <= 1e-13;
}

UnionModel model_from(const Json& j, const ToleranceConfig& tol) {
  const int dim = required<int>(j, "ambient_dim");
  if (dim < 1) throw ParseError("ambient_dim must be positive");
  const bool affine = j.contains("affine") && j.at("affine").is_boolean() && j.at("affine").get<bool>();
  if (!j.contains("subspaces") || !j.at("subspaces").is_array() || j.at("subspaces").empty()) {
    throw ParseError("\"subspaces\" must be a non-empty array");
  }
  std::vector<LinearSubspace> linear;
  std::vector<AffineSubspace> affine_parts;
  for (const auto& entry : j.at("subspaces")) {
    if (!entry.is_object() || !entry.contains("basis") || !entry.at("basis").is_array()) {
      throw ParseError("every subspace needs a \"basis\" array of columns");
    }
    const auto& cols = entry.at("basis");
    Matrix basis(dim, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const Vector col = vector_from(cols[c], "basis column");
      if (col.size() != dim) throw ParseError("basis column length differs from ambient_dim");
      basis.col(static_cast<Eigen::Index>(c)) = col;
    }
    LinearSubspace s = is_orthonormal(basis) ? LinearSubspace(basis, orthonormal_complement(basis))
                                             : LinearSubspace::from_basis(basis, tol);
    if (affine) {
      Vector mu = Vector::Zero(dim);
      if (entry.contains("translation")) {
        mu = vector_from(entry.at("translation"), "translation");
        if (mu.size() != dim) throw ParseError("translation length differs from ambient_dim");
      }
      affine_parts.emplace_back(std::move(s), mu);
    } else {
      linear.push_back(std::move(s));
    }
  }
  try {
    if (affine) return UnionOfAffine(std::move(affine_parts), tol);
    return UnionOfLinear(std::move(linear), tol);
  } catch (const InvalidModel& e) {
    throw ParseError(std::string("invalid model: ") + e.what());
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view field) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) return std::nullopt;
  return value;
}

}  // namespace

std::string format_json(const Json& value, int indent) {
  std::string out;
  write_json(out, value, indent, 0);
  return out;
}

std::string poly_to_json(const AnyPoly& p) {
  Json out;
  std::visit(
      [&](const auto& poly) {
        using T = std::decay_t<decltype(poly)>;
        out["num_vars"] = poly.num_vars();
        if constexpr (std::is_same_v<T, HomogeneousPoly>) {
          out["degree"] = poly.degree();
          out["homogeneous"] = true;
        } else {
          out["degree"] = poly.max_degree();
          out["homogeneous"] = false;
        }
        out["coeffs"] = vector_json(poly.coeffs());
      },
      p);
  return format_json(out);
}

AnyPoly poly_from_json(std::string_view text) {
  const Json j = parse(text);
  const int vars = required<int>(j, "num_vars");
  const int degree = required<int>(j, "degree");
  const bool homogeneous = required<bool>(j, "homogeneous");
  if (!j.contains("coeffs")) throw ParseError("missing field \"coeffs\"");
  Vector coeffs = vector_from(j.at("coeffs"), "coeffs");
  try {
    if (homogeneous) return HomogeneousPoly(vars, degree, std::move(coeffs));
    return InhomogeneousPoly(vars, degree, std::move(coeffs));
  } catch (const Error& e) {
    throw ParseError(std::string("invalid polynomial: ") + e.what());
  }
}

std::string model_to_json(const UnionModel& model) { return format_json(model_json(model)); }

UnionModel model_from_json(std::string_view text, const ToleranceConfig& tol) {
  return model_from(parse(text), tol);
}

std::string result_to_json(const ClusteringResult& result) {
  const auto& d = result.diagnostics;
  Json diag;
  diag["degree"] = d.degree;
  diag["s"] = d.s;
  diag["clusters_found"] = d.clusters_found;
  diag["singular_values"] = vector_json(d.singular_values);
  diag["per_point_dims"] = d.per_point_dims;
  diag["deferred"] = d.deferred;
  diag["residuals"] = d.residuals;
  Json out;
  out["labels"] = result.labels;
  out["models"] = model_json(result.models);
  out["diagnostics"] = std::move(diag);
  return format_json(out);
}

StoredResult result_from_json(std::string_view text, const ToleranceConfig& tol) {
  const Json j = parse(text);
  auto labels = required<std::vector<int>>(j, "labels");
  if (!j.contains("models")) throw ParseError("missing field \"models\"");
  return {std::move(labels), model_from(j.at("models"), tol)};
}

PointTable read_points_csv(std::istream& in, bool labeled) {
  PointTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    std::vector<double> values;
    values.reserve(fields.size());
    std::optional<std::size_t> bad_column;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto v = parse_number(fields[c]);
      if (!v) {
        bad_column = c + 1;
        break;
      }
      values.push_back(*v);
    }
    if (bad_column) {
      if (rows.empty() && !table.had_header) {
        table.had_header = true;
        width = fields.size();
        continue;
      }
      throw ParseError("row " + std::to_string(line_no) + ", column " + std::to_string(*bad_column) +
                           ": not a number",
                       line_no, *bad_column);
    }
    if (width == 0) width = values.size();
    if (values.size() != width) {
      throw ParseError("row " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                           " columns, found " + std::to_string(values.size()),
                       line_no, std::min(values.size(), width) + 1);
    }
    for (std::size_t c = 0; c < values.size(); ++c) {
      if (!std::isfinite(values[c])) {
        throw ParseError("row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                             ": non-finite value",
                         line_no, c + 1);
      }
    }
    if (labeled) {
      const double label = values.back();
      if (label != std::floor(label) || label < 0 || label > 1e9) {
        throw ParseError("row " + std::to_string(line_no) + ", column " + std::to_string(values.size()) +
                             ": label must be a non-negative integer",
                         line_no, values.size());
      }
      table.labels.push_back(static_cast<int>(label));
      values.pop_back();
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError("no data rows");
  const auto dim = static_cast<Eigen::Index>(rows.front().size());
  if (dim == 0) throw ParseError("rows have no coordinates", 1, 1);
  table.points.resize(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      table.points(i, static_cast<Eigen::Index>(j)) = rows[j][static_cast<std::size_t>(i)];
    }
  }
  return table;
}

PointTable read_points_csv_file(const std::string& path, bool labeled) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_points_csv(in, labeled);
}

void write_points_csv(std::ostream& out, const Matrix& points, const std::vector<int>* labels) {
  if (labels && labels->size() != static_cast<std::size_t>(points.cols())) {
    throw DimensionMismatch("one label per point is required");
  }
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (i > 0) out << ',';
      out << format_double(points(i, j));
    }
    if (labels) out << ',' << (*labels)[static_cast<std::size_t>(j)];
    out << '\n';
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace varietal
