#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "varietal/asc.hpp"
#include "varietal/cli.hpp"
#include "varietal/errors.hpp"
#include "varietal/io.hpp"
#include "varietal/json_text.hpp"
#include "varietal/subspaces.hpp"

namespace varietal::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_input(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing ") + what);
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw UsageError(std::string(what) + " not found: " + path);
}

void require_output(const std::string& path, const char* what) {
  if (path.empty()) return;
  const auto parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty() && !fs::is_directory(parent, ec)) {
    throw UsageError(std::string(what) + " directory does not exist: " + parent.string());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text) || !f.flush()) throw UsageError("cannot write " + path);
}

void emit(const std::string& path, const std::string& json, std::ostream& out) {
  if (path.empty()) {
    out << json << '\n';
  } else {
    write_file(path, json + '\n');
  }
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const PointsOffModel& e) {
    err << "error: " << e.what() << "; offending points (0-based):";
    for (auto r : e.rows()) err << ' ' << r;
    err << '\n';
    return kPointsOffModel;
  } catch (const TooFewPoints& e) {
    err << "error: " << e.what() << '\n';
    return kInsufficientData;
  } catch (const GroupingFailure& e) {
    err << "error: " << e.what() << '\n';
    return kGroupingFailure;
  } catch (const NoVanishingDegree& e) {
    err << "error: " << e.what() << '\n';
    return kGroupingFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

UnionModel fit_model(const Matrix& points, const std::vector<int>& labels, bool affine,
                     const std::vector<int>& order, const ToleranceConfig& tol) {
  std::vector<LinearSubspace> linear;
  std::vector<AffineSubspace> affine_parts;
  for (int label : order) {
    std::vector<Eigen::Index> cols;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] == label) cols.push_back(static_cast<Eigen::Index>(j));
    }
    Matrix members(points.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) members.col(static_cast<Eigen::Index>(k)) = points.col(cols[k]);
    if (affine) {
      const Vector mean = members.rowwise().mean();
      affine_parts.emplace_back(LinearSubspace::from_basis(members.colwise() - mean, tol), mean);
    } else {
      linear.push_back(LinearSubspace::from_basis(members, tol));
    }
  }
  if (affine) return UnionOfAffine(std::move(affine_parts), tol);
  return UnionOfLinear::allowing_duplicates(std::move(linear));
}

struct Member {
  const LinearSubspace* linear = nullptr;
  Vector translation;
};

std::vector<Member> members_of(const UnionModel& model) {
  std::vector<Member> out;
  std::visit(
      [&](const auto& u) {
        for (const auto& s : u.subspaces()) {
          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, AffineSubspace>) {
            out.push_back({&s.linear_part(), s.translation()});
          } else {
            out.push_back({&s, Vector::Zero(s.ambient_dim())});
          }
        }
      },
      model);
  return out;
}

struct SynthMember {
  int dim = 0;
  bool affine = false;
};

std::pair<int, std::vector<SynthMember>> parse_synth_spec(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid spec JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("spec must be a JSON object");
  const char* dim_key = j.contains("ambient_dim") ? "ambient_dim" : "D";
  if (!j.contains(dim_key) || !j.at(dim_key).is_number_integer()) {
    throw ParseError("spec needs an integer \"ambient_dim\"");
  }
  const int ambient = j.at(dim_key).get<int>();
  if (ambient < 1) throw ParseError("ambient_dim must be positive");
  std::vector<SynthMember> members;
  const bool default_affine = j.contains("affine") && j.at("affine").is_boolean() && j.at("affine").get<bool>();
  if (j.contains("subspaces")) {
    if (!j.at("subspaces").is_array()) throw ParseError("\"subspaces\" must be an array");
    for (const auto& s : j.at("subspaces")) {
      if (!s.is_object() || !s.contains("dim") || !s.at("dim").is_number_integer()) {
        throw ParseError("every subspace needs an integer \"dim\"");
      }
      const bool affine = s.contains("affine") ? s.at("affine").is_boolean() && s.at("affine").get<bool>()
                                               : default_affine;
      members.push_back({s.at("dim").get<int>(), affine});
    }
  } else if (j.contains("dims") && j.at("dims").is_array()) {
    for (const auto& d : j.at("dims")) {
      if (!d.is_number_integer()) throw ParseError("\"dims\" must hold integers");
      members.push_back({d.get<int>(), default_affine});
    }
  } else {
    throw ParseError("spec needs \"subspaces\" or \"dims\"");
  }
  if (members.empty()) throw ParseError("spec lists no subspaces");
  for (const auto& m : members) {
    if (m.dim < 0 || m.dim >= ambient) throw ParseError("subspace dims must lie in [0, ambient_dim)");
  }
  return {ambient, members};
}

ToleranceConfig validated(const ToleranceConfig& tol) {
  tol.validate();
  return tol;
}

Json report_json(const GeneralPositionReport& r) {
  Json j;
  j["in_general_position"] = r.in_general_position;
  j["s_data"] = r.s_data;
  j["s_model"] = r.s_model;
  j["max_angle"] = r.max_angle;
  return j;
}

}  // namespace

LabelMatching match_labels(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) {
    throw DimensionMismatch("result has " + std::to_string(predicted.size()) + " labels, truth has " +
                            std::to_string(truth.size()));
  }
  std::vector<int> p_labels(predicted.begin(), predicted.end());
  std::vector<int> t_labels(truth.begin(), truth.end());
  for (auto* v : {&p_labels, &t_labels}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  const std::size_t k = std::max(p_labels.size(), t_labels.size());
  if (k > 16) throw std::invalid_argument("label matching supports at most 16 distinct labels");

  auto index_of = [](const std::vector<int>& labels, int v) {
    return static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), v) - labels.begin());
  };
  std::vector<std::vector<std::size_t>> agree(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++agree[index_of(t_labels, truth[i])][index_of(p_labels, predicted[i])];
  }

  // best[mask]: most agreements with the first popcount(mask) truth labels
  // matched to the predicted labels in mask.
  const std::size_t full = std::size_t{1} << k;
  std::vector<long long> best(full, -1);
  std::vector<int> choice(full, -1);
  best[0] = 0;
  for (std::size_t mask = 0; mask < full; ++mask) {
    if (best[mask] < 0) continue;
    const auto t = static_cast<std::size_t>(std::popcount(mask));
    if (t == k) continue;
    for (std::size_t p = 0; p < k; ++p) {
      if (mask & (std::size_t{1} << p)) continue;
      const auto next = mask | (std::size_t{1} << p);
      const long long value = best[mask] + static_cast<long long>(agree[t][p]);
      if (value > best[next]) {
        best[next] = value;
        choice[next] = static_cast<int>(p);
      }
    }
  }

  LabelMatching out;
  out.truth_labels = t_labels;
  out.assignment.assign(t_labels.size(), -1);
  std::size_t mask = full - 1;
  for (std::size_t t = k; t-- > 0;) {
    const auto p = static_cast<std::size_t>(choice[mask]);
    if (t < t_labels.size() && p < p_labels.size()) out.assignment[t] = p_labels[p];
    mask &= ~(std::size_t{1} << p);
  }
  out.error = truth.empty() ? 0.0
                            : static_cast<double>(static_cast<long long>(truth.size()) - best[full - 1]) /
                                  static_cast<double>(truth.size());
  return out;
}

int cmd_cluster(const ClusterOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_input(options.points_csv, "points CSV");
    require_output(options.out_json, "output");
    ClusterConfig config;
    config.n_subspaces = options.n;
    config.degree = options.degree;
    config.affine = options.affine;
    config.tolerances = options.tolerances;
    config.grouping_angle = options.grouping_angle;
    config.threads = options.threads;
    config.validate();
    const auto table = read_points_csv_file(options.points_csv, options.labeled);
    const auto result = cluster(table.points, config);
    emit(options.out_json, result_to_json(result), out);
    return kOk;
  });
}

int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_input(options.spec_json, "spec JSON");
    if (options.out_points.empty() && options.out_model.empty()) {
      throw UsageError("nothing to write: give --out-points and/or --out-model");
    }
    require_output(options.out_points, "points output");
    require_output(options.out_model, "model output");
    if (options.per_subspace == 0) throw UsageError("--per-subspace must be positive");
    const auto [ambient, spec] = parse_synth_spec(read_text_file(options.spec_json));

    std::mt19937_64 rng(options.seed);
    std::vector<AffineSubspace> members;
    bool any_affine = false;
    for (const auto& m : spec) {
      members.push_back(random_affine_subspace(ambient, m.dim, m.affine, rng));
      any_affine = any_affine || m.affine;
    }
    const std::uint64_t sample_seed = rng();
    const std::vector<std::size_t> counts(spec.size(), options.per_subspace);

    auto [model, samples] = [&]() -> std::pair<UnionModel, std::vector<LabeledSample>> {
      if (any_affine) {
        UnionOfAffine u(std::move(members));
        auto drawn = sample_union(u, counts, sample_seed);
        return {std::move(u), std::move(drawn)};
      }
      std::vector<LinearSubspace> linear;
      for (const auto& m : members) linear.push_back(m.linear_part());
      UnionOfLinear u(std::move(linear));
      auto drawn = sample_union(u, counts, sample_seed);
      return {std::move(u), std::move(drawn)};
    }();

    if (!options.out_points.empty()) {
      std::ostringstream csv;
      for (int i = 0; i < ambient; ++i) csv << 'x' << (i + 1) << ',';
      csv << "label\n";
      std::vector<int> labels;
      for (const auto& s : samples) labels.push_back(s.label);
      write_points_csv(csv, sample_matrix(samples), &labels);
      write_file(options.out_points, csv.str());
    }
    if (!options.out_model.empty()) write_file(options.out_model, model_to_json(model) + '\n');
    out << samples.size() << " points from " << spec.size() << " subspaces\n";
    return kOk;
  });
}

int cmd_check_transversal(const TransversalOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_input(options.model_json, "model JSON");
    const auto tol = validated(options.tolerances);
    const auto model = model_from_json(read_text_file(options.model_json), tol);
    TransversalityReport report;
    std::string checked;
    if (const auto* affine = std::get_if<UnionOfAffine>(&model)) {
      if (options.embed) {
        report = check_transversality(embed_affine_union(*affine), tol);
        checked = "embedded";
      } else {
        report = check_transversality(affine->linear_parts(), tol);
        checked = "linear_parts";
      }
    } else {
      report = check_transversality(std::get<UnionOfLinear>(model), tol);
      checked = "linear";
    }
    Json j;
    j["transversal"] = report.transversal;
    j["witness"] = report.witness;
    j["rank_deficit"] = report.rank_deficit;
    j["checked"] = checked;
    out << format_json(j) << '\n';
    return kOk;
  });
}

int cmd_check_genpos(const GenposOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_input(options.points_csv, "points CSV");
    require_input(options.model_json, "model JSON");
    const auto tol = validated(options.tolerances);
    const auto model = model_from_json(read_text_file(options.model_json), tol);
    const auto table = read_points_csv_file(options.points_csv, options.labeled);
    if (table.points.rows() != model_ambient_dim(model)) {
      throw DimensionMismatch("points have " + std::to_string(table.points.rows()) +
                              " coordinates, model ambient dimension is " +
                              std::to_string(model_ambient_dim(model)));
    }
    const int degree = options.n ? *options.n : static_cast<int>(model_size(model));
    if (degree < 1) throw UsageError("--n must be positive");
    Json j = report_json(check_general_position(table.points, model, degree, tol));
    if (const auto* affine = std::get_if<UnionOfAffine>(&model)) {
      j["embedded"] = report_json(
          check_general_position(homogenize_points(table.points), embed_affine_union(*affine), degree, tol));
    }
    out << format_json(j) << '\n';
    return kOk;
  });
}

int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_input(options.result_json, "result JSON");
    require_input(options.truth_csv, "truth CSV");
    if (!options.truth_model.empty()) require_input(options.truth_model, "truth model JSON");
    const auto tol = validated(options.tolerances);
    const auto stored = result_from_json(read_text_file(options.result_json), tol);
    const auto truth = read_points_csv_file(options.truth_csv, true);
    const auto matching = match_labels(stored.labels, truth.labels);

    const bool affine = std::holds_alternative<UnionOfAffine>(stored.models);
    const UnionModel truth_model = options.truth_model.empty()
                                       ? fit_model(truth.points, truth.labels, affine, matching.truth_labels, tol)
                                       : model_from_json(read_text_file(options.truth_model), tol);
    const auto truth_members = members_of(truth_model);
    const auto result_members = members_of(stored.models);
    const bool report_translations = affine || std::holds_alternative<UnionOfAffine>(truth_model);

    Json angles = Json::array();
    Json translations = Json::array();
    for (std::size_t k = 0; k < matching.truth_labels.size(); ++k) {
      // Truth label values index the truth model when it is given explicitly.
      const auto t = options.truth_model.empty() ? k : static_cast<std::size_t>(matching.truth_labels[k]);
      if (t >= truth_members.size()) {
        throw UsageError("truth label " + std::to_string(matching.truth_labels[k]) + " has no truth model member");
      }
      const int p = matching.assignment[k];
      if (p < 0 || static_cast<std::size_t>(p) >= result_members.size()) {
        angles.push_back(nullptr);
        if (report_translations) translations.push_back(nullptr);
        continue;
      }
      const auto& truth_member = truth_members[t];
      const auto& result_member = result_members[static_cast<std::size_t>(p)];
      angles.push_back(subspace_distance(truth_member.linear->basis(), result_member.linear->basis()));
      if (report_translations) {
        const Vector diff = result_member.translation - truth_member.translation;
        translations.push_back((truth_member.linear->complement().transpose() * diff).norm());
      }
    }
    Json j;
    j["clustering_error"] = matching.error;
    j["per_cluster_angles"] = std::move(angles);
    j["translation_errors"] = std::move(translations);
    out << format_json(j) << '\n';
    return kOk;
  });
}

}  // namespace varietal::cli
