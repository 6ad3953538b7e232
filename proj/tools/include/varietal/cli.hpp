#pragma once

// Command implementations behind the `varietal` executable. Each command
// writes its report to `out`, diagnostics to `err`, and returns an exit code.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varietal/numerics.hpp"

namespace varietal::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kGroupingFailure = 2,
  kInsufficientData = 3,
  kPointsOffModel = 4,
};

struct ClusterOptions {
  std::string points_csv;
  std::optional<int> n;
  std::optional<int> degree;
  bool affine = false;
  /// The CSV carries a trailing label column, which is ignored.
  bool labeled = false;
  /// Result JSON path; empty writes to `out`.
  std::string out_json;
  ToleranceConfig tolerances;
  double grouping_angle = 1e-3;
  int threads = 1;
};

struct SynthOptions {
  std::string spec_json;
  std::size_t per_subspace = 0;
  std::uint64_t seed = 0;
  std::string out_points;
  std::string out_model;
};

struct TransversalOptions {
  std::string model_json;
  bool embed = false;
  ToleranceConfig tolerances;
};

struct GenposOptions {
  std::string points_csv;
  std::string model_json;
  /// Polynomial degree; defaults to the number of subspaces in the model.
  std::optional<int> n;
  bool labeled = false;
  ToleranceConfig tolerances;
};

struct EvalOptions {
  std::string result_json;
  std::string truth_csv;
  /// Ground-truth model; when empty, models are fit to the labeled truth points.
  std::string truth_model;
  ToleranceConfig tolerances;
};

int cmd_cluster(const ClusterOptions& options, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err);
int cmd_check_transversal(const TransversalOptions& options, std::ostream& out, std::ostream& err);
int cmd_check_genpos(const GenposOptions& options, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err);

/// Parses the command line and runs the selected command. VARIETAL_THREADS, when
/// set, caps the worker threads used by `cluster`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct LabelMatching {
  /// Fraction of points whose label differs after the best relabeling.
  double error = 0.0;
  /// For each distinct truth label (ascending), the matched predicted label,
  /// or -1 when it is matched to no predicted label.
  std::vector<int> assignment;
  std::vector<int> truth_labels;
};

/// Minimizes misassignment over all one-to-one label maps (exact; at most 16
/// distinct labels on either side). Throws DimensionMismatch on size mismatch.
LabelMatching match_labels(const std::vector<int>& predicted, const std::vector<int>& truth);

}  // namespace varietal::cli
