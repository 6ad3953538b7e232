#include <charconv>
#include <cstdlib>
#include <cstring>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "varietal/cli.hpp"
#include "varietal/parallel.hpp"

namespace varietal::cli {

namespace {

void add_tolerances(CLI::App* cmd, ToleranceConfig& tol) {
  cmd->add_option("--rank-rtol", tol.rank_rtol, "Relative singular-value threshold for numerical rank")
      ->capture_default_str();
  cmd->add_option("--angle-tol", tol.angle_tol, "Principal-angle tolerance (radians)")->capture_default_str();
  cmd->add_option("--residual-tol", tol.residual_tol, "Distance tolerance for points on a model")
      ->capture_default_str();
}

// Worker count after applying the VARIETAL_THREADS cap.
int capped_threads(int requested) {
  int threads = resolve_thread_count(requested);
  const char* env = std::getenv("VARIETAL_THREADS");
  if (env == nullptr || *env == '\0') return threads;
  int cap = 0;
  const auto* end = env + std::strlen(env);
  const auto [ptr, ec] = std::from_chars(env, end, cap);
  if (ec != std::errc() || ptr != end || cap < 1) {
    throw std::invalid_argument("VARIETAL_THREADS must be a positive integer");
  }
  return std::min(threads, cap);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Algebraic subspace clustering for unions of linear and affine subspaces", "varietal");
  app.require_subcommand(1);
  app.set_version_flag("--version", "varietal 0.1.0");

  ClusterOptions cluster;
  int requested_threads = 0;
  auto* c = app.add_subcommand("cluster", "Cluster points lying on a union of subspaces");
  c->add_option("points", cluster.points_csv, "Points CSV, one point per row")->required();
  c->add_option("--n", cluster.n, "Number of subspaces")->check(CLI::PositiveNumber);
  c->add_option("--degree", cluster.degree, "Degree of the vanishing polynomials (defaults to --n)")
      ->check(CLI::PositiveNumber);
  c->add_flag("--affine", cluster.affine, "Treat the subspaces as affine");
  c->add_flag("--labeled", cluster.labeled, "Ignore a trailing integer label column");
  c->add_option("--out", cluster.out_json, "Write the result JSON here instead of stdout");
  c->add_option("--grouping-angle", cluster.grouping_angle, "Angle below which point estimates are merged")
      ->capture_default_str();
  c->add_option("--threads", requested_threads, "Worker threads (0 = all cores)")->capture_default_str();
  add_tolerances(c, cluster.tolerances);

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Sample points from a random union of subspaces");
  s->add_option("--spec", synth.spec_json, "Spec JSON: ambient_dim plus subspace dims and affine flags")
      ->required();
  s->add_option("--per-subspace", synth.per_subspace, "Points drawn from each subspace")->required();
  s->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  s->add_option("--out-points", synth.out_points, "Labeled points CSV");
  s->add_option("--out-model", synth.out_model, "Model JSON");

  TransversalOptions transversal;
  auto* t = app.add_subcommand("check-transversal", "Test a model for transversality");
  t->add_option("model", transversal.model_json, "Model JSON")->required();
  t->add_flag("--embed", transversal.embed, "Check the embedded union of an affine model");
  add_tolerances(t, transversal.tolerances);

  GenposOptions genpos;
  auto* g = app.add_subcommand("check-genpos", "Test whether points are in general position in a model");
  g->add_option("points", genpos.points_csv, "Points CSV")->required();
  g->add_option("model", genpos.model_json, "Model JSON")->required();
  g->add_option("--n", genpos.n, "Polynomial degree (defaults to the number of subspaces)")
      ->check(CLI::PositiveNumber);
  g->add_flag("--labeled", genpos.labeled, "Ignore a trailing integer label column");
  add_tolerances(g, genpos.tolerances);

  EvalOptions eval;
  auto* e = app.add_subcommand("eval", "Compare a clustering result with ground truth");
  e->add_option("result", eval.result_json, "Result JSON written by cluster")->required();
  e->add_option("truth", eval.truth_csv, "Labeled truth CSV")->required();
  e->add_option("--model", eval.truth_model, "Ground-truth model JSON");
  add_tolerances(e, eval.tolerances);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kInputError;
  }

  if (c->parsed()) {
    try {
      cluster.threads = capped_threads(requested_threads);
    } catch (const std::exception& ex) {
      err << "error: " << ex.what() << '\n';
      return kInputError;
    }
    return cmd_cluster(cluster, out, err);
  }
  if (s->parsed()) return cmd_synth(synth, out, err);
  if (t->parsed()) return cmd_check_transversal(transversal, out, err);
  if (g->parsed()) return cmd_check_genpos(genpos, out, err);
  return cmd_eval(eval, out, err);
}

}  // namespace varietal::cli
