// graphrbm command line: solve, rbm, study, check.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "graphrbm/error.hpp"
#include "graphrbm/harness.hpp"
#include "graphrbm/io.hpp"
#include "graphrbm/rbm.hpp"

using namespace graphrbm;

namespace {

struct Options {
  std::string graph, batches, out;
  std::string scheme = "ie";
  double theta = 0.75;
  double dt = 0.002;
  std::string h = "0.002";
  double t_final = 1.0;
  std::size_t realizations = 20;
  std::uint64_t seed = 1;
  int stride = 0;
  int nodes = 100;
  unsigned threads = 1;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

ExperimentSpec to_spec(const Options& o) {
  ExperimentSpec spec;
  spec.graph_path = o.graph;
  spec.batch_path = o.batches;
  spec.schemes.clear();
  for (const auto& name : split(o.scheme)) spec.schemes.push_back(parse_scheme(name, o.theta));
  spec.dt = o.dt;
  spec.t_final = o.t_final;
  spec.h_list.clear();
  for (const auto& h : split(o.h)) spec.h_list.push_back(parse_rational(h));
  spec.realizations = o.realizations;
  spec.seed = o.seed;
  spec.nodes_per_edge = o.nodes;
  spec.snapshot_stride = o.stride;
  spec.threads = o.threads;
  spec.out = o.out;
  return spec;
}

void emit(const std::vector<ExperimentRecord>& rows, const std::string& path) {
  if (path.empty() || path == "-")
    write_csv(rows, std::cout);
  else
    emit_csv(rows, path);
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--graph", o.graph, "graph JSON (default: built-in demo graph)");
  cmd->add_option("--scheme", o.scheme, "ie, cn, theta or siem (study accepts a comma list)");
  cmd->add_option("--theta", o.theta, "theta for --scheme theta");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--t-final", o.t_final, "final time T");
  cmd->add_option("--out", o.out, "CSV output path (default: stdout)");
  cmd->add_option("--snapshot-stride", o.stride, "extra snapshots every N steps (0: window ends only)");
  cmd->add_option("--nodes-per-edge", o.nodes, "interior P1 nodes per edge");
}

int cmd_solve(const Options& o) {
  ExperimentSpec spec = to_spec(o);
  spec.batch_path.clear();
  if (spec.schemes.size() != 1) throw Error(Errc::InvalidArgument, "solve takes a single scheme");
  const StudyProblem problem = load_problem(spec);
  const Discretization disc(problem.graph, Mesh{spec.nodes_per_edge}, problem.coeffs);
  const int stride = spec.snapshot_stride > 0 ? spec.snapshot_stride : 1;
  Trajectory traj;
  const BenchmarkResult bench = benchmark([&] { traj = run_full(disc, spec.schemes[0], spec.dt, spec.t_final, stride); });
  ErrorAccumulator acc(disc, problem.solution.as_function());
  acc.add(traj);
  const ErrorEstimate est = acc.result();

  ExperimentRecord row;
  row.scheme = "full-" + spec.schemes[0].name();
  row.h = spec.dt;
  row.dt = spec.dt;
  row.realizations = 1;
  row.error1 = est.error1;
  row.error2 = est.error2;
  row.avg_time_s = bench.wall_seconds;
  row.mem_proxy = traj.max_factor_nnz;
  row.peak_rss_mb = bench.peak_rss_mb;
  row.seed = spec.seed;
  std::fprintf(stderr, "dofs=%zu steps=%zu error=%.6e time=%.3fs\n", disc.num_dofs(), traj.steps.back(), est.error1,
               bench.wall_seconds);
  emit({row}, spec.out);
  return 0;
}

int cmd_rbm(const Options& o) {
  ExperimentSpec spec = to_spec(o);
  if (spec.schemes.size() != 1 || spec.h_list.size() != 1)
    throw Error(Errc::InvalidArgument, "rbm takes a single scheme and a single --h");
  spec.realizations = 1;
  spec.threads = 1;
  spec.include_full = false;
  const StudyProblem problem = load_problem(spec);
  const auto rows = run_study(problem, spec);
  const ExperimentRecord& r = rows.front();
  std::fprintf(stderr, "dofs=%zu max_active=%zu mean_active=%.1f error=%.6e time=%.3fs\n", r.dofs,
               r.max_active_dofs, r.mean_active_dofs, r.error1, r.avg_time_s);
  emit(rows, spec.out);
  return 0;
}

int cmd_study(const Options& o) {
  const ExperimentSpec spec = to_spec(o);
  const StudyProblem problem = load_problem(spec);
  const auto rows = run_study(problem, spec);
  for (const auto& r : rows)
    std::fprintf(stderr, "%-10s h=%-8g error1=%.4e error2=%.4e var=%.4e time=%.3fs\n", r.scheme.c_str(), r.h,
                 r.error1, r.error2, r.variance, r.avg_time_s);
  emit(rows, spec.out);
  return 0;
}

int cmd_check(const Options& o) {
  ExperimentSpec spec = to_spec(o);
  const StudyProblem problem = load_problem(spec);
  const MetricGraph& g = problem.graph;
  const SubgraphPartition& part = problem.partition;
  const BatchFamily& fam = problem.family;

  std::printf("graph: %zu vertices, %zu edges, %zu boundary\n", g.num_vertices(), g.num_edges(),
              g.boundary_vertices().size());
  for (std::size_t i = 0; i < part.num_parts(); ++i) {
    std::printf("part %zu:", i + 1);
    for (EdgeId e : part.part_edges(i)) std::printf(" %s", g.edge_name(e).c_str());
    std::printf("  pi=%.17g\n", fam.pi[i]);
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick(0, g.num_edges() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<EdgePoint> pts;
  for (int k = 0; k < 100; ++k) {
    const EdgeId e = edge_id(pick(rng));
    double x = 0.0;
    while (x == 0.0) x = unit(rng);
    pts.push_back({e, x * g.edge(e).length});
  }
  const CoefficientSet& c = problem.coeffs;
  const std::vector<EdgeFunction> psis{[](EdgeId, double) { return 1.0; }, c.a, c.b, c.p};
  const double bias = verify_unbiased(part, fam, pts, psis);
  std::printf("unbiasedness residual: %.3e\n", bias);

  const AssumptionA1Report a1 = check_assumption_a1(part, fam);
  if (a1.holds) {
    std::printf("assumption A1: holds\n");
    return 0;
  }
  std::printf("assumption A1: violated at");
  for (VertexId v : a1.violations) std::printf(" %s", g.vertex_name(v).c_str());
  std::printf("\n");
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random batch method for parabolic problems on metric graphs"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "deterministic full-graph solve");
  add_common(solve, o);

  auto* rbm = app.add_subcommand("rbm", "one RBM realization");
  add_common(rbm, o);
  rbm->add_option("--batches", o.batches, "batch JSON (default: demo option 2)");
  rbm->add_option("--h", o.h, "window length");
  rbm->add_option("--seed", o.seed, "RNG seed");

  auto* study = app.add_subcommand("study", "Monte-Carlo sweep over h");
  add_common(study, o);
  study->add_option("--batches", o.batches, "batch JSON (default: demo option 2)");
  study->add_option("--h", o.h, "window lengths, comma separated");
  study->add_option("--realizations", o.realizations, "realizations per (scheme, h)");
  study->add_option("--seed", o.seed, "master seed");
  study->add_option("--threads", o.threads, "worker threads");

  auto* check = app.add_subcommand("check", "validate partition, batches, assumption A1 and unbiasedness");
  check->add_option("--graph", o.graph, "graph JSON (default: built-in demo graph)");
  check->add_option("--batches", o.batches, "batch JSON (default: demo option 2)");
  check->add_option("--seed", o.seed, "seed for the random test points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*rbm) return cmd_rbm(o);
    if (*study) return cmd_study(o);
    if (*check) return cmd_check(o);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return is_numerical(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
