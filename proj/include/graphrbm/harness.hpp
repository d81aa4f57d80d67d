#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graphrbm/decomposition.hpp"
#include "graphrbm/fem.hpp"
#include "graphrbm/manufactured.hpp"
#include "graphrbm/metric_graph.hpp"
#include "graphrbm/timestep.hpp"

namespace graphrbm {

struct ExperimentSpec {
  std::string graph_path;   // empty: built-in demo graph
  std::string batch_path;   // empty: demo partition with option-2 batches
  std::string problem = "manufactured";
  std::vector<Scheme> schemes{Scheme::implicit_euler()};
  double dt = 0.002;
  double t_final = 1.0;
  std::vector<double> h_list{0.002};
  std::size_t realizations = 20;
  std::uint64_t seed = 1;
  int nodes_per_edge = 100;
  int snapshot_stride = 0;  // 0: window endpoints only
  unsigned threads = 1;
  bool include_full = true; // one deterministic row per (scheme, h)
  std::string out;
};

/// Errors: ScheduleMismatch (h not a multiple of dt, or T not a multiple of
/// h), InvalidArgument (R = 0, empty lists, unknown problem).
void validate_spec(const ExperimentSpec& spec);

/// Graph, decomposition and manufactured data for a study.
struct StudyProblem {
  MetricGraph graph;
  SubgraphPartition partition;
  BatchFamily family;
  CoefficientSet coeffs;
  ManufacturedSolution solution;
};

/// The demo graph, its partition, option-2 batches and the manufactured data.
StudyProblem demo_problem();
/// Reads graph and batch files named in spec. Without a graph file the demo
/// graph is used (with option-2 batches unless a batch file is given); a graph
/// file without a batch file gets a single part and a single batch.
StudyProblem load_problem(const ExperimentSpec& spec);
/// Manufactured data on an arbitrary graph with the demo coefficients.
StudyProblem make_problem(MetricGraph graph, SubgraphPartition partition, BatchFamily family,
                          std::span<const double> alpha, std::span<const double> beta);

/// One CSV row; the trailing fields are kept in memory only.
struct ExperimentRecord {
  std::string scheme;  // "ie", "cn", "theta", "siem"; deterministic rows get a "full-" prefix
  double h = 0.0;
  double dt = 0.0;
  std::size_t realizations = 0;
  double error1 = 0.0;
  double error2 = 0.0;
  double variance = 0.0;
  double avg_time_s = 0.0;
  std::size_t mem_proxy = 0;           // max LU factor nnz over windows
  std::optional<double> peak_rss_mb;   // process high-water mark, if the OS exposes it
  std::uint64_t seed = 0;              // master seed; realization r used seed ^ r

  std::size_t dofs = 0;
  std::size_t max_active_dofs = 0;
  double mean_active_dofs = 0.0;
  std::vector<std::uint64_t> seeds;

  /// Equality over the CSV columns.
  bool same_row(const ExperimentRecord& other) const;
};

/// For each scheme and h: R realizations of run_rbm (plus one run_full row
/// when spec.include_full), errors measured against the exact solution.
/// Rows are sorted by (scheme, h). Error columns do not depend on the
/// thread count.
std::vector<ExperimentRecord> run_study(const StudyProblem& problem, const ExperimentSpec& spec);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least squares of log(error) on log(h). Errors: InvalidArgument on size
/// mismatch, DegenerateFit with fewer than three pairs, nonpositive entries
/// or a single distinct h.
SlopeFit fit_slope(std::span<const double> h, std::span<const double> error);

struct BenchmarkResult {
  double wall_seconds = 0.0;
  std::optional<double> peak_rss_mb;
};

/// Wall time of fn() and the process high-water RSS afterwards.
BenchmarkResult benchmark(const std::function<void()>& fn);

/// VmHWM from /proc/self/status in MB, if available.
std::optional<double> peak_rss_mb();

inline constexpr const char* kCsvHeader =
    "scheme,h,dt,realizations,error1,error2,variance,avg_time_s,mem_proxy,peak_rss_mb,seed";

/// Errors: InvalidArgument for no records, IoError.
void write_csv(const std::vector<ExperimentRecord>& records, std::ostream& out);
void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path);

/// Errors: ParseError (with the line number), IoError.
std::vector<ExperimentRecord> read_csv(std::istream& in);
std::vector<ExperimentRecord> read_csv_file(const std::string& path);

}  // namespace graphrbm
