#include "graphrbm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "graphrbm/error.hpp"
#include "graphrbm/io.hpp"
#include "graphrbm/rbm.hpp"

namespace graphrbm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void validate_spec(const ExperimentSpec& spec) {
  if (spec.problem != "manufactured")
    throw Error(Errc::InvalidArgument, "unknown problem '" + spec.problem + "' (only 'manufactured' is built in)");
  if (spec.schemes.empty()) throw Error(Errc::InvalidArgument, "no schemes requested");
  if (spec.h_list.empty()) throw Error(Errc::InvalidArgument, "no window lengths requested");
  if (spec.realizations < 1) throw Error(Errc::InvalidArgument, "need at least one realization");
  if (spec.nodes_per_edge < 1) throw Error(Errc::InvalidArgument, "need at least one interior node per edge");
  if (spec.snapshot_stride < 0) throw Error(Errc::InvalidArgument, "snapshot stride must be nonnegative");
  for (double h : spec.h_list) make_time_grid(h, spec.dt, spec.t_final);
}

StudyProblem make_problem(MetricGraph graph, SubgraphPartition partition, BatchFamily family,
                          std::span<const double> alpha, std::span<const double> beta) {
  CoefficientSet base = demo_coefficients();
  ManufacturedSolution sol(graph, solve_lower_coefficients(graph, base.a, alpha, beta));
  CoefficientSet coeffs = derive_data(sol, std::move(base));
  return {std::move(graph), std::move(partition), std::move(family), std::move(coeffs), std::move(sol)};
}

StudyProblem demo_problem() {
  MetricGraph g = demo_graph();
  SubgraphPartition part = demo_partition(g);
  return make_problem(std::move(g), std::move(part), demo_batches_option2(), table1_alpha(), table1_beta());
}

StudyProblem load_problem(const ExperimentSpec& spec) {
  if (spec.graph_path.empty() && spec.batch_path.empty()) return demo_problem();

  GraphFile gf = spec.graph_path.empty() ? GraphFile{demo_graph(), std::nullopt} : load_graph_file(spec.graph_path);
  // A custom graph without a batch file is treated as one part and one batch.
  auto [partition, family] = [&]() -> BatchFile {
    if (!spec.batch_path.empty()) return load_batch_file(spec.batch_path, gf.graph);
    if (spec.graph_path.empty()) return {demo_partition(gf.graph), demo_batches_option2()};
    std::vector<EdgeId> all;
    for (std::size_t e = 0; e < gf.graph.num_edges(); ++e) all.push_back(edge_id(e));
    return {validate_partition(gf.graph, {all}), single_batch(1)};
  }();

  std::vector<double> alpha(table1_alpha().begin(), table1_alpha().end());
  std::vector<double> beta(table1_beta().begin(), table1_beta().end());
  if (gf.manufactured) {
    alpha = gf.manufactured->alpha;
    beta = gf.manufactured->beta;
  } else if (alpha.size() != gf.graph.num_edges()) {
    throw Error(Errc::InvalidArgument, "graph has " + std::to_string(gf.graph.num_edges()) +
                                           " edges; supply \"manufactured\": {\"alpha\", \"beta\"} in the graph file");
  }
  return make_problem(std::move(gf.graph), std::move(partition), std::move(family), alpha, beta);
}

bool ExperimentRecord::same_row(const ExperimentRecord& o) const {
  return scheme == o.scheme && h == o.h && dt == o.dt && realizations == o.realizations && error1 == o.error1 &&
         error2 == o.error2 && variance == o.variance && avg_time_s == o.avg_time_s && mem_proxy == o.mem_proxy &&
         peak_rss_mb == o.peak_rss_mb && seed == o.seed;
}

// ---------------------------------------------------------------------------

std::vector<ExperimentRecord> run_study(const StudyProblem& problem, const ExperimentSpec& spec) {
  validate_spec(spec);
  const Discretization disc(problem.graph, Mesh{spec.nodes_per_edge}, problem.coeffs);
  const SpaceTimeFn exact = problem.solution.as_function();
  const unsigned workers = std::max(1u, spec.threads);

  std::vector<ExperimentRecord> records;
  for (const Scheme& scheme : spec.schemes) {
    for (double h : spec.h_list) {
      const TimeGrid grid = make_time_grid(h, spec.dt, spec.t_final);

      ExperimentRecord rec;
      rec.scheme = scheme.name();
      rec.h = h;
      rec.dt = spec.dt;
      rec.realizations = spec.realizations;
      rec.seed = spec.seed;
      rec.dofs = disc.num_dofs();

      ErrorAccumulator acc(disc, exact);
      double time_sum = 0.0;
      double active_sum = 0.0;
      for (std::size_t first = 0; first < spec.realizations; first += workers) {
        const std::size_t count = std::min<std::size_t>(workers, spec.realizations - first);
        std::vector<Trajectory> wave(count);
        std::vector<double> times(count, 0.0);
        std::vector<std::exception_ptr> failures(count);
        auto work = [&](std::size_t i) {
          try {
            const auto t0 = Clock::now();
            const RbmSolver solver(disc, problem.partition, problem.family, scheme, spec.dt);
            const SampledSchedule sched =
                sample_schedule(grid.windows, problem.family.probs, realization_seed(spec.seed, first + i));
            wave[i] = solver.run(sched, grid, spec.snapshot_stride);
            times[i] = seconds_since(t0);
          } catch (...) {
            failures[i] = std::current_exception();
          }
        };
        if (count == 1) {
          work(0);
        } else {
          std::vector<std::thread> pool;
          for (std::size_t i = 0; i < count; ++i) pool.emplace_back(work, i);
          for (auto& t : pool) t.join();
        }
        for (std::size_t i = 0; i < count; ++i) {
          if (failures[i]) std::rethrow_exception(failures[i]);
          const Trajectory& traj = wave[i];
          acc.add(traj);
          time_sum += times[i];
          active_sum += traj.mean_active_dofs;
          rec.mem_proxy = std::max(rec.mem_proxy, traj.max_factor_nnz);
          rec.max_active_dofs = std::max(rec.max_active_dofs, traj.max_active_dofs);
          rec.seeds.push_back(traj.seed);
        }
      }
      const ErrorEstimate est = acc.result();
      rec.error1 = est.error1;
      rec.error2 = est.error2;
      rec.variance = est.variance;
      rec.avg_time_s = time_sum / static_cast<double>(spec.realizations);
      rec.mean_active_dofs = active_sum / static_cast<double>(spec.realizations);
      rec.peak_rss_mb = peak_rss_mb();
      records.push_back(std::move(rec));

      if (spec.include_full) {
        const int stride = spec.snapshot_stride > 0 ? spec.snapshot_stride : static_cast<int>(grid.steps_per_window);
        Trajectory traj;
        const BenchmarkResult bench =
            benchmark([&] { traj = run_full(disc, scheme, spec.dt, spec.t_final, stride); });
        ErrorAccumulator full(disc, exact);
        full.add(traj);
        const ErrorEstimate fe = full.result();
        ExperimentRecord row;
        row.scheme = "full-" + scheme.name();
        row.h = h;
        row.dt = spec.dt;
        row.realizations = 1;
        row.error1 = fe.error1;
        row.error2 = fe.error2;
        row.variance = 0.0;
        row.avg_time_s = bench.wall_seconds;
        row.mem_proxy = traj.max_factor_nnz;
        row.peak_rss_mb = bench.peak_rss_mb;
        row.seed = spec.seed;
        row.dofs = disc.num_dofs();
        row.max_active_dofs = traj.max_active_dofs;
        row.mean_active_dofs = traj.mean_active_dofs;
        records.push_back(std::move(row));
      }
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
    return a.scheme != b.scheme ? a.scheme < b.scheme : a.h < b.h;
  });
  return records;
}

// ---------------------------------------------------------------------------

SlopeFit fit_slope(std::span<const double> h, std::span<const double> error) {
  if (h.size() != error.size()) throw Error(Errc::InvalidArgument, "h and error lists differ in length");
  if (h.size() < 3) throw Error(Errc::DegenerateFit, "need at least three (h, error) pairs");
  double sx = 0, sy = 0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(error[i] > 0.0) || !std::isfinite(h[i]) || !std::isfinite(error[i]))
      throw Error(Errc::DegenerateFit, "log-log fit needs positive finite pairs");
    lx.push_back(std::log(h[i]));
    ly.push_back(std::log(error[i]));
    sx += lx.back();
    sy += ly.back();
  }
  const double n = static_cast<double>(h.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(Errc::DegenerateFit, "all h values coincide");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

std::optional<double> peak_rss_mb() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream ss(line.substr(6));
      double kb = 0;
      if (ss >> kb) return kb / 1024.0;
    }
  }
  return std::nullopt;
}

BenchmarkResult benchmark(const std::function<void()>& fn) {
  const auto t0 = Clock::now();
  fn();
  BenchmarkResult r;
  r.wall_seconds = seconds_since(t0);
  r.peak_rss_mb = peak_rss_mb();
  return r;
}

// ---------------------------------------------------------------------------

void write_csv(const std::vector<ExperimentRecord>& records, std::ostream& out) {
  if (records.empty()) throw Error(Errc::InvalidArgument, "no records to write");
  out << kCsvHeader << '\n';
  for (const ExperimentRecord& r : records) {
    if (r.scheme.find_first_of(",\n\"") != std::string::npos)
      throw Error(Errc::InvalidArgument, "scheme label must not contain commas, quotes or newlines");
    out << r.scheme << ',' << format_double(r.h) << ',' << format_double(r.dt) << ',' << r.realizations << ','
        << format_double(r.error1) << ',' << format_double(r.error2) << ',' << format_double(r.variance) << ','
        << format_double(r.avg_time_s) << ',' << r.mem_proxy << ','
        << (r.peak_rss_mb ? format_double(*r.peak_rss_mb) : std::string()) << ',' << r.seed << '\n';
  }
  if (!out) throw Error(Errc::IoError, "write failed");
}

void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path + " for writing");
  write_csv(records, out);
  out.close();
  if (!out) throw Error(Errc::IoError, "write to " + path + " failed");
}

std::vector<ExperimentRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::ParseError, "line 1: empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw Error(Errc::ParseError, "line 1: unexpected header");

  std::vector<ExperimentRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    const std::string where = "line " + std::to_string(lineno);
    if (f.size() != 11) throw Error(Errc::ParseError, where + ": expected 11 fields, got " + std::to_string(f.size()));
    auto num = [&](const std::string& s, const char* col) {
      try {
        return parse_rational(s);
      } catch (const Error&) {
        throw Error(Errc::ParseError, where + ": bad " + col + " '" + s + "'");
      }
    };
    auto integer = [&](const std::string& s, const char* col) {
      std::size_t pos = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(s, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (s.empty() || pos != s.size() || s[0] == '-') throw Error(Errc::ParseError, where + ": bad " + col + " '" + s + "'");
      return v;
    };
    ExperimentRecord r;
    r.scheme = f[0];
    r.h = num(f[1], "h");
    r.dt = num(f[2], "dt");
    r.realizations = integer(f[3], "realizations");
    r.error1 = num(f[4], "error1");
    r.error2 = num(f[5], "error2");
    r.variance = num(f[6], "variance");
    r.avg_time_s = num(f[7], "avg_time_s");
    r.mem_proxy = integer(f[8], "mem_proxy");
    if (!f[9].empty()) r.peak_rss_mb = num(f[9], "peak_rss_mb");
    r.seed = integer(f[10], "seed");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentRecord> read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  return read_csv(in);
}

}  // namespace graphrbm
