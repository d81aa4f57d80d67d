#include <doctest.h>

#include <cmath>
#include <random>

#include "graphrbm/manufactured.hpp"
#include "graphrbm/rbm.hpp"
#include "helpers.hpp"

using namespace graphrbm;
using testing::throws_code;

namespace {

struct Fixture {
  ManufacturedSolution sol = demo_solution();
  CoefficientSet coeffs = derive_data(sol, demo_coefficients());
  MetricGraph graph = sol.graph();
  SubgraphPartition partition = demo_partition(graph);
  Discretization disc{graph, Mesh{12}, coeffs};
};

bool interior_of_edge(const DofMap& dm, int dof, std::size_t e) { return dm.edge_of(dof) == static_cast<int>(e); }

}  // namespace

TEST_CASE("time grid validation") {
  const TimeGrid g = make_time_grid(0.004, 0.002, 1.0);
  CHECK(g.windows == 250);
  CHECK(g.steps_per_window == 2);
  CHECK(throws_code([] { make_time_grid(0.003, 0.002, 0.996); }, Errc::ScheduleMismatch));
  CHECK(throws_code([] { make_time_grid(0.003, 0.001, 1.0); }, Errc::ScheduleMismatch));
  CHECK(throws_code([] { make_time_grid(0.001, 0.002, 1.0); }, Errc::ScheduleMismatch));
  CHECK(throws_code([] { make_time_grid(2.0, 0.5, 1.0); }, Errc::ScheduleMismatch));
}

TEST_CASE("schedule sampling") {
  const std::vector<double> one{1.0};
  for (std::size_t b : sample_schedule(50, one, 3).batches) CHECK(b == 0);

  const BatchFamily o2 = demo_batches_option2();
  CHECK(sample_schedule(100, o2.probs, 42).batches == sample_schedule(100, o2.probs, 42).batches);
  CHECK(sample_schedule(100, o2.probs, 42).batches != sample_schedule(100, o2.probs, 43).batches);

  const std::size_t draws = 100000;
  std::vector<std::size_t> counts(5, 0);
  for (std::size_t b : sample_schedule(draws, o2.probs, 2024).batches) ++counts[b];
  const double sigma = std::sqrt(draws * 0.2 * 0.8);
  for (std::size_t c : counts) CHECK(std::abs(static_cast<double>(c) - 0.2 * draws) <= 3.0 * sigma);
  CHECK(realization_seed(8, 3) == 11);
}

TEST_CASE("single batch reproduces the full solve") {
  Fixture fx;
  for (const Scheme& s : {Scheme::implicit_euler(), Scheme::crank_nicolson(), Scheme::theta_method(0.75),
                          Scheme::semi_implicit_euler()}) {
    const Trajectory full = run_full(fx.disc, s, 0.01, 0.5);
    RbmConfig cfg;
    cfg.h = 0.01;
    cfg.dt = 0.01;
    cfg.t_final = 0.5;
    cfg.scheme = s;
    const Trajectory rbm = run_rbm(fx.disc, fx.partition, single_batch(4), cfg);
    REQUIRE(full.times == rbm.times);
    double worst = 0.0;
    for (std::size_t i = 0; i < full.states.size(); ++i)
      worst = std::max(worst, (full.states[i] - rbm.states[i]).cwiseAbs().maxCoeff());
    CHECK(worst <= 1e-12);
    CHECK(rbm.max_active_dofs == full.max_active_dofs);
    CHECK(rbm.max_factor_nnz == full.max_factor_nnz);
  }
}

TEST_CASE("zero data gives a zero trajectory") {
  const MetricGraph g = demo_graph();
  CoefficientSet c = demo_coefficients();
  c.g = [](VertexId, double) { return 0.0; };
  const Discretization disc(g, Mesh{10}, c);
  const Trajectory t = run_full(disc, Scheme::crank_nicolson(), 0.01, 0.2);
  for (const Vector& u : t.states) CHECK(u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pure diffusion decays") {
  const MetricGraph g = demo_graph();
  const int n = 10;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> table(g.num_edges() * (n + 2));
  for (double& v : table) v = u(rng);
  CoefficientSet c;
  c.a = demo_coefficients().a;
  c.g = [](VertexId, double) { return 0.0; };
  c.y0 = [&](EdgeId e, double x) {
    const auto k = static_cast<std::size_t>(std::lround(x * (n + 1)));
    return (k == 0 || k == static_cast<std::size_t>(n + 1)) ? 0.0 : table[idx(e) * (n + 2) + k];
  };
  const Discretization disc(g, Mesh{n}, c);
  const Trajectory t = run_full(disc, Scheme::implicit_euler(), 0.01, 0.3);
  for (std::size_t i = 1; i < t.states.size(); ++i) CHECK(disc.energy(t.states[i]) < disc.energy(t.states[i - 1]));
}

TEST_CASE("freeze, interface and boundary invariants") {
  Fixture fx;
  const BatchFamily o1 = demo_batches_option1();
  const RbmSolver solver(fx.disc, fx.partition, o1, Scheme::crank_nicolson(), 0.01);
  const TimeGrid grid = make_time_grid(0.03, 0.01, 0.9);
  const SampledSchedule sched = sample_schedule(grid.windows, o1.probs, 99);
  const Trajectory t = solver.run(sched, grid, 0);
  REQUIRE(t.states.size() == grid.windows + 1);
  const DofMap& dm = fx.disc.dofmap();

  for (std::size_t k = 0; k < grid.windows; ++k) {
    const BatchView& view = solver.view(sched.batches[k]);
    const Vector& before = t.states[k];
    const Vector& after = t.states[k + 1];
    for (std::size_t e = 0; e < fx.graph.num_edges(); ++e) {
      if (view.edge_active[e]) continue;
      for (int d = static_cast<int>(dm.num_vertices()); d < static_cast<int>(dm.size()); ++d)
        if (interior_of_edge(dm, d, e)) CHECK(after[d] == before[d]);
    }
    for (VertexId v : view.interface) CHECK(after[dm.vertex_dof(v)] == before[dm.vertex_dof(v)]);
  }
  for (std::size_t i = 0; i < t.states.size(); ++i)
    for (VertexId v : fx.graph.boundary_vertices())
      CHECK(t.states[i][dm.vertex_dof(v)] == fx.coeffs.g(v, t.times[i]));
}

TEST_CASE("seed determinism and stride") {
  Fixture fx;
  const BatchFamily o2 = demo_batches_option2();
  RbmConfig cfg;
  cfg.h = 0.02;
  cfg.dt = 0.01;
  cfg.t_final = 0.2;
  cfg.seed = 77;
  cfg.snapshot_stride = 1;
  const Trajectory a = run_rbm(fx.disc, fx.partition, o2, cfg);
  const Trajectory b = run_rbm(fx.disc, fx.partition, o2, cfg);
  CHECK(a.schedule == b.schedule);
  CHECK(a.times.size() == 21);
  for (std::size_t i = 0; i < a.states.size(); ++i) CHECK((a.states[i].array() == b.states[i].array()).all());
  cfg.snapshot_stride = 0;
  CHECK(run_rbm(fx.disc, fx.partition, o2, cfg).times.size() == 11);
}

TEST_CASE("error aggregation") {
  Fixture fx;
  const BatchFamily o2 = demo_batches_option2();
  RbmConfig cfg;
  cfg.h = 0.02;
  cfg.dt = 0.01;
  cfg.t_final = 0.4;
  cfg.snapshot_stride = 0;
  std::vector<Trajectory> runs;
  for (std::uint64_t r = 0; r < 4; ++r) {
    cfg.seed = realization_seed(5, r);
    runs.push_back(run_rbm(fx.disc, fx.partition, o2, cfg));
  }
  const SpaceTimeFn exact = fx.sol.as_function();

  const ErrorEstimate self = estimate_errors(fx.disc, std::span(runs.data(), 1), runs[0]);
  CHECK(self.error1 <= 1e-20);
  CHECK(self.error2 <= 1e-20);

  const ErrorEstimate single = estimate_errors(fx.disc, std::span(runs.data(), 1), exact);
  double sup = 0.0;
  for (std::size_t i = 0; i < runs[0].times.size(); ++i)
    sup = std::max(sup, l2_error(fx.disc, runs[0].states[i], fx.sol, runs[0].times[i]));
  CHECK(single.error1 == sup);
  CHECK(single.error2 == doctest::Approx(sup).epsilon(1e-12));
  CHECK(single.variance == 0.0);

  // Independent Monte-Carlo reduction.
  const ErrorEstimate est = estimate_errors(fx.disc, runs, exact);
  double e1 = 0.0, e2 = 0.0, var = 0.0;
  for (std::size_t i = 0; i < runs[0].times.size(); ++i) {
    double s2 = 0.0, s1 = 0.0;
    Vector mean = Vector::Zero(runs[0].states[i].size());
    for (const auto& r : runs) {
      const double d = l2_error(fx.disc, r.states[i], fx.sol, r.times[i]);
      s2 += d;
      s1 += std::sqrt(d);
      mean += r.states[i];
    }
    mean /= 4.0;
    e1 = std::max(e1, s2 / 4.0);
    e2 = std::max(e2, l2_error(fx.disc, mean, fx.sol, runs[0].times[i]));
    var = std::max(var, s2 / 4.0 - (s1 / 4.0) * (s1 / 4.0));
  }
  CHECK(est.error1 == doctest::Approx(e1).epsilon(1e-12));
  CHECK(est.error2 == doctest::Approx(e2).epsilon(1e-12));
  CHECK(est.variance == doctest::Approx(var).epsilon(1e-9));
  CHECK(est.error2 <= est.error1);

  cfg.t_final = 0.2;
  std::vector<Trajectory> mixed{runs[0], run_rbm(fx.disc, fx.partition, o2, cfg)};
  CHECK(throws_code([&] { estimate_errors(fx.disc, mixed, exact); }, Errc::GridMismatch));
}
