#include "graphrbm/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "graphrbm/error.hpp"

namespace graphrbm {

namespace {

std::size_t integer_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const double rounded = std::round(r);
  if (!(rounded >= 1.0) || std::abs(r - rounded) > 1e-9 * std::max(1.0, rounded))
    throw Error(Errc::ScheduleMismatch, std::string(what) + " is not a positive integer (" + std::to_string(r) + ")");
  return static_cast<std::size_t>(rounded);
}

bool store_snapshot(std::size_t step, std::size_t total, int stride, bool window_end) {
  return window_end || step == total || (stride > 0 && step % static_cast<std::size_t>(stride) == 0);
}

}  // namespace

TimeGrid make_time_grid(double h, double dt, double t_final) {
  if (!(dt > 0.0) || !(h > 0.0) || !(t_final > 0.0))
    throw Error(Errc::ScheduleMismatch, "h, dt and T must be positive");
  if (dt > h * (1.0 + 1e-12) || h > t_final * (1.0 + 1e-12))
    throw Error(Errc::ScheduleMismatch, "need dt <= h <= T");
  TimeGrid grid;
  grid.steps_per_window = integer_ratio(h, dt, "h/dt");
  grid.windows = integer_ratio(t_final, h, "T/h");
  return grid;
}

SampledSchedule sample_schedule(std::size_t windows, std::span<const double> probs, std::uint64_t seed) {
  if (probs.empty()) throw Error(Errc::BadProbabilityVector, "no batch probabilities");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> dist(probs.begin(), probs.end());
  SampledSchedule s;
  s.seed = seed;
  s.batches.reserve(windows);
  for (std::size_t k = 0; k < windows; ++k) s.batches.push_back(dist(rng));
  return s;
}

// ---------------------------------------------------------------------------

Trajectory run_full(const Discretization& disc, const Scheme& scheme, double dt, double t_final, int snapshot_stride) {
  const TimeGrid grid = make_time_grid(dt, dt, t_final);
  const std::size_t total = grid.total_steps();
  const MetricGraph& g = disc.graph();
  const SubDofMap full = full_restriction(g, disc.dofmap());
  const ZetaWeights unit = unit_weights(g);
  const AssembledOperators ops = disc.assemble(full, unit);
  const StepOperator op(scheme, dt, ops.mass, ops.stiffness, ops.convection + ops.reaction, full.constrained);

  Trajectory traj;
  traj.dt = dt;
  traj.steps_per_window = 1;
  traj.max_active_dofs = full.size();
  traj.mean_active_dofs = static_cast<double>(full.size());
  traj.max_factor_nnz = op.factor_nnz();

  const auto n = static_cast<Eigen::Index>(disc.num_dofs());
  Vector u = disc.initial_state();
  if (!g.boundary_vertices().empty()) disc.apply_boundary(0.0, u);
  Vector next(n), boundary = Vector::Zero(n), load_now, load_next;
  if (op.needs_load_now()) disc.load(full, unit, 0.0, load_now);

  traj.times.push_back(0.0);
  traj.steps.push_back(0);
  traj.states.push_back(u);
  for (std::size_t step = 0; step < total; ++step) {
    const double t_next = static_cast<double>(step + 1) * dt;
    if (!g.boundary_vertices().empty()) disc.apply_boundary(t_next, boundary);
    disc.load(full, unit, t_next, load_next);
    op.step(u, load_now, load_next, boundary, next);
    u.swap(next);
    if (op.needs_load_now()) load_now.swap(load_next);
    if (store_snapshot(step + 1, total, snapshot_stride, false)) {
      traj.times.push_back(t_next);
      traj.steps.push_back(step + 1);
      traj.states.push_back(u);
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------

RbmSolver::RbmSolver(const Discretization& disc, const SubgraphPartition& partition, const BatchFamily& family,
                     const Scheme& scheme, double dt)
    : disc_(&disc), scheme_(scheme), dt_(dt) {
  if (partition.graph().num_edges() != disc.graph().num_edges())
    throw Error(Errc::InvalidArgument, "partition and discretization refer to different graphs");
  for (std::size_t j = 0; j < family.size(); ++j) {
    ActiveSystem sys;
    sys.view = batch_view(partition, family, j);
    sys.sub = restrict_to_batch(disc.graph(), disc.dofmap(), sys.view);
    sys.weights = zeta_weights(partition, family, j);
    const AssembledOperators ops = disc.assemble(sys.sub, sys.weights);
    sys.op = std::make_unique<StepOperator>(scheme, dt, ops.mass, ops.stiffness, ops.convection + ops.reaction,
                                            sys.sub.constrained);
    systems_.push_back(std::move(sys));
  }
}

Trajectory RbmSolver::run(const SampledSchedule& schedule, const TimeGrid& grid, int snapshot_stride) const {
  if (schedule.batches.size() != grid.windows)
    throw Error(Errc::ScheduleMismatch, "schedule has " + std::to_string(schedule.batches.size()) +
                                            " windows, grid needs " + std::to_string(grid.windows));
  const Discretization& disc = *disc_;
  const MetricGraph& g = disc.graph();
  const std::size_t total = grid.total_steps();

  Trajectory traj;
  traj.dt = dt_;
  traj.schedule = schedule.batches;
  traj.seed = schedule.seed;
  traj.steps_per_window = grid.steps_per_window;

  Vector z = disc.initial_state();
  const bool has_boundary = !g.boundary_vertices().empty();
  if (has_boundary) disc.apply_boundary(0.0, z);
  traj.times.push_back(0.0);
  traj.steps.push_back(0);
  traj.states.push_back(z);

  Vector global_boundary = Vector::Zero(z.size());
  Vector u, next, boundary, load_now, load_next;
  double active_sum = 0.0;
  for (std::size_t k = 0; k < grid.windows; ++k) {
    const std::size_t j = schedule.batches[k];
    if (j >= systems_.size()) throw Error(Errc::BadBatchIndex, "schedule entry out of range");
    const ActiveSystem& sys = systems_[j];
    const SubDofMap& sub = sys.sub;
    const auto n = static_cast<Eigen::Index>(sub.size());
    traj.max_active_dofs = std::max(traj.max_active_dofs, sub.size());
    traj.max_factor_nnz = std::max(traj.max_factor_nnz, sys.op->factor_nnz());
    active_sum += static_cast<double>(sub.size());

    // Freeze: the active system starts from z(t_{k-1}); interface vertices
    // keep that value as Dirichlet data for the whole window.
    u.resize(n);
    boundary.setZero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      u[i] = z[sub.global[static_cast<std::size_t>(i)]];
      if (sub.constrained[static_cast<std::size_t>(i)]) boundary[i] = u[i];
    }
    const std::size_t first = k * grid.steps_per_window;
    if (sys.op->needs_load_now()) disc.load(sub, sys.weights, static_cast<double>(first) * dt_, load_now);

    for (std::size_t s = 0; s < grid.steps_per_window; ++s) {
      const std::size_t step = first + s + 1;
      const double t_next = static_cast<double>(step) * dt_;
      if (has_boundary) {
        disc.apply_boundary(t_next, global_boundary);
        for (VertexId v : sys.view.exterior_boundary) {
          const int d = disc.dofmap().vertex_dof(v);
          boundary[sub.local[static_cast<std::size_t>(d)]] = global_boundary[d];
        }
      }
      disc.load(sub, sys.weights, t_next, load_next);
      sys.op->step(u, load_now, load_next, boundary, next);
      u.swap(next);
      if (sys.op->needs_load_now()) load_now.swap(load_next);

      const bool window_end = s + 1 == grid.steps_per_window;
      if (window_end || store_snapshot(step, total, snapshot_stride, false)) {
        // Glue: active dofs from the evolved system, inactive ones frozen.
        for (Eigen::Index i = 0; i < n; ++i) z[sub.global[static_cast<std::size_t>(i)]] = u[i];
        if (has_boundary)
          for (VertexId v : g.boundary_vertices()) z[disc.dofmap().vertex_dof(v)] = global_boundary[disc.dofmap().vertex_dof(v)];
        traj.times.push_back(t_next);
        traj.steps.push_back(step);
        traj.states.push_back(z);
      }
    }
  }
  traj.mean_active_dofs = grid.windows > 0 ? active_sum / static_cast<double>(grid.windows) : 0.0;
  return traj;
}

Trajectory run_rbm(const Discretization& disc, const SubgraphPartition& partition, const BatchFamily& family,
                   const RbmConfig& config) {
  const TimeGrid grid = make_time_grid(config.h, config.dt, config.t_final);
  const SampledSchedule schedule = sample_schedule(grid.windows, family.probs, config.seed);
  const RbmSolver solver(disc, partition, family, config.scheme, config.dt);
  return solver.run(schedule, grid, config.snapshot_stride);
}

// ---------------------------------------------------------------------------

ErrorAccumulator::ErrorAccumulator(const Discretization& disc, SpaceTimeFn exact)
    : disc_(&disc), exact_(std::move(exact)) {}

ErrorAccumulator::ErrorAccumulator(const Discretization& disc, const Trajectory& baseline)
    : disc_(&disc), baseline_(&baseline) {}

double ErrorAccumulator::distance_sq(const Vector& u, std::size_t snapshot, double t) const {
  if (baseline_ != nullptr) return disc_->l2_distance_sq(u, baseline_->states[snapshot]);
  return disc_->l2_distance_sq(u, exact_, t);
}

void ErrorAccumulator::add(const Trajectory& traj) {
  if (count_ == 0) {
    times_ = traj.times;
    if (baseline_ != nullptr && baseline_->times != times_)
      throw Error(Errc::GridMismatch, "trajectory and baseline are stored on different time grids");
    sum_sq_.assign(times_.size(), 0.0);
    sum_norm_.assign(times_.size(), 0.0);
    sum_state_.assign(times_.size(), Vector::Zero(static_cast<Eigen::Index>(disc_->num_dofs())));
  } else if (traj.times != times_) {
    throw Error(Errc::GridMismatch, "realizations are stored on different time grids");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double d2 = distance_sq(traj.states[i], i, times_[i]);
    sum_sq_[i] += d2;
    sum_norm_[i] += std::sqrt(d2);
    sum_state_[i] += traj.states[i];
  }
  ++count_;
}

ErrorEstimate ErrorAccumulator::result() const {
  if (count_ == 0) throw Error(Errc::InvalidArgument, "no realizations to aggregate");
  ErrorEstimate est;
  est.realizations = count_;
  est.times = times_;
  const double r = static_cast<double>(count_);
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double mean_sq = sum_sq_[i] / r;
    const double mean_norm = sum_norm_[i] / r;
    const Vector mean_state = sum_state_[i] / r;
    const double err2 = distance_sq(mean_state, i, times_[i]);
    const double var = count_ == 1 ? 0.0 : std::max(0.0, mean_sq - mean_norm * mean_norm);
    est.mean_sq_error.push_back(mean_sq);
    est.mean_error_sq.push_back(err2);
    est.variance_profile.push_back(var);
    est.error1 = std::max(est.error1, mean_sq);
    est.error2 = std::max(est.error2, err2);
    est.variance = std::max(est.variance, var);
  }
  return est;
}

ErrorEstimate estimate_errors(const Discretization& disc, std::span<const Trajectory> runs, const SpaceTimeFn& exact) {
  ErrorAccumulator acc(disc, exact);
  for (const Trajectory& t : runs) acc.add(t);
  return acc.result();
}

ErrorEstimate estimate_errors(const Discretization& disc, std::span<const Trajectory> runs,
                              const Trajectory& baseline) {
  ErrorAccumulator acc(disc, baseline);
  for (const Trajectory& t : runs) acc.add(t);
  return acc.result();
}

}  // namespace graphrbm
