#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "graphrbm/decomposition.hpp"
#include "graphrbm/fem.hpp"
#include "graphrbm/timestep.hpp"

namespace graphrbm {

struct RbmConfig {
  double h = 0.002;        // window length
  double dt = 0.002;       // inner time step; h must be an integer multiple
  double t_final = 1.0;    // T; must be an integer multiple of h
  Scheme scheme = Scheme::implicit_euler();
  std::uint64_t seed = 0;
  int snapshot_stride = 1; // store every stride-th inner step (window ends always stored)
};

/// Window and step counts derived from a config. Errors: ScheduleMismatch.
struct TimeGrid {
  std::size_t windows = 0;          // K
  std::size_t steps_per_window = 0; // h / dt
  std::size_t total_steps() const noexcept { return windows * steps_per_window; }
};
TimeGrid make_time_grid(double h, double dt, double t_final);

struct SampledSchedule {
  std::vector<std::size_t> batches;  // omega_k, 0-based
  std::uint64_t seed = 0;
};

/// K i.i.d. categorical draws from probs using a 64-bit Mersenne Twister.
SampledSchedule sample_schedule(std::size_t windows, std::span<const double> probs, std::uint64_t seed);

/// Seed of realization r under a master seed.
constexpr std::uint64_t realization_seed(std::uint64_t master, std::uint64_t r) noexcept { return master ^ r; }

/// Stored snapshots of a (possibly randomized) solve.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::size_t> steps;  // global inner-step index of each snapshot
  std::vector<Vector> states;      // full-graph dof vectors
  std::vector<std::size_t> schedule;
  std::size_t steps_per_window = 0;
  std::uint64_t seed = 0;
  double dt = 0.0;

  std::size_t max_active_dofs = 0;
  std::size_t max_factor_nnz = 0;
  double mean_active_dofs = 0.0;
};

/// Deterministic solve on the full graph; the initial vector is the nodal
/// interpolant of y0 with g(0) on the boundary.
Trajectory run_full(const Discretization& disc, const Scheme& scheme, double dt, double t_final,
                    int snapshot_stride = 1);

/// Per-batch active systems (restriction, zeta weights, factorized step
/// operator), built once and reused across windows and realizations.
class RbmSolver {
public:
  RbmSolver(const Discretization& disc, const SubgraphPartition& partition, const BatchFamily& family,
            const Scheme& scheme, double dt);

  /// Runs one realization with the given schedule over `grid`.
  Trajectory run(const SampledSchedule& schedule, const TimeGrid& grid, int snapshot_stride = 1) const;

  std::size_t num_batches() const noexcept { return systems_.size(); }
  /// Dof count of batch j's active system.
  std::size_t active_dofs(std::size_t j) const { return systems_.at(j).sub.size(); }
  const BatchView& view(std::size_t j) const { return systems_.at(j).view; }
  const SubDofMap& restriction(std::size_t j) const { return systems_.at(j).sub; }

private:
  struct ActiveSystem {
    BatchView view;
    SubDofMap sub;
    ZetaWeights weights;
    std::unique_ptr<StepOperator> op;
  };

  const Discretization* disc_;
  Scheme scheme_;
  double dt_;
  std::vector<ActiveSystem> systems_;
};

/// Algorithm: for each window sample omega_k, freeze the state on inactive
/// edges, evolve the zeta-scaled system on the active subgraph with interface
/// vertices held at their frozen values and exterior boundary vertices at g,
/// then glue. Errors: ScheduleMismatch, SingularSystem.
Trajectory run_rbm(const Discretization& disc, const SubgraphPartition& partition, const BatchFamily& family,
                   const RbmConfig& config);

/// Monte-Carlo error statistics over realizations on a common time grid.
struct ErrorEstimate {
  double error1 = 0.0;    // sup_t E ||y - z||^2
  double error2 = 0.0;    // sup_t ||y - E z||^2
  double variance = 0.0;  // sup_t Var ||y - z||
  std::vector<double> times;
  std::vector<double> mean_sq_error;
  std::vector<double> mean_error_sq;
  std::vector<double> variance_profile;
  std::size_t realizations = 0;
};

/// Streaming accumulator: realizations are added one at a time and reduced
/// in insertion order.
class ErrorAccumulator {
public:
  /// Reference is the exact solution y(e, x, t).
  ErrorAccumulator(const Discretization& disc, SpaceTimeFn exact);
  /// Reference is a baseline trajectory (e.g. the full-graph solve).
  ErrorAccumulator(const Discretization& disc, const Trajectory& baseline);

  /// Errors: GridMismatch.
  void add(const Trajectory& traj);
  ErrorEstimate result() const;

private:
  double distance_sq(const Vector& u, std::size_t snapshot, double t) const;

  const Discretization* disc_;
  SpaceTimeFn exact_;
  const Trajectory* baseline_ = nullptr;
  std::vector<double> times_;
  std::vector<double> sum_sq_, sum_norm_;
  std::vector<Vector> sum_state_;
  std::size_t count_ = 0;
};

ErrorEstimate estimate_errors(const Discretization& disc, std::span<const Trajectory> runs, const SpaceTimeFn& exact);
ErrorEstimate estimate_errors(const Discretization& disc, std::span<const Trajectory> runs,
                              const Trajectory& baseline);

}  // namespace graphrbm
