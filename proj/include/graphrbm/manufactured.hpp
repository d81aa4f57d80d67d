#pragma once

#include <span>
#include <vector>

#include "graphrbm/decomposition.hpp"
#include "graphrbm/fem.hpp"
#include "graphrbm/metric_graph.hpp"

namespace graphrbm {

/// w(x) = alpha x^4 + beta x^3 + gamma x^2 + delta x + eps.
struct Quartic {
  double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0, eps = 0.0;

  double value(double x) const { return (((alpha * x + beta) * x + gamma) * x + delta) * x + eps; }
  double d1(double x) const { return ((4.0 * alpha * x + 3.0 * beta) * x + 2.0 * gamma) * x + delta; }
  double d2(double x) const { return (12.0 * alpha * x + 6.0 * beta) * x + 2.0 * gamma; }
};

/// Alpha and beta per demo edge e1..e10.
std::span<const double> table1_alpha();
std::span<const double> table1_beta();

/// Fills gamma, delta, eps so that w is continuous at every interior vertex
/// and satisfies sum_e a_e(v) w_e'(v) n_e(v) = 0 there. The constraint system
/// is underdetermined; the minimum-norm solution is returned.
/// Errors: InvalidArgument on size mismatch, InconsistentConstraints when the
/// least-squares residual exceeds 1e-8.
std::vector<Quartic> solve_lower_coefficients(const MetricGraph& graph, const SpaceFn& a, std::span<const double> alpha,
                                              std::span<const double> beta);

/// Exact solution y_e(x, t) = w_e(x) sin(2 pi t).
class ManufacturedSolution {
public:
  ManufacturedSolution(const MetricGraph& graph, std::vector<Quartic> profiles);

  double value(EdgeId e, double x, double t) const;
  double dx(EdgeId e, double x, double t) const;
  double dxx(EdgeId e, double x, double t) const;
  double dt(EdgeId e, double x, double t) const;

  const Quartic& profile(EdgeId e) const { return profiles_.at(idx(e)); }
  const MetricGraph& graph() const noexcept { return graph_; }

  SpaceTimeFn as_function() const;

  /// Largest vertex continuity mismatch and Kirchhoff residual of w.
  double continuity_residual() const;
  double kirchhoff_residual(const SpaceFn& a) const;

private:
  MetricGraph graph_;
  std::vector<Quartic> profiles_;
};

/// a = x(x - 1) + 1/2, b = sin(pi x)/2, p = sin(pi x) on every edge
/// (x measured from the tail; unit edges assumed by the formulas).
CoefficientSet demo_coefficients();

/// The demo graph's manufactured solution built from table1_alpha/beta.
ManufacturedSolution demo_solution();

/// Returns coeffs with f, g and y0 derived from the exact solution:
/// f = y_t - (a' y_x + a y_xx) + b y_x + p y, g_v(t) = y(v, t), y0 = y(., 0).
/// Errors: InvalidArgument if a or a_dx is missing.
CoefficientSet derive_data(const ManufacturedSolution& solution, CoefficientSet coeffs);

/// ||y(t) - z||^2_{L2} for a P1 state z.
double l2_error(const Discretization& disc, const Vector& state, const ManufacturedSolution& solution, double t);

struct LambdaProfile {
  std::vector<double> times;
  std::vector<double> values;
  double l1_norm = 0.0;  // trapezoidal
};

/// Variance functional Lambda(t) = E[ ||d_x((a - zeta_a) y_x)||^2 + ||(b - zeta_b) y_x||^2
///   + ||(p - zeta_p) y||^2 + ||(1 - zeta_1) f||^2 ], the expectation taken
/// exactly as the p_j-weighted sum over batches. Spatial integrals use 5-point
/// Gauss on `elements_per_edge` elements. `coeffs` must carry a, a_dx and f.
LambdaProfile lambda_profile(const ManufacturedSolution& solution, const CoefficientSet& coeffs,
                             const SubgraphPartition& partition, const BatchFamily& family,
                             std::span<const double> times, int elements_per_edge = 200);

/// Uniform grid of `points` times on [0, t_final].
std::vector<double> uniform_times(double t_final, std::size_t points);

}  // namespace graphrbm
