#include "graphrbm/manufactured.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "graphrbm/error.hpp"

namespace graphrbm {

namespace {

constexpr std::array<double, 10> kAlpha{10, -3, 5, 4, 4, 10, -3, 5, -3, 4};
constexpr std::array<double, 10> kBeta{-12, 1, -7, -6, -6, -12, 1, -7, 1, -6};

constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace

std::span<const double> table1_alpha() { return kAlpha; }
std::span<const double> table1_beta() { return kBeta; }

std::vector<Quartic> solve_lower_coefficients(const MetricGraph& graph, const SpaceFn& a, std::span<const double> alpha,
                                              std::span<const double> beta) {
  const std::size_t ne = graph.num_edges();
  if (alpha.size() != ne || beta.size() != ne)
    throw Error(Errc::InvalidArgument, "need one alpha and one beta per edge");

  std::vector<Quartic> w(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    w[e].alpha = alpha[e];
    w[e].beta = beta[e];
  }

  // Unknowns per edge: (gamma, delta, eps) at columns 3e, 3e+1, 3e+2.
  // Rows: continuity against the first incident edge, then Kirchhoff.
  std::vector<std::array<double, 3>> row_terms;
  std::size_t rows = 0;
  for (VertexId v : graph.interior_vertices()) rows += graph.degree(v);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(3 * ne));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows));

  auto col = [](EdgeId e, int k) { return static_cast<Eigen::Index>(3 * idx(e) + static_cast<std::size_t>(k)); };
  Eigen::Index r = 0;
  for (VertexId v : graph.interior_vertices()) {
    auto inc = graph.incident_edges(v);
    const EdgeId first = inc[0];
    const double x0 = graph.endpoint_coordinate(first, v);
    for (std::size_t k = 1; k < inc.size(); ++k, ++r) {
      const EdgeId e = inc[k];
      const double x = graph.endpoint_coordinate(e, v);
      // w_first(x0) - w_e(x) = 0
      m(r, col(first, 0)) += x0 * x0;
      m(r, col(first, 1)) += x0;
      m(r, col(first, 2)) += 1.0;
      m(r, col(e, 0)) -= x * x;
      m(r, col(e, 1)) -= x;
      m(r, col(e, 2)) -= 1.0;
      rhs[r] = -(w[idx(first)].alpha * std::pow(x0, 4) + w[idx(first)].beta * std::pow(x0, 3)) +
               (w[idx(e)].alpha * std::pow(x, 4) + w[idx(e)].beta * std::pow(x, 3));
    }
    // sum_e a_e(v) w_e'(v) n_e(v) = 0
    for (EdgeId e : inc) {
      const double x = graph.endpoint_coordinate(e, v);
      const double s = a(e, x) * graph.incidence(e, v);
      m(r, col(e, 0)) += s * 2.0 * x;
      m(r, col(e, 1)) += s;
      rhs[r] -= s * (4.0 * w[idx(e)].alpha * std::pow(x, 3) + 3.0 * w[idx(e)].beta * x * x);
    }
    ++r;
  }

  if (rows > 0) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
    const Eigen::VectorXd sol = cod.solve(rhs);
    const double residual = (m * sol - rhs).lpNorm<Eigen::Infinity>();
    if (!(residual <= 1e-8))
      throw Error(Errc::InconsistentConstraints, "constraint residual " + std::to_string(residual));
    for (std::size_t e = 0; e < ne; ++e) {
      w[e].gamma = sol[static_cast<Eigen::Index>(3 * e)];
      w[e].delta = sol[static_cast<Eigen::Index>(3 * e + 1)];
      w[e].eps = sol[static_cast<Eigen::Index>(3 * e + 2)];
    }
  }
  return w;
}

// ---------------------------------------------------------------------------

ManufacturedSolution::ManufacturedSolution(const MetricGraph& graph, std::vector<Quartic> profiles)
    : graph_(graph), profiles_(std::move(profiles)) {
  if (profiles_.size() != graph_.num_edges()) throw Error(Errc::InvalidArgument, "need one profile per edge");
}

double ManufacturedSolution::value(EdgeId e, double x, double t) const {
  return profiles_[idx(e)].value(x) * std::sin(two_pi * t);
}
double ManufacturedSolution::dx(EdgeId e, double x, double t) const {
  return profiles_[idx(e)].d1(x) * std::sin(two_pi * t);
}
double ManufacturedSolution::dxx(EdgeId e, double x, double t) const {
  return profiles_[idx(e)].d2(x) * std::sin(two_pi * t);
}
double ManufacturedSolution::dt(EdgeId e, double x, double t) const {
  return profiles_[idx(e)].value(x) * two_pi * std::cos(two_pi * t);
}

SpaceTimeFn ManufacturedSolution::as_function() const {
  return [profiles = profiles_](EdgeId e, double x, double t) {
    return profiles[idx(e)].value(x) * std::sin(two_pi * t);
  };
}

double ManufacturedSolution::continuity_residual() const {
  double worst = 0.0;
  for (VertexId v : graph_.interior_vertices()) {
    auto inc = graph_.incident_edges(v);
    const double ref = profiles_[idx(inc[0])].value(graph_.endpoint_coordinate(inc[0], v));
    for (EdgeId e : inc) worst = std::max(worst, std::abs(profiles_[idx(e)].value(graph_.endpoint_coordinate(e, v)) - ref));
  }
  return worst;
}

double ManufacturedSolution::kirchhoff_residual(const SpaceFn& a) const {
  double worst = 0.0;
  for (VertexId v : graph_.interior_vertices()) {
    double sum = 0.0;
    for (EdgeId e : graph_.incident_edges(v)) {
      const double x = graph_.endpoint_coordinate(e, v);
      sum += a(e, x) * profiles_[idx(e)].d1(x) * graph_.incidence(e, v);
    }
    worst = std::max(worst, std::abs(sum));
  }
  return worst;
}

CoefficientSet demo_coefficients() {
  CoefficientSet c;
  c.a = [](EdgeId, double x) { return x * (x - 1.0) + 0.5; };
  c.a_dx = [](EdgeId, double x) { return 2.0 * x - 1.0; };
  c.b = [](EdgeId, double x) { return 0.5 * std::sin(std::numbers::pi * x); };
  c.p = [](EdgeId, double x) { return std::sin(std::numbers::pi * x); };
  return c;
}

ManufacturedSolution demo_solution() {
  const MetricGraph g = demo_graph();
  const CoefficientSet c = demo_coefficients();
  return ManufacturedSolution(g, solve_lower_coefficients(g, c.a, table1_alpha(), table1_beta()));
}

CoefficientSet derive_data(const ManufacturedSolution& solution, CoefficientSet coeffs) {
  if (!coeffs.a || !coeffs.a_dx) throw Error(Errc::InvalidArgument, "derive_data needs a and its derivative a_dx");
  const MetricGraph& g = solution.graph();
  std::vector<Quartic> w;
  for (std::size_t e = 0; e < g.num_edges(); ++e) w.push_back(solution.profile(edge_id(e)));

  coeffs.f = [w, a = coeffs.a, a_dx = coeffs.a_dx, b = coeffs.b, p = coeffs.p](EdgeId e, double x, double t) {
    const Quartic& q = w[idx(e)];
    const double s = std::sin(two_pi * t);
    const double y = q.value(x) * s;
    const double yx = q.d1(x) * s;
    const double yxx = q.d2(x) * s;
    const double yt = q.value(x) * two_pi * std::cos(two_pi * t);
    double f = yt - (a_dx(e, x) * yx + a(e, x) * yxx);
    if (b) f += b(e, x) * yx;
    if (p) f += p(e, x) * y;
    return f;
  };
  // g_v(t) = y through any incident edge; continuity makes the choice immaterial.
  std::vector<double> vertex_profile(g.num_vertices(), 0.0);
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    const EdgeId e = g.incident_edges(vertex_id(v))[0];
    vertex_profile[v] = w[idx(e)].value(g.endpoint_coordinate(e, vertex_id(v)));
  }
  coeffs.g = [vertex_profile](VertexId v, double t) { return vertex_profile[idx(v)] * std::sin(two_pi * t); };
  coeffs.y0 = [w](EdgeId e, double x) { return w[idx(e)].value(x) * std::sin(0.0); };
  return coeffs;
}

double l2_error(const Discretization& disc, const Vector& state, const ManufacturedSolution& solution, double t) {
  return disc.l2_distance_sq(state, solution.as_function(), t);
}

LambdaProfile lambda_profile(const ManufacturedSolution& solution, const CoefficientSet& coeffs,
                             const SubgraphPartition& partition, const BatchFamily& family,
                             std::span<const double> times, int elements_per_edge) {
  if (!coeffs.a || !coeffs.a_dx || !coeffs.f)
    throw Error(Errc::InvalidArgument, "lambda_profile needs a, a_dx and f");
  if (elements_per_edge < 1) throw Error(Errc::InvalidArgument, "need at least one element per edge");
  const MetricGraph& g = solution.graph();
  const std::size_t ne = g.num_edges();

  // E[(1 - c_e)^2] per edge, where c_e is the batch factor (1/pi_i or 0).
  std::vector<double> weight(ne, 0.0);
  for (std::size_t j = 0; j < family.size(); ++j) {
    const ZetaWeights z = zeta_weights(partition, family, j);
    for (std::size_t e = 0; e < ne; ++e) {
      const double d = 1.0 - z.edge_factor[e];
      weight[e] += family.probs[j] * d * d;
    }
  }

  // Quadrature points are fixed across times.
  const GaussRule rule = gauss_legendre(5);
  struct Point {
    EdgeId e;
    double x, w, a, a_dx, b, p;
  };
  std::vector<Point> pts;
  for (std::size_t ei = 0; ei < ne; ++ei) {
    if (weight[ei] == 0.0) continue;
    const EdgeId e = edge_id(ei);
    const double h = g.edge(e).length / elements_per_edge;
    for (int el = 0; el < elements_per_edge; ++el) {
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = (el + 0.5 * (1.0 + rule.nodes[q])) * h;
        pts.push_back({e, x, 0.5 * h * rule.weights[q] * weight[ei], coeffs.a(e, x), coeffs.a_dx(e, x),
                       coeffs.b ? coeffs.b(e, x) : 0.0, coeffs.p ? coeffs.p(e, x) : 0.0});
      }
    }
  }

  LambdaProfile out;
  out.times.assign(times.begin(), times.end());
  for (double t : times) {
    double total = 0.0;
    for (const Point& pt : pts) {
      const double y = solution.value(pt.e, pt.x, t);
      const double yx = solution.dx(pt.e, pt.x, t);
      const double yxx = solution.dxx(pt.e, pt.x, t);
      const double flux = pt.a_dx * yx + pt.a * yxx;
      const double conv = pt.b * yx;
      const double reac = pt.p * y;
      const double src = coeffs.f(pt.e, pt.x, t);
      total += pt.w * (flux * flux + conv * conv + reac * reac + src * src);
    }
    out.values.push_back(total);
  }
  for (std::size_t i = 1; i < out.times.size(); ++i)
    out.l1_norm += 0.5 * (out.times[i] - out.times[i - 1]) * (out.values[i] + out.values[i - 1]);
  return out;
}

std::vector<double> uniform_times(double t_final, std::size_t points) {
  if (points < 2) throw Error(Errc::InvalidArgument, "need at least two time points");
  std::vector<double> t(points);
  for (std::size_t i = 0; i < points; ++i) t[i] = t_final * static_cast<double>(i) / static_cast<double>(points - 1);
  return t;
}

}  // namespace graphrbm
