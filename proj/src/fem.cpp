#include "graphrbm/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SparseLU>

#include "graphrbm/error.hpp"

namespace graphrbm {

GaussRule gauss_legendre(int points) {
  switch (points) {
    case 1: return {{0.0}, {2.0}};
    case 2: {
      const double r = 1.0 / std::sqrt(3.0);
      return {{-r, r}, {1.0, 1.0}};
    }
    case 3: {
      const double r = std::sqrt(3.0 / 5.0);
      return {{-r, 0.0, r}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    }
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      return {{-b, -a, a, b}, {wb, wa, wa, wb}};
    }
    case 5: {
      const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      return {{-b, -a, 0.0, a, b}, {wb, wa, 128.0 / 225.0, wa, wb}};
    }
    default:
      throw Error(Errc::InvalidArgument, "Gauss-Legendre rule with " + std::to_string(points) + " points");
  }
}

// ---------------------------------------------------------------------------
// DofMap

DofMap::DofMap(const MetricGraph& graph, Mesh mesh, std::span<const VertexId> dirichlet)
    : mesh_(mesh), num_vertices_(graph.num_vertices()) {
  if (mesh.nodes_per_edge < 1) throw Error(Errc::InvalidArgument, "mesh needs at least one interior node per edge");
  for (const Edge& e : graph.edges()) {
    tails_.push_back(static_cast<int>(idx(e.tail)));
    heads_.push_back(static_cast<int>(idx(e.head)));
  }
  constrained_.assign(num_vertices_ + graph.num_edges() * static_cast<std::size_t>(mesh.nodes_per_edge), false);
  for (VertexId v : dirichlet) {
    if (idx(v) >= num_vertices_) throw Error(Errc::UnknownVertex, "Dirichlet vertex id out of range");
    constrained_[idx(v)] = true;
  }
}

std::vector<int> DofMap::free_dofs() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < constrained_.size(); ++i)
    if (!constrained_[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> DofMap::constrained_dofs() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < constrained_.size(); ++i)
    if (constrained_[i]) out.push_back(static_cast<int>(i));
  return out;
}

DofMap build_dofmap(const MetricGraph& graph, Mesh mesh, std::span<const VertexId> dirichlet_vertices) {
  return DofMap(graph, mesh, dirichlet_vertices);
}

// ---------------------------------------------------------------------------
// Restrictions

namespace {

SubDofMap make_sub(const MetricGraph& graph, const DofMap& dofmap, const std::vector<bool>& edge_active,
                   const std::vector<bool>& extra_constrained) {
  const int n = dofmap.mesh().nodes_per_edge;
  std::vector<bool> present(dofmap.size(), false);
  SubDofMap sub;
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    if (!edge_active[e]) continue;
    sub.edges.push_back(edge_id(e));
    for (int k = 0; k <= n + 1; ++k) present[static_cast<std::size_t>(dofmap.dof(edge_id(e), k))] = true;
  }
  sub.local.assign(dofmap.size(), -1);
  for (std::size_t d = 0; d < dofmap.size(); ++d) {
    if (!present[d]) continue;
    sub.local[d] = static_cast<int>(sub.global.size());
    sub.global.push_back(static_cast<int>(d));
    sub.constrained.push_back(dofmap.is_constrained(static_cast<int>(d)) ||
                              (d < extra_constrained.size() && extra_constrained[d]));
  }
  return sub;
}

}  // namespace

SubDofMap full_restriction(const MetricGraph& graph, const DofMap& dofmap) {
  return make_sub(graph, dofmap, std::vector<bool>(graph.num_edges(), true), {});
}

SubDofMap restrict_to_batch(const MetricGraph& graph, const DofMap& dofmap, const BatchView& view) {
  std::vector<bool> interface(graph.num_vertices(), false);
  for (VertexId v : view.interface) interface[static_cast<std::size_t>(dofmap.vertex_dof(v))] = true;
  return make_sub(graph, dofmap, view.edge_active, interface);
}

// ---------------------------------------------------------------------------
// Dirichlet elimination

ReducedSystem apply_dirichlet(const SparseMatrix& a, const Vector& b, const std::vector<bool>& constrained,
                              const Vector& values) {
  const auto n = static_cast<Eigen::Index>(constrained.size());
  if (a.rows() != n || a.cols() != n || b.size() != n)
    throw Error(Errc::InvalidArgument, "system size does not match the constraint mask");
  if (values.size() != n) throw Error(Errc::MissingBoundaryValue, "boundary value vector has the wrong size");

  ReducedSystem out;
  std::vector<int> local(constrained.size(), -1);
  for (std::size_t i = 0; i < constrained.size(); ++i) {
    if (constrained[i]) {
      if (std::isnan(values[static_cast<Eigen::Index>(i)]))
        throw Error(Errc::MissingBoundaryValue, "no boundary value for constrained dof " + std::to_string(i));
      continue;
    }
    local[i] = static_cast<int>(out.free.size());
    out.free.push_back(static_cast<int>(i));
  }
  const auto nf = static_cast<Eigen::Index>(out.free.size());
  out.rhs.resize(nf);
  for (Eigen::Index i = 0; i < nf; ++i) out.rhs[i] = b[out.free[static_cast<std::size_t>(i)]];

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (int col = 0; col < a.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      const int r = local[static_cast<std::size_t>(it.row())];
      if (r < 0) continue;
      const int c = local[static_cast<std::size_t>(it.col())];
      if (c >= 0)
        trip.emplace_back(r, c, it.value());
      else
        out.rhs[r] -= it.value() * values[it.col()];
    }
  }
  out.matrix.resize(nf, nf);
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Vector embed_solution(const ReducedSystem& reduced, const Vector& x_free, const Vector& values) {
  Vector out = values;
  for (std::size_t i = 0; i < reduced.free.size(); ++i) out[reduced.free[i]] = x_free[static_cast<Eigen::Index>(i)];
  return out;
}

// ---------------------------------------------------------------------------
// Discretization

Discretization::Discretization(const MetricGraph& graph, Mesh mesh, CoefficientSet coeffs)
    : graph_(graph), coeffs_(std::move(coeffs)), dofmap_(graph, mesh, graph.boundary_vertices()) {
  if (!coeffs_.a) throw Error(Errc::InvalidArgument, "diffusion coefficient a is required");
  const GaussRule rule = gauss_legendre(3);
  const int n = mesh.nodes_per_edge;

  blocks_.resize(graph.num_edges());
  quad_x_.resize(graph.num_edges());
  for (std::size_t ei = 0; ei < graph.num_edges(); ++ei) {
    const EdgeId e = edge_id(ei);
    const double h = mesh.spacing(graph.edge(e));
    auto& blocks = blocks_[ei];
    auto& qx = quad_x_[ei];
    blocks.resize(static_cast<std::size_t>(n + 1));
    qx.reserve(static_cast<std::size_t>(3 * (n + 1)));
    for (int el = 0; el <= n; ++el) {
      const double x0 = el * h;
      ElementBlock blk{};
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double s = 0.5 * (1.0 + rule.nodes[q]);
        const double x = x0 + s * h;
        const double w = 0.5 * h * rule.weights[q];
        qx.push_back(x);
        const double a = coeffs_.a(e, x);
        if (!(a > 0.0))
          throw Error(Errc::NonellipticCoefficient,
                      "a(" + std::to_string(x) + ") = " + std::to_string(a) + " on edge " + graph.edge_name(e));
        const double b = coeffs_.b ? coeffs_.b(e, x) : 0.0;
        const double p = coeffs_.p ? coeffs_.p(e, x) : 0.0;
        const std::array<double, 2> phi{1.0 - s, s};
        const std::array<double, 2> dphi{-1.0 / h, 1.0 / h};
        for (int r = 0; r < 2; ++r) {
          for (int c = 0; c < 2; ++c) {
            blk.mass[2 * r + c] += w * phi[r] * phi[c];
            blk.stiffness[2 * r + c] += w * a * dphi[r] * dphi[c];
            blk.convection[2 * r + c] += w * b * dphi[c] * phi[r];
            blk.reaction[2 * r + c] += w * p * phi[r] * phi[c];
          }
        }
      }
      blocks[static_cast<std::size_t>(el)] = blk;
    }
  }
  full_mass_ = assemble_full().mass;
}

AssembledOperators Discretization::assemble(const SubDofMap& sub, const ZetaWeights& weights) const {
  const int n = mesh().nodes_per_edge;
  std::vector<Eigen::Triplet<double>> tm, tk, tc, tp;
  const std::size_t reserve = sub.edges.size() * static_cast<std::size_t>(4 * (n + 1));
  tm.reserve(reserve);
  tk.reserve(reserve);
  tc.reserve(reserve);
  tp.reserve(reserve);
  for (EdgeId e : sub.edges) {
    const double s = weights.edge_factor[idx(e)];
    if (s == 0.0) continue;
    if (s < 0.0) throw Error(Errc::NonellipticCoefficient, "negative batch factor on edge " + graph_.edge_name(e));
    const auto& blocks = blocks_[idx(e)];
    for (int el = 0; el <= n; ++el) {
      const std::array<int, 2> loc{sub.local[static_cast<std::size_t>(dofmap_.dof(e, el))],
                                   sub.local[static_cast<std::size_t>(dofmap_.dof(e, el + 1))]};
      const ElementBlock& blk = blocks[static_cast<std::size_t>(el)];
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          const int k = 2 * r + c;
          tm.emplace_back(loc[r], loc[c], blk.mass[k]);
          tk.emplace_back(loc[r], loc[c], s * blk.stiffness[k]);
          tc.emplace_back(loc[r], loc[c], s * blk.convection[k]);
          tp.emplace_back(loc[r], loc[c], s * blk.reaction[k]);
        }
      }
    }
  }
  const auto size = static_cast<Eigen::Index>(sub.size());
  AssembledOperators ops;
  for (auto [mat, trip] : {std::pair{&ops.mass, &tm}, std::pair{&ops.stiffness, &tk},
                           std::pair{&ops.convection, &tc}, std::pair{&ops.reaction, &tp}}) {
    mat->resize(size, size);
    mat->setFromTriplets(trip->begin(), trip->end());
  }
  return ops;
}

AssembledOperators Discretization::assemble_full() const {
  return assemble(full_restriction(graph_, dofmap_), unit_weights(graph_));
}

void Discretization::load(const SubDofMap& sub, const ZetaWeights& weights, double t, Vector& out) const {
  out.setZero(static_cast<Eigen::Index>(sub.size()));
  if (!coeffs_.f) return;
  const GaussRule rule = gauss_legendre(3);
  const int n = mesh().nodes_per_edge;
  std::array<std::array<double, 2>, 3> phi{};
  for (std::size_t q = 0; q < 3; ++q) {
    const double s = 0.5 * (1.0 + rule.nodes[q]);
    phi[q] = {1.0 - s, s};
  }
  for (EdgeId e : sub.edges) {
    const double factor = weights.edge_factor[idx(e)];
    if (factor == 0.0) continue;
    const double h = mesh().spacing(graph_.edge(e));
    const auto& qx = quad_x_[idx(e)];
    for (int el = 0; el <= n; ++el) {
      double r0 = 0.0, r1 = 0.0;
      for (std::size_t q = 0; q < 3; ++q) {
        const double w = 0.5 * h * rule.weights[q];
        const double fv = coeffs_.f(e, qx[static_cast<std::size_t>(3 * el) + q], t);
        r0 += w * fv * phi[q][0];
        r1 += w * fv * phi[q][1];
      }
      out[sub.local[static_cast<std::size_t>(dofmap_.dof(e, el))]] += factor * r0;
      out[sub.local[static_cast<std::size_t>(dofmap_.dof(e, el + 1))]] += factor * r1;
    }
  }
}

Vector Discretization::interpolate(const SpaceFn& fn) const {
  return interpolate([&fn](EdgeId e, double x, double) { return fn(e, x); }, 0.0);
}

Vector Discretization::interpolate(const SpaceTimeFn& fn, double t) const {
  const int n = mesh().nodes_per_edge;
  Vector u = Vector::Zero(static_cast<Eigen::Index>(num_dofs()));
  for (std::size_t ei = 0; ei < graph_.num_edges(); ++ei) {
    const EdgeId e = edge_id(ei);
    const double h = mesh().spacing(graph_.edge(e));
    for (int k = 0; k <= n + 1; ++k) u[dofmap_.dof(e, k)] = fn(e, k * h, t);
  }
  return u;
}

Vector Discretization::initial_state() const {
  Vector u = coeffs_.y0 ? interpolate(coeffs_.y0) : Vector::Zero(static_cast<Eigen::Index>(num_dofs()));
  return u;
}

void Discretization::apply_boundary(double t, Vector& u) const {
  for (VertexId v : graph_.boundary_vertices()) {
    if (!coeffs_.g) throw Error(Errc::MissingBoundaryValue, "no boundary data for vertex " + graph_.vertex_name(v));
    u[dofmap_.vertex_dof(v)] = coeffs_.g(v, t);
  }
}

double Discretization::evaluate(const Vector& u, EdgeId e, double x) const {
  const int n = mesh().nodes_per_edge;
  const double h = mesh().spacing(graph_.edge(e));
  int el = static_cast<int>(std::floor(x / h));
  el = std::clamp(el, 0, n);
  const double s = (x - el * h) / h;
  return (1.0 - s) * u[dofmap_.dof(e, el)] + s * u[dofmap_.dof(e, el + 1)];
}

double Discretization::l2_distance_sq(const Vector& u, const SpaceTimeFn& fn, double t) const {
  const GaussRule rule = gauss_legendre(5);
  const int n = mesh().nodes_per_edge;
  double total = 0.0;
  for (std::size_t ei = 0; ei < graph_.num_edges(); ++ei) {
    const EdgeId e = edge_id(ei);
    const double h = mesh().spacing(graph_.edge(e));
    for (int el = 0; el <= n; ++el) {
      const double u0 = u[dofmap_.dof(e, el)];
      const double u1 = u[dofmap_.dof(e, el + 1)];
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double s = 0.5 * (1.0 + rule.nodes[q]);
        const double diff = (1.0 - s) * u0 + s * u1 - fn(e, el * h + s * h, t);
        total += 0.5 * h * rule.weights[q] * diff * diff;
      }
    }
  }
  return total;
}

double Discretization::l2_distance_sq(const Vector& u, const Vector& v) const {
  const Vector d = u - v;
  return d.dot(full_mass_ * d);
}

double Discretization::energy(const Vector& u) const { return u.dot(full_mass_ * u); }

Vector Discretization::solve_steady(double t) const {
  const AssembledOperators ops = assemble_full();
  const SparseMatrix a = ops.stiffness + ops.convection + ops.reaction;
  const SubDofMap full = full_restriction(graph_, dofmap_);
  Vector f;
  load(full, unit_weights(graph_), t, f);
  Vector values = Vector::Constant(static_cast<Eigen::Index>(num_dofs()), std::numeric_limits<double>::quiet_NaN());
  apply_boundary(t, values);
  ReducedSystem red = apply_dirichlet(a, f, dofmap_.constrained(), values);
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(red.matrix);
  if (lu.info() != Eigen::Success) throw Error(Errc::SingularSystem, "steady operator factorization failed");
  return embed_solution(red, lu.solve(red.rhs), values);
}

// ---------------------------------------------------------------------------

double convection_kirchhoff_residual(const MetricGraph& graph, const SpaceFn& b) {
  if (!b) return 0.0;
  double worst = 0.0;
  for (VertexId v : graph.interior_vertices()) {
    double sum = 0.0;
    for (EdgeId e : graph.incident_edges(v)) sum += b(e, graph.endpoint_coordinate(e, v)) * graph.incidence(e, v);
    worst = std::max(worst, std::abs(sum));
  }
  return worst;
}

std::vector<double> discrete_flux_imbalance(const Discretization& disc, const Vector& u) {
  const MetricGraph& g = disc.graph();
  const DofMap& dm = disc.dofmap();
  const int n = dm.mesh().nodes_per_edge;
  std::vector<double> out;
  for (VertexId v : g.interior_vertices()) {
    double sum = 0.0;
    for (EdgeId e : g.incident_edges(v)) {
      const double h = dm.mesh().spacing(g.edge(e));
      const bool at_tail = g.edge(e).tail == v;
      const double slope = at_tail ? (u[dm.dof(e, 1)] - u[dm.dof(e, 0)]) / h
                                   : (u[dm.dof(e, n + 1)] - u[dm.dof(e, n)]) / h;
      sum += disc.coefficients().a(e, g.endpoint_coordinate(e, v)) * slope * g.incidence(e, v);
    }
    out.push_back(sum);
  }
  return out;
}

}  // namespace graphrbm
