#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "graphrbm/decomposition.hpp"
#include "graphrbm/metric_graph.hpp"

namespace graphrbm {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

using SpaceFn = std::function<double(EdgeId, double)>;
using SpaceTimeFn = std::function<double(EdgeId, double, double)>;
using BoundaryFn = std::function<double(VertexId, double)>;

/// Uniform P1 mesh with the same number of interior nodes on every edge.
struct Mesh {
  int nodes_per_edge = 100;

  double spacing(const Edge& e) const { return e.length / (nodes_per_edge + 1); }
};

/// PDE data. Empty b, p, f mean zero; empty y0 means zero initial data.
/// a_dx (derivative of a) is only needed by the manufactured-solution tools.
struct CoefficientSet {
  SpaceFn a;
  SpaceFn a_dx;
  SpaceFn b;
  SpaceFn p;
  SpaceTimeFn f;
  BoundaryFn g;
  SpaceFn y0;
};

/// Vertex dofs come first (dof v for vertex v, shared by all incident edges,
/// which builds in continuity), followed by the interior nodes of each edge.
class DofMap {
public:
  DofMap() = default;
  DofMap(const MetricGraph& graph, Mesh mesh, std::span<const VertexId> dirichlet);

  std::size_t size() const noexcept { return constrained_.size(); }
  std::size_t num_vertices() const noexcept { return num_vertices_; }
  const Mesh& mesh() const noexcept { return mesh_; }

  /// Global dof of local node `k` on edge e; k = 0 is the tail vertex and
  /// k = n + 1 the head vertex.
  int dof(EdgeId e, int k) const {
    if (k == 0) return tails_[idx(e)];
    if (k == mesh_.nodes_per_edge + 1) return heads_[idx(e)];
    return static_cast<int>(num_vertices_ + idx(e) * mesh_.nodes_per_edge) + (k - 1);
  }
  int vertex_dof(VertexId v) const { return static_cast<int>(idx(v)); }
  /// Edge owning an interior dof, or nullopt-like -1 for vertex dofs.
  int edge_of(int dof) const {
    return dof < static_cast<int>(num_vertices_) ? -1
                                                 : (dof - static_cast<int>(num_vertices_)) / mesh_.nodes_per_edge;
  }

  bool is_constrained(int dof) const { return constrained_[static_cast<std::size_t>(dof)]; }
  const std::vector<bool>& constrained() const noexcept { return constrained_; }
  std::vector<int> free_dofs() const;
  std::vector<int> constrained_dofs() const;

private:
  Mesh mesh_;
  std::size_t num_vertices_ = 0;
  std::vector<int> tails_, heads_;
  std::vector<bool> constrained_;
};

/// Errors: UnknownVertex for an out-of-range Dirichlet vertex.
DofMap build_dofmap(const MetricGraph& graph, Mesh mesh, std::span<const VertexId> dirichlet_vertices);

/// A subset of the global dofs with a local numbering and its own Dirichlet
/// set. The full-graph restriction is the identity.
struct SubDofMap {
  std::vector<int> global;        // local -> global
  std::vector<int> local;         // global -> local, -1 when absent
  std::vector<bool> constrained;  // by local index
  std::vector<EdgeId> edges;      // edges whose elements are assembled

  std::size_t size() const noexcept { return global.size(); }
};

SubDofMap full_restriction(const MetricGraph& graph, const DofMap& dofmap);

/// Dofs of the active edges plus their vertices. Vertices in V_0^j stay free,
/// interface vertices become Dirichlet, exterior boundary vertices keep the
/// Dirichlet status they have in `dofmap`.
SubDofMap restrict_to_batch(const MetricGraph& graph, const DofMap& dofmap, const BatchView& view);

/// Mass, stiffness (a), convection (b) and reaction (p) matrices over a
/// SubDofMap numbering. Row i tests against phi_i, column j is the trial.
struct AssembledOperators {
  SparseMatrix mass;
  SparseMatrix stiffness;
  SparseMatrix convection;
  SparseMatrix reaction;
};

/// Algebraic elimination of constrained dofs from A x = b.
struct ReducedSystem {
  SparseMatrix matrix;   // free-free block
  Vector rhs;            // b_f - A_fc g
  std::vector<int> free;
};

/// Errors: MissingBoundaryValue when a constrained entry of `values` is NaN
/// or the sizes disagree.
ReducedSystem apply_dirichlet(const SparseMatrix& a, const Vector& b, const std::vector<bool>& constrained,
                              const Vector& values);
/// Scatter a free-dof solution back into a full vector holding `values` on
/// constrained dofs.
Vector embed_solution(const ReducedSystem& reduced, const Vector& x_free, const Vector& values);

/// P1 discretization of a coefficient set on a graph. Element integrals use
/// 3-point Gauss-Legendre quadrature; per-element matrices are computed once
/// and reused for every (scaled, restricted) assembly.
class Discretization {
public:
  /// Dirichlet dofs are the graph's boundary vertices.
  Discretization(const MetricGraph& graph, Mesh mesh, CoefficientSet coeffs);

  const MetricGraph& graph() const noexcept { return graph_; }
  const DofMap& dofmap() const noexcept { return dofmap_; }
  const CoefficientSet& coefficients() const noexcept { return coeffs_; }
  const Mesh& mesh() const noexcept { return dofmap_.mesh(); }
  std::size_t num_dofs() const noexcept { return dofmap_.size(); }

  /// Edge contributions are multiplied by weights.edge_factor[e] (mass
  /// excepted) and edges with factor zero or outside sub.edges are skipped.
  /// Errors: NonellipticCoefficient.
  AssembledOperators assemble(const SubDofMap& sub, const ZetaWeights& weights) const;
  AssembledOperators assemble_full() const;

  /// (zeta_1 f(., t), phi_i) over the edges of `sub`, in local numbering.
  void load(const SubDofMap& sub, const ZetaWeights& weights, double t, Vector& out) const;

  /// Nodal interpolant of fn(e, x) in global numbering.
  Vector interpolate(const SpaceFn& fn) const;
  Vector interpolate(const SpaceTimeFn& fn, double t) const;
  Vector initial_state() const;

  /// g(t) written into the constrained entries of `u` (global numbering).
  void apply_boundary(double t, Vector& u) const;

  /// Value of the P1 function `u` at x on edge e.
  double evaluate(const Vector& u, EdgeId e, double x) const;

  /// ||u - fn(., t)||^2_{L2} by 5-point Gauss quadrature per element.
  double l2_distance_sq(const Vector& u, const SpaceTimeFn& fn, double t) const;
  /// ||u - v||^2_{L2} for two P1 functions.
  double l2_distance_sq(const Vector& u, const Vector& v) const;

  /// Energy u . (M u) with the full mass matrix.
  double energy(const Vector& u) const;

  /// Steady problem (K + C + P) u = F(t) with Dirichlet data g(t).
  Vector solve_steady(double t) const;

private:
  struct ElementBlock {
    std::array<double, 4> mass, stiffness, convection, reaction;  // row-major 2x2
  };

  MetricGraph graph_;
  CoefficientSet coeffs_;
  DofMap dofmap_;
  std::vector<std::vector<ElementBlock>> blocks_;  // per edge, per element
  std::vector<std::vector<double>> quad_x_;        // per edge, 3 points per element
  SparseMatrix full_mass_;
};

/// Gauss-Legendre nodes and weights on [-1, 1] for 1 to 5 points.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int points);

/// max over interior vertices of |sum_e b_e(v) n_e(v)|.
double convection_kirchhoff_residual(const MetricGraph& graph, const SpaceFn& b);

/// One-sided P1 flux imbalance sum_e a_e(v) d_x u_e(v) n_e(v) at every interior
/// vertex (indexed like graph.interior_vertices()).
std::vector<double> discrete_flux_imbalance(const Discretization& disc, const Vector& u);

}  // namespace graphrbm
