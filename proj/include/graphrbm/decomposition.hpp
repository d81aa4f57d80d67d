#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "graphrbm/metric_graph.hpp"

namespace graphrbm {

/// Pairwise edge-disjoint cover of the graph by subgraphs G_s^i.
/// Part indices are 0-based here; file formats use 1-based indices.
class SubgraphPartition {
public:
  std::size_t num_parts() const noexcept { return parts_.size(); }
  std::span<const EdgeId> part_edges(std::size_t i) const { return parts_.at(i); }
  /// V_s^i in increasing id order.
  std::span<const VertexId> part_vertices(std::size_t i) const { return part_vertices_.at(i); }
  /// V_{s,0}^i: non-boundary vertices with at least two edges in part i.
  std::span<const VertexId> part_interior(std::size_t i) const { return part_interior_.at(i); }
  /// Part index owning edge e.
  std::size_t owner(EdgeId e) const { return owner_.at(idx(e)); }
  const MetricGraph& graph() const noexcept { return graph_; }

  friend SubgraphPartition validate_partition(const MetricGraph&, std::vector<std::vector<EdgeId>>);

private:
  MetricGraph graph_;
  std::vector<std::vector<EdgeId>> parts_;
  std::vector<std::vector<VertexId>> part_vertices_;
  std::vector<std::vector<VertexId>> part_interior_;
  std::vector<std::size_t> owner_;
};

/// Errors: InvalidArgument (no parts), UnknownEdge, OverlappingParts,
/// UncoveredEdge, InteriorVertexMissingEdge. The partition keeps its own copy
/// of the graph.
SubgraphPartition validate_partition(const MetricGraph& graph, std::vector<std::vector<EdgeId>> parts);

/// Batches B_j of part indices with selection probabilities p_j and the
/// derived normalizers pi_i = sum_{j : i in B_j} p_j.
struct BatchFamily {
  std::vector<std::vector<std::size_t>> batches;  // 0-based part indices, sorted
  std::vector<double> probs;
  std::vector<double> pi;

  std::size_t size() const noexcept { return batches.size(); }
};

/// Validates probabilities (positive, sum within 1e-12 of one; small
/// residuals are renormalized) and computes pi. Errors: EmptyBatch,
/// BadPartIndex, BadProbabilityVector, ZeroNormalizer.
BatchFamily make_batch_family(std::size_t num_parts, std::vector<std::vector<std::size_t>> batches,
                              std::vector<double> probs);

/// pi_i for every part. Same validation as make_batch_family.
std::vector<double> normalizers(std::size_t num_parts, const std::vector<std::vector<std::size_t>>& batches,
                                const std::vector<double>& probs);

/// Vertex sets of the active subgraph G^j.
struct BatchView {
  std::size_t batch = 0;
  std::vector<EdgeId> active_edges;          // E^j
  std::vector<VertexId> vertices;            // V^j
  std::vector<VertexId> interior;            // V_0^j
  std::vector<VertexId> boundary;            // V_b^j
  std::vector<VertexId> interface;           // V_b^j ∩ V_0
  std::vector<VertexId> exterior_boundary;   // V_b^j ∩ V_b
  std::vector<bool> edge_active;             // indexed by edge id
};

/// V_0^j collects the graph-interior vertices of V^j whose incident edges are
/// all active; everything else in V^j is in V_b^j. Errors: BadBatchIndex.
BatchView batch_view(const SubgraphPartition& partition, const BatchFamily& family, std::size_t j);

struct AssumptionA1Report {
  bool holds = false;
  std::map<VertexId, std::size_t> witness;  // interior vertex -> first batch j with v in V_0^j
  std::vector<VertexId> violations;
};

/// Every interior vertex of the graph must be interior to some active subgraph.
AssumptionA1Report check_assumption_a1(const SubgraphPartition& partition, const BatchFamily& family);

/// Randomized coefficient scaling for one batch: factor 1/pi_i on every edge
/// of an active part i, 0 on inactive edges, and interface vertices masked.
struct ZetaWeights {
  std::vector<double> edge_factor;     // indexed by edge id
  std::vector<bool> interface_mask;    // indexed by vertex id; true means zeta(v) = 0

  /// zeta_psi at an interior point of edge e, given psi there.
  double on_edge(EdgeId e, double psi) const { return edge_factor[idx(e)] * psi; }
  /// zeta_psi at vertex v seen through the adjacent edge e; each edge
  /// endpoint carries the factor of the part owning that edge.
  double at_vertex(VertexId v, EdgeId e, double psi) const {
    return interface_mask[idx(v)] ? 0.0 : edge_factor[idx(e)] * psi;
  }
  bool is_active(EdgeId e) const { return edge_factor[idx(e)] != 0.0; }
};

/// Errors: BadBatchIndex.
ZetaWeights zeta_weights(const SubgraphPartition& partition, const BatchFamily& family, std::size_t j);

/// Unit weights (N = 1 with B_1 = [M]): zeta_psi = psi.
ZetaWeights unit_weights(const MetricGraph& graph);

/// A point x on edge e.
struct EdgePoint {
  EdgeId edge;
  double x;
};

using EdgeFunction = std::function<double(EdgeId, double)>;

/// max over points and psi of |sum_j p_j zeta^j_psi(x) - psi(x)|.
double verify_unbiased(const SubgraphPartition& partition, const BatchFamily& family,
                       std::span<const EdgePoint> points, std::span<const EdgeFunction> psis);

/// The decomposition {e1,e2,e3}, {e4,e5}, {e6,e7}, {e8,e9,e10} of demo_graph().
SubgraphPartition demo_partition(const MetricGraph& demo);

/// Singletons {1},{2},{3},{4} plus {1,2,3} and {2,3,4}, p_j = 1/6.
BatchFamily demo_batches_option1();
/// Singletons {1},{2},{3},{4} plus the whole graph [4], p_j = 1/5.
BatchFamily demo_batches_option2();
/// One batch holding every part with probability one.
BatchFamily single_batch(std::size_t num_parts);

}  // namespace graphrbm
