#include "graphrbm/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "graphrbm/error.hpp"

namespace graphrbm {

SubgraphPartition validate_partition(const MetricGraph& graph, std::vector<std::vector<EdgeId>> parts) {
  if (parts.empty()) throw Error(Errc::InvalidArgument, "partition has no parts");
  constexpr std::size_t unowned = std::numeric_limits<std::size_t>::max();

  SubgraphPartition p;
  p.graph_ = graph;
  p.owner_.assign(graph.num_edges(), unowned);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].empty()) throw Error(Errc::InvalidArgument, "part " + std::to_string(i + 1) + " is empty");
    std::sort(parts[i].begin(), parts[i].end());
    for (EdgeId e : parts[i]) {
      if (idx(e) >= graph.num_edges())
        throw Error(Errc::UnknownEdge, "part " + std::to_string(i + 1) + " references a nonexistent edge");
      if (p.owner_[idx(e)] != unowned)
        throw Error(Errc::OverlappingParts, "edge " + graph.edge_name(e) + " appears in parts " +
                                                std::to_string(p.owner_[idx(e)] + 1) + " and " +
                                                std::to_string(i + 1));
      p.owner_[idx(e)] = i;
    }
  }
  for (std::size_t e = 0; e < graph.num_edges(); ++e)
    if (p.owner_[e] == unowned)
      throw Error(Errc::UncoveredEdge, "edge " + graph.edge_name(edge_id(e)) + " belongs to no part");

  p.parts_ = std::move(parts);
  for (std::size_t i = 0; i < p.parts_.size(); ++i) {
    std::vector<std::size_t> local_degree(graph.num_vertices(), 0);
    for (EdgeId e : p.parts_[i]) {
      ++local_degree[idx(graph.edge(e).tail)];
      ++local_degree[idx(graph.edge(e).head)];
    }
    std::vector<VertexId> verts, interior;
    for (std::size_t v = 0; v < graph.num_vertices(); ++v) {
      if (local_degree[v] == 0) continue;
      verts.push_back(vertex_id(v));
      if (local_degree[v] >= 2 && graph.is_interior(vertex_id(v))) {
        if (local_degree[v] != graph.degree(vertex_id(v)))
          throw Error(Errc::InteriorVertexMissingEdge,
                      "vertex " + graph.vertex_name(vertex_id(v)) + " is interior to part " + std::to_string(i + 1) +
                          " but some of its edges lie in other parts");
        interior.push_back(vertex_id(v));
      }
    }
    p.part_vertices_.push_back(std::move(verts));
    p.part_interior_.push_back(std::move(interior));
  }
  return p;
}

namespace {

void check_batches(std::size_t num_parts, std::vector<std::vector<std::size_t>>& batches) {
  if (batches.empty()) throw Error(Errc::EmptyBatch, "batch family is empty");
  for (std::size_t j = 0; j < batches.size(); ++j) {
    auto& b = batches[j];
    if (b.empty()) throw Error(Errc::EmptyBatch, "batch " + std::to_string(j + 1) + " is empty");
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    if (b.back() >= num_parts)
      throw Error(Errc::BadPartIndex, "batch " + std::to_string(j + 1) + " references part " +
                                          std::to_string(b.back() + 1) + " of " + std::to_string(num_parts));
  }
}

void check_probs(std::size_t n, std::vector<double>& probs) {
  if (probs.size() != n)
    throw Error(Errc::BadProbabilityVector,
                std::to_string(probs.size()) + " probabilities for " + std::to_string(n) + " batches");
  double sum = 0.0;
  for (double q : probs) {
    if (!(q > 0.0) || q > 1.0) throw Error(Errc::BadProbabilityVector, "probabilities must lie in (0, 1]");
    sum += q;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(Errc::BadProbabilityVector, "probabilities sum to " + std::to_string(sum) + ", not 1");
  if (sum != 1.0)
    for (double& q : probs) q /= sum;
}

std::vector<double> compute_pi(std::size_t num_parts, const std::vector<std::vector<std::size_t>>& batches,
                               const std::vector<double>& probs) {
  std::vector<double> pi(num_parts, 0.0);
  for (std::size_t j = 0; j < batches.size(); ++j)
    for (std::size_t i : batches[j]) pi[i] += probs[j];
  for (std::size_t i = 0; i < num_parts; ++i)
    if (!(pi[i] > 0.0)) throw Error(Errc::ZeroNormalizer, "part " + std::to_string(i + 1) + " is never selected");
  return pi;
}

}  // namespace

BatchFamily make_batch_family(std::size_t num_parts, std::vector<std::vector<std::size_t>> batches,
                              std::vector<double> probs) {
  check_batches(num_parts, batches);
  check_probs(batches.size(), probs);
  BatchFamily f;
  f.pi = compute_pi(num_parts, batches, probs);
  f.batches = std::move(batches);
  f.probs = std::move(probs);
  return f;
}

std::vector<double> normalizers(std::size_t num_parts, const std::vector<std::vector<std::size_t>>& batches,
                                const std::vector<double>& probs) {
  return make_batch_family(num_parts, batches, probs).pi;
}

BatchView batch_view(const SubgraphPartition& partition, const BatchFamily& family, std::size_t j) {
  if (j >= family.size())
    throw Error(Errc::BadBatchIndex, "batch " + std::to_string(j + 1) + " of " + std::to_string(family.size()));
  const MetricGraph& g = partition.graph();

  BatchView view;
  view.batch = j;
  view.edge_active.assign(g.num_edges(), false);
  for (std::size_t i : family.batches[j])
    for (EdgeId e : partition.part_edges(i)) view.edge_active[idx(e)] = true;
  for (std::size_t e = 0; e < g.num_edges(); ++e)
    if (view.edge_active[e]) view.active_edges.push_back(edge_id(e));

  for (std::size_t vi = 0; vi < g.num_vertices(); ++vi) {
    VertexId v = vertex_id(vi);
    auto inc = g.incident_edges(v);
    std::size_t active = std::count_if(inc.begin(), inc.end(), [&](EdgeId e) { return view.edge_active[idx(e)]; });
    if (active == 0) continue;
    view.vertices.push_back(v);
    if (g.is_interior(v) && active == inc.size()) {
      view.interior.push_back(v);
    } else {
      view.boundary.push_back(v);
      (g.is_interior(v) ? view.interface : view.exterior_boundary).push_back(v);
    }
  }
  return view;
}

AssumptionA1Report check_assumption_a1(const SubgraphPartition& partition, const BatchFamily& family) {
  const MetricGraph& g = partition.graph();
  AssumptionA1Report report;
  std::vector<BatchView> views;
  for (std::size_t j = 0; j < family.size(); ++j) views.push_back(batch_view(partition, family, j));
  for (VertexId v : g.interior_vertices()) {
    bool found = false;
    for (const BatchView& view : views) {
      if (std::binary_search(view.interior.begin(), view.interior.end(), v)) {
        report.witness.emplace(v, view.batch);
        found = true;
        break;
      }
    }
    if (!found) report.violations.push_back(v);
  }
  report.holds = report.violations.empty();
  return report;
}

ZetaWeights zeta_weights(const SubgraphPartition& partition, const BatchFamily& family, std::size_t j) {
  BatchView view = batch_view(partition, family, j);
  const MetricGraph& g = partition.graph();
  ZetaWeights z;
  z.edge_factor.assign(g.num_edges(), 0.0);
  for (std::size_t i : family.batches[j])
    for (EdgeId e : partition.part_edges(i)) z.edge_factor[idx(e)] = 1.0 / family.pi[i];
  z.interface_mask.assign(g.num_vertices(), false);
  for (VertexId v : view.interface) z.interface_mask[idx(v)] = true;
  return z;
}

ZetaWeights unit_weights(const MetricGraph& graph) {
  return ZetaWeights{std::vector<double>(graph.num_edges(), 1.0), std::vector<bool>(graph.num_vertices(), false)};
}

double verify_unbiased(const SubgraphPartition& partition, const BatchFamily& family,
                       std::span<const EdgePoint> points, std::span<const EdgeFunction> psis) {
  std::vector<ZetaWeights> zetas;
  for (std::size_t j = 0; j < family.size(); ++j) zetas.push_back(zeta_weights(partition, family, j));
  double worst = 0.0;
  for (const EdgeFunction& psi : psis) {
    for (const EdgePoint& pt : points) {
      const double value = psi(pt.edge, pt.x);
      double mean = 0.0;
      for (std::size_t j = 0; j < family.size(); ++j) mean += family.probs[j] * zetas[j].on_edge(pt.edge, value);
      worst = std::max(worst, std::abs(mean - value));
    }
  }
  return worst;
}

SubgraphPartition demo_partition(const MetricGraph& demo) {
  auto edges = [&](std::initializer_list<const char*> names) {
    std::vector<EdgeId> out;
    for (const char* n : names) out.push_back(demo.find_edge(n));
    return out;
  };
  return validate_partition(demo, {edges({"e1", "e2", "e3"}), edges({"e4", "e5"}), edges({"e6", "e7"}),
                                   edges({"e8", "e9", "e10"})});
}

BatchFamily demo_batches_option1() {
  return make_batch_family(4, {{0}, {1}, {2}, {3}, {0, 1, 2}, {1, 2, 3}}, std::vector<double>(6, 1.0 / 6.0));
}

BatchFamily demo_batches_option2() {
  return make_batch_family(4, {{0}, {1}, {2}, {3}, {0, 1, 2, 3}}, std::vector<double>(5, 1.0 / 5.0));
}

BatchFamily single_batch(std::size_t num_parts) {
  std::vector<std::size_t> all(num_parts);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return make_batch_family(num_parts, {all}, {1.0});
}

}  // namespace graphrbm
