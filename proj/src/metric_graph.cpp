#include "graphrbm/metric_graph.hpp"

#include <algorithm>
#include <unordered_map>

#include "graphrbm/error.hpp"

namespace graphrbm {

int MetricGraph::incidence(EdgeId e, VertexId v) const {
  const Edge& ed = edge(e);
  if (ed.tail == v) return -1;
  if (ed.head == v) return 1;
  return 0;
}

double MetricGraph::endpoint_coordinate(EdgeId e, VertexId v) const {
  const Edge& ed = edge(e);
  if (ed.tail == v) return 0.0;
  if (ed.head == v) return ed.length;
  throw Error(Errc::InvalidArgument,
              "vertex " + vertex_name(v) + " is not an endpoint of edge " + edge_name(e));
}

VertexId MetricGraph::find_vertex(const std::string& name) const {
  auto it = std::find(vertex_names_.begin(), vertex_names_.end(), name);
  if (it == vertex_names_.end()) throw Error(Errc::UnknownVertex, "no vertex named '" + name + "'");
  return vertex_id(static_cast<std::size_t>(it - vertex_names_.begin()));
}

EdgeId MetricGraph::find_edge(const std::string& name) const {
  auto it = std::find(edge_names_.begin(), edge_names_.end(), name);
  if (it == edge_names_.end()) throw Error(Errc::UnknownEdge, "no edge named '" + name + "'");
  return edge_id(static_cast<std::size_t>(it - edge_names_.begin()));
}

MetricGraph build_graph(const std::vector<EdgeSpec>& edges, const std::vector<std::string>& boundary,
                        const std::vector<std::string>& vertex_order) {
  if (edges.empty()) throw Error(Errc::EmptyGraph, "graph has no edges");

  MetricGraph g;
  std::unordered_map<std::string, VertexId> ids;
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = ids.try_emplace(name, vertex_id(g.vertex_names_.size()));
    if (inserted) g.vertex_names_.push_back(name);
    return it->second;
  };
  for (const std::string& name : vertex_order) intern(name);

  for (std::size_t k = 0; k < edges.size(); ++k) {
    const EdgeSpec& spec = edges[k];
    std::string name = spec.name.empty() ? "e" + std::to_string(k + 1) : spec.name;
    if (spec.tail == spec.head) throw Error(Errc::SelfLoop, "edge " + name + " is a self-loop at " + spec.tail);
    if (!(spec.length > 0.0)) throw Error(Errc::NonpositiveLength, "edge " + name + " has non-positive length");
    if (std::find(g.edge_names_.begin(), g.edge_names_.end(), name) != g.edge_names_.end())
      throw Error(Errc::InvalidArgument, "duplicate edge name '" + name + "'");
    VertexId t = intern(spec.tail);
    VertexId h = intern(spec.head);
    g.edges_.push_back(Edge{t, h, spec.length});
    g.edge_names_.push_back(std::move(name));
  }

  const std::size_t nv = g.vertex_names_.size();
  g.adjacency_.assign(nv, {});
  for (std::size_t k = 0; k < g.edges_.size(); ++k) {
    g.adjacency_[idx(g.edges_[k].tail)].push_back(edge_id(k));
    g.adjacency_[idx(g.edges_[k].head)].push_back(edge_id(k));
  }

  g.boundary_mask_.assign(nv, false);
  for (const std::string& name : boundary) {
    auto it = ids.find(name);
    if (it == ids.end())
      throw Error(Errc::BoundaryVertexUnknown, "boundary vertex '" + name + "' does not appear in any edge");
    g.boundary_mask_[idx(it->second)] = true;
  }
  for (std::size_t v = 0; v < nv; ++v)
    (g.boundary_mask_[v] ? g.boundary_ : g.interior_).push_back(vertex_id(v));

  // Connectivity by DFS from vertex 0.
  std::vector<bool> seen(nv, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (EdgeId e : g.adjacency_[v]) {
      const Edge& ed = g.edges_[idx(e)];
      std::size_t w = idx(ed.tail) == v ? idx(ed.head) : idx(ed.tail);
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != nv)
    throw Error(Errc::DisconnectedGraph,
                "only " + std::to_string(reached) + " of " + std::to_string(nv) + " vertices are reachable");
  return g;
}

MetricGraph demo_graph() {
  std::vector<EdgeSpec> edges = {
      {"v1", "v3", 1.0, "e1"}, {"v2", "v3", 1.0, "e2"}, {"v3", "v4", 1.0, "e3"},  {"v4", "v5", 1.0, "e4"},
      {"v5", "v7", 1.0, "e5"}, {"v4", "v6", 1.0, "e6"}, {"v6", "v7", 1.0, "e7"},  {"v7", "v8", 1.0, "e8"},
      {"v8", "v9", 1.0, "e9"}, {"v8", "v10", 1.0, "e10"},
  };
  // Vertex ids follow the labels v1..v10 rather than first appearance.
  std::vector<std::string> order;
  for (int k = 1; k <= 10; ++k) order.push_back("v" + std::to_string(k));
  return build_graph(edges, {"v1", "v2", "v9", "v10"}, order);
}

}  // namespace graphrbm
