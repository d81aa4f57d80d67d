#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace graphrbm {

/// Dense 0-based vertex identifier.
enum class VertexId : int {};
/// Dense 0-based edge identifier.
enum class EdgeId : int {};

constexpr std::size_t idx(VertexId v) noexcept { return static_cast<std::size_t>(v); }
constexpr std::size_t idx(EdgeId e) noexcept { return static_cast<std::size_t>(e); }
constexpr VertexId vertex_id(std::size_t i) noexcept { return static_cast<VertexId>(i); }
constexpr EdgeId edge_id(std::size_t i) noexcept { return static_cast<EdgeId>(i); }

/// An oriented edge identified with the interval [0, length]; x = 0 sits at
/// the tail vertex and x = length at the head vertex.
struct Edge {
  VertexId tail;
  VertexId head;
  double length = 1.0;
};

/// Input record for build_graph; vertices are declared by first appearance.
struct EdgeSpec {
  std::string tail;
  std::string head;
  double length = 1.0;
  std::string name;  // defaults to "e<k>" (1-based) when empty
};

/// Connected finite metric graph with boundary/interior vertex classification.
/// Immutable after construction.
class MetricGraph {
public:
  std::size_t num_vertices() const noexcept { return vertex_names_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_.at(idx(e)); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  /// E(v): edges incident to v, in increasing id order.
  std::span<const EdgeId> incident_edges(VertexId v) const { return adjacency_.at(idx(v)); }
  std::size_t degree(VertexId v) const { return adjacency_.at(idx(v)).size(); }

  bool is_boundary(VertexId v) const { return boundary_mask_.at(idx(v)); }
  bool is_interior(VertexId v) const { return !is_boundary(v); }
  const std::vector<VertexId>& boundary_vertices() const noexcept { return boundary_; }
  const std::vector<VertexId>& interior_vertices() const noexcept { return interior_; }

  /// n_e(v): -1 if v is the tail of e, +1 if v is the head, 0 otherwise.
  int incidence(EdgeId e, VertexId v) const;

  /// Coordinate of v on edge e (0 at the tail, length at the head).
  double endpoint_coordinate(EdgeId e, VertexId v) const;

  const std::string& vertex_name(VertexId v) const { return vertex_names_.at(idx(v)); }
  const std::string& edge_name(EdgeId e) const { return edge_names_.at(idx(e)); }
  /// Throws Error(UnknownVertex) when absent.
  VertexId find_vertex(const std::string& name) const;
  /// Throws Error(UnknownEdge) when absent.
  EdgeId find_edge(const std::string& name) const;

  friend MetricGraph build_graph(const std::vector<EdgeSpec>&, const std::vector<std::string>&,
                                 const std::vector<std::string>&);

private:
  std::vector<Edge> edges_;
  std::vector<std::string> vertex_names_;
  std::vector<std::string> edge_names_;
  std::vector<std::vector<EdgeId>> adjacency_;
  std::vector<bool> boundary_mask_;
  std::vector<VertexId> boundary_;
  std::vector<VertexId> interior_;
};

/// Validates and builds a graph. Vertex ids are assigned to `vertex_order`
/// first, then to remaining names in order of first appearance in `edges`.
/// Errors: EmptyGraph, SelfLoop, NonpositiveLength, BoundaryVertexUnknown,
/// DisconnectedGraph (also raised for a declared vertex without edges).
MetricGraph build_graph(const std::vector<EdgeSpec>& edges, const std::vector<std::string>& boundary,
                        const std::vector<std::string>& vertex_order = {});

/// The 10-vertex, 10-edge demonstration graph with unit edges and boundary
/// {v1, v2, v9, v10}. The figure it comes from does not print orientations;
/// the ones used here are a reconstruction. Orientation only flips the sign
/// of n_e, and every Kirchhoff sum is invariant under that.
MetricGraph demo_graph();

}  // namespace graphrbm
