#include <doctest.h>

#include "graphrbm/metric_graph.hpp"
#include "helpers.hpp"

using namespace graphrbm;
using testing::names;
using testing::throws_code;

TEST_CASE("single edge graph has no interior vertices") {
  const MetricGraph g = build_graph({{"v0", "v1", 1.0, ""}}, {"v0", "v1"});
  CHECK(g.num_vertices() == 2);
  CHECK(g.num_edges() == 1);
  CHECK(g.interior_vertices().empty());
  CHECK(names(g, g.boundary_vertices()) == std::set<std::string>{"v0", "v1"});
}

TEST_CASE("incidence signs") {
  const MetricGraph g = build_graph({{"v0", "v1", 1.0, ""}, {"v1", "v2", 2.0, ""}}, {"v0", "v2"});
  const EdgeId e = g.find_edge("e1");
  CHECK(g.incidence(e, g.find_vertex("v0")) == -1);
  CHECK(g.incidence(e, g.find_vertex("v1")) == 1);
  CHECK(g.incidence(e, g.find_vertex("v2")) == 0);
  CHECK(g.endpoint_coordinate(g.find_edge("e2"), g.find_vertex("v2")) == 2.0);
}

TEST_CASE("validation errors") {
  CHECK(throws_code([] { build_graph({}, {}); }, Errc::EmptyGraph));
  CHECK(throws_code([] { build_graph({{"a", "a", 1.0, ""}}, {}); }, Errc::SelfLoop));
  CHECK(throws_code([] { build_graph({{"a", "b", 0.0, ""}}, {}); }, Errc::NonpositiveLength));
  CHECK(throws_code([] { build_graph({{"a", "b", -1.0, ""}}, {}); }, Errc::NonpositiveLength));
  CHECK(throws_code([] { build_graph({{"a", "b", 1.0, ""}}, {"z"}); }, Errc::BoundaryVertexUnknown));
  CHECK(throws_code([] { build_graph({{"a", "b", 1.0, ""}, {"c", "d", 1.0, ""}}, {"a"}); },
                    Errc::DisconnectedGraph));
  CHECK(throws_code([] { build_graph({{"a", "b", 1.0, ""}}, {}, {"a", "b", "lonely"}); },
                    Errc::DisconnectedGraph));
  const MetricGraph g = build_graph({{"a", "b", 1.0, ""}}, {});
  CHECK(throws_code([&] { g.find_vertex("q"); }, Errc::UnknownVertex));
  CHECK(throws_code([&] { g.find_edge("e7"); }, Errc::UnknownEdge));
}

TEST_CASE("demo graph") {
  const MetricGraph g = demo_graph();
  CHECK(g.num_vertices() == 10);
  CHECK(g.num_edges() == 10);
  CHECK(names(g, g.boundary_vertices()) == std::set<std::string>{"v1", "v2", "v9", "v10"});
  for (std::size_t v = 0; v < 10; ++v) CHECK(g.vertex_name(vertex_id(v)) == "v" + std::to_string(v + 1));

  std::set<std::string> around_v3;
  for (EdgeId e : g.incident_edges(g.find_vertex("v3"))) around_v3.insert(g.edge_name(e));
  CHECK(around_v3 == std::set<std::string>{"e1", "e2", "e3"});

  const std::vector<std::pair<std::string, std::string>> ends{{"v1", "v3"}, {"v2", "v3"}, {"v3", "v4"}, {"v4", "v5"},
                                                              {"v5", "v7"}, {"v4", "v6"}, {"v6", "v7"}, {"v7", "v8"},
                                                              {"v8", "v9"}, {"v8", "v10"}};
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const Edge& e = g.edge(edge_id(i));
    CHECK(g.edge_name(edge_id(i)) == "e" + std::to_string(i + 1));
    CHECK(g.vertex_name(e.tail) == ends[i].first);
    CHECK(g.vertex_name(e.head) == ends[i].second);
    CHECK(e.length == 1.0);
  }
}

TEST_CASE("incidence invariants on the demo graph") {
  const MetricGraph g = demo_graph();
  for (std::size_t ei = 0; ei < g.num_edges(); ++ei) {
    const EdgeId e = edge_id(ei);
    CHECK(g.incidence(e, g.edge(e).tail) * g.incidence(e, g.edge(e).head) == -1);
    int total = 0;
    for (std::size_t v = 0; v < g.num_vertices(); ++v) total += std::abs(g.incidence(e, vertex_id(v)));
    CHECK(total == 2);
  }
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    std::size_t nonzero = 0;
    for (std::size_t e = 0; e < g.num_edges(); ++e) nonzero += g.incidence(edge_id(e), vertex_id(v)) != 0;
    CHECK(g.degree(vertex_id(v)) == nonzero);
  }
}
