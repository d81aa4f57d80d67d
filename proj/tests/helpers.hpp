#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "graphrbm/error.hpp"
#include "graphrbm/metric_graph.hpp"

namespace testing {

inline std::set<std::string> names(const graphrbm::MetricGraph& g, const std::vector<graphrbm::VertexId>& vs) {
  std::set<std::string> out;
  for (auto v : vs) out.insert(g.vertex_name(v));
  return out;
}

template <typename Fn>
bool throws_code(Fn&& fn, graphrbm::Errc code) {
  try {
    fn();
  } catch (const graphrbm::Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace testing
