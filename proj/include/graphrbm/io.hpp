#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graphrbm/decomposition.hpp"
#include "graphrbm/metric_graph.hpp"

namespace graphrbm {

/// Optional quartic leading coefficients for the manufactured problem.
struct ManufacturedOverride {
  std::vector<double> alpha;
  std::vector<double> beta;
};

struct GraphFile {
  MetricGraph graph;
  std::optional<ManufacturedOverride> manufactured;
};

/// {"edges":[{"tail":"v1","head":"v3","length":1.0,"name":"e1"}, ...],
///  "boundary":["v1", ...], "manufactured":{"alpha":[...],"beta":[...]}}
/// "name" and "manufactured" are optional. Vertex ids follow first
/// appearance. Errors: ParseError (with line:column), plus build_graph's.
GraphFile parse_graph_json(const std::string& text);
GraphFile load_graph_file(const std::string& path);

struct BatchFile {
  SubgraphPartition partition;
  BatchFamily family;
};

/// {"parts":[["e1","e2"], ...], "batches":[[1], [1,2], ...], "probs":[0.5, "1/2"]}
/// Part indices are 1-based. probs entries are numbers or "p/q" strings;
/// omitted probs means uniform. Errors: ParseError, IoError, and the
/// partition/batch validation errors.
BatchFile parse_batch_json(const std::string& text, const MetricGraph& graph);
BatchFile load_batch_file(const std::string& path, const MetricGraph& graph);

/// Parses "0.25", "1/6" or "1e-3". Errors: ParseError.
double parse_rational(const std::string& s);

std::string read_text_file(const std::string& path);

}  // namespace graphrbm
