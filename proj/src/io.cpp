#include "graphrbm/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "graphrbm/error.hpp"

namespace graphrbm {

using nlohmann::json;

namespace {

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, std::string(what) + " at line " + line_col(text, e.byte == 0 ? 0 : e.byte - 1) +
                                      ": " + e.what());
  }
}

const json& require(const json& obj, const char* key, const char* ctx) {
  if (!obj.is_object() || !obj.contains(key))
    throw Error(Errc::ParseError, std::string(ctx) + ": missing key \"" + key + "\"");
  return obj.at(key);
}

std::string as_string(const json& j, const std::string& ctx) {
  if (!j.is_string()) throw Error(Errc::ParseError, ctx + ": expected a string");
  return j.get<std::string>();
}

double as_number(const json& j, const std::string& ctx) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw Error(Errc::ParseError, ctx + ": expected a number");
}

std::vector<double> number_list(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw Error(Errc::ParseError, ctx + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], ctx + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

double parse_rational(const std::string& s) {
  auto parse_one = [&](const std::string& part) {
    const char* begin = part.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (part.empty() || end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
      throw Error(Errc::ParseError, "not a number: \"" + s + "\"");
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_one(s);
  const double num = parse_one(s.substr(0, slash));
  const double den = parse_one(s.substr(slash + 1));
  if (den == 0.0) throw Error(Errc::ParseError, "zero denominator in \"" + s + "\"");
  return num / den;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GraphFile parse_graph_json(const std::string& text) {
  const json doc = parse_json(text, "graph file");
  if (!doc.is_object()) throw Error(Errc::ParseError, "graph file: top level must be an object");
  const json& edges = require(doc, "edges", "graph file");
  if (!edges.is_array()) throw Error(Errc::ParseError, "graph file: \"edges\" must be an array");

  std::vector<EdgeSpec> specs;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string ctx = "edges[" + std::to_string(i) + "]";
    const json& e = edges[i];
    EdgeSpec s;
    s.tail = as_string(require(e, "tail", ctx.c_str()), ctx + ".tail");
    s.head = as_string(require(e, "head", ctx.c_str()), ctx + ".head");
    s.length = e.contains("length") ? as_number(e.at("length"), ctx + ".length") : 1.0;
    if (e.contains("name")) s.name = as_string(e.at("name"), ctx + ".name");
    specs.push_back(std::move(s));
  }

  std::vector<std::string> boundary, order;
  if (doc.contains("boundary")) {
    const json& b = doc.at("boundary");
    if (!b.is_array()) throw Error(Errc::ParseError, "graph file: \"boundary\" must be an array");
    for (std::size_t i = 0; i < b.size(); ++i) boundary.push_back(as_string(b[i], "boundary[" + std::to_string(i) + "]"));
  }
  if (doc.contains("vertices")) {
    const json& v = doc.at("vertices");
    if (!v.is_array()) throw Error(Errc::ParseError, "graph file: \"vertices\" must be an array");
    for (std::size_t i = 0; i < v.size(); ++i) order.push_back(as_string(v[i], "vertices[" + std::to_string(i) + "]"));
  }

  GraphFile out{build_graph(specs, boundary, order), std::nullopt};
  if (doc.contains("manufactured")) {
    const json& m = doc.at("manufactured");
    ManufacturedOverride o;
    o.alpha = number_list(require(m, "alpha", "manufactured"), "manufactured.alpha");
    o.beta = number_list(require(m, "beta", "manufactured"), "manufactured.beta");
    if (o.alpha.size() != out.graph.num_edges() || o.beta.size() != out.graph.num_edges())
      throw Error(Errc::InvalidArgument, "manufactured alpha/beta need one entry per edge");
    out.manufactured = std::move(o);
  }
  return out;
}

GraphFile load_graph_file(const std::string& path) { return parse_graph_json(read_text_file(path)); }

BatchFile parse_batch_json(const std::string& text, const MetricGraph& graph) {
  const json doc = parse_json(text, "batch file");
  if (!doc.is_object()) throw Error(Errc::ParseError, "batch file: top level must be an object");

  const json& parts_json = require(doc, "parts", "batch file");
  if (!parts_json.is_array()) throw Error(Errc::ParseError, "batch file: \"parts\" must be an array");
  std::vector<std::vector<EdgeId>> parts;
  for (std::size_t i = 0; i < parts_json.size(); ++i) {
    const std::string ctx = "parts[" + std::to_string(i) + "]";
    if (!parts_json[i].is_array()) throw Error(Errc::ParseError, ctx + ": expected an array of edge names");
    std::vector<EdgeId> part;
    for (std::size_t k = 0; k < parts_json[i].size(); ++k)
      part.push_back(graph.find_edge(as_string(parts_json[i][k], ctx + "[" + std::to_string(k) + "]")));
    parts.push_back(std::move(part));
  }
  SubgraphPartition partition = validate_partition(graph, std::move(parts));

  const json& batches_json = require(doc, "batches", "batch file");
  if (!batches_json.is_array()) throw Error(Errc::ParseError, "batch file: \"batches\" must be an array");
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t j = 0; j < batches_json.size(); ++j) {
    const std::string ctx = "batches[" + std::to_string(j) + "]";
    if (!batches_json[j].is_array()) throw Error(Errc::ParseError, ctx + ": expected an array of part indices");
    std::vector<std::size_t> batch;
    for (const json& v : batches_json[j]) {
      if (!v.is_number_integer()) throw Error(Errc::ParseError, ctx + ": part indices must be integers");
      const long long i = v.get<long long>();
      if (i < 1 || static_cast<std::size_t>(i) > partition.num_parts())
        throw Error(Errc::BadPartIndex, ctx + ": part index " + std::to_string(i) + " outside 1.." +
                                            std::to_string(partition.num_parts()));
      batch.push_back(static_cast<std::size_t>(i - 1));
    }
    batches.push_back(std::move(batch));
  }

  std::vector<double> probs;
  if (doc.contains("probs"))
    probs = number_list(doc.at("probs"), "probs");
  else
    probs.assign(batches.size(), batches.empty() ? 0.0 : 1.0 / static_cast<double>(batches.size()));
  if (probs.size() != batches.size())
    throw Error(Errc::BadProbabilityVector, "probs has " + std::to_string(probs.size()) + " entries for " +
                                                std::to_string(batches.size()) + " batches");

  BatchFamily family = make_batch_family(partition.num_parts(), std::move(batches), std::move(probs));
  return {std::move(partition), std::move(family)};
}

BatchFile load_batch_file(const std::string& path, const MetricGraph& graph) {
  return parse_batch_json(read_text_file(path), graph);
}

}  // namespace graphrbm
