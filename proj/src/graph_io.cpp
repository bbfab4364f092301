#include <fstream>
#include <sstream>

#include <json.hpp>

#include "walktest/error.hpp"
#include "walktest/graph.hpp"

namespace walktest {

using nlohmann::json;

std::string graph_to_json(const Graph& g) {
  json edges = json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  return json{{"n", g.num_vertices()}, {"edges", std::move(edges)}}.dump();
}

Graph graph_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("graph JSON parse error: ") + e.what());
  }
  require(j.is_object() && j.contains("n") && j["n"].is_number_integer() &&
              j.contains("edges") && j["edges"].is_array(),
          ErrorKind::Io, "graph JSON needs integer \"n\" and array \"edges\"");
  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    require(e.is_array() && e.size() == 2 && e[0].is_number_integer() &&
                e[1].is_number_integer(),
            ErrorKind::Io, "graph JSON edge must be [u, v]");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return Graph(j["n"].get<int>(), std::move(edges));
}

Graph graph_from_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Edge> edges;
  int n = 0;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    int u, v;
    if (!(ls >> u)) continue;
    require(static_cast<bool>(ls >> v), ErrorKind::Io,
            "edge-list line needs two vertex ids: " + line);
    require(u >= 0 && v >= 0, ErrorKind::Io, "negative vertex id: " + line);
    edges.emplace_back(u, v);
    n = std::max({n, u + 1, v + 1});
  }
  return Graph(n, std::move(edges));
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open graph file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return graph_from_json(text);
  return graph_from_edge_list(text);
}

void write_graph_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write graph file " + path);
  out << graph_to_json(g) << '\n';
}

}  // namespace walktest
