#include "netopt/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "netopt/error.hpp"

namespace netopt {

NetworkGraph::NetworkGraph(std::size_t num_vertices, std::span<const std::pair<Vertex, Vertex>> edges)
    : num_vertices_(num_vertices) {
  if (num_vertices == 0) throw InvalidInput("graph must have at least one vertex");
  std::set<std::pair<Vertex, Vertex>> seen;
  edges_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a >= num_vertices || b >= num_vertices) {
      throw InvalidInput("edge (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                         ") references a vertex outside 1.." + std::to_string(num_vertices));
    }
    if (a == b) throw InvalidInput("self-loop at vertex " + std::to_string(a + 1));
    const Edge e{std::min(a, b), std::max(a, b)};
    if (!seen.emplace(e.u, e.v).second) {
      throw InvalidInput("duplicate edge (" + std::to_string(e.u + 1) + "," + std::to_string(e.v + 1) + ")");
    }
    edges_.push_back(e);
  }

  std::vector<std::size_t> deg(num_vertices, 0);
  for (const Edge& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  offsets_.assign(num_vertices + 1, 0);
  for (std::size_t v = 0; v < num_vertices; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    adjacency_[fill[edges_[e].u]++] = {edges_[e].v, e};
    adjacency_[fill[edges_[e].v]++] = {edges_[e].u, e};
  }
  max_degree_ = *std::max_element(deg.begin(), deg.end());
}

std::span<const Neighbor> NetworkGraph::neighbors(Vertex v) const {
  if (v >= num_vertices_) throw InvalidInput("vertex out of range");
  return std::span<const Neighbor>(adjacency_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
}

std::string NetworkGraph::hash() const {
  // FNV-1a over |V| and the sorted edge set.
  std::vector<Edge> sorted(edges_.begin(), edges_.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  feed(num_vertices_);
  for (const Edge& e : sorted) {
    feed(e.u);
    feed(e.v);
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

NetworkGraph build_graph(std::size_t num_vertices,
                         const std::vector<std::pair<std::size_t, std::size_t>>& edge_list) {
  std::vector<std::pair<Vertex, Vertex>> zero_based;
  zero_based.reserve(edge_list.size());
  for (const auto& [u, v] : edge_list) {
    if (u == 0 || v == 0) throw InvalidInput("vertices are 1-based; got vertex 0");
    zero_based.emplace_back(u - 1, v - 1);
  }
  return NetworkGraph(num_vertices, zero_based);
}

namespace {

bool skippable(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

NetworkGraph parse_graph(std::istream& in, std::string_view source) {
  const std::string where(source);
  std::string line;
  std::size_t lineno = 0;
  std::size_t n = 0;
  bool have_n = false;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    std::istringstream ls(line);
    if (!have_n) {
      long long value = 0;
      if (!(ls >> value) || value <= 0) {
        throw ParseError(where + ":" + std::to_string(lineno) + ": expected a positive vertex count");
      }
      n = static_cast<std::size_t>(value);
      have_n = true;
      continue;
    }
    long long u = 0, v = 0;
    std::string extra;
    if (!(ls >> u >> v) || (ls >> extra) || u <= 0 || v <= 0) {
      throw ParseError(where + ":" + std::to_string(lineno) + ": expected \"u v\" with 1-based vertices");
    }
    edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
  }
  if (!have_n) throw ParseError(where + ": missing vertex count");
  try {
    return build_graph(n, edges);
  } catch (const InvalidInput& e) {
    throw InvalidInput(where + ": " + e.what());
  }
}

NetworkGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file " + path.string());
  return parse_graph(in, path.string());
}

void write_graph(std::ostream& out, const NetworkGraph& g) {
  out << g.num_vertices() << '\n';
  for (const Edge& e : g.edges()) out << e.u + 1 << ' ' << e.v + 1 << '\n';
}

NetworkGraph path_graph(std::size_t num_vertices) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex v = 0; v + 1 < num_vertices; ++v) edges.emplace_back(v, v + 1);
  return NetworkGraph(num_vertices, edges);
}

NetworkGraph cycle_graph(std::size_t num_vertices) {
  if (num_vertices < 3) throw InvalidInput("a simple cycle needs at least 3 vertices");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex v = 0; v < num_vertices; ++v) edges.emplace_back(v, (v + 1) % num_vertices);
  return NetworkGraph(num_vertices, edges);
}

}  // namespace netopt
