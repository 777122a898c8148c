#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netopt {

/// Vertex index, 0-based. Files and the CLI use 1-based vertices.
using Vertex = std::size_t;

/// Undirected edge stored with u < v. Edge costs are oriented the same way.
struct Edge {
  Vertex u;
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  Vertex vertex;
  std::size_t edge;  // index into NetworkGraph::edges()
};

/// Simple undirected graph with per-vertex neighbor lists and max degree.
/// Immutable after construction.
class NetworkGraph {
 public:
  /// 0-based edge list. Throws InvalidInput on out-of-range vertices,
  /// self-loops or duplicate edges (in either orientation).
  NetworkGraph(std::size_t num_vertices, std::span<const std::pair<Vertex, Vertex>> edges);

  std::size_t num_vertices() const noexcept { return num_vertices_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::size_t max_degree() const noexcept { return max_degree_; }
  std::size_t degree(Vertex v) const { return neighbors(v).size(); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Neighbor> neighbors(Vertex v) const;

  /// Stable hex digest of (|V|, sorted edge set). Ties schedule files to graphs.
  std::string hash() const;

  friend bool operator==(const NetworkGraph& a, const NetworkGraph& b) {
    return a.num_vertices_ == b.num_vertices_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t num_vertices_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::size_t max_degree_ = 0;
};

/// Builds a graph from a 1-based edge list, as written in graph files.
NetworkGraph build_graph(std::size_t num_vertices,
                         const std::vector<std::pair<std::size_t, std::size_t>>& edge_list);

/// Graph file: first non-blank line "|V|", then one "u v" pair per line
/// (1-based). Blank lines and lines starting with '#' are skipped.
NetworkGraph parse_graph(std::istream& in, std::string_view source = "<graph>");
NetworkGraph load_graph(const std::filesystem::path& path);
void write_graph(std::ostream& out, const NetworkGraph& g);

NetworkGraph path_graph(std::size_t num_vertices);
NetworkGraph cycle_graph(std::size_t num_vertices);

}  // namespace netopt
