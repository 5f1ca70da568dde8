#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace popproto {

// Simple connected graph over agents 0..n-1, stored both as adjacency lists
// and as the flat list of ordered pairs the scheduler draws from. Interactions
// are directed (initiator, responder), so every undirected edge contributes
// two ordered pairs and m counts ordered pairs.
struct Graph {
  uint32_t n = 0;
  std::vector<std::vector<uint32_t>> adj;          // sorted neighbor lists
  std::vector<std::pair<uint32_t, uint32_t>> edges;  // all ordered pairs, size m

  uint64_t m() const { return edges.size(); }
  uint32_t degree(uint32_t v) const { return static_cast<uint32_t>(adj[v].size()); }
  bool has_edge(uint32_t u, uint32_t v) const;
};

struct GraphStats {
  uint32_t n = 0;
  uint64_t m = 0;        // ordered pairs
  uint32_t max_degree = 0;
  uint32_t diameter = 0;
};

enum class GraphFamily { Complete, Ring, Star, Gnp };

// Builds a graph from an undirected edge list. Vertex count is inferred as
// max index + 1 unless n_hint is larger. Throws std::invalid_argument on
// self-loops, n < 2, or a disconnected result. Duplicate edges collapse.
Graph build_graph(const std::vector<std::pair<uint32_t, uint32_t>>& edge_list,
                  uint32_t n_hint = 0);

// Standard families. Gnp draws each undirected pair with probability p and
// retries (bumping a sub-seed) until the sample is connected, so the result
// is a pure function of (n, p, seed). Star uses vertex 0 as the center.
Graph gen_family(GraphFamily family, uint32_t n, double p = 0.0, uint64_t seed = 0);

GraphStats stats(const Graph& g);

// Edge-list text format: one "u v" pair per line, blank lines and lines
// starting with '#' ignored.
std::vector<std::pair<uint32_t, uint32_t>> parse_edge_list(std::istream& in);
Graph load_edge_list(const std::string& path);

const char* family_name(GraphFamily f);

}  // namespace popproto
