#include "popproto/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "popproto/rng.hpp"

namespace popproto {

bool Graph::has_edge(uint32_t u, uint32_t v) const {
  const auto& a = adj[u];
  return std::binary_search(a.begin(), a.end(), v);
}

namespace {

// BFS distances from src; unreachable stays UINT32_MAX.
std::vector<uint32_t> bfs(const Graph& g, uint32_t src) {
  std::vector<uint32_t> dist(g.n, UINT32_MAX);
  std::deque<uint32_t> q{src};
  dist[src] = 0;
  while (!q.empty()) {
    uint32_t u = q.front();
    q.pop_front();
    for (uint32_t w : g.adj[u]) {
      if (dist[w] == UINT32_MAX) {
        dist[w] = dist[u] + 1;
        q.push_back(w);
      }
    }
  }
  return dist;
}

bool connected(const Graph& g) {
  if (g.n == 0) return false;
  auto d = bfs(g, 0);
  return std::none_of(d.begin(), d.end(), [](uint32_t x) { return x == UINT32_MAX; });
}

Graph assemble(uint32_t n, const std::set<std::pair<uint32_t, uint32_t>>& undirected) {
  Graph g;
  g.n = n;
  g.adj.assign(n, {});
  for (auto [u, v] : undirected) {
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  }
  for (auto& a : g.adj) std::sort(a.begin(), a.end());
  g.edges.reserve(2 * undirected.size());
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t w : g.adj[u]) g.edges.emplace_back(u, w);
  return g;
}

}  // namespace

Graph build_graph(const std::vector<std::pair<uint32_t, uint32_t>>& edge_list,
                  uint32_t n_hint) {
  uint32_t n = n_hint;
  std::set<std::pair<uint32_t, uint32_t>> undirected;
  for (auto [u, v] : edge_list) {
    if (u == v) throw std::invalid_argument("graph: self-loop at vertex " + std::to_string(u));
    n = std::max({n, u + 1, v + 1});
    undirected.emplace(std::min(u, v), std::max(u, v));
  }
  if (n < 2) throw std::invalid_argument("graph: need at least two vertices");
  Graph g = assemble(n, undirected);
  if (!connected(g)) throw std::invalid_argument("graph: not connected");
  return g;
}

Graph gen_family(GraphFamily family, uint32_t n, double p, uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_family: need n >= 2");
  std::set<std::pair<uint32_t, uint32_t>> und;
  switch (family) {
    case GraphFamily::Complete:
      for (uint32_t u = 0; u < n; ++u)
        for (uint32_t v = u + 1; v < n; ++v) und.emplace(u, v);
      break;
    case GraphFamily::Ring:
      if (n == 2) {
        und.emplace(0u, 1u);
      } else {
        for (uint32_t u = 0; u < n; ++u) und.emplace(std::min(u, (u + 1) % n), std::max(u, (u + 1) % n));
      }
      break;
    case GraphFamily::Star:
      for (uint32_t v = 1; v < n; ++v) und.emplace(0u, v);
      break;
    case GraphFamily::Gnp: {
      if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("gen_family: gnp needs p in (0, 1]");
      for (uint64_t attempt = 0;; ++attempt) {
        if (attempt > 100000) throw std::runtime_error("gen_family: gnp never connected");
        und.clear();
        Rng rng = make_rng(seed, attempt);
        // Threshold compare on raw 64-bit output keeps the draw platform-stable.
        // p*2^64 can round up to 2^64 itself, where the cast would be undefined.
        const double scaled = p * 18446744073709551616.0;
        const uint64_t cut =
            scaled >= 18446744073709551616.0 ? UINT64_MAX : static_cast<uint64_t>(scaled);
        for (uint32_t u = 0; u < n; ++u)
          for (uint32_t v = u + 1; v < n; ++v)
            if (rng() <= cut) und.emplace(u, v);
        Graph g = assemble(n, und);
        if (connected(g)) return g;
      }
    }
  }
  return assemble(n, und);
}

GraphStats stats(const Graph& g) {
  GraphStats s;
  s.n = g.n;
  s.m = g.m();
  uint32_t diam = 0;
  for (uint32_t v = 0; v < g.n; ++v) {
    s.max_degree = std::max(s.max_degree, g.degree(v));
    for (uint32_t d : bfs(g, v))
      if (d != UINT32_MAX) diam = std::max(diam, d);
  }
  s.diameter = diam;
  return s;
}

std::vector<std::pair<uint32_t, uint32_t>> parse_edge_list(std::istream& in) {
  std::vector<std::pair<uint32_t, uint32_t>> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long u = -1, v = -1;
    if (!(ls >> u >> v) || u < 0 || v < 0)
      throw std::invalid_argument("edge list: bad line " + std::to_string(lineno) + ": " + line);
    out.emplace_back(static_cast<uint32_t>(u), static_cast<uint32_t>(v));
  }
  return out;
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  return build_graph(parse_edge_list(in));
}

const char* family_name(GraphFamily f) {
  switch (f) {
    case GraphFamily::Complete: return "complete";
    case GraphFamily::Ring: return "ring";
    case GraphFamily::Star: return "star";
    case GraphFamily::Gnp: return "gnp";
  }
  return "?";
}

}  // namespace popproto
