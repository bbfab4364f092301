#include "walktest/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include "walktest/error.hpp"
#include "walktest/random.hpp"

namespace walktest {

Graph::Graph(int n, std::vector<Edge> edges) : n_(n) {
  require(n >= 0, ErrorKind::InvalidParameter, "vertex count must be >= 0");
  for (auto& [u, v] : edges) {
    require(u >= 0 && u < n && v >= 0 && v < n, ErrorKind::InvalidParameter,
            "edge endpoint out of range: {" + std::to_string(u) + "," +
                std::to_string(v) + "}");
    require(u != v, ErrorKind::InvalidParameter,
            "self-loop at vertex " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  const auto dup = std::adjacent_find(edges.begin(), edges.end());
  require(dup == edges.end(), ErrorKind::InvalidParameter,
          dup == edges.end() ? "" : "parallel edge {" +
                                        std::to_string(dup->first) + "," +
                                        std::to_string(dup->second) + "}");
  edges_ = std::move(edges);

  std::vector<int> deg(n, 0);
  for (const auto& [u, v] : edges_) {
    ++deg[u];
    ++deg[v];
  }
  offsets_.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  adj_.resize(offsets_[n]);
  adj_edge_.resize(offsets_[n]);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  // Edges are sorted by (u, v), so pushing in edge order leaves every
  // neighbor list sorted: for vertex w, neighbors u < w arrive (ordered by u)
  // before neighbors v > w (ordered by v).
  for (int id = 0; id < num_edges(); ++id) {
    const auto [u, v] = edges_[id];
    adj_[fill[u]] = v;
    adj_edge_[fill[u]++] = id;
    adj_[fill[v]] = u;
    adj_edge_[fill[v]++] = id;
  }

  // Connectivity and bipartiteness by BFS 2-coloring.
  connected_ = n > 0;
  bipartite_ = true;
  std::vector<int> color(n, -1);
  for (int s = 0; s < n; ++s) {
    if (color[s] != -1) continue;
    if (s != 0) connected_ = false;
    color[s] = 0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int w : neighbors(u)) {
        if (color[w] == -1) {
          color[w] = 1 - color[u];
          q.push(w);
        } else if (color[w] == color[u]) {
          bipartite_ = false;
        }
      }
    }
  }
}

std::optional<int> Graph::edge_id(int u, int v) const {
  if (!has_vertex(u) || !has_vertex(v) || u == v) return std::nullopt;
  const auto nb = neighbors(u);
  const auto it = std::lower_bound(nb.begin(), nb.end(), v);
  if (it == nb.end() || *it != v) return std::nullopt;
  return incident_edges(u)[it - nb.begin()];
}

int Graph::min_degree() const {
  int d = std::numeric_limits<int>::max();
  for (int v = 0; v < n_; ++v) d = std::min(d, degree(v));
  return n_ == 0 ? 0 : d;
}

int Graph::max_degree() const {
  int d = 0;
  for (int v = 0; v < n_; ++v) d = std::max(d, degree(v));
  return d;
}

Graph gen_complete(int n) {
  require(n >= 2, ErrorKind::InvalidParameter, "complete graph needs n >= 2");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return Graph(n, std::move(edges));
}

Graph gen_erdos_renyi(int n, double p, std::uint64_t seed) {
  require(n >= 1, ErrorKind::InvalidParameter, "G(n,p) needs n >= 1");
  require(p > 0.0 && p <= 1.0, ErrorKind::InvalidParameter,
          "G(n,p) needs 0 < p <= 1");
  Rng rng(stream_seed(seed, 0x6e70));
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (bernoulli(rng, p)) edges.emplace_back(u, v);
  return Graph(n, std::move(edges));
}

namespace {

// One pairing attempt in the Steger-Wormald style: repeatedly join two
// uniformly chosen free points, rejecting only pairs that would create a
// loop or a repeated edge. Returns false if the remaining points admit no
// valid pair.
bool try_pairing(int n, int degree, Rng& rng, std::vector<Edge>& out) {
  std::vector<int> points;
  points.reserve(static_cast<std::size_t>(n) * degree);
  for (int v = 0; v < n; ++v)
    for (int k = 0; k < degree; ++k) points.push_back(v);
  std::set<Edge> used;
  out.clear();
  auto valid = [&](int a, int b) {
    if (a == b) return false;
    return !used.count({std::min(a, b), std::max(a, b)});
  };
  while (!points.empty()) {
    const int size = static_cast<int>(points.size());
    bool placed = false;
    for (int trial = 0; trial < 64 * size && !placed; ++trial) {
      const int i = uniform_index(rng, size);
      int j = uniform_index(rng, size - 1);
      if (j >= i) ++j;
      if (!valid(points[i], points[j])) continue;
      const int a = points[i], b = points[j];
      used.insert({std::min(a, b), std::max(a, b)});
      out.emplace_back(a, b);
      const int hi = std::max(i, j), lo = std::min(i, j);
      points[hi] = points.back();
      points.pop_back();
      points[lo] = points.back();
      points.pop_back();
      placed = true;
    }
    if (!placed) return false;
  }
  return true;
}

}  // namespace

Graph gen_random_regular(int n, int degree, std::uint64_t seed,
                         int max_attempts) {
  require(n >= 1 && degree >= 1, ErrorKind::InvalidParameter,
          "random regular graph needs n >= 1 and D >= 1");
  require(degree < n, ErrorKind::InvalidParameter,
          "random regular graph needs D < n");
  require((static_cast<long long>(n) * degree) % 2 == 0,
          ErrorKind::InvalidParameter, "n*D must be even");
  std::vector<Edge> edges;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng = stream_rng(seed, 0x7267, attempt);
    if (try_pairing(n, degree, rng, edges)) return Graph(n, std::move(edges));
  }
  throw Error(ErrorKind::GenerationFailure,
              "random regular pairing failed after " +
                  std::to_string(max_attempts) + " attempts");
}

Graph gen_cycle(int n) {
  require(n >= 3, ErrorKind::InvalidParameter, "cycle needs n >= 3");
  std::vector<Edge> edges;
  for (int v = 0; v < n; ++v) edges.emplace_back(v, (v + 1) % n);
  return Graph(n, std::move(edges));
}

Graph gen_path(int n) {
  require(n >= 2, ErrorKind::InvalidParameter, "path needs n >= 2");
  std::vector<Edge> edges;
  for (int v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return Graph(n, std::move(edges));
}

Graph gen_star(int n) {
  require(n >= 2, ErrorKind::InvalidParameter, "star needs n >= 2");
  std::vector<Edge> edges;
  for (int v = 1; v < n; ++v) edges.emplace_back(0, v);
  return Graph(n, std::move(edges));
}

UniformityReport uniformity(const Graph& g) {
  require(g.num_vertices() > 0, ErrorKind::DegenerateGraph, "empty graph");
  UniformityReport r;
  r.min_degree = g.min_degree();
  r.max_degree = g.max_degree();
  require(r.min_degree >= 1, ErrorKind::DegenerateGraph,
          "graph has an isolated vertex");
  r.c = static_cast<double>(r.max_degree) / r.min_degree;
  return r;
}

Distribution stationary_distribution(const Graph& g, WalkMode mode) {
  require(g.num_vertices() > 0 && g.num_edges() > 0,
          ErrorKind::DegenerateGraph, "graph has no edges");
  require(g.connected(), ErrorKind::DegenerateGraph,
          "stationary distribution needs a connected graph");
  require(!g.bipartite() || mode == WalkMode::Lazy, ErrorKind::NonMixingGraph,
          "bipartite graph: simple walk does not mix (use lazy mode)");
  Distribution d;
  d.probs.resize(g.num_vertices());
  const double total = 2.0 * g.num_edges();
  for (int v = 0; v < g.num_vertices(); ++v) d.probs[v] = g.degree(v) / total;
  return d;
}

std::pair<double, double> stationary_bounds(const Graph& g) {
  const auto u = uniformity(g);
  const double n = g.num_vertices();
  // 1/(cn) = dmin / (dmax n) and c/n = dmax / (dmin n).
  return {u.min_degree / (u.max_degree * n), u.max_degree / (u.min_degree * n)};
}

namespace {

std::vector<std::uint32_t> neighbor_masks(const Graph& g) {
  std::vector<std::uint32_t> masks(g.num_vertices(), 0);
  for (int v = 0; v < g.num_vertices(); ++v)
    for (int w : g.neighbors(v)) masks[v] |= 1u << w;
  return masks;
}

// Visits every nonempty subset of V in Gray-code order, tracking degree sum,
// cut size and cardinality in O(1) per step.
template <typename Visit>
void for_each_subset(const Graph& g, Visit&& visit) {
  const int n = g.num_vertices();
  const auto nb = neighbor_masks(g);
  std::uint32_t set = 0;
  long long volume = 0, cut = 0;
  int size = 0;
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const int v = std::countr_zero(i);
    const std::uint32_t bit = 1u << v;
    const int inside = std::popcount(nb[v] & set);
    if (set & bit) {
      set &= ~bit;
      volume -= g.degree(v);
      cut -= g.degree(v) - 2 * inside;
      --size;
    } else {
      set |= bit;
      volume += g.degree(v);
      cut += g.degree(v) - 2 * inside;
      ++size;
    }
    if (set != 0) visit(volume, cut, size);
  }
}

}  // namespace

double conductance_exact(const Graph& g, int max_n) {
  require(g.num_vertices() <= max_n && g.num_vertices() <= 30,
          ErrorKind::SizeExceeded,
          "exact conductance limited to n <= " + std::to_string(max_n));
  require(g.connected() && g.num_edges() > 0, ErrorKind::DegenerateGraph,
          "conductance needs a connected graph with edges");
  const long long m = g.num_edges();
  double best = std::numeric_limits<double>::infinity();
  for_each_subset(g, [&](long long volume, long long cut, int) {
    if (volume <= m) best = std::min(best, static_cast<double>(cut) / volume);
  });
  return best;
}

double edge_expansion_exact(const Graph& g, int max_n) {
  require(g.num_vertices() <= max_n && g.num_vertices() <= 30,
          ErrorKind::SizeExceeded,
          "exact expansion limited to n <= " + std::to_string(max_n));
  const int half = g.num_vertices() / 2;
  double best = std::numeric_limits<double>::infinity();
  for_each_subset(g, [&](long long, long long cut, int size) {
    if (size <= half) best = std::min(best, static_cast<double>(cut) / size);
  });
  return best;
}

}  // namespace walktest
