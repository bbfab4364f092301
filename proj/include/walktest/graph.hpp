#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace walktest {

using Edge = std::pair<int, int>;

/// Simple undirected graph with canonical edge ids.
///
/// Edges are stored with u < v and numbered in lexicographic order of (u, v).
/// Adjacency is kept in CSR form with neighbor lists sorted ascending; the
/// edge id of each adjacency slot is stored alongside it. Immutable after
/// construction and safe to share across threads.
class Graph {
 public:
  Graph() = default;

  /// Builds the graph from an arbitrary edge list. Endpoint order and edge
  /// order in the input do not matter. Self-loops, parallel edges and
  /// out-of-range endpoints are rejected with ErrorKind::InvalidParameter.
  Graph(int n, std::vector<Edge> edges);

  int num_vertices() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  std::span<const int> neighbors(int v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  /// Edge ids aligned with neighbors(v).
  std::span<const int> incident_edges(int v) const {
    return {adj_edge_.data() + offsets_[v], adj_edge_.data() + offsets_[v + 1]};
  }
  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int id) const { return edges_[id]; }
  std::optional<int> edge_id(int u, int v) const;

  bool connected() const { return connected_; }
  bool bipartite() const { return bipartite_; }
  bool has_vertex(int v) const { return v >= 0 && v < n_; }

  int min_degree() const;
  int max_degree() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> offsets_{0};
  std::vector<int> adj_;
  std::vector<int> adj_edge_;
  bool connected_ = false;
  bool bipartite_ = false;
};

// Generators. All randomized generators are deterministic given the seed.

Graph gen_complete(int n);
Graph gen_erdos_renyi(int n, double p, std::uint64_t seed);
Graph gen_random_regular(int n, int degree, std::uint64_t seed,
                         int max_attempts = 1000);
Graph gen_cycle(int n);
Graph gen_path(int n);
Graph gen_star(int n);

/// (D, c)-uniformity of a graph: every degree lies in [D, cD].
struct UniformityReport {
  int min_degree = 0;
  int max_degree = 0;
  double c = 1.0;

  bool is_uniform_for(double d0, double c0) const {
    return min_degree >= d0 && c <= c0;
  }
};

UniformityReport uniformity(const Graph& g);

/// Walk mode: the plain simple random walk, or the lazy walk that stays put
/// with probability 1/2. Lazy mode lies outside the (non-bipartite) model
/// assumed by the bounds and must be requested explicitly.
enum class WalkMode { Simple, Lazy };

/// Probability vector over vertices.
struct Distribution {
  Eigen::VectorXd probs;
};

/// deg(v) / 2|E|. Requires a connected graph; bipartite graphs only in lazy
/// mode.
Distribution stationary_distribution(const Graph& g,
                                     WalkMode mode = WalkMode::Simple);

/// Exact lower/upper stationary bounds 1/(cn) and c/n, each computed as a
/// single correctly rounded division of integers.
std::pair<double, double> stationary_bounds(const Graph& g);

/// Exact conductance by enumerating every vertex subset (n <= max_n).
double conductance_exact(const Graph& g, int max_n = 24);

/// Edge expansion min_{0<|S|<=n/2} E(S, S^c) / |S| by enumeration.
double edge_expansion_exact(const Graph& g, int max_n = 24);

/// Second-largest absolute eigenvalue of the transition operator, by deflated
/// power iteration on the symmetrized operator.
double spectral_gap(const Graph& g, double tolerance = 1e-9,
                    int max_iterations = 200000);

/// All eigenvalues of D^{-1/2} A D^{-1/2} (equivalently of the transition
/// operator), ascending, from a dense symmetric eigensolver.
Eigen::VectorXd transition_spectrum(const Graph& g);

/// Certified lower bound on the conductance from the Cheeger inequality
/// Phi >= (1 - lambda_2) / 2, lambda_2 the second largest (signed) eigenvalue.
double conductance_lower_bound(const Graph& g);

// I/O. JSON: {"n": int, "edges": [[u, v], ...]}. Text: one "u v" per line.

std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);
Graph graph_from_edge_list(const std::string& text);
/// Reads JSON or edge-list text, chosen by the first non-space character.
Graph read_graph_file(const std::string& path);
void write_graph_file(const Graph& g, const std::string& path);

}  // namespace walktest
