#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "walktest/error.hpp"
#include "walktest/graph.hpp"

namespace walktest {
namespace {

// Naive conductance straight from the edge list; independent of the Gray-code
// enumeration used by conductance_exact.
double brute_force_conductance(const Graph& g) {
  const int n = g.num_vertices();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned s = 1; s < (1u << n); ++s) {
    long long vol = 0, cut = 0;
    for (int v = 0; v < n; ++v)
      if (s >> v & 1u) vol += g.degree(v);
    for (const auto& [u, v] : g.edges())
      if (((s >> u) & 1u) != ((s >> v) & 1u)) ++cut;
    if (vol <= g.num_edges()) best = std::min(best, double(cut) / vol);
  }
  return best;
}

Graph two_joined_k4() {
  std::vector<Edge> edges;
  for (int base : {0, 4})
    for (int u = 0; u < 4; ++u)
      for (int v = u + 1; v < 4; ++v) edges.emplace_back(base + u, base + v);
  edges.emplace_back(3, 4);
  return Graph(8, edges);
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::Io;
}

TEST(Graph, CanonicalEdgeOrderAndAdjacency) {
  Graph g(4, {{3, 1}, {0, 2}, {1, 0}});
  ASSERT_EQ(g.num_edges(), 3);
  EXPECT_EQ(g.edge(0), Edge(0, 1));
  EXPECT_EQ(g.edge(1), Edge(0, 2));
  EXPECT_EQ(g.edge(2), Edge(1, 3));
  EXPECT_EQ(g.edge_id(3, 1), 2);
  EXPECT_FALSE(g.edge_id(2, 3).has_value());
  const auto nb = g.neighbors(1);
  EXPECT_EQ(std::vector<int>(nb.begin(), nb.end()), (std::vector<int>{0, 3}));
  for (int v = 0; v < g.num_vertices(); ++v)
    for (std::size_t k = 0; k < g.neighbors(v).size(); ++k)
      EXPECT_EQ(g.edge_id(v, g.neighbors(v)[k]), g.incident_edges(v)[k]);
}

TEST(Graph, RejectsLoopsAndParallelEdges) {
  EXPECT_EQ(kind_of([] { Graph(3, {{1, 1}}); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([] { Graph(3, {{0, 1}, {1, 0}}); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([] { Graph(3, {{0, 3}}); }), ErrorKind::InvalidParameter);
}

TEST(Generators, Complete) {
  const Graph k4 = gen_complete(4);
  EXPECT_EQ(k4.num_edges(), 6);
  for (int v = 0; v < 4; ++v) EXPECT_EQ(k4.degree(v), 3);
  const Graph k2 = gen_complete(2);
  ASSERT_EQ(k2.num_edges(), 1);
  EXPECT_EQ(k2.edge(0), Edge(0, 1));
  const auto u = uniformity(gen_complete(10));
  EXPECT_EQ(u.min_degree, 9);
  EXPECT_DOUBLE_EQ(u.c, 1.0);
  EXPECT_EQ(kind_of([] { gen_complete(1); }), ErrorKind::InvalidParameter);
}

TEST(Generators, ErdosRenyi) {
  EXPECT_EQ(gen_erdos_renyi(12, 1.0, 5), gen_complete(12));
  EXPECT_EQ(gen_erdos_renyi(50, 0.3, 99), gen_erdos_renyi(50, 0.3, 99));
  EXPECT_NE(gen_erdos_renyi(50, 0.3, 99), gen_erdos_renyi(50, 0.3, 100));
  EXPECT_EQ(kind_of([] { gen_erdos_renyi(5, 0.0, 1); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([] { gen_erdos_renyi(5, 1.5, 1); }), ErrorKind::InvalidParameter);
}

TEST(Generators, ErdosRenyiDegreeConcentration) {
  // np = 64, eps = 0.35. Binomial(255, 1/4) tails put ~1.1e-3 of vertices
  // outside [41.6, 86.4], so ~75% of graphs lie fully inside the band; a
  // 2000-graph simulation gives 0.748 (band) and 0.861 (c <= 2).
  const double np = 64, eps = 0.35;
  int in_band = 0, c_ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto u = uniformity(gen_erdos_renyi(256, 0.25, seed));
    in_band += u.min_degree >= np * (1 - eps) && u.max_degree <= np * (1 + eps);
    c_ok += u.c <= 2.0;
    EXPECT_LE(u.c, 2.5) << seed;
  }
  EXPECT_GE(in_band, 62);
  EXPECT_GE(c_ok, 72);
}

TEST(Generators, RandomRegular) {
  const Graph g = gen_random_regular(8, 2, 3);
  for (int v = 0; v < 8; ++v) EXPECT_EQ(g.degree(v), 2);
  EXPECT_EQ(g.num_edges(), 8);
  EXPECT_EQ(kind_of([] { gen_random_regular(5, 3, 1); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([] { gen_random_regular(4, 4, 1); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(gen_random_regular(64, 8, 11), gen_random_regular(64, 8, 11));
  const Graph r = gen_random_regular(64, 8, 11);
  for (int v = 0; v < 64; ++v) EXPECT_EQ(r.degree(v), 8);
  EXPECT_TRUE(r.connected());
  EXPECT_LT(spectral_gap(r), 0.9);
}

TEST(Generators, Cycle) {
  EXPECT_TRUE(gen_cycle(4).bipartite());
  EXPECT_FALSE(gen_cycle(5).bipartite());
  const auto u = uniformity(gen_cycle(5));
  EXPECT_EQ(u.min_degree, 2);
  EXPECT_DOUBLE_EQ(u.c, 1.0);
  EXPECT_EQ(kind_of([] { gen_cycle(2); }), ErrorKind::InvalidParameter);
}

TEST(Uniformity, StarAndIsolated) {
  const auto u = uniformity(gen_star(5));
  EXPECT_EQ(u.min_degree, 1);
  EXPECT_DOUBLE_EQ(u.c, 4.0);
  EXPECT_TRUE(u.is_uniform_for(1, 4.0));
  EXPECT_FALSE(u.is_uniform_for(2, 4.0));
  EXPECT_EQ(kind_of([] { uniformity(Graph(3, {{0, 1}})); }), ErrorKind::DegenerateGraph);
}

TEST(Stationary, RegularAndPath) {
  const auto mu = stationary_distribution(gen_complete(4));
  for (int v = 0; v < 4; ++v) EXPECT_DOUBLE_EQ(mu.probs[v], 0.25);
  const Graph path = gen_path(3);
  EXPECT_EQ(kind_of([&] { stationary_distribution(path); }), ErrorKind::NonMixingGraph);
  const auto lazy = stationary_distribution(path, WalkMode::Lazy);
  EXPECT_DOUBLE_EQ(lazy.probs[0], 0.25);
  EXPECT_DOUBLE_EQ(lazy.probs[1], 0.5);
  EXPECT_DOUBLE_EQ(lazy.probs[2], 0.25);
  EXPECT_NEAR(lazy.probs.sum(), 1.0, 1e-12);
}

TEST(Stationary, BoundsHoldOnGeneratedGraphs) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Graph g = seed % 2 ? gen_erdos_renyi(60, 0.2, seed) : gen_random_regular(40, 5 + seed % 2 * 0, seed * 2);
    if (!g.connected() || g.bipartite()) continue;
    const auto mu = stationary_distribution(g);
    const auto [lo, hi] = stationary_bounds(g);
    for (int v = 0; v < g.num_vertices(); ++v) {
      EXPECT_LE(lo, mu.probs[v]);
      EXPECT_LE(mu.probs[v], hi);
    }
  }
}

TEST(Conductance, ExactMatchesBruteForce) {
  EXPECT_DOUBLE_EQ(brute_force_conductance(gen_complete(4)), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(conductance_exact(gen_complete(4)), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(brute_force_conductance(gen_cycle(6)), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(conductance_exact(gen_cycle(6)), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(brute_force_conductance(two_joined_k4()), 1.0 / 13.0);
  EXPECT_DOUBLE_EQ(conductance_exact(two_joined_k4()), 1.0 / 13.0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Graph g = gen_erdos_renyi(10, 0.4, seed);
    if (!g.connected()) continue;
    const double phi = conductance_exact(g);
    EXPECT_DOUBLE_EQ(phi, brute_force_conductance(g));
    EXPECT_GT(phi, 0.0);
    EXPECT_LE(phi, 1.0);
  }
  EXPECT_EQ(kind_of([] { conductance_exact(gen_cycle(25)); }), ErrorKind::SizeExceeded);
}

TEST(Conductance, RegularGraphsMatchExpansionOverDegree) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int degree = 3 + static_cast<int>(seed % 3);
    const Graph g = gen_random_regular(14, degree, seed);
    if (!g.connected()) continue;
    EXPECT_NEAR(conductance_exact(g), edge_expansion_exact(g) / degree, 1e-15);
  }
}

TEST(Conductance, CheegerLowerBound) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = gen_erdos_renyi(16, 0.4, seed);
    if (!g.connected()) continue;
    EXPECT_LE(conductance_lower_bound(g), conductance_exact(g));
  }
}

TEST(Spectral, CompleteGraphClosedForm) {
  for (int n : {3, 5, 10, 32}) EXPECT_NEAR(spectral_gap(gen_complete(n)), 1.0 / (n - 1), 1e-6);
}

TEST(Spectral, BipartiteHasUnitEigenvalue) { EXPECT_NEAR(spectral_gap(gen_cycle(4)), 1.0, 1e-9); }

TEST(Spectral, PowerIterationAgreesWithDenseSolver) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = gen_random_regular(48, 6, seed);
    const auto eig = transition_spectrum(g);
    const double expected = std::max(std::abs(eig[0]), std::abs(eig[eig.size() - 2]));
    EXPECT_NEAR(spectral_gap(g), expected, 1e-6);
  }
}

TEST(GraphIo, JsonRoundTripAndEdgeList) {
  const Graph g = gen_erdos_renyi(30, 0.2, 4);
  EXPECT_EQ(graph_from_json(graph_to_json(g)), g);
  EXPECT_EQ(graph_to_json(gen_complete(3)), R"({"edges":[[0,1],[0,2],[1,2]],"n":3})");
  const Graph h = graph_from_edge_list("# triangle\n0 1\n2 1\n\n0 2\n");
  EXPECT_EQ(h, gen_complete(3));
  EXPECT_EQ(kind_of([] { graph_from_json("{\"n\": 2}"); }), ErrorKind::Io);
}

}  // namespace
}  // namespace walktest
