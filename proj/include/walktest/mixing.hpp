#pragma once

#include <optional>

#include <Eigen/Dense>

#include "walktest/graph.hpp"

namespace walktest {

/// Row-stochastic transition operator of the (optionally lazy) simple walk.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> transition_matrix(
    const Graph& g, WalkMode mode = WalkMode::Simple) {
  const int n = g.num_vertices();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> p =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  const Scalar move = mode == WalkMode::Lazy ? Scalar(0.5) : Scalar(1);
  for (int v = 0; v < n; ++v) {
    if (g.degree(v) == 0) continue;
    const Scalar w = move / Scalar(g.degree(v));
    for (int u : g.neighbors(v)) p(v, u) = w;
    if (mode == WalkMode::Lazy) p(v, v) += Scalar(0.5);
  }
  return p;
}

/// max_{v,w} |P^tau(v, w) - mu(w)|, the worst point-wise distance over starts.
template <typename Derived, typename VecDerived>
typename Derived::Scalar pointwise_distance(const Eigen::MatrixBase<Derived>& power,
                                            const Eigen::MatrixBase<VecDerived>& mu) {
  return (power.rowwise() - mu.transpose()).cwiseAbs().maxCoeff();
}

struct MixingReport {
  int t_mix = 0;
  double delta = 0.0;
  /// The <= delta condition holds for every tau in [t_mix, verified_horizon].
  int verified_horizon = 0;
  /// Number of times a violation inside the verification window forced the
  /// search to resume.
  int restarts = 0;
};

struct MixingOptions {
  WalkMode mode = WalkMode::Simple;
  int max_vertices = 4096;
  int max_steps = 100000;
};

/// (1 / (2 c n))^2 with c measured from the graph.
double default_mixing_delta(const Graph& g);

/// Point-wise delta-mixing time by dense powering of the transition operator.
MixingReport mixing_time(const Graph& g, double delta, const MixingOptions& options = {});
inline MixingReport mixing_time(const Graph& g) {
  return mixing_time(g, default_mixing_delta(g));
}

/// Smallest t with (1 - phi^2/2)^t * dmax/dmin <= delta.
int js_upper_bound(double phi_hat, double degree_ratio, double delta);

/// Same, with phi_hat taken as the exact conductance when n <= 24 and the
/// Cheeger lower bound otherwise.
int js_upper_bound(const Graph& g, double delta);

}  // namespace walktest
