#include <cmath>

#include <Eigen/Eigenvalues>

#include "walktest/error.hpp"
#include "walktest/graph.hpp"
#include "walktest/random.hpp"

namespace walktest {

namespace {

// D^{-1/2} A D^{-1/2}; similar to the transition operator D^{-1} A.
Eigen::MatrixXd normalized_adjacency(const Graph& g) {
  const int n = g.num_vertices();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : g.edges()) {
    const double w = 1.0 / std::sqrt(static_cast<double>(g.degree(u)) * g.degree(v));
    a(u, v) = w;
    a(v, u) = w;
  }
  return a;
}

void require_spectral_input(const Graph& g) {
  require(g.num_vertices() >= 2 && g.connected(), ErrorKind::DegenerateGraph,
          "spectral analysis needs a connected graph with >= 2 vertices");
}

}  // namespace

double spectral_gap(const Graph& g, double tolerance, int max_iterations) {
  require_spectral_input(g);
  const int n = g.num_vertices();
  const Eigen::MatrixXd a = normalized_adjacency(g);

  // Top eigenvector of the symmetrized operator is sqrt(deg) (eigenvalue 1).
  Eigen::VectorXd top(n);
  for (int v = 0; v < n; ++v) top[v] = std::sqrt(static_cast<double>(g.degree(v)));
  top.normalize();

  // Iterate with A^2 on the complement of `top`: the dominant eigenvalue of
  // the deflated square is lambda^2 even when +lambda and -lambda compete.
  Rng rng(0x5eed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (int v = 0; v < n; ++v) x[v] = normal(rng);
  x -= top.dot(x) * top;
  require(x.norm() > 0, ErrorKind::NumericFailure, "degenerate start vector");
  x.normalize();

  Eigen::VectorXd y(n);
  for (int it = 0; it < max_iterations; ++it) {
    y.noalias() = a * x;
    const Eigen::VectorXd z = a * y;
    const double rayleigh = x.dot(z);  // estimate of lambda^2
    const double residual = (z - rayleigh * x).norm();
    if (residual <= tolerance) return std::sqrt(std::max(0.0, rayleigh));
    Eigen::VectorXd next = z - top.dot(z) * top;
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    x = next / norm;
  }
  throw Error(ErrorKind::NumericFailure,
              "spectral gap power iteration did not converge in " +
                  std::to_string(max_iterations) + " iterations");
}

Eigen::VectorXd transition_spectrum(const Graph& g) {
  require_spectral_input(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      normalized_adjacency(g), Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, ErrorKind::NumericFailure,
          "symmetric eigensolver failed");
  return solver.eigenvalues();
}

double conductance_lower_bound(const Graph& g) {
  const Eigen::VectorXd eig = transition_spectrum(g);
  const double lambda2 = eig[eig.size() - 2];
  // Slack covers the eigensolver's backward error.
  const double slack = 1e-12 * g.num_vertices();
  return std::max(0.0, (1.0 - lambda2 - slack) / 2.0);
}

}  // namespace walktest
