#include "walktest/mixing.hpp"

#include <cmath>

#include "walktest/error.hpp"

namespace walktest {

double default_mixing_delta(const Graph& g) {
  const auto u = uniformity(g);
  const double x = 1.0 / (2.0 * u.c * g.num_vertices());
  return x * x;
}

MixingReport mixing_time(const Graph& g, double delta, const MixingOptions& options) {
  require(delta > 0.0, ErrorKind::InvalidParameter, "delta must be positive");
  require(g.num_vertices() <= options.max_vertices, ErrorKind::SizeExceeded,
          "dense mixing limited to n <= " + std::to_string(options.max_vertices));
  const Distribution mu = stationary_distribution(g, options.mode);
  const Eigen::MatrixXd p = transition_matrix(g, options.mode);

  MixingReport report;
  report.delta = delta;
  Eigen::MatrixXd power = p;  // P^tau, starting at tau = 1
  Eigen::MatrixXd next(p.rows(), p.cols());
  int candidate = 0;
  for (int tau = 1; tau <= options.max_steps; ++tau) {
    const bool close = pointwise_distance(power, mu.probs) <= delta;
    if (candidate == 0) {
      if (close) candidate = tau;
    } else if (!close) {
      candidate = 0;
      ++report.restarts;
    }
    if (candidate != 0 && tau == 2 * candidate) {
      report.t_mix = candidate;
      report.verified_horizon = tau;
      return report;
    }
    next.noalias() = power * p;
    power.swap(next);
  }
  throw Error(ErrorKind::NumericFailure,
              "mixing time exceeds " + std::to_string(options.max_steps) + " steps");
}

int js_upper_bound(double phi_hat, double degree_ratio, double delta) {
  require(phi_hat > 0.0 && phi_hat <= 1.0, ErrorKind::InvalidParameter,
          "conductance bound must lie in (0, 1]");
  require(delta > 0.0, ErrorKind::InvalidParameter, "delta must be positive");
  require(degree_ratio >= 1.0, ErrorKind::InvalidParameter, "degree ratio must be >= 1");
  const double rate = 1.0 - phi_hat * phi_hat / 2.0;
  auto bound = [&](int t) { return std::pow(rate, t) * degree_ratio; };
  int t = std::max(0, static_cast<int>(std::ceil(std::log(degree_ratio / delta) / -std::log(rate))));
  // The closed form can be off by one under rounding; settle on the exact
  // smallest t.
  while (t > 0 && bound(t - 1) <= delta) --t;
  while (bound(t) > delta) ++t;
  return t;
}

int js_upper_bound(const Graph& g, double delta) {
  const auto u = uniformity(g);
  const double phi = g.num_vertices() <= 24 ? conductance_exact(g) : conductance_lower_bound(g);
  return js_upper_bound(phi, u.c, delta);
}

}  // namespace walktest
