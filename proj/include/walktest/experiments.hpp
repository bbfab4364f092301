#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walktest/calibration.hpp"
#include "walktest/designs.hpp"
#include "walktest/graph.hpp"
#include "walktest/grouptest.hpp"
#include "walktest/mixing.hpp"

namespace walktest {

/// A graph family plus the size parameters needed to sample one instance.
///   complete: n
///   gnp:      n and p, or n and degree (then p = degree / n)
///   regular:  n and degree
///   cycle:    n
struct FamilySpec {
  std::string family = "complete";
  int n = 0;
  double p = 0.0;
  int degree = 0;

  std::string describe() const;
};

/// Samples an instance. Disconnected G(n, p) samples are redrawn from
/// sub-streams of `seed`; the number of redraws is stored in `redraws`.
Graph sample_graph(const FamilySpec& family, std::uint64_t seed, int* redraws = nullptr);

/// Measured D, c and T(n) of g.
struct GraphProfile {
  UniformityReport uniformity;
  MixingReport mixing;
};

GraphProfile profile_graph(const Graph& g, WalkMode mode = WalkMode::Simple);

/// Table I parameters with measured D, c and T(n).
DesignParams auto_params(const GraphProfile& profile, int n, int d, double eta,
                         const DesignConstants& constants = calibrated_constants());
DesignParams auto_params(const Graph& g, int d, double eta,
                         const DesignConstants& constants = calibrated_constants());

/// First m rows of M (recorded walks are dropped).
MeasurementMatrix prefix_rows(const MeasurementMatrix& M, int m);

struct SweepPoint {
  double value = 0.0;
  double success_rate = 0.0;
  long long trials = 0;
  double half_width = 0.0;
};

struct SweepResult {
  std::string axis = "m";
  std::string criterion;  // "disjunct" or "recovery"
  std::vector<SweepPoint> points;
  /// Smallest m with success >= 95% over trials, if reached below the
  /// largest grid value.
  std::optional<long long> min_m_95;
  /// Per-trial smallest m that succeeds (monotone criteria only); -1 if
  /// none up to the largest grid value.
  std::vector<long long> trial_min_m;
  std::string family;
  int design = 1;
  int d = 0;
  std::uint64_t seed = 0;
};

struct SweepConfig {
  FamilySpec family;
  int design = 1;
  int d = 2;
  double eta = 0.0;
  NoiseModel noise;
  std::vector<long long> m_grid;  // empty: geometric grid up to 2 m'
  int trials = 100;
  std::uint64_t seed = 0;
  std::string criterion = "auto";  // auto, disjunct or recovery
  std::string start = "uniform";   // uniform or fixed (vertex 0) for Designs 2/4
  DesignConstants constants = calibrated_constants();
  double budget = 1e8;
  int workers = 0;
};

/// Success rate against m. Trial i samples its graph, matrix and defective
/// set from streams of (seed, i); smaller m use row prefixes of one matrix.
SweepResult success_sweep(const SweepConfig& config);

struct MixingScalingRow {
  int n = 0;
  int t_mix = 0;
  double ratio = 0.0;  // t_mix / ln n
  int js_bound = 0;
  double conductance = 0.0;  // exact, or the spectral lower bound
  int redraws = 0;
};

struct MixingScalingResult {
  FamilySpec family;  // n ignored
  bool lazy = false;
  std::vector<MixingScalingRow> rows;
  double band = 0.0;  // max ratio / min ratio
  bool js_holds = true;
};

/// T(n) across n_grid. Family "gnp-log" uses G(n, ceil(6 ln n) / n).
MixingScalingResult mixing_scaling(const FamilySpec& family, const std::vector<int>& n_grid,
                                   std::uint64_t seed, bool lazy = false);

struct FixedInputResult {
  double gamma = 0.0;
  long long m_full = 0;      // m'_i
  long long m_scaled = 0;    // ceil(gamma m'_i)
  SweepResult recovery;      // random-instance recovery
  SweepResult disjunct;      // worst-case disjunctness on the same matrices
};

/// Paired sweep on the same matrices: random-instance recovery against
/// worst-case disjunctness.
FixedInputResult fixed_input_experiment(const SweepConfig& config);

/// gamma = ln n / (d ln(n / d)).
double fixed_input_gamma(int n, int d);

struct CheckLine {
  enum class Status { Pass, Fail, Skip, Info };
  std::string name;
  Status status = Status::Info;
  double measured = 0.0;
  double bound = 0.0;
  double half_width = 0.0;
  std::string note;
};

std::string to_string(CheckLine::Status status);

struct VerifyConfig {
  int d = 2;
  long long trials = 100000;
  long long influence_trials = 1000000;
  std::uint64_t seed = 0;
  int workers = 0;
  Calibration calibration = frozen_calibration();
};

struct VerificationReport {
  std::string graph;
  int n = 0;
  int min_degree = 0;
  double c = 0.0;
  int mixing = 0;
  std::vector<CheckLine> checks;

  bool all_pass() const;
};

/// One line per claim: stationary bounds, visit probability, visit-count
/// tail, early visits, influence, the avoiding-walk floors and, on complete
/// graphs, the sink-walk tightness.
VerificationReport verification_suite(const Graph& g, const VerifyConfig& config);

/// Lower-bound expressions (without beta) of the floors.
double pi_visit_scale(int t, double c, int n, int mixing);              // t / (c n T)
double pi_avoid_scale(double c, int d, int mixing);                     // 1 / (c^4 d T^2)
double pi_sink_avoid_scale(double c, int d, int mixing);                // 1 / (c^8 d^2 T^4)

struct TomographyPlan {
  int t = 0;
  long long m = 0;
  long long tau = 0;
  double eta = 0.0;
  long long e = 0;      // tolerance eta pi_lo m'
  long long flips = 0;  // flip quantile on the busiest link (= tau)
  double pi_max = 0.0;  // largest per-link probe probability
  double pi_lo = 0.0;   // floor on P[probe uses a link and avoids d others]
  DesignParams params;
};

/// Design 2 parameters for probing from `source` with at most d congested
/// links. With q > 0 the tolerance is e(eta) = eta pi_lo m'(eta), with link
/// probabilities estimated from `estimate_walks` probes. tau covers the
/// `confidence` flip quantile on the busiest link and eta is the smallest
/// value with e >= tau + 1 + (flip quantile on the weakest link).
TomographyPlan tomography_plan(const Graph& g, int source, int d, double q,
                               double confidence = 0.99, std::uint64_t seed = 0,
                               int estimate_walks = 100000,
                               const DesignConstants& constants = calibrated_constants());

struct TomographyConfig {
  int source = 0;
  std::vector<int> congested;  // edge ids
  double q = 0.0;
  int t = 0;
  long long m = 0;
  long long tau = 0;
  std::uint64_t seed = 0;
  int workers = 0;
};

struct LinkVerdict {
  int edge = 0;
  int u = 0;
  int v = 0;
  bool congested = false;
  bool flagged = false;
  long long probes = 0;    // probes routed through the link
  long long returned = 0;  // of those, probes reported back
};

struct TomographyReport {
  int source = 0;
  int t = 0;
  long long probes = 0;
  long long returned = 0;
  long long tau = 0;
  std::vector<int> congested;
  std::vector<int> identified;
  std::vector<LinkVerdict> links;  // congested or flagged links
  bool exact = false;
};

/// Probes are Design-2 walks from the source; a probe is lost iff its route
/// crosses a congested link, then each report is flipped with probability q.
TomographyReport tomography_demo(const Graph& g, const TomographyConfig& config);

std::string sweep_to_csv(const SweepResult& r);
std::string mixing_scaling_to_csv(const MixingScalingResult& r);
std::string verification_to_csv(const VerificationReport& r);

}  // namespace walktest
