#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "walktest/graph.hpp"
#include "walktest/random.hpp"

namespace walktest {

enum class Termination { LengthReached, SinkReached, CapExceeded };

/// Vertex/edge trace of one walk. In lazy mode a stay-step appends the same
/// vertex again and records no edge, so edges.size() may be smaller than
/// vertices.size() - 1.
struct Walk {
  std::vector<int> vertices;
  std::vector<int> edges;
  Termination terminated_by = Termination::LengthReached;
};

/// Where each walk starts.
struct StartRule {
  enum class Kind { Uniform, DesignatedRoundRobin, DesignatedUniform, Fixed };
  Kind kind = Kind::Uniform;
  std::vector<int> designated;
  int fixed = 0;

  static StartRule uniform() { return {}; }
  static StartRule at(int v) { return {Kind::Fixed, {}, v}; }
  static StartRule round_robin(std::vector<int> vs) {
    return {Kind::DesignatedRoundRobin, std::move(vs), 0};
  }
  static StartRule designated_uniform(std::vector<int> vs) {
    return {Kind::DesignatedUniform, std::move(vs), 0};
  }

  /// Validates the rule against g; throws InvalidParameter.
  void validate(const Graph& g) const;
  /// Start vertex for row/trial `index`.
  int resolve(const Graph& g, std::uint64_t index, Rng& rng) const;
};

Walk walk_fixed(const Graph& g, int start, int steps, Rng& rng,
                WalkMode mode = WalkMode::Simple);
Walk walk_to_sink(const Graph& g, int start, int sink, long long cap, Rng& rng,
                  WalkMode mode = WalkMode::Simple);

/// Default cap for sink walks: n^3 steps.
long long default_sink_cap(const Graph& g);

/// True iff consecutive vertices are adjacent (or equal, in lazy mode) and
/// every recorded edge joins the corresponding consecutive pair.
bool walk_consistent(const Graph& g, const Walk& w, WalkMode mode = WalkMode::Simple);

enum class ItemKind { Vertex, Edge };

struct Item {
  ItemKind kind = ItemKind::Vertex;
  int id = 0;
};

/// Fraction of trials with an event, with a 95% normal-approximation
/// half-width.
struct Estimate {
  double value = 0.0;
  long long trials = 0;
  double half_width = 0.0;

  static Estimate from_counts(long long hits, long long trials);
};

struct SinkEstimate {
  Estimate estimate;
  long long cap_exceeded = 0;
};

/// Shared knobs of the Monte Carlo estimators. Trial i uses the stream
/// (seed, i) regardless of the worker count.
struct TrialConfig {
  long long trials = 100000;
  std::uint64_t seed = 0;
  int workers = 0;
  WalkMode mode = WalkMode::Simple;
};

/// P[walk of length t passes item].
Estimate estimate_pi_item(const Graph& g, Item item, int t, const StartRule& start,
                          const TrialConfig& cfg);

/// P[walk of length t passes item and none of avoid].
Estimate estimate_pi_item_avoiding(const Graph& g, Item item, const std::vector<int>& avoid,
                                   int t, const StartRule& start, const TrialConfig& cfg);

/// Same for walks run until they reach `sink`. Capped walks count as misses.
SinkEstimate estimate_pi_sink_avoiding(const Graph& g, Item item, const std::vector<int>& avoid,
                                       int sink, long long cap, const StartRule& start,
                                       const TrialConfig& cfg);

/// Number of passes of `item` by the walk (vertex visits or edge traversals).
int count_passes(const Walk& w, Item item);

struct TailReport {
  Estimate tail;     // P[passes > k]
  Estimate pi;       // P[passes >= 1]
  double bound = 0;  // pi / 4
  bool pass = false; // tail <= pi/4 + 3 * combined sigma
};

TailReport check_visit_count_tail(const Graph& g, Item item, int t, int k,
                                  const StartRule& start, const TrialConfig& cfg);

struct EarlyVisitReport {
  Estimate early;    // P[v among v_0 .. v_{k-1}]
  double bound = 0;  // k / D
  bool pass = false;
};

/// Walks run for k steps from `start`; v must not be a designated vertex.
EarlyVisitReport check_early_visit(const Graph& g, int v, int k, const StartRule& start,
                                   const TrialConfig& cfg);

struct InfluenceReport {
  double max_deviation = 0.0;
  double max_excess = 0.0;  // max over pairs of deviation - 3 sigma
  double bound = 0.0;       // 2 / (3 c n)
  int pairs_checked = 0;
  int pairs_skipped = 0;
  bool pass = false;
};

/// Compares P[v_i = u | v_j = v] against P[v_i = u] over all (u, v) pairs
/// with at least `min_conditional` samples. Requires j - i >= mixing_time.
InfluenceReport check_influence(const Graph& g, int i, int j, int mixing_time,
                                const StartRule& start, const TrialConfig& cfg,
                                int min_conditional = 100);

}  // namespace walktest
