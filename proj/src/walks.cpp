#include "walktest/walks.hpp"

#include <algorithm>
#include <cmath>

#include "walktest/error.hpp"

namespace walktest {

void StartRule::validate(const Graph& g) const {
  switch (kind) {
    case Kind::Uniform:
      require(g.num_vertices() > 0, ErrorKind::InvalidParameter, "empty graph");
      break;
    case Kind::Fixed:
      require(g.has_vertex(fixed), ErrorKind::InvalidParameter,
              "fixed start vertex out of range: " + std::to_string(fixed));
      break;
    case Kind::DesignatedRoundRobin:
    case Kind::DesignatedUniform:
      require(!designated.empty(), ErrorKind::InvalidParameter,
              "designated start rule needs at least one vertex");
      for (int v : designated)
        require(g.has_vertex(v), ErrorKind::InvalidParameter,
                "designated vertex out of range: " + std::to_string(v));
      break;
  }
}

int StartRule::resolve(const Graph& g, std::uint64_t index, Rng& rng) const {
  switch (kind) {
    case Kind::Uniform: return uniform_index(rng, g.num_vertices());
    case Kind::Fixed: return fixed;
    case Kind::DesignatedRoundRobin: return designated[index % designated.size()];
    case Kind::DesignatedUniform:
      return designated[uniform_index(rng, static_cast<int>(designated.size()))];
  }
  return 0;
}

namespace {

// One step from `at`; returns the edge taken or -1 for a lazy stay.
inline int step(const Graph& g, int& at, Rng& rng, WalkMode mode) {
  if (mode == WalkMode::Lazy && bernoulli(rng, 0.5)) return -1;
  const int k = uniform_index(rng, g.degree(at));
  const int e = g.incident_edges(at)[k];
  at = g.neighbors(at)[k];
  return e;
}

void require_movable(const Graph& g, int start) {
  require(g.has_vertex(start), ErrorKind::InvalidParameter,
          "start vertex out of range: " + std::to_string(start));
  require(g.degree(start) > 0, ErrorKind::InvalidParameter,
          "walk cannot leave isolated vertex " + std::to_string(start));
}

}  // namespace

Walk walk_fixed(const Graph& g, int start, int steps, Rng& rng, WalkMode mode) {
  require(steps >= 0, ErrorKind::InvalidParameter, "walk length must be >= 0");
  require(g.has_vertex(start), ErrorKind::InvalidParameter,
          "start vertex out of range: " + std::to_string(start));
  Walk w;
  w.vertices.reserve(steps + 1);
  w.vertices.push_back(start);
  if (steps > 0) require_movable(g, start);
  int at = start;
  for (int s = 0; s < steps; ++s) {
    const int e = step(g, at, rng, mode);
    if (e >= 0) w.edges.push_back(e);
    w.vertices.push_back(at);
  }
  w.terminated_by = Termination::LengthReached;
  return w;
}

Walk walk_to_sink(const Graph& g, int start, int sink, long long cap, Rng& rng,
                  WalkMode mode) {
  require(g.has_vertex(sink), ErrorKind::InvalidParameter,
          "sink out of range: " + std::to_string(sink));
  require(cap >= 1, ErrorKind::InvalidParameter, "sink walk cap must be >= 1");
  Walk w;
  w.vertices.push_back(start);
  if (start == sink) {
    w.terminated_by = Termination::SinkReached;
    return w;
  }
  require_movable(g, start);
  int at = start;
  for (long long s = 0; s < cap; ++s) {
    const int e = step(g, at, rng, mode);
    if (e >= 0) w.edges.push_back(e);
    w.vertices.push_back(at);
    if (at == sink) {
      w.terminated_by = Termination::SinkReached;
      return w;
    }
  }
  w.terminated_by = Termination::CapExceeded;
  return w;
}

long long default_sink_cap(const Graph& g) {
  const long long n = g.num_vertices();
  return std::max(1LL, n * n * n);
}

bool walk_consistent(const Graph& g, const Walk& w, WalkMode mode) {
  if (w.vertices.empty()) return false;
  std::size_t e = 0;
  for (std::size_t i = 0; i + 1 < w.vertices.size(); ++i) {
    const int a = w.vertices[i], b = w.vertices[i + 1];
    if (a == b) {
      if (mode != WalkMode::Lazy) return false;
      continue;
    }
    const auto id = g.edge_id(a, b);
    if (!id || e >= w.edges.size() || w.edges[e] != *id) return false;
    ++e;
  }
  return e == w.edges.size();
}

Estimate Estimate::from_counts(long long hits, long long trials) {
  Estimate est;
  est.trials = trials;
  est.value = trials > 0 ? static_cast<double>(hits) / trials : 0.0;
  est.half_width = trials > 0 ? 1.96 * std::sqrt(est.value * (1 - est.value) / trials) : 0.0;
  return est;
}

int count_passes(const Walk& w, Item item) {
  const auto& seq = item.kind == ItemKind::Vertex ? w.vertices : w.edges;
  return static_cast<int>(std::count(seq.begin(), seq.end(), item.id));
}

namespace {

void require_item(const Graph& g, Item item) {
  const int limit = item.kind == ItemKind::Vertex ? g.num_vertices() : g.num_edges();
  require(item.id >= 0 && item.id < limit, ErrorKind::InvalidParameter,
          "item id out of range: " + std::to_string(item.id));
}

std::vector<char> avoid_mask(const Graph& g, Item item, const std::vector<int>& avoid) {
  const int limit = item.kind == ItemKind::Vertex ? g.num_vertices() : g.num_edges();
  std::vector<char> mask(limit, 0);
  for (int a : avoid) {
    require(a >= 0 && a < limit, ErrorKind::InvalidParameter,
            "avoid-set id out of range: " + std::to_string(a));
    require(a != item.id, ErrorKind::InvalidParameter, "item must not lie in the avoid set");
    mask[a] = 1;
  }
  return mask;
}

// Runs `trial(i, rng)` for every trial index and counts true results.
template <typename Trial>
long long count_trials(const TrialConfig& cfg, Trial&& trial) {
  require(cfg.trials >= 1, ErrorKind::InvalidParameter, "trials must be >= 1");
  std::vector<char> hit(cfg.trials, 0);
  parallel_for(static_cast<std::size_t>(cfg.trials), resolve_workers(cfg.workers),
               [&](std::size_t i) {
                 Rng rng = stream_rng(cfg.seed, i);
                 hit[i] = trial(i, rng) ? 1 : 0;
               });
  long long total = 0;
  for (char h : hit) total += h;
  return total;
}

// Fixed-length walk that reports whether it passes `item` while avoiding the
// masked items; stops early on hitting the avoid set.
bool passes_avoiding(const Graph& g, Item item, const std::vector<char>& avoid, int start,
                     int t, Rng& rng, WalkMode mode) {
  const bool vertex = item.kind == ItemKind::Vertex;
  bool hit = false;
  int at = start;
  if (vertex) {
    if (avoid[at]) return false;
    hit = at == item.id;
  }
  if (t > 0) require_movable(g, start);
  for (int s = 0; s < t; ++s) {
    const int e = step(g, at, rng, mode);
    const int id = vertex ? at : e;
    if (id < 0) continue;
    if (avoid[id]) return false;
    hit = hit || id == item.id;
  }
  return hit;
}

}  // namespace

Estimate estimate_pi_item(const Graph& g, Item item, int t, const StartRule& start,
                          const TrialConfig& cfg) {
  return estimate_pi_item_avoiding(g, item, {}, t, start, cfg);
}

Estimate estimate_pi_item_avoiding(const Graph& g, Item item, const std::vector<int>& avoid,
                                   int t, const StartRule& start, const TrialConfig& cfg) {
  require_item(g, item);
  require(t >= 0, ErrorKind::InvalidParameter, "walk length must be >= 0");
  start.validate(g);
  const auto mask = avoid_mask(g, item, avoid);
  const long long hits = count_trials(cfg, [&](std::size_t i, Rng& rng) {
    const int s = start.resolve(g, i, rng);
    return passes_avoiding(g, item, mask, s, t, rng, cfg.mode);
  });
  return Estimate::from_counts(hits, cfg.trials);
}

SinkEstimate estimate_pi_sink_avoiding(const Graph& g, Item item, const std::vector<int>& avoid,
                                       int sink, long long cap, const StartRule& start,
                                       const TrialConfig& cfg) {
  require_item(g, item);
  require(g.has_vertex(sink), ErrorKind::InvalidParameter, "sink out of range");
  require(cap >= 1, ErrorKind::InvalidParameter, "sink walk cap must be >= 1");
  start.validate(g);
  const auto mask = avoid_mask(g, item, avoid);
  const bool vertex = item.kind == ItemKind::Vertex;
  if (vertex) {
    require(item.id != sink && !mask[sink], ErrorKind::InvalidParameter,
            "sink must differ from the item and the avoid set");
  }
  std::vector<char> capped(cfg.trials, 0);
  const long long hits = count_trials(cfg, [&](std::size_t i, Rng& rng) {
    int at = start.resolve(g, i, rng);
    bool hit = false;
    if (vertex) {
      if (mask[at]) return false;
      hit = at == item.id;
    }
    if (at == sink) return hit;
    require_movable(g, at);
    for (long long s = 0; s < cap; ++s) {
      const int e = step(g, at, rng, cfg.mode);
      const int id = vertex ? at : e;
      if (id >= 0) {
        if (mask[id]) return false;
        hit = hit || id == item.id;
      }
      if (at == sink) return hit;
    }
    capped[i] = 1;
    return false;
  });
  SinkEstimate out;
  out.estimate = Estimate::from_counts(hits, cfg.trials);
  for (char c : capped) out.cap_exceeded += c;
  return out;
}

TailReport check_visit_count_tail(const Graph& g, Item item, int t, int k,
                                  const StartRule& start, const TrialConfig& cfg) {
  require_item(g, item);
  start.validate(g);
  require(cfg.trials >= 1, ErrorKind::InvalidParameter, "trials must be >= 1");
  std::vector<int> passes(cfg.trials, 0);
  parallel_for(static_cast<std::size_t>(cfg.trials), resolve_workers(cfg.workers),
               [&](std::size_t i) {
                 Rng rng = stream_rng(cfg.seed, i);
                 const int s = start.resolve(g, i, rng);
                 passes[i] = count_passes(walk_fixed(g, s, t, rng, cfg.mode), item);
               });
  long long tail = 0, any = 0;
  for (int p : passes) {
    tail += p > k;
    any += p > 0;
  }
  TailReport r;
  r.tail = Estimate::from_counts(tail, cfg.trials);
  r.pi = Estimate::from_counts(any, cfg.trials);
  r.bound = r.pi.value / 4.0;
  // half_width = 1.96 sigma; combine the two sigmas.
  const double sigma = std::hypot(r.tail.half_width, r.pi.half_width / 4.0) / 1.96;
  r.pass = r.tail.value <= r.bound + 3.0 * sigma;
  return r;
}

EarlyVisitReport check_early_visit(const Graph& g, int v, int k, const StartRule& start,
                                   const TrialConfig& cfg) {
  require(g.has_vertex(v), ErrorKind::InvalidParameter, "vertex out of range");
  require(k >= 0, ErrorKind::InvalidParameter, "k must be >= 0");
  start.validate(g);
  if (start.kind == StartRule::Kind::DesignatedRoundRobin ||
      start.kind == StartRule::Kind::DesignatedUniform) {
    require(std::find(start.designated.begin(), start.designated.end(), v) ==
                start.designated.end(),
            ErrorKind::InvalidParameter, "vertex must not be designated");
  }
  const long long hits = count_trials(cfg, [&](std::size_t i, Rng& rng) {
    if (k == 0) return false;
    const int s = start.resolve(g, i, rng);
    const Walk w = walk_fixed(g, s, k - 1, rng, cfg.mode);
    return std::find(w.vertices.begin(), w.vertices.end(), v) != w.vertices.end();
  });
  EarlyVisitReport r;
  r.early = Estimate::from_counts(hits, cfg.trials);
  r.bound = static_cast<double>(k) / g.min_degree();
  r.pass = r.early.value <= r.bound + 3.0 * r.early.half_width / 1.96;
  return r;
}

InfluenceReport check_influence(const Graph& g, int i, int j, int mixing_time,
                                const StartRule& start, const TrialConfig& cfg,
                                int min_conditional) {
  require(i >= 0 && j >= i, ErrorKind::InvalidParameter, "need 0 <= i <= j");
  require(j - i >= mixing_time, ErrorKind::InvalidParameter,
          "influence check needs j - i >= T(n)");
  require(!g.bipartite() || cfg.mode == WalkMode::Lazy, ErrorKind::NonMixingGraph,
          "influence check needs a non-bipartite graph");
  start.validate(g);
  const int n = g.num_vertices();
  std::vector<std::pair<int, int>> samples(cfg.trials);
  parallel_for(static_cast<std::size_t>(cfg.trials), resolve_workers(cfg.workers),
               [&](std::size_t trial) {
                 Rng rng = stream_rng(cfg.seed, trial);
                 const int s = start.resolve(g, trial, rng);
                 const Walk w = walk_fixed(g, s, j, rng, cfg.mode);
                 samples[trial] = {w.vertices[i], w.vertices[j]};
               });
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [a, b] : samples) joint(a, b) += 1.0;
  const Eigen::VectorXd at_i = joint.rowwise().sum();
  const Eigen::RowVectorXd at_j = joint.colwise().sum();
  const double total = static_cast<double>(cfg.trials);

  InfluenceReport r;
  r.bound = 2.0 / (3.0 * uniformity(g).c * n);
  r.max_excess = -1.0;
  for (int v = 0; v < n; ++v) {
    if (at_j[v] < min_conditional) {
      r.pairs_skipped += n;
      continue;
    }
    for (int u = 0; u < n; ++u) {
      const double marginal = at_i[u] / total;
      const double conditional = joint(u, v) / at_j[v];
      const double sigma = std::sqrt(conditional * (1 - conditional) / at_j[v] +
                                     marginal * (1 - marginal) / total);
      const double dev = std::abs(conditional - marginal);
      r.max_deviation = std::max(r.max_deviation, dev);
      r.max_excess = std::max(r.max_excess, dev - 3.0 * sigma);
      ++r.pairs_checked;
    }
  }
  r.pass = r.pairs_checked > 0 && r.max_excess <= r.bound;
  return r;
}

}  // namespace walktest
