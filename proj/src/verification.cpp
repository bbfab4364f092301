#include <algorithm>
#include <cmath>
#include <sstream>

#include "walktest/error.hpp"
#include "walktest/experiments.hpp"

namespace walktest {

std::string to_string(CheckLine::Status status) {
  switch (status) {
    case CheckLine::Status::Pass: return "pass";
    case CheckLine::Status::Fail: return "fail";
    case CheckLine::Status::Skip: return "skip";
    case CheckLine::Status::Info: return "info";
  }
  return "info";
}

bool VerificationReport::all_pass() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckLine& c) { return c.status == CheckLine::Status::Fail; });
}

double pi_visit_scale(int t, double c, int n, int mixing) {
  return static_cast<double>(t) / (c * n * mixing);
}

double pi_avoid_scale(double c, int d, int mixing) {
  return 1.0 / (std::pow(c, 4) * d * static_cast<double>(mixing) * mixing);
}

double pi_sink_avoid_scale(double c, int d, int mixing) {
  return 1.0 / (std::pow(c, 8) * d * d * std::pow(static_cast<double>(mixing), 4));
}

namespace {

using Status = CheckLine::Status;

CheckLine floor_line(std::string name, const Estimate& e, double bound, std::string note) {
  CheckLine line{std::move(name), e.value >= bound ? Status::Pass : Status::Fail, e.value, bound,
                 e.half_width, std::move(note)};
  return line;
}

std::string describe_set(const std::vector<int>& items) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < items.size(); ++i) out << (i ? " " : "") << items[i];
  out << '}';
  return out.str();
}

// d distinct vertices different from everything in `exclude`.
std::vector<int> pick_vertices(int n, int d, const std::vector<int>& exclude, Rng& rng) {
  std::vector<int> out;
  while (static_cast<int>(out.size()) < d) {
    const int v = uniform_index(rng, n);
    if (std::find(exclude.begin(), exclude.end(), v) != exclude.end()) continue;
    if (std::find(out.begin(), out.end(), v) != out.end()) continue;
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

VerificationReport verification_suite(const Graph& g, const VerifyConfig& cfg) {
  const int n = g.num_vertices();
  require(cfg.d >= 1 && cfg.d + 2 <= n, ErrorKind::InvalidParameter, "need 1 <= d <= n - 2");
  VerificationReport r;
  const UniformityReport u = uniformity(g);
  r.n = n;
  r.min_degree = u.min_degree;
  r.c = u.c;

  // Stationary bounds need no sampling.
  if (g.connected()) {
    const auto mu = stationary_distribution(g, WalkMode::Lazy).probs;
    const auto [lo, hi] = stationary_bounds(g);
    double slack = std::numeric_limits<double>::infinity();
    for (int v = 0; v < n; ++v) slack = std::min({slack, mu[v] - lo, hi - mu[v]});
    r.checks.push_back({"stationary-bounds", slack >= 0 ? Status::Pass : Status::Fail, slack, 0.0,
                        0.0, "min over v of the distance to [1/(cn), c/n]"});
  } else {
    r.checks.push_back({"stationary-bounds", Status::Skip, 0, 0, 0, "disconnected graph"});
  }

  const char* skip_reason = !g.connected() ? "disconnected graph"
                            : g.bipartite() ? "bipartite graph: simple walk does not mix"
                                            : nullptr;
  const std::vector<std::string> sampled = {"visit-probability", "visit-tail", "early-visit",
                                            "influence", "avoid-floor", "sink-avoid-floor",
                                            "sink-tightness"};
  if (skip_reason) {
    for (const auto& name : sampled) r.checks.push_back({name, Status::Skip, 0, 0, 0, skip_reason});
    return r;
  }

  const GraphProfile prof = profile_graph(g);
  const int T = prof.mixing.t_mix;
  r.mixing = T;
  const double c = u.c;
  const DesignParams params = auto_params(prof, n, cfg.d, 0.0, cfg.calibration.constants);
  const int t = params.t1;
  TrialConfig tc;
  tc.trials = cfg.trials;
  tc.workers = cfg.workers;
  Rng pick = stream_rng(cfg.seed, 0, 0x7069636b);

  int hub = 0, leaf = 0;
  for (int v = 0; v < n; ++v) {
    if (g.degree(v) > g.degree(hub)) hub = v;
    if (g.degree(v) < g.degree(leaf)) leaf = v;
  }

  {
    tc.seed = stream_seed(cfg.seed, 1);
    const Estimate e = estimate_pi_item(g, {ItemKind::Vertex, leaf}, t, StartRule::uniform(), tc);
    const double bound = cfg.calibration.beta_visit * pi_visit_scale(t, c, n, T);
    r.checks.push_back(floor_line("visit-probability", e, bound,
                                  "min-degree vertex " + std::to_string(leaf) + ", t=" +
                                      std::to_string(t)));
  }
  {
    tc.seed = stream_seed(cfg.seed, 2);
    const int k = static_cast<int>(std::ceil(8.0 * c * c * T));
    const TailReport tail =
        check_visit_count_tail(g, {ItemKind::Vertex, hub}, t, k, StartRule::uniform(), tc);
    r.checks.push_back({"visit-tail", tail.pass ? Status::Pass : Status::Fail, tail.tail.value,
                        tail.bound, tail.tail.half_width,
                        "P[visits > " + std::to_string(k) + "] against pi_v/4"});
  }
  {
    tc.seed = stream_seed(cfg.seed, 3);
    const int k = 2 * T;
    const EarlyVisitReport early = check_early_visit(g, hub, k, StartRule::uniform(), tc);
    r.checks.push_back({"early-visit", early.pass ? Status::Pass : Status::Fail,
                        early.early.value, early.bound, early.early.half_width,
                        "first " + std::to_string(k) + " positions against k/D"});
  }
  {
    TrialConfig ic = tc;
    ic.trials = cfg.influence_trials;
    ic.seed = stream_seed(cfg.seed, 4);
    const InfluenceReport inf = check_influence(g, T, 2 * T, T, StartRule::uniform(), ic);
    r.checks.push_back({"influence", inf.pass ? Status::Pass : Status::Fail, inf.max_excess,
                        inf.bound, 0.0,
                        "max deviation " + std::to_string(inf.max_deviation) + " over " +
                            std::to_string(inf.pairs_checked) + " pairs, " +
                            std::to_string(inf.pairs_skipped) + " skipped"});
  }
  {
    tc.seed = stream_seed(cfg.seed, 5);
    const int v = uniform_index(pick, n);
    const auto A = pick_vertices(n, cfg.d, {v}, pick);
    const Estimate e =
        estimate_pi_item_avoiding(g, {ItemKind::Vertex, v}, A, t, StartRule::uniform(), tc);
    const double bound = cfg.calibration.beta_avoid * pi_avoid_scale(c, cfg.d, T);
    r.checks.push_back(floor_line("avoid-floor", e, bound,
                                  "v=" + std::to_string(v) + " A=" + describe_set(A)));
  }
  {
    tc.seed = stream_seed(cfg.seed, 6);
    const int sink = uniform_index(pick, n);
    const int v = pick_vertices(n, 1, {sink}, pick)[0];
    std::vector<int> used{sink, v};
    const auto A = pick_vertices(n, cfg.d, used, pick);
    const SinkEstimate s = estimate_pi_sink_avoiding(g, {ItemKind::Vertex, v}, A, sink,
                                                     default_sink_cap(g), StartRule::uniform(), tc);
    const double bound = cfg.calibration.beta_sink_avoid * pi_sink_avoid_scale(c, cfg.d, T);
    r.checks.push_back(floor_line("sink-avoid-floor", s.estimate, bound,
                                  "u=" + std::to_string(sink) + " v=" + std::to_string(v) +
                                      " A=" + describe_set(A)));

    // On K_n the first visits to A, v and u come in uniform order, so the
    // probability is exactly 1 / ((d + 1)(d + 2)).
    const double exact = 1.0 / ((cfg.d + 1.0) * (cfg.d + 2.0));
    const bool complete = g.num_edges() == static_cast<long long>(n) * (n - 1) / 2;
    const double scaled = s.estimate.value / exact;
    if (complete) {
      r.checks.push_back({"sink-tightness", scaled >= 0.8 && scaled <= 1.2 ? Status::Pass : Status::Fail,
                          scaled, 1.0, s.estimate.half_width / exact,
                          "estimate times (d+1)(d+2), accepted in [0.8, 1.2]"});
    } else {
      r.checks.push_back({"sink-tightness", Status::Info, scaled, 1.0,
                          s.estimate.half_width / exact, "exact only on complete graphs"});
    }
  }
  return r;
}

}  // namespace walktest
