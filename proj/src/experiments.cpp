#include "walktest/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "walktest/error.hpp"

namespace walktest {

std::string FamilySpec::describe() const {
  std::ostringstream out;
  out << family << "(n=" << n;
  if (family == "gnp") {
    if (p > 0)
      out << ", p=" << p;
    else
      out << ", degree=" << degree;
  } else if (family == "regular" || family == "gnp-log") {
    if (degree > 0) out << ", degree=" << degree;
  }
  out << ")";
  return out.str();
}

Graph sample_graph(const FamilySpec& f, std::uint64_t seed, int* redraws) {
  require(f.n >= 1, ErrorKind::InvalidParameter, "family needs n >= 1");
  if (redraws) *redraws = 0;
  if (f.family == "complete") return gen_complete(f.n);
  if (f.family == "cycle") return gen_cycle(f.n);
  if (f.family == "regular") return gen_random_regular(f.n, f.degree, seed);
  if (f.family == "gnp" || f.family == "gnp-log") {
    double p = f.p;
    if (f.family == "gnp-log") {
      p = std::ceil(6.0 * std::log(static_cast<double>(f.n))) / f.n;
    } else if (p <= 0) {
      require(f.degree > 0, ErrorKind::InvalidParameter, "gnp needs p or degree");
      p = static_cast<double>(f.degree) / f.n;
    }
    p = std::min(p, 1.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
      Graph g = gen_erdos_renyi(f.n, p, attempt == 0 ? seed : stream_seed(seed, attempt));
      if (g.connected() && !g.bipartite()) return g;
      if (redraws) ++*redraws;
    }
    throw Error(ErrorKind::GenerationFailure, "no connected sample of " + f.describe());
  }
  throw Error(ErrorKind::InvalidParameter, "unknown graph family: " + f.family);
}

GraphProfile profile_graph(const Graph& g, WalkMode mode) {
  GraphProfile p;
  p.uniformity = uniformity(g);
  MixingOptions opts;
  opts.mode = mode;
  p.mixing = mixing_time(g, default_mixing_delta(g), opts);
  return p;
}

DesignParams auto_params(const GraphProfile& profile, int n, int d, double eta,
                         const DesignConstants& constants) {
  return table1_params(n, d, profile.uniformity.min_degree, profile.uniformity.c,
                       profile.mixing.t_mix, eta, constants);
}

DesignParams auto_params(const Graph& g, int d, double eta, const DesignConstants& constants) {
  return auto_params(profile_graph(g), g.num_vertices(), d, eta, constants);
}

MeasurementMatrix prefix_rows(const MeasurementMatrix& M, int m) {
  require(m >= 0 && m <= M.num_rows(), ErrorKind::InvalidParameter, "prefix out of range");
  MeasurementMatrix out;
  out.item_kind = M.item_kind;
  out.n_items = M.n_items;
  out.rows.assign(M.rows.begin(), M.rows.begin() + m);
  out.stripped = M.stripped;
  out.design = M.design;
  out.seed = M.seed;
  return out;
}

double fixed_input_gamma(int n, int d) {
  require(d >= 1 && d < n, ErrorKind::InvalidParameter, "need 1 <= d < n");
  return std::log(static_cast<double>(n)) / (d * std::log(static_cast<double>(n) / d));
}

namespace {

// Stream sub-indices of one sweep trial.
enum : std::uint64_t { kGraphStream = 1, kMatrixStream = 2, kDefectStream = 3, kNoiseStream = 4 };

struct TrialSetup {
  Graph graph;
  DesignParams params;
  MeasurementMatrix matrix;
  std::vector<int> columns;  // columns for disjunctness and defectives
};

bool deterministic_family(const FamilySpec& f) {
  return f.family == "complete" || f.family == "cycle";
}

TrialSetup setup_trial(const SweepConfig& cfg, std::size_t i, int rows,
                       const GraphProfile* cached) {
  TrialSetup s{sample_graph(cfg.family, stream_seed(cfg.seed, i, kGraphStream)), {}, {}, {}};
  const Graph& g = s.graph;
  const GraphProfile prof = cached ? *cached : profile_graph(g);
  s.params = auto_params(prof, g.num_vertices(), cfg.d, cfg.eta, cfg.constants);
  const std::uint64_t mseed = stream_seed(cfg.seed, i, kMatrixStream);
  const int n = g.num_vertices();
  const StartRule start =
      cfg.start == "fixed" ? StartRule::at(0) : StartRule::uniform();
  switch (cfg.design) {
    case 1: s.matrix = design1(g, start, rows, s.params.t1, mseed, 1); break;
    case 2: s.matrix = design2(g, start, rows, s.params.t2, mseed, 1); break;
    case 3: s.matrix = design3(g, start, n - 1, rows, default_sink_cap(g), mseed, 1); break;
    case 4: s.matrix = design4(g, start, n - 1, rows, default_sink_cap(g), mseed, 1); break;
    default: throw Error(ErrorKind::InvalidParameter, "design must be 1..4");
  }
  s.matrix.walks.clear();
  s.columns = s.matrix.columns();
  if (cfg.design == 4) {
    const auto inc = sink_incident_edges(g, n - 1);
    std::erase_if(s.columns, [&](int e) { return std::binary_search(inc.begin(), inc.end(), e); });
  }
  return s;
}

std::vector<int> draw_defectives(const std::vector<int>& columns, int d, Rng& rng) {
  std::vector<int> pool = columns;
  const int k = std::min<int>(d, static_cast<int>(pool.size()));
  for (int j = 0; j < k; ++j) {
    const int pick = j + uniform_index(rng, static_cast<int>(pool.size()) - j);
    std::swap(pool[j], pool[pick]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

// Smallest m in [0, hi] with ok(m), assuming ok is monotone; -1 if !ok(hi).
template <typename Pred>
long long min_true(long long hi, Pred&& ok) {
  if (!ok(hi)) return -1;
  long long lo = 0;
  while (lo < hi) {
    const long long mid = lo + (hi - lo) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

std::vector<long long> default_grid(long long target) {
  std::vector<long long> grid{0};
  const long long top = std::max<long long>(2 * target, 8);
  for (double x = std::max(1.0, top / 64.0); x < top; x *= std::sqrt(2.0))
    grid.push_back(static_cast<long long>(std::ceil(x)));
  grid.push_back(top);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

void finish_monotone(SweepResult& r, const std::vector<long long>& grid) {
  const long long trials = static_cast<long long>(r.trial_min_m.size());
  for (long long m : grid) {
    long long ok = 0;
    for (long long t : r.trial_min_m) ok += t >= 0 && t <= m;
    const Estimate e = Estimate::from_counts(ok, trials);
    r.points.push_back({static_cast<double>(m), e.value, trials, e.half_width});
  }
  std::vector<long long> sorted;
  for (long long t : r.trial_min_m) sorted.push_back(t < 0 ? std::numeric_limits<long long>::max() : t);
  std::sort(sorted.begin(), sorted.end());
  const long long need = static_cast<long long>(std::ceil(0.95 * trials));
  if (need >= 1 && sorted[need - 1] != std::numeric_limits<long long>::max())
    r.min_m_95 = sorted[need - 1];
}

struct SweepPlan {
  std::vector<long long> grid;
  long long rows = 0;
  std::optional<GraphProfile> cached;
  DesignParams reference;  // parameters of trial 0
};

SweepPlan plan_sweep(const SweepConfig& cfg) {
  require(cfg.trials >= 1, ErrorKind::InvalidParameter, "trials must be >= 1");
  SweepPlan plan;
  const Graph g0 = sample_graph(cfg.family, stream_seed(cfg.seed, 0, kGraphStream));
  const GraphProfile prof = profile_graph(g0);
  if (deterministic_family(cfg.family)) plan.cached = prof;
  plan.reference = auto_params(prof, g0.num_vertices(), cfg.d, cfg.eta, cfg.constants);
  plan.grid = cfg.m_grid.empty() ? default_grid(plan.reference.m_noisy[cfg.design - 1])
                                 : cfg.m_grid;
  std::sort(plan.grid.begin(), plan.grid.end());
  plan.grid.erase(std::unique(plan.grid.begin(), plan.grid.end()), plan.grid.end());
  require(!plan.grid.empty() && plan.grid.front() >= 0, ErrorKind::InvalidParameter,
          "m grid must hold values >= 0");
  plan.rows = plan.grid.back();
  return plan;
}

std::string resolve_criterion(const SweepConfig& cfg, int columns) {
  if (cfg.criterion == "disjunct" || cfg.criterion == "recovery") return cfg.criterion;
  require(cfg.criterion == "auto", ErrorKind::InvalidParameter,
          "criterion must be auto, disjunct or recovery");
  return disjunct_work(columns, cfg.d) <= cfg.budget ? "disjunct" : "recovery";
}

}  // namespace

SweepResult success_sweep(const SweepConfig& cfg) {
  require(cfg.design >= 1 && cfg.design <= 4, ErrorKind::InvalidParameter, "design must be 1..4");
  const SweepPlan plan = plan_sweep(cfg);
  SweepResult r;
  r.family = cfg.family.describe();
  r.design = cfg.design;
  r.d = cfg.d;
  r.seed = cfg.seed;

  const int rows = static_cast<int>(plan.rows);
  const bool noiseless = cfg.noise.kind == NoiseModel::Kind::Noiseless;
  DisjunctOptions dopts;
  dopts.budget = cfg.budget;
  dopts.workers = 1;

  // Criterion is fixed by trial 0 so every trial uses the same one.
  {
    const TrialSetup s0 = setup_trial(cfg, 0, 0, plan.cached ? &*plan.cached : nullptr);
    r.criterion = resolve_criterion(cfg, static_cast<int>(s0.columns.size()));
  }
  const bool disjunct = r.criterion == "disjunct";
  const bool monotone = disjunct || noiseless;

  r.trial_min_m.assign(cfg.trials, -1);
  std::vector<std::vector<char>> grid_ok(cfg.trials, std::vector<char>(plan.grid.size(), 0));
  parallel_for(static_cast<std::size_t>(cfg.trials), resolve_workers(cfg.workers),
               [&](std::size_t i) {
    const TrialSetup s = setup_trial(cfg, i, rows, plan.cached ? &*plan.cached : nullptr);
    const long long e = disjunct ? s.params.e[cfg.design - 1] : 0;
    if (disjunct) {
      r.trial_min_m[i] = min_true(rows, [&](long long m) {
        return is_disjunct_on(prefix_rows(s.matrix, static_cast<int>(m)), s.columns, cfg.d,
                              static_cast<int>(e), dopts)
            .disjunct;
      });
      return;
    }
    Rng drng = stream_rng(cfg.seed, i, kDefectStream);
    const DefectiveSet planted{s.matrix.item_kind, draw_defectives(s.columns, cfg.d, drng)};
    Rng nrng = stream_rng(cfg.seed, i, kNoiseStream);
    const OutcomeVector full = simulate_tests(s.matrix, planted, cfg.noise, nrng);
    const long long tau = noiseless ? 0 : s.params.tau(cfg.design);
    auto recovered = [&](long long m) {
      const MeasurementMatrix P = prefix_rows(s.matrix, static_cast<int>(m));
      OutcomeVector y = full;
      y.bits.resize(m);
      auto dec = decode_threshold(P, y, tau);
      // Items outside the candidate columns are never defective here.
      std::erase_if(dec.set.items, [&](int x) {
        return !std::binary_search(s.columns.begin(), s.columns.end(), x);
      });
      return dec.set.items == planted.items;
    };
    if (monotone) {
      r.trial_min_m[i] = min_true(rows, recovered);
    } else {
      for (std::size_t k = 0; k < plan.grid.size(); ++k) grid_ok[i][k] = recovered(plan.grid[k]);
    }
  });

  if (monotone) {
    finish_monotone(r, plan.grid);
  } else {
    r.trial_min_m.clear();
    for (std::size_t k = 0; k < plan.grid.size(); ++k) {
      long long ok = 0;
      for (int i = 0; i < cfg.trials; ++i) ok += grid_ok[i][k];
      const Estimate est = Estimate::from_counts(ok, cfg.trials);
      r.points.push_back({static_cast<double>(plan.grid[k]), est.value, cfg.trials, est.half_width});
      if (!r.min_m_95 && est.value >= 0.95) r.min_m_95 = plan.grid[k];
    }
  }
  return r;
}

FixedInputResult fixed_input_experiment(const SweepConfig& cfg) {
  require(cfg.noise.kind == NoiseModel::Kind::Noiseless && cfg.eta == 0.0,
          ErrorKind::InvalidParameter, "fixed-input experiment is noiseless");
  FixedInputResult out;
  SweepConfig rec = cfg;
  rec.criterion = "recovery";
  SweepConfig dis = cfg;
  dis.criterion = "disjunct";
  const SweepPlan plan = plan_sweep(cfg);
  out.gamma = fixed_input_gamma(cfg.family.n, cfg.d);
  out.m_full = plan.reference.m_noisy[cfg.design - 1];
  out.m_scaled = static_cast<long long>(std::ceil(out.gamma * out.m_full));
  // Both sweeps draw identical graphs and matrices from the same streams.
  out.recovery = success_sweep(rec);
  out.disjunct = success_sweep(dis);
  return out;
}

MixingScalingResult mixing_scaling(const FamilySpec& family, const std::vector<int>& n_grid,
                                   std::uint64_t seed, bool lazy) {
  MixingScalingResult out;
  out.family = family;
  out.lazy = lazy;
  MixingOptions opts;
  opts.mode = lazy ? WalkMode::Lazy : WalkMode::Simple;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int n : n_grid) {
    FamilySpec f = family;
    f.n = n;
    MixingScalingRow row;
    row.n = n;
    const Graph g = sample_graph(f, stream_seed(seed, static_cast<std::uint64_t>(n)), &row.redraws);
    const double delta = default_mixing_delta(g);
    row.t_mix = mixing_time(g, delta, opts).t_mix;
    row.ratio = row.t_mix / std::log(static_cast<double>(n));
    if (!lazy) {
      row.conductance = n <= 24 ? conductance_exact(g) : conductance_lower_bound(g);
      row.js_bound = js_upper_bound(g, delta);
      out.js_holds = out.js_holds && row.t_mix <= row.js_bound;
    }
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    out.rows.push_back(row);
  }
  out.band = out.rows.empty() ? 0.0 : hi / lo;
  return out;
}

constexpr double kMaxTomographyEta = 0.99;

TomographyPlan tomography_plan(const Graph& g, int source, int d, double q, double confidence,
                               std::uint64_t seed, int estimate_walks,
                               const DesignConstants& constants) {
  require(q >= 0.0 && q < 0.5, ErrorKind::InvalidParameter, "flip probability must be < 1/2");
  require(g.has_vertex(source), ErrorKind::InvalidParameter, "source vertex out of range");
  require(estimate_walks >= 1, ErrorKind::InvalidParameter, "estimate_walks must be >= 1");
  const GraphProfile prof = profile_graph(g);
  TomographyPlan plan;
  plan.params = auto_params(prof, g.num_vertices(), d, 0.0, constants);
  plan.t = plan.params.t2;
  plan.m = plan.params.m[1];
  if (q == 0.0) return plan;

  // Link probabilities from the source, with 3-sigma pessimism on both ends.
  const MeasurementMatrix S =
      design2(g, StartRule::at(source), estimate_walks, plan.t, stream_seed(seed, 0, 0x746f6d6f), 1);
  const int E = g.num_edges();
  const double N = estimate_walks;
  std::vector<std::vector<int>> rows_of(E);
  for (int r = 0; r < S.num_rows(); ++r)
    for (int a : S.rows[r]) rows_of[a].push_back(r);
  plan.pi_max = 0.0;
  plan.pi_lo = 1.0;
  std::vector<int> together(E, 0), touched;
  for (int f = 0; f < E; ++f) {
    const double p = rows_of[f].size() / N;
    plan.pi_max = std::max(plan.pi_max, p + 3.0 * std::sqrt(p * (1 - p) / N));
    // P[f and no b in B] >= P[f] - sum over the d most frequent companions.
    touched.clear();
    for (int r : rows_of[f])
      for (int b : S.rows[r])
        if (b != f && together[b]++ == 0) touched.push_back(b);
    std::vector<int> co;
    co.reserve(touched.size());
    for (int b : touched) {
      co.push_back(together[b]);
      together[b] = 0;
    }
    const int take = std::min<int>(d, static_cast<int>(co.size()));
    std::partial_sort(co.begin(), co.begin() + take, co.end(), std::greater<>());
    double avoid = static_cast<double>(rows_of[f].size());
    for (int i = 0; i < take; ++i) avoid -= co[i];
    const double pa = std::max(0.0, avoid / N);
    plan.pi_lo = std::min(plan.pi_lo, std::max(0.0, pa - 3.0 * std::sqrt(pa * (1 - pa) / N)));
  }
  require(plan.pi_lo > 0.0, ErrorKind::Infeasible,
          "some link is (almost) never probed while avoiding d others; raise t or estimate_walks");

  // Random flips, not adversarial ones: a congested link survives if its own
  // flips stay <= tau, and an uncongested link keeps >= e + 1 - f_lo negative
  // probes, which must exceed tau. Both sides scale with m'(eta).
  const double m0 = static_cast<double>(plan.params.m[1]);
  auto m_of = [&](double eta) { return std::ceil(m0 / ((1.0 - eta) * (1.0 - eta))); };
  struct Split {
    long long e, tau, f_lo;
  };
  auto split = [&](double eta) {
    const double m = std::min(1e12, m_of(eta));
    const auto load = [&](double pi) { return static_cast<long long>(std::ceil(pi * m)); };
    return Split{static_cast<long long>(std::floor(eta * plan.pi_lo * m)),
                 binomial_quantile(load(plan.pi_max), q, confidence),
                 binomial_quantile(load(plan.pi_lo), q, confidence)};
  };
  auto ok = [&](double eta) {
    const Split s = split(eta);
    return s.e >= s.tau + s.f_lo + 1;
  };
  double lo = 0.0, hi = 0.0;
  bool found = false;
  for (int k = 1; k <= 40 && !found; ++k) {
    lo = hi;
    hi = 1.0 - std::ldexp(1.0, -k);
    found = hi <= kMaxTomographyEta && ok(hi);
  }
  require(found, ErrorKind::Infeasible,
          "flip rate too high: busiest-link flips outgrow the tolerance e(eta)");
  for (int it = 0; it < 60 && hi - lo > 1e-6; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  const Split s = split(hi);
  plan.eta = hi;
  plan.params = auto_params(prof, g.num_vertices(), d, plan.eta, constants);
  plan.m = static_cast<long long>(m_of(plan.eta));
  plan.e = s.e;
  plan.tau = s.tau;
  plan.flips = s.tau;
  return plan;
}

TomographyReport tomography_demo(const Graph& g, const TomographyConfig& cfg) {
  require(g.has_vertex(cfg.source), ErrorKind::InvalidParameter, "source vertex out of range");
  require(cfg.t >= 1 && cfg.m >= 0 && cfg.tau >= 0, ErrorKind::InvalidParameter,
          "tomography needs t >= 1, m >= 0, tau >= 0");
  for (int e : cfg.congested)
    require(e >= 0 && e < g.num_edges(), ErrorKind::InvalidParameter,
            "congested edge out of range: " + std::to_string(e));
  std::vector<int> congested = cfg.congested;
  std::sort(congested.begin(), congested.end());
  congested.erase(std::unique(congested.begin(), congested.end()), congested.end());

  const MeasurementMatrix M = design2(g, StartRule::at(cfg.source), static_cast<int>(cfg.m),
                                      cfg.t, cfg.seed, cfg.workers);
  Rng rng = stream_rng(cfg.seed, 0, kNoiseStream);
  const NoiseModel noise = cfg.q > 0 ? NoiseModel::flip(cfg.q) : NoiseModel::noiseless();
  const OutcomeVector y = simulate_tests(M, {ItemKind::Edge, congested}, noise, rng);
  const DecodeResult dec = decode_threshold(M, y, cfg.tau);

  TomographyReport r;
  r.source = cfg.source;
  r.t = cfg.t;
  r.probes = cfg.m;
  r.returned = y.size() - y.positives();
  r.tau = cfg.tau;
  r.congested = congested;
  r.identified = dec.set.items;
  r.exact = r.identified == r.congested;
  std::vector<int> shown;
  std::set_union(congested.begin(), congested.end(), r.identified.begin(), r.identified.end(),
                 std::back_inserter(shown));
  for (int e : shown) {
    LinkVerdict v;
    v.edge = e;
    v.u = g.edge(e).first;
    v.v = g.edge(e).second;
    v.congested = std::binary_search(congested.begin(), congested.end(), e);
    v.flagged = std::binary_search(r.identified.begin(), r.identified.end(), e);
    for (int row = 0; row < M.num_rows(); ++row) {
      if (!std::binary_search(M.rows[row].begin(), M.rows[row].end(), e)) continue;
      ++v.probes;
      v.returned += !y.bits[row];
    }
    r.links.push_back(v);
  }
  return r;
}

namespace {

std::string num(double x) {
  std::ostringstream out;
  out << std::setprecision(10) << x;
  return out.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

}  // namespace

std::string sweep_to_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "value,success,trials,half_width\n";
  for (const auto& p : r.points)
    out << num(p.value) << ',' << num(p.success_rate) << ',' << p.trials << ','
        << num(p.half_width) << '\n';
  return out.str();
}

std::string mixing_scaling_to_csv(const MixingScalingResult& r) {
  std::ostringstream out;
  out << "n,t_mix,t_over_ln_n,js_bound,conductance,redraws\n";
  for (const auto& row : r.rows)
    out << row.n << ',' << row.t_mix << ',' << num(row.ratio) << ',' << row.js_bound << ','
        << num(row.conductance) << ',' << row.redraws << '\n';
  return out.str();
}

std::string verification_to_csv(const VerificationReport& r) {
  std::ostringstream out;
  out << "check,status,measured,bound,half_width,note\n";
  for (const auto& c : r.checks)
    out << c.name << ',' << to_string(c.status) << ',' << num(c.measured) << ','
        << num(c.bound) << ',' << num(c.half_width) << ',' << csv_field(c.note) << '\n';
  return out.str();
}

}  // namespace walktest
