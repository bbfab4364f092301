// Acceptance suite: one PASS/FAIL line per criterion.
//
//   walktest_acceptance            run all criteria
//   walktest_acceptance 3 7        run a subset
//
// Exit status is 0 iff every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "walktest/error.hpp"
#include "walktest/experiments.hpp"

using namespace walktest;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int pick(Rng& rng, int lo, int hi) { return lo + uniform_index(rng, hi - lo + 1); }

std::vector<int> random_subset(const std::vector<int>& pool, int k, Rng& rng) {
  std::vector<int> v = pool;
  for (int j = 0; j < k; ++j) std::swap(v[j], v[j + uniform_index(rng, static_cast<int>(v.size()) - j)]);
  v.resize(k);
  std::sort(v.begin(), v.end());
  return v;
}

// --- 1: noiseless decoding on certified matrices ------------------------------

Graph fuzz_graph(Rng& rng, bool edges, std::uint64_t seed) {
  switch (uniform_index(rng, 3)) {
    case 0: return gen_complete(edges ? pick(rng, 4, 9) : pick(rng, 6, 40));
    case 1: {
      const int n = edges ? pick(rng, 8, 14) : pick(rng, 10, 48);
      return sample_graph({"gnp", n, 0.25 + 0.25 * uniform_index(rng, 2)}, seed);
    }
    default: {
      const int deg = edges ? 3 : pick(rng, 3, 6);
      int n = edges ? pick(rng, 8, 18) : pick(rng, 10, 64);
      if (n * deg % 2) ++n;
      return sample_graph({"regular", n, 0, deg}, seed);
    }
  }
}

MeasurementMatrix fuzz_matrix(const Graph& g, int design, int m, Rng& rng, std::uint64_t seed) {
  const int n = g.num_vertices();
  const int t = pick(rng, 1, std::max(2, n / 2));
  switch (design) {
    case 1: {
      std::vector<int> designated;
      if (uniform_index(rng, 3) == 0) designated.push_back(uniform_index(rng, n));
      return designated.empty() ? design1(g, StartRule::uniform(), m, t, seed, 1)
                                : design1(g, designated, m, t, seed, 1);
    }
    case 2: return design2(g, StartRule::uniform(), m, t, seed, 1);
    case 3: return design3(g, StartRule::uniform(), uniform_index(rng, n), m, default_sink_cap(g), seed, 1);
    default: return design4(g, StartRule::uniform(), uniform_index(rng, n), m, default_sink_cap(g), seed, 1);
  }
}

Verdict criterion1() {
  const int target = 10000;
  int certified = 0, exact = 0, attempts = 0;
  std::vector<int> per_design(5, 0);
  for (std::uint64_t i = 0; certified < target && attempts < 20 * target; ++i, ++attempts) {
    Rng rng = stream_rng(kSeed, i, 1);
    const int design = pick(rng, 1, 4);
    const int d = pick(rng, 1, 3);
    const Graph g = fuzz_graph(rng, design == 2 || design == 4, stream_seed(kSeed, i, 2));
    const int items = design == 2 || design == 4 ? g.num_edges() : g.num_vertices();
    int m = static_cast<int>(std::ceil(pick(rng, 3, 10) * d * d * std::log(items + 1.0)));
    MeasurementMatrix M;
    bool ok = false;
    // Double the row count a few times before giving up on this instance.
    for (int tries = 0; tries < 4 && !ok; ++tries, m *= 2) {
      M = fuzz_matrix(g, design, m, rng, stream_seed(kSeed, i, 3 + tries));
      if (static_cast<int>(M.columns().size()) <= d) break;
      ok = is_disjunct(M, d).disjunct;
    }
    if (!ok) continue;
    ++certified;
    ++per_design[design];
    const auto cols = M.columns();
    const DefectiveSet planted{M.item_kind, random_subset(cols, pick(rng, 0, d), rng)};
    const OutcomeVector y = simulate_tests(M, planted, NoiseModel::noiseless(), rng);
    exact += decode_cover(M, y, d).set.items == planted.items;
  }
  return {certified == target && exact == certified,
          fmt("%d/%d exact over certified cases (designs 1-4: %d/%d/%d/%d, %d instances drawn)", exact,
              certified, per_design[1], per_design[2], per_design[3], per_design[4], attempts)};
}

// --- 2: adversarial flips within the tolerance --------------------------------

double choose(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Calls fn(pattern) for every k-subset of {0..n-1}.
void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    int j = k - 1;
    while (j >= 0 && idx[j] == n - k + j) --j;
    if (j < 0) return;
    ++idx[j];
    for (int l = j + 1; l < k; ++l) idx[l] = idx[l - 1] + 1;
  }
}

Verdict criterion2() {
  const int target = 200;
  const int m = 40;
  int cases = 0, attempts = 0;
  long long patterns = 0, exact = 0;
  int min_e = 1 << 30, max_e = 0;
  for (std::uint64_t i = 0; cases < target && attempts < 100 * target; ++i, ++attempts) {
    Rng rng = stream_rng(kSeed, i, 11);
    const int d = pick(rng, 1, 2);
    const bool edges = uniform_index(rng, 2) == 1;
    const Graph g = edges ? gen_complete(pick(rng, 4, 6)) : gen_complete(pick(rng, 6, 12));
    const int t = pick(rng, 1, 3);
    const MeasurementMatrix M = edges ? design2(g, StartRule::uniform(), m, t, stream_seed(kSeed, i, 12), 1)
                                      : design1(g, StartRule::uniform(), m, t, stream_seed(kSeed, i, 12), 1);
    if (!is_disjunct(M, d, 3).disjunct) continue;
    // Largest certified e whose flip patterns stay within the enumeration cap.
    int e = 3;
    while (is_disjunct(M, d, e + 1).disjunct && choose(m, e / 2) <= 1e5) ++e;
    const int tau = (e - 1) / 2;
    ++cases;
    min_e = std::min(min_e, e);
    max_e = std::max(max_e, e);
    const DefectiveSet planted{M.item_kind, random_subset(M.columns(), d, rng)};
    for_each_subset(m, tau, [&](const std::vector<int>& flips) {
      Rng unused(0);
      const OutcomeVector y = simulate_tests(M, planted, NoiseModel::adversarial(flips), unused);
      ++patterns;
      exact += decode_threshold(M, y, tau).set.items == planted.items;
    });
  }
  return {cases == target && exact == patterns,
          fmt("%lld/%lld patterns exact over %d cases (m=%d, certified e in [%d, %d])", exact,
              patterns, cases, m, min_e, max_e)};
}

// --- 3: auto parameters on G(256, 0.25) ---------------------------------------

Verdict criterion3() {
  const int seeds = 100, d = 2;
  int good = 0;
  long long m_lo = 1LL << 60, m_hi = 0;
  DisjunctOptions opts;
  opts.workers = 1;
  for (int i = 0; i < seeds; ++i) {
    const Graph g = sample_graph({"gnp", 256, 0.25}, stream_seed(kSeed, i, 21));
    const DesignParams p = auto_params(g, d, 0.0);
    const auto M = design1(g, StartRule::uniform(), static_cast<int>(p.m_noisy[0]), p.t1,
                           stream_seed(kSeed, i, 22), 1);
    good += is_disjunct(M, d, 0, opts).disjunct;
    m_lo = std::min(m_lo, p.m_noisy[0]);
    m_hi = std::max(m_hi, p.m_noisy[0]);
  }
  return {good >= 95, fmt("%d/%d seeds certified 2-disjunct (auto m in [%lld, %lld])", good, seeds,
                          m_lo, m_hi)};
}

// --- 4: K_500 against d^2 ln(n/d) ---------------------------------------------

Verdict criterion4() {
  SweepConfig c;
  c.family = {"complete", 500};
  c.design = 1;
  c.d = 2;
  c.trials = 100;
  c.seed = stream_seed(kSeed, 0, 31);
  c.criterion = "disjunct";
  c.m_grid = {0, 11, 22, 44, 88, 132, 176, 264, 352};
  c.workers = 1;
  const SweepResult r = success_sweep(c);
  const double ref = c.d * c.d * std::log(500.0 / c.d);
  if (!r.min_m_95) return {false, fmt("no 95%% point up to m=352 (reference %.1f)", ref)};
  const double ratio = *r.min_m_95 / ref;
  return {ratio <= 8.0 && ratio >= 1.0 / 8.0,
          fmt("min m for 95%% = %lld, d^2 ln(n/d) = %.1f, ratio %.2f (limit 8)", *r.min_m_95, ref, ratio)};
}

// --- 5: mixing time scaling --------------------------------------------------

Verdict criterion5() {
  const std::vector<int> grid = {64, 128, 256, 512};
  const MixingScalingResult a = mixing_scaling({"gnp-log"}, grid, stream_seed(kSeed, 0, 41));
  const MixingScalingResult b = mixing_scaling({"regular", 0, 0, 8}, grid, stream_seed(kSeed, 0, 42));
  auto ts = [](const MixingScalingResult& r) {
    std::string s;
    for (const auto& row : r.rows) s += (s.empty() ? "" : ",") + std::to_string(row.t_mix);
    return s;
  };
  return {a.band <= 2.0 && b.band <= 2.0 && a.js_holds && b.js_holds,
          fmt("G(n,6ln n/n) T=%s band %.2f; regular-8 T=%s band %.2f; T <= js bound: %s", ts(a).c_str(),
              a.band, ts(b).c_str(), b.band, a.js_holds && b.js_holds ? "all" : "violated")};
}

// --- 6: stationary bounds, zero tolerance -------------------------------------

Verdict criterion6() {
  const int graphs = 1000;
  int ok = 0;
  long long vertices = 0;
  for (int i = 0; i < graphs; ++i) {
    Rng rng = stream_rng(kSeed, i, 51);
    const std::uint64_t seed = stream_seed(kSeed, i, 52);
    Graph g = [&] {
      switch (i % 7) {
        case 0: return gen_complete(pick(rng, 2, 80));
        case 1: {
          // Above the connectivity threshold so redraws stay rare.
          const int n = pick(rng, 10, 120);
          const double p = std::min(1.0, (1.5 + uniform_index(rng, 10) * 0.5) * std::log(n) / n);
          return sample_graph({"gnp", n, p}, seed);
        }
        case 2: return sample_graph({"gnp-log", pick(rng, 16, 200)}, seed);
        case 3: {
          const int deg = pick(rng, 3, 9);
          int n = pick(rng, deg + 2, 150);
          if (n * deg % 2) ++n;
          return sample_graph({"regular", n, 0, deg}, seed);
        }
        case 4: return gen_cycle(pick(rng, 3, 100));
        case 5: return gen_path(pick(rng, 2, 100));
        default: return gen_star(pick(rng, 3, 100));
      }
    }();
    const auto mu = stationary_distribution(g, WalkMode::Lazy).probs;
    const auto [lo, hi] = stationary_bounds(g);
    const long long two_m = 2LL * g.num_edges(), n = g.num_vertices();
    const long long dmin = g.min_degree(), dmax = g.max_degree();
    bool all = true;
    for (int v = 0; v < n; ++v) {
      // Exact: dmin / (dmax n) <= deg / 2|E| <= dmax / (dmin n).
      const long long deg = g.degree(v);
      all = all && deg * dmax * n >= dmin * two_m && deg * dmin * n <= dmax * two_m;
      all = all && mu[v] >= lo && mu[v] <= hi;
    }
    ok += all;
    vertices += n;
  }
  return {ok == graphs, fmt("%d/%d graphs (%lld vertices) inside [1/(cn), c/n]", ok, graphs, vertices)};
}

// --- 7: complete-graph tightness ----------------------------------------------

Verdict criterion7() {
  const Graph g = gen_complete(50);
  bool pass = true;
  std::string detail;
  for (int d = 1; d <= 3; ++d) {
    Rng rng = stream_rng(kSeed, d, 61);
    std::vector<int> all(50);
    std::iota(all.begin(), all.end(), 0);
    const auto pick3 = random_subset(all, d + 2, rng);
    const int sink = pick3[0], v = pick3[1];
    const std::vector<int> A(pick3.begin() + 2, pick3.end());
    TrialConfig tc;
    tc.trials = 100000;
    tc.seed = stream_seed(kSeed, d, 62);
    const SinkEstimate s =
        estimate_pi_sink_avoiding(g, {ItemKind::Vertex, v}, A, sink, default_sink_cap(g), StartRule::uniform(), tc);
    const double exact = 1.0 / ((d + 1.0) * (d + 2.0));
    const double rel = s.estimate.value / exact;
    pass = pass && rel >= 0.8 && rel <= 1.2 && s.cap_exceeded == 0;
    detail += fmt("%sd=%d %.4f vs %.4f (x%.3f)", d > 1 ? "; " : "", d, s.estimate.value, exact, rel);
  }
  return {pass, detail};
}

// --- 8: avoiding-visit floor ----------------------------------------------------

Verdict criterion8() {
  const std::vector<FamilySpec> families = {
      {"complete", 16}, {"complete", 64}, {"gnp", 256, 0.25}, {"regular", 64, 0, 8}};
  const double beta = frozen_calibration().beta_avoid;
  const int per_family = 125;
  int held = 0, total = 0;
  double worst = 1e300;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const Graph g = sample_graph(families[f], stream_seed(kSeed, f, 71));
    const GraphProfile prof = profile_graph(g);
    const int n = g.num_vertices(), T = prof.mixing.t_mix;
    const double c = prof.uniformity.c;
    Rng rng = stream_rng(kSeed, f, 72);
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (int k = 0; k < per_family; ++k) {
      const int d = 1 + k % 3;
      const DesignParams p = auto_params(prof, n, d, 0.0);
      std::vector<int> va = random_subset(all, d + 1, rng);
      std::swap(va[0], va[uniform_index(rng, d + 1)]);
      const int v = va[0];
      std::vector<int> A(va.begin() + 1, va.end());
      std::sort(A.begin(), A.end());
      TrialConfig tc;
      tc.trials = 100000;
      tc.seed = stream_seed(kSeed, f * 1000 + k, 73);
      const Estimate e = estimate_pi_item_avoiding(g, {ItemKind::Vertex, v}, A, p.t1, StartRule::uniform(), tc);
      const double bound = beta * pi_avoid_scale(c, d, T);
      held += e.value >= bound;
      ++total;
      worst = std::min(worst, e.value / bound);
    }
  }
  return {held == total, fmt("%d/%d configurations above beta/(c^4 d T^2), beta=%g, min ratio %.2f", held,
                             total, beta, worst)};
}

// --- 9: fixed-input savings ------------------------------------------------------

Verdict criterion9() {
  SweepConfig c;
  c.family = {"gnp", 256, 0.25};
  c.design = 1;
  c.d = 3;
  c.trials = 100;
  c.seed = stream_seed(kSeed, 0, 81);
  c.budget = 1e9;
  c.workers = 1;
  const FixedInputResult r = fixed_input_experiment(c);
  const auto& rec = r.recovery.min_m_95;
  const auto& dis = r.disjunct.min_m_95;
  if (!rec || !dis)
    return {false, fmt("95%% point missing (recovery %s, disjunct %s) below m=%lld", rec ? "found" : "none",
                       dis ? "found" : "none", 2 * r.m_full)};
  const double limit = 2.0 * r.gamma * r.m_full;
  return {*rec <= limit && *rec < *dis,
          fmt("recovery m95=%lld <= 2 gamma m'=%.0f (gamma %.4f, m'=%lld); disjunct m95=%lld", *rec, limit,
              r.gamma, r.m_full, *dis)};
}

// --- 10: tomography -------------------------------------------------------------

Verdict criterion10() {
  const int seeds = 100, d = 2;
  int quiet_ok = 0, noisy_ok = 0, infeasible = 0;
  for (int i = 0; i < seeds; ++i) {
    const Graph g = sample_graph({"gnp", 128, 0.2}, stream_seed(kSeed, i, 91));
    Rng rng = stream_rng(kSeed, i, 92);
    TomographyConfig tc;
    tc.source = uniform_index(rng, g.num_vertices());
    std::vector<int> edges(g.num_edges());
    std::iota(edges.begin(), edges.end(), 0);
    tc.congested = random_subset(edges, d, rng);
    tc.workers = 1;

    const TomographyPlan quiet = tomography_plan(g, tc.source, d, 0.0);
    tc.t = quiet.t;
    tc.m = quiet.m;
    tc.tau = quiet.tau;
    tc.q = 0.0;
    tc.seed = stream_seed(kSeed, i, 93);
    quiet_ok += tomography_demo(g, tc).exact;

    try {
      const TomographyPlan noisy = tomography_plan(g, tc.source, d, 0.05, 0.99, stream_seed(kSeed, i, 95));
      tc.t = noisy.t;
      tc.m = noisy.m;
      tc.tau = noisy.tau;
      tc.q = 0.05;
      tc.seed = stream_seed(kSeed, i, 94);
      noisy_ok += tomography_demo(g, tc).exact;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Infeasible) throw;
      ++infeasible;
    }
  }
  return {quiet_ok >= 95 && noisy_ok >= 90,
          fmt("noiseless %d/%d exact (need 95); q=0.05 %d/%d exact (need 90, %d infeasible plans)", quiet_ok,
              seeds, noisy_ok, seeds, infeasible)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  Verdict (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "cover decoding on certified disjunct matrices", 300, criterion1},
      {2, "threshold decoding under adversarial flips", 600, criterion2},
      {3, "Design 1 auto parameters, G(256,0.25), d=2", 900, criterion3},
      {4, "classical recovery on K_500, d=2", 600, criterion4},
      {5, "mixing time scaling and conductance bound", 600, criterion5},
      {6, "stationary bounds (exact)", 60, criterion6},
      {7, "sink-walk tightness on K_50", 120, criterion7},
      {8, "avoiding-visit floor with frozen beta", 600, criterion8},
      {9, "fixed-input savings, G(256,0.25), d=3", 1200, criterion9},
      {10, "tomography end to end, G(128,0.2)", 600, criterion10},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::printf("%s %2d %s: %s [%.1fs of %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                secs, c.limit_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
