// Prints the constants frozen in include/walktest/calibration.hpp.
//
//   kappa_m: 1.25 x the largest per-seed ratio of the minimal 2-disjunct m
//            to c^4 d^2 T^2 ln(n/d), Design 1 on each calibration family.
//   kappa_e: 0.8 x the smallest ratio of the largest e for which an
//            auto-sized Design 1 matrix (eta = 0.25, 0.5) is (2, e)-disjunct
//            to eta d ln(n/d) / (1 - eta)^2.
//   beta_*:  half the smallest observed ratio of each estimate to its
//            lower-bound expression over the calibration families.
//
// Seeds start at 1000 so the acceptance runs never reuse them.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "walktest/error.hpp"
#include "walktest/experiments.hpp"

using namespace walktest;

namespace {

constexpr std::uint64_t kSeed = 1000;

const std::vector<FamilySpec>& calibration_families() {
  static const std::vector<FamilySpec> f = {
      {"complete", 16, 0, 0}, {"complete", 64, 0, 0}, {"gnp", 256, 0.25, 0}, {"regular", 64, 0, 8}};
  return f;
}

// Smallest e' with ok(e') false, minus one; ok must be antitone.
template <typename Pred>
int largest_true(int hi, Pred&& ok) {
  if (!ok(0)) return -1;
  int lo = 0;
  while (lo < hi) {
    const int mid = lo + (hi - lo + 1) / 2;
    if (ok(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

double kappa_m_ratio(int gnp_seeds, int other_seeds) {
  const int d = 2;
  DisjunctOptions opts;
  opts.workers = 1;
  double worst = 0.0;
  int fi = 0;
  for (const auto& f : calibration_families()) {
    const int seeds = f.family == "gnp" ? gnp_seeds : other_seeds;
    std::vector<double> ratios;
    for (int i = 0; i < seeds; ++i) {
      const Graph g = sample_graph(f, stream_seed(kSeed, fi * 1000 + i, 1));
      const int n = g.num_vertices();
      const GraphProfile prof = profile_graph(g);
      const DesignParams p = auto_params(prof, n, d, 0.0);
      const int rows = 6000;
      const auto M = design1(g, StartRule::uniform(), rows, p.t1, stream_seed(kSeed, fi * 1000 + i, 2), 1);
      require(is_disjunct(M, d, 0, opts).disjunct, ErrorKind::Infeasible, "raise rows");
      long long lo = 0, hi = rows;
      while (lo < hi) {
        const long long mid = (lo + hi) / 2;
        if (is_disjunct(prefix_rows(M, static_cast<int>(mid)), d, 0, opts).disjunct)
          hi = mid;
        else
          lo = mid + 1;
      }
      const double c = prof.uniformity.c, T = prof.mixing.t_mix;
      const double scale = std::pow(c, 4) * d * d * T * T * std::log(static_cast<double>(n) / d);
      ratios.push_back(lo / scale);
      worst = std::max(worst, lo / scale);
    }
    std::sort(ratios.begin(), ratios.end());
    std::printf("  %s: min-m ratio median %.4f, max %.4f over %d seeds\n", f.describe().c_str(),
                ratios[ratios.size() / 2], ratios.back(), seeds);
    ++fi;
  }
  return worst;
}

// Achieved tolerance of auto-sized Design 1 matrices against eta d ln(n/d) / (1 - eta)^2.
double kappa_e_ratio(const DesignConstants& k, int seeds) {
  const int d = 2;
  DisjunctOptions opts;
  opts.workers = 1;
  double worst = 1e300;
  int fi = 0, skipped = 0;
  for (const auto& f : calibration_families()) {
    double fam = 1e300;
    for (int i = 0; i < seeds; ++i) {
      const Graph g = sample_graph(f, stream_seed(kSeed, fi * 1000 + i, 3));
      const int n = g.num_vertices();
      const GraphProfile prof = profile_graph(g);
      for (double eta : {0.25, 0.5}) {
        const DesignParams p = auto_params(prof, n, d, eta, k);
        const auto M = design1(g, StartRule::uniform(), static_cast<int>(p.m_noisy[0]), p.t1,
                               stream_seed(kSeed, fi * 1000 + i, eta < 0.3 ? 4 : 5), 1);
        int weight = M.num_rows();
        std::vector<int> w(n, 0);
        for (const auto& row : M.rows)
          for (int x : row) ++w[x];
        for (int x : M.columns()) weight = std::min(weight, w[x]);
        const int e = largest_true(weight, [&](int e) { return is_disjunct(M, d, e, opts).disjunct; });
        if (e < 0) {
          ++skipped;
          continue;
        }
        const double scale = eta * d * std::log(static_cast<double>(n) / d) / ((1 - eta) * (1 - eta));
        fam = std::min(fam, e / scale);
      }
    }
    std::printf("  %s: min tolerance ratio %.3f\n", f.describe().c_str(), fam);
    worst = std::min(worst, fam);
    ++fi;
  }
  std::printf("  (%d matrices not d-disjunct at all, left out)\n", skipped);
  return worst;
}

struct Ratios {
  double visit = 1e300, avoid = 1e300, sink = 1e300;
};

Ratios beta_ratios(int configs_per_family, long long trials) {
  const auto& families = calibration_families();
  Ratios r;
  int family_index = 0;
  for (const auto& f : families) {
    const Graph g = sample_graph(f, stream_seed(kSeed, family_index, 7));
    const GraphProfile prof = profile_graph(g);
    const int n = g.num_vertices(), T = prof.mixing.t_mix;
    const double c = prof.uniformity.c;
    Rng rng = stream_rng(kSeed, family_index, 8);
    Ratios fr;
    for (int k = 0; k < configs_per_family; ++k) {
      const int d = 1 + k % 3;
      const DesignParams p = auto_params(prof, n, d, 0.0);
      std::vector<int> perm(n);
      for (int i = 0; i < n; ++i) perm[i] = i;
      std::shuffle(perm.begin(), perm.end(), rng);
      const int v = perm[0], sink = perm[1];
      const std::vector<int> A(perm.begin() + 2, perm.begin() + 2 + d);
      TrialConfig tc;
      tc.trials = trials;
      tc.seed = stream_seed(kSeed, family_index * 1000 + k, 9);
      const double visit = estimate_pi_item(g, {ItemKind::Vertex, v}, p.t1, StartRule::uniform(), tc).value;
      const double avoid =
          estimate_pi_item_avoiding(g, {ItemKind::Vertex, v}, A, p.t1, StartRule::uniform(), tc).value;
      const double sinkv = estimate_pi_sink_avoiding(g, {ItemKind::Vertex, v}, A, sink,
                                                     default_sink_cap(g), StartRule::uniform(), tc)
                               .estimate.value;
      fr.visit = std::min(fr.visit, visit / pi_visit_scale(p.t1, c, n, T));
      fr.avoid = std::min(fr.avoid, avoid / pi_avoid_scale(c, d, T));
      fr.sink = std::min(fr.sink, sinkv / pi_sink_avoid_scale(c, d, T));
    }
    std::printf("  %s: c=%.3f T=%d min ratios visit %.4g avoid %.4g sink %.4g\n",
                f.describe().c_str(), c, T, fr.visit, fr.avoid, fr.sink);
    r.visit = std::min(r.visit, fr.visit);
    r.avoid = std::min(r.avoid, fr.avoid);
    r.sink = std::min(r.sink, fr.sink);
    ++family_index;
  }
  return r;
}

// Rounds down to two significant digits.
double round_down(double x) {
  const double p = std::pow(10.0, std::floor(std::log10(x)) - 1);
  return std::floor(x / p) * p;
}

double round_up(double x) {
  const double p = std::pow(10.0, std::floor(std::log10(x)) - 1);
  return std::ceil(x / p) * p;
}

}  // namespace

int main(int argc, char** argv) {
  const int gnp_seeds = argc > 1 ? std::atoi(argv[1]) : 40;
  std::printf("kappa_t = %.2f (fixed: rows of K_n cover about a third of the vertices)\n",
              calibrated_constants().kappa_t);
  const double km = round_up(1.25 * kappa_m_ratio(gnp_seeds, 10));
  std::printf("kappa_m = %.3g\n", km);
  DesignConstants k = calibrated_constants();
  k.kappa_m = km;
  k.kappa_e = 1.0;
  const double ke = round_down(0.8 * kappa_e_ratio(k, 5));
  std::printf("kappa_e = %.3g\n", ke);
  const Ratios r = beta_ratios(60, 20000);
  std::printf("beta_visit = %.3g\nbeta_avoid = %.3g\nbeta_sink_avoid = %.3g\n",
              round_down(0.5 * r.visit), round_down(0.5 * r.avoid), round_down(0.5 * r.sink));
  return 0;
}
