#include <cmath>

#include <gtest/gtest.h>

#include "walktest/error.hpp"
#include "walktest/experiments.hpp"

using namespace walktest;

TEST(Families, SampleGraphShapes) {
  EXPECT_EQ(sample_graph({"complete", 10}, 1).num_edges(), 45);
  const Graph r = sample_graph({"regular", 30, 0, 4}, 1);
  for (int v = 0; v < 30; ++v) EXPECT_EQ(r.degree(v), 4);
  int redraws = -1;
  const Graph g = sample_graph({"gnp", 60, 0.1}, 3, &redraws);
  EXPECT_TRUE(g.connected());
  EXPECT_FALSE(g.bipartite());
  EXPECT_GE(redraws, 0);
  EXPECT_THROW(sample_graph({"torus", 10}, 1), Error);
}

TEST(Families, SampleGraphIsDeterministic) {
  const Graph a = sample_graph({"gnp", 50, 0.2}, 7), b = sample_graph({"gnp", 50, 0.2}, 7);
  EXPECT_EQ(graph_to_json(a), graph_to_json(b));
}

TEST(Sweep, ZeroRowsNeverSucceed) {
  SweepConfig c;
  c.family = {"complete", 20};
  c.d = 1;
  c.trials = 30;
  c.m_grid = {0, 200};
  c.seed = 11;
  const SweepResult r = success_sweep(c);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points[0].success_rate, 0.0);
  EXPECT_EQ(r.points[1].success_rate, 1.0);
  EXPECT_EQ(r.criterion, "disjunct");
}

TEST(Sweep, SuccessIsMonotoneAndMatchesTrialMinima) {
  SweepConfig c;
  c.family = {"complete", 24};
  c.d = 2;
  c.trials = 40;
  c.m_grid = {10, 20, 40, 80, 160};
  c.seed = 5;
  const SweepResult r = success_sweep(c);
  ASSERT_EQ(r.trial_min_m.size(), 40u);
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    int ok = 0;
    for (long long m : r.trial_min_m) ok += m >= 0 && m <= r.points[i].value;
    EXPECT_DOUBLE_EQ(r.points[i].success_rate, ok / 40.0);
    if (i) EXPECT_GE(r.points[i].success_rate, r.points[i - 1].success_rate);
  }
  ASSERT_TRUE(r.min_m_95.has_value());
  std::vector<long long> sorted = r.trial_min_m;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(*r.min_m_95, sorted[37]);  // ceil(0.95 * 40) = 38th smallest
}

TEST(Sweep, IndependentOfWorkerCount) {
  SweepConfig c;
  c.family = {"gnp", 40, 0.3};
  c.d = 1;
  c.trials = 20;
  c.m_grid = {5, 15, 30};
  c.seed = 2;
  c.workers = 1;
  const SweepResult a = success_sweep(c);
  c.workers = 3;
  const SweepResult b = success_sweep(c);
  EXPECT_EQ(a.trial_min_m, b.trial_min_m);
}

TEST(Sweep, NoisyRecoveryRuns) {
  SweepConfig c;
  c.family = {"complete", 32};
  c.d = 1;
  c.trials = 30;
  c.criterion = "recovery";
  c.noise = NoiseModel::parse("flip:0.005");
  c.eta = 0.6;
  c.m_grid = {0, 300};
  c.seed = 8;
  const SweepResult r = success_sweep(c);
  EXPECT_EQ(r.criterion, "recovery");
  EXPECT_EQ(r.points[0].success_rate, 0.0);
  EXPECT_GE(r.points[1].success_rate, 0.9);
}

TEST(Sweep, CsvHasOneRowPerPoint) {
  SweepResult r;
  r.points = {{0, 0, 10, 0}, {5, 0.5, 10, 0.31}};
  const std::string csv = sweep_to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "value,success,trials,half_width");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(FixedInput, GammaValue) {
  EXPECT_NEAR(fixed_input_gamma(256, 3), std::log(256.0) / (3 * std::log(256.0 / 3)), 1e-12);
  EXPECT_THROW(fixed_input_gamma(4, 4), Error);
}

TEST(MixingScaling, RegularGraphsStayInBand) {
  const MixingScalingResult r = mixing_scaling({"regular", 0, 0, 8}, {64, 128}, 1);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_TRUE(r.js_holds);
  for (const auto& row : r.rows) {
    EXPECT_NEAR(row.ratio, row.t_mix / std::log(row.n), 1e-12);
    EXPECT_LE(row.t_mix, row.js_bound);
  }
  EXPECT_GE(r.band, 1.0);
}

TEST(Verification, CompleteGraphPassesEverything) {
  VerifyConfig c;
  c.trials = 20000;
  c.influence_trials = 200000;
  c.seed = 3;
  const VerificationReport r = verification_suite(gen_complete(16), c);
  EXPECT_TRUE(r.all_pass());
  ASSERT_EQ(r.checks.size(), 8u);
  for (const auto& line : r.checks) EXPECT_EQ(line.status, CheckLine::Status::Pass) << line.name;
}

TEST(Verification, BipartiteGraphSkipsSampledChecks) {
  VerifyConfig c;
  c.trials = 100;
  const VerificationReport r = verification_suite(gen_cycle(8), c);
  EXPECT_EQ(r.checks[0].status, CheckLine::Status::Pass);
  for (std::size_t i = 1; i < r.checks.size(); ++i)
    EXPECT_EQ(r.checks[i].status, CheckLine::Status::Skip);
}

TEST(Verification, ScaleFunctions) {
  EXPECT_DOUBLE_EQ(pi_visit_scale(10, 2.0, 5, 1), 1.0);
  EXPECT_DOUBLE_EQ(pi_avoid_scale(1.0, 2, 3), 1.0 / 18);
  EXPECT_DOUBLE_EQ(pi_sink_avoid_scale(1.0, 2, 2), 1.0 / 64);
}

TEST(Tomography, NoiselessPlanLocalizesCongestedLinks) {
  const Graph g = sample_graph({"gnp", 64, 0.3}, 5);
  const TomographyPlan plan = tomography_plan(g, 0, 2, 0.0);
  EXPECT_EQ(plan.tau, 0);
  TomographyConfig c;
  c.source = 0;
  c.congested = {3, 40};
  c.t = plan.t;
  c.m = plan.m;
  c.tau = plan.tau;
  c.seed = 6;
  const TomographyReport r = tomography_demo(g, c);
  EXPECT_EQ(r.probes, plan.m);
  EXPECT_LE(r.returned, r.probes);
  for (const auto& link : r.links)
    if (link.congested) EXPECT_TRUE(link.flagged);
}

TEST(Tomography, NoisyPlanRaisesThresholdAndRows) {
  const Graph g = sample_graph({"gnp", 128, 0.2}, 5);
  const TomographyPlan quiet = tomography_plan(g, 0, 2, 0.0);
  const TomographyPlan noisy = tomography_plan(g, 0, 2, 0.05, 0.99, 1);
  EXPECT_GT(noisy.eta, 0.0);
  EXPECT_GE(noisy.tau, noisy.flips);
  EXPECT_GT(noisy.e, noisy.tau);
  EXPECT_GT(noisy.m, quiet.m);
  EXPECT_GT(noisy.pi_max, noisy.pi_lo);
  // A source-incident link carries at least 1/deg(source) of the probes.
  EXPECT_GE(noisy.pi_max, 1.0 / g.degree(0));
}

TEST(Tomography, NoisyPlanLocalizesOnSmallGraph) {
  const Graph g = sample_graph({"gnp", 64, 0.3}, 5);
  const TomographyPlan plan = tomography_plan(g, 0, 2, 0.02, 0.99, 2, 5000);
  TomographyConfig c;
  c.source = 0;
  c.congested = {7, 90};
  c.q = 0.02;
  c.t = plan.t;
  c.m = plan.m;
  c.tau = plan.tau;
  c.seed = 3;
  EXPECT_TRUE(tomography_demo(g, c).exact);
}

TEST(Tomography, HighFlipRateIsInfeasible) {
  const Graph g = sample_graph({"gnp", 64, 0.3}, 5);
  try {
    tomography_plan(g, 0, 2, 0.45, 0.99, 1, 2000);
    FAIL() << "expected Infeasible";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
  }
}
