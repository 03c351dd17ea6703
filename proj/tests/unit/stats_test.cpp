#include <gtest/gtest.h>

#include <random>

#include "expect_error.hpp"
#include "oee/run.hpp"
#include "oee/stats.hpp"
#include "oracles.hpp"

using namespace oee;

namespace {

std::vector<SeriesPoint> series_of(const std::vector<std::uint32_t>& diversity, const std::vector<std::uint32_t>& events) {
  std::vector<SeriesPoint> s;
  for (std::size_t i = 0; i < diversity.size(); ++i) s.push_back({i + 1, diversity[i], 0, events[i]});
  return s;
}

EventLog three_tick_log(RuleTable& table) {
  table = RuleTable(3);
  table.add(0, RuleKind::Productive, {0, 1}, 2);
  EventLog log{3, {1, 1, 0}, 1, {}};
  EventBatch b1;
  b1.tick = 1;
  b1.created = {{2, Cause::by_rule(0)}};
  EventBatch b2;
  b2.tick = 2;
  b2.destroyed = {{0, Cause::decay()}};
  EventBatch b3;
  b3.tick = 3;
  b3.created = {{0, Cause::spontaneous()}};
  log.batches = {b1, b2, b3};
  return log;
}

}  // namespace

TEST(SeriesFromLog, EmptyAndQuietRuns) {
  EXPECT_TRUE(series_from_log(EventLog{4, {0, 0, 0, 0}, 0, {}}, RuleTable(4)).empty());
  EventLog quiet{4, {0, 0, 0, 0}, 0, {}};
  for (Tick t = 1; t <= 5; ++t) quiet.batches.push_back(EventBatch{t, {}, {}, {}, {}});
  for (const auto& p : series_from_log(quiet, RuleTable(4))) EXPECT_EQ(p.diversity, 0u);
}

TEST(SeriesFromLog, HandBuiltTrajectory) {
  RuleTable table;
  const auto log = three_tick_log(table);
  const auto s = series_from_log(log, table);
  const std::vector<SeriesPoint> want{{1, 3, 3, 1}, {2, 2, 0, 1}, {3, 3, 3, 1}};
  EXPECT_EQ(s, want);
}

TEST(SeriesFromLog, RejectsGapsAndInconsistentEvents) {
  RuleTable table;
  auto gapped = three_tick_log(table);
  gapped.batches[1].tick = 5;
  EXPECT_OEE_ERROR(series_from_log(gapped, table), CorruptLog);
  auto twice = three_tick_log(table);
  twice.batches[2].created = {{1, Cause::spontaneous()}};
  EXPECT_OEE_ERROR(series_from_log(twice, table), CorruptLog);
}

TEST(SeriesFromLog, ReplayEqualsLiveSeries) {
  RunConfig c;
  c.e = 100;
  c.env_e = 10;
  c.n0 = 10;
  c.ticks = 2000;
  c.p_schema = 0.005;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    c.seed = seed;
    const auto run = simulate(c);
    const auto replay = series_from_log(event_log_from_jsonl(to_jsonl(run.log)), run.rules);
    EXPECT_EQ(replay, run.series);
    EXPECT_EQ(series_from_csv(to_csv(run.series)), run.series);
    for (const auto& p : run.series) {
      ASSERT_LE(p.complexity, p.diversity);
      ASSERT_LE(p.diversity, c.e);
    }
  }
}

TEST(Transitions, ConstantSeriesHasNone) {
  const auto s = series_of(std::vector<std::uint32_t>(500, 40), std::vector<std::uint32_t>(500, 0));
  EXPECT_TRUE(detect_transitions(s, {50, 20, 0.01}, 200).empty());
}

TEST(Transitions, StepBetweenPlateaus) {
  const auto s = series_of({10, 10, 10, 50, 50, 50}, {0, 0, 0, 40, 0, 0});
  const auto t = detect_transitions(s, {2, 20, 0.01}, 100);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].magnitude, 40u);
  EXPECT_EQ(t[0].direction, Direction::Up);
  EXPECT_LT(t[0].start_tick, t[0].end_tick);
  EXPECT_LE(t[0].end_tick - t[0].start_tick, 2u);
}

TEST(Transitions, DownwardStep) {
  const auto s = series_of({60, 60, 60, 60, 5, 5, 5, 5}, {0, 0, 0, 0, 55, 0, 0, 0});
  const auto t = detect_transitions(s, {3, 20, 0.01}, 100);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].direction, Direction::Down);
  EXPECT_EQ(t[0].magnitude, 55u);
}

TEST(Transitions, SteadyRampHasNoEquilibria) {
  std::vector<std::uint32_t> d, ev;
  for (std::uint32_t i = 0; i < 200; ++i) {
    d.push_back(10 * i);
    ev.push_back(10);
  }
  EXPECT_TRUE(detect_transitions(series_of(d, ev), {2, 20, 0.01}, 100).empty());
}

TEST(Transitions, SeveralDisjointJumps) {
  std::vector<std::uint32_t> d, ev;
  std::uint32_t level = 10;
  for (int block = 0; block < 4; ++block) {
    for (int i = 0; i < 20; ++i) {
      d.push_back(level);
      ev.push_back(i == 0 && block > 0 ? 30 : 0);
    }
    level += 30;
  }
  const auto t = detect_transitions(series_of(d, ev), {5, 20, 0.01}, 100);
  ASSERT_EQ(t.size(), 3u);
  for (std::size_t k = 1; k < t.size(); ++k) EXPECT_LT(t[k - 1].end_tick, t[k].start_tick);
}

TEST(Transitions, WindowLongerThanSeries) {
  const auto s = series_of({1, 2, 3}, {0, 0, 0});
  EXPECT_OEE_ERROR(detect_transitions(s, {5, 1, 0.0}, 10), SeriesTooShort);
}

TEST(Avalanches, Extraction) {
  EXPECT_TRUE(avalanches(series_of({0, 0, 0}, {0, 0, 0}), 0.0).empty());
  const auto s = series_of({0, 0, 0, 0, 0, 0}, {0, 3, 5, 0, 2, 0});
  EXPECT_EQ(avalanches(s, 0.0), (std::vector<std::uint64_t>{8, 2}));
}

TEST(Avalanches, SplittingAtQuietTickIsInvariant) {
  std::mt19937_64 gen(3);
  std::vector<std::uint32_t> ev(400);
  for (auto& x : ev) x = std::bernoulli_distribution(0.4)(gen) ? static_cast<std::uint32_t>(gen() % 9) : 0;
  ev[200] = 0;
  const auto s = series_of(std::vector<std::uint32_t>(400, 0), ev);
  auto left = avalanches(std::span(s).first(201), 1.0);
  const auto right = avalanches(std::span(s).subspan(201), 1.0);
  left.insert(left.end(), right.begin(), right.end());
  EXPECT_EQ(left, avalanches(s, 1.0));
  std::uint64_t mass = 0, above = 0;
  for (auto a : left) mass += a;
  for (auto x : ev) above += x > 1 ? x : 0;
  EXPECT_EQ(mass, above);
}

TEST(Freeze, QuietRunFreezesAtStart) {
  const auto s = series_of(std::vector<std::uint32_t>(30, 4), std::vector<std::uint32_t>(30, 0));
  EXPECT_EQ(freeze_check(s, 10), (FreezeVerdict{true, 1}));
  EXPECT_OEE_ERROR(freeze_check(s, 40), SeriesTooShort);
}

TEST(Freeze, NoiselessProductiveRunFreezes) {
  RunConfig c;
  c.e = 100;
  c.env_e = 10;
  c.n0 = 10;
  c.lambda = 0;
  c.p_plus = 0;
  c.p_schema = 0;
  c.prod_share = 1;
  c.seed_schema_kind = KindAllowed::Productive;
  c.ticks = 1000;
  EXPECT_TRUE(freeze_check(simulate(c).series, 50).frozen);
}

TEST(Freeze, CertainSpontaneousCreationStaysActive) {
  RunConfig c;
  c.e = 50;
  c.env_e = 5;
  c.n0 = 5;
  c.p_plus = 1;
  c.lambda = 0.1;
  c.ticks = 500;
  const auto s = simulate(c).series;
  for (std::size_t h : {1, 10, 100}) EXPECT_FALSE(freeze_check(s, h).frozen);
}

TEST(PowerLaw, ZetaAgreesWithDirectSum) {
  for (double s : {1.5, 2.0, 2.5, 3.7}) {
    for (double q : {1.0, 2.0, 7.5}) EXPECT_NEAR(hurwitz_zeta(s, q), oracle::zeta(s, q), 1e-9 * oracle::zeta(s, q));
  }
}

TEST(PowerLaw, ClosedFormMatchesHandComputation) {
  const std::vector<std::uint64_t> x{1, 1, 2, 3, 1, 5, 8, 1, 2, 13, 1, 4};
  double sum = 0.0;
  for (auto v : x) sum += std::log(static_cast<double>(v) / 0.5);
  const auto fit = fit_power_law(x, 1);
  EXPECT_NEAR(fit.alpha_closed_form, 1.0 + static_cast<double>(x.size()) / sum, 1e-12);
  EXPECT_EQ(fit.n_tail, x.size());
  EXPECT_GT(fit.alpha, 1.0);
  EXPECT_GE(fit.ks, 0.0);
  EXPECT_LE(fit.ks, 1.0);
}

TEST(PowerLaw, RecoversExponentFromSyntheticSamples) {
  const oracle::DiscretePowerLaw dist(2.5, 1);
  std::mt19937_64 gen(12345);
  std::vector<std::uint64_t> x(100000);
  for (auto& v : x) v = dist(gen);
  const auto fit = fit_power_law(x, 1);
  EXPECT_GE(fit.alpha, 2.45);
  EXPECT_LE(fit.alpha, 2.55);
  EXPECT_LT(fit.ks, 0.02);
}

TEST(PowerLaw, RecoversExponentAboveCutoff) {
  const oracle::DiscretePowerLaw dist(2.2, 5);
  std::mt19937_64 gen(99);
  std::vector<std::uint64_t> x(50000);
  for (auto& v : x) v = dist(gen);
  const auto fit = fit_power_law(x, 5);
  EXPECT_NEAR(fit.alpha, 2.2, 0.05);
  EXPECT_LT(fit.ks, 0.02);
}

TEST(PowerLaw, GeometricSamplesAreRejected) {
  std::mt19937_64 gen(7);
  std::geometric_distribution<std::uint64_t> geo(0.5);
  std::vector<std::uint64_t> x(100000);
  for (auto& v : x) v = geo(gen) + 1;
  EXPECT_GT(fit_power_law(x, 1).ks, 0.05);
}

TEST(PowerLaw, ScanPicksACutoffWithEnoughTail) {
  const oracle::DiscretePowerLaw dist(2.5, 1);
  std::mt19937_64 gen(1);
  std::vector<std::uint64_t> x(20000);
  for (auto& v : x) v = dist(gen);
  const auto fit = fit_power_law_scan(x);
  EXPECT_GE(fit.n_tail, 10u);
  EXPECT_NEAR(fit.alpha, 2.5, 0.15);
}

TEST(PowerLaw, Errors) {
  EXPECT_OEE_ERROR(fit_power_law(std::vector<std::uint64_t>(50, 3), 3), DegenerateTail);
  EXPECT_OEE_ERROR(fit_power_law(std::vector<std::uint64_t>{1, 2, 3}, 1), InsufficientSamples);
  EXPECT_OEE_ERROR(fit_power_law(std::vector<std::uint64_t>(50, 3), 0), InvalidParameter);
}

TEST(Observables, IncrementsAndLifetimes) {
  const auto s = series_of({3, 5, 5, 1}, {2, 2, 0, 4});
  EXPECT_EQ(diversity_increments(s), (std::vector<std::uint64_t>{2, 4}));
  RuleTable table;
  const auto log = three_tick_log(table);
  EXPECT_EQ(lifetimes(log), std::vector<std::uint64_t>{});
  auto longer = log;
  EventBatch b4;
  b4.tick = 4;
  b4.destroyed = {{0, Cause::decay()}, {2, Cause::decay()}};
  longer.batches.push_back(b4);
  EXPECT_EQ(lifetimes(longer), (std::vector<std::uint64_t>{1, 3}));
}
