#include <doctest.h>

#include <filesystem>

#include "gridres/metrics.hpp"
#include "gridres/rng.hpp"

using namespace gridres;

namespace {

StepRecord record(std::vector<double> d_sc, std::vector<double> d_ac,
                  std::vector<double> p_sc = {}, std::vector<double> p_ac = {},
                  std::vector<std::uint8_t> status = {1}) {
  StepRecord r;
  r.d_scheduled = std::move(d_sc);
  r.d_actual = std::move(d_ac);
  r.p_scheduled = std::move(p_sc);
  r.p_actual = std::move(p_ac);
  r.line_status = std::move(status);
  return r;
}

}  // namespace

TEST_CASE("load satisfaction") {
  CHECK(load_satisfaction(record({10, 30}, {10, 30})) == 1.0);
  CHECK(load_satisfaction(record({10, 30}, {0, 0})) == 0.0);
  CHECK(load_satisfaction(record({10, 30}, {10, 20})) == doctest::Approx(0.75));
  CHECK_THROWS_AS(load_satisfaction(record({0, 0}, {0, 0})), ZeroScheduledDemand);
}

TEST_CASE("line connectivity") {
  StepRecord r;
  r.line_status = {1, 1, 1, 1, 1, 1, 1, 1};
  CHECK(line_connectivity(r) == 1.0);
  r.line_status = {0, 0, 0, 0, 0, 0, 0, 0};
  CHECK(line_connectivity(r) == 0.0);
  r.line_status = {1, 1, 1, 0, 0, 0, 0, 0};
  CHECK(line_connectivity(r) == doctest::Approx(0.375));
}

TEST_CASE("operational cost") {
  CHECK(operational_cost(record({}, {}, {50, 50}, {50, 50}), 1.0) == 0.0);
  CHECK(operational_cost(record({}, {}, {50, 50}, {60, 30}), 2.0) ==
        doctest::Approx(60.0));
  // linearity in c_re
  const auto r = record({}, {}, {50, 50}, {60, 30});
  CHECK(operational_cost(r, 4.0) == doctest::Approx(2.0 * operational_cost(r, 2.0)));
}

TEST_CASE("recovery duration: capped sum over subgraphs") {
  // two loads at substations 0 and 1, partition = {{0}, {1}}, H = 100
  EpisodeLog log;
  log.horizon = 100;
  log.load_substation = {0, 1};
  RecoveryPartition part;
  part.groups = {{0}, {1}};

  SUBCASE("one subgraph never recovers, the other recovers at step 5") {
    for (int t = 0; t < 100; ++t) {
      StepRecord r;
      r.d_scheduled = {10, 10};
      r.d_actual = {t >= 4 ? 10.0 : 5.0, 5.0};  // load 1 never fully served
      r.line_status = {1};
      log.steps.push_back(r);
    }
    CHECK(recovery_duration(log, part, 2) == doctest::Approx(105.0));
  }

  SUBCASE("all loads served from the first step") {
    RecoveryPartition three;
    three.groups = {{0}, {1}};
    for (int t = 0; t < 100; ++t) {
      StepRecord r;
      r.d_scheduled = {10, 10};
      r.d_actual = {10, 10};
      r.line_status = {1};
      log.steps.push_back(r);
    }
    CHECK(recovery_duration(log, three, 2) == doctest::Approx(2.0));
  }

  SUBCASE("whole-grid partition recovering at step 7") {
    RecoveryPartition whole;
    whole.groups = {{0, 1}};
    for (int t = 0; t < 100; ++t) {
      StepRecord r;
      r.d_scheduled = {10, 10};
      r.d_actual = {t >= 6 ? 10.0 : 9.0, 10.0};
      r.line_status = {1};
      log.steps.push_back(r);
    }
    CHECK(recovery_duration(log, whole, 2) == doctest::Approx(7.0));
  }
}

TEST_CASE("recovery duration: three trivially recovered subgraphs sum to 3") {
  EpisodeLog log;
  log.horizon = 50;
  log.load_substation = {0, 1, 2};
  for (int t = 0; t < 50; ++t) {
    StepRecord r;
    r.d_scheduled = {5, 5, 5};
    r.d_actual = {5, 5, 5};
    r.line_status = {1};
    log.steps.push_back(r);
  }
  CHECK(recovery_duration(log, per_substation_partition(3), 3) == doctest::Approx(3.0));
}

TEST_CASE("recovery duration is monotone and order-invariant") {
  EpisodeLog slow, fast;
  for (auto* log : {&slow, &fast}) {
    log->horizon = 20;
    log->load_substation = {0, 1};
  }
  for (int t = 0; t < 20; ++t) {
    StepRecord a;
    a.d_scheduled = {10, 10};
    a.d_actual = {t >= 10 ? 10.0 : 0.0, t >= 3 ? 10.0 : 0.0};
    a.line_status = {1};
    slow.steps.push_back(a);
    StepRecord b;
    b.d_scheduled = {10, 10};
    b.d_actual = {t >= 5 ? 10.0 : 0.0, t >= 3 ? 10.0 : 0.0};
    b.line_status = {1};
    fast.steps.push_back(b);
  }
  RecoveryPartition fwd, rev;
  fwd.groups = {{0}, {1}};
  rev.groups = {{1}, {0}};
  CHECK(recovery_duration(slow, fwd, 2) >= recovery_duration(fast, fwd, 2));
  CHECK(recovery_duration(slow, fwd, 2) == recovery_duration(slow, rev, 2));
}

TEST_CASE("recovery partition validation") {
  EpisodeLog log;
  log.horizon = 10;
  log.load_substation = {0};
  log.steps.push_back(record({5}, {5}));
  RecoveryPartition overlap;
  overlap.groups = {{0, 1}, {1}};
  CHECK_THROWS_AS(recovery_duration(log, overlap, 2), InvalidPartition);
  RecoveryPartition gap;
  gap.groups = {{0}};
  CHECK_THROWS_AS(recovery_duration(log, gap, 2), InvalidPartition);
}

TEST_CASE("episode summary matches an independent fold") {
  Rng rng(31);
  EpisodeLog log;
  log.horizon = 40;
  log.load_substation = {0, 1, 2};
  for (int t = 0; t < 40; ++t) {
    StepRecord r;
    for (int j = 0; j < 3; ++j) {
      const double sched = rng.uniform(5.0, 15.0);
      r.d_scheduled.push_back(sched);
      r.d_actual.push_back(sched * rng.uniform(0.5, 1.0));
    }
    for (int k = 0; k < 2; ++k) {
      r.p_scheduled.push_back(rng.uniform(10.0, 30.0));
      r.p_actual.push_back(rng.uniform(10.0, 30.0));
    }
    r.line_status = {1, 0, 1, 1};
    r.islands = 1 + static_cast<int>(rng.bounded(3));
    r.reward = rng.uniform(-1.0, 1.0);
    log.steps.push_back(r);
  }

  const SummaryRecord s = episode_summary(log, 2.0);

  // independent fold over the raw records
  double reward = 0.0, cost = 0.0, islands = 0.0, unsupplied = 0.0, broken = 0.0;
  for (const auto& r : log.steps) {
    reward += r.reward;
    double diff = 0.0;
    for (std::size_t k = 0; k < r.p_scheduled.size(); ++k)
      diff += std::abs(r.p_scheduled[k] - r.p_actual[k]);
    cost += 2.0 * diff;
    islands += r.islands;
    double sc = 0.0, ac = 0.0;
    for (double v : r.d_scheduled) sc += v;
    for (double v : r.d_actual) ac += v;
    unsupplied += 1.0 - ac / sc;
    for (auto c : r.line_status) broken += c ? 0.0 : 1.0;
  }
  const double n = 40.0;
  CHECK(s.steps_survived == 40.0);
  CHECK(std::abs(s.total_reward - reward) <= 1e-12 * std::abs(reward));
  CHECK(std::abs(s.mean_cost - cost / n) <= 1e-12 * std::abs(cost / n));
  CHECK(std::abs(s.mean_islands - islands / n) <= 1e-12);
  CHECK(std::abs(s.mean_unsupplied - unsupplied / n) <= 1e-12);
  CHECK(std::abs(s.mean_broken - broken / n) <= 1e-12);

  // determinism
  const SummaryRecord s2 = episode_summary(log, 2.0);
  CHECK(s.total_reward == s2.total_reward);
  CHECK(s.mean_cost == s2.mean_cost);
}

TEST_CASE("episode log JSONL round-trip") {
  EpisodeLog log;
  log.horizon = 5;
  log.load_substation = {0, 2};
  for (int t = 0; t < 3; ++t) {
    StepRecord r;
    r.d_scheduled = {10.0, 20.0};
    r.d_actual = {10.0, 15.0};
    r.p_scheduled = {30.0};
    r.p_actual = {25.0};
    r.line_status = {1, 0};
    r.islands = 2;
    r.reward = 0.25 * t;
    log.steps.push_back(r);
  }
  const auto tmp = std::filesystem::temp_directory_path() / "gridres_log.jsonl";
  save_episode_log(log, tmp.string());
  const EpisodeLog back = load_episode_log(tmp.string());
  REQUIRE(back.steps.size() == 3);
  CHECK(back.horizon == 5);
  CHECK(back.load_substation == log.load_substation);
  CHECK(back.steps[1].d_actual == log.steps[1].d_actual);
  CHECK(back.steps[2].reward == log.steps[2].reward);
  std::filesystem::remove(tmp);
}
