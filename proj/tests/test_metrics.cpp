#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "unisac/metrics.hpp"

using namespace unisac;

namespace {

GroundTruth three_user_truth() {
  GroundTruth t;
  t.comm.push_back({BitVector{1, 0, 1}, 0, 0.2});
  t.sens.push_back({4, 0, -0.5});
  t.sens.push_back({7, 1, 0.1});
  return t;
}

DetectionReport perfect_report(const GroundTruth& t) {
  DetectionReport r;
  for (const auto& u : t.comm) r.messages.push_back({u.message, u.slot});
  for (const auto& u : t.sens) r.sensing.push_back({u.row, u.slot, u.aoa});
  return r;
}

}  // namespace

TEST_CASE("perfect detection scores zero everywhere") {
  GroundTruth t = three_user_truth();
  TrialScore s = score_trial(t, perfect_report(t));
  CHECK(s.md_comm == 0);
  CHECK(s.md_sens == 0);
  CHECK(s.coll_comm == 0);
  CHECK(s.coll_sens == 0);
  CHECK(s.detected_sens == 2);
  CHECK(s.sum_sq_aoa_error == 0.0);
  CHECK(s.active_comm == 1);
  CHECK(s.active_sens == 2);
}

TEST_CASE("empty report charges misdetection to non collided users only") {
  GroundTruth t = three_user_truth();
  // Force a sensing collision: duplicate (row, slot).
  t.sens.push_back({4, 0, 0.9});
  TrialScore s = score_trial(t, DetectionReport{});
  CHECK(s.coll_sens == 2);
  CHECK(s.md_sens == 1);  // only the non collided sensing user
  CHECK(s.md_comm == 1);
  CHECK(s.detected_sens == 0);
}

TEST_CASE("collided sensing pair is excluded from the aoa error") {
  GroundTruth t;
  t.sens.push_back({3, 0, 0.4});
  t.sens.push_back({3, 0, -0.2});  // collision partner
  t.sens.push_back({5, 0, 0.7});
  DetectionReport r;
  r.sensing.push_back({3, 0, 0.4});  // "detecting" the collided pair must not score
  r.sensing.push_back({5, 0, 0.8});
  TrialScore s = score_trial(t, r);
  CHECK(s.coll_sens == 2);
  CHECK(s.detected_sens == 1);
  CHECK(s.sum_sq_aoa_error == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("aoa error uses the wrapped difference") {
  GroundTruth t;
  t.sens.push_back({0, 0, 0.95});
  DetectionReport r;
  r.sensing.push_back({0, 0, -0.95});
  TrialScore s = score_trial(t, r);
  // Short way around: distance 0.1, squared 0.01.
  CHECK(s.sum_sq_aoa_error == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("duplicate comm messages in the same slot collide") {
  GroundTruth t;
  t.comm.push_back({BitVector{1, 1}, 0, 0.1});
  t.comm.push_back({BitVector{1, 1}, 0, 0.2});
  t.comm.push_back({BitVector{1, 1}, 1, 0.3});  // other slot: distinct event
  TrialScore s = score_trial(t, DetectionReport{});
  CHECK(s.coll_comm == 2);
  CHECK(s.md_comm == 1);
}

TEST_CASE("aggregate ratios and exact decomposition") {
  std::vector<TrialScore> scores;
  TrialScore perfect;
  perfect.active_comm = 2;
  perfect.active_sens = 2;
  perfect.detected_sens = 2;
  perfect.sum_sq_aoa_error = 0.0;
  TrialScore missed;
  missed.active_comm = 2;
  missed.active_sens = 2;
  missed.md_comm = 2;
  missed.md_sens = 2;
  for (int i = 0; i < 10; ++i) scores.push_back(perfect);
  for (int i = 0; i < 10; ++i) scores.push_back(missed);
  AggregateMetrics m = aggregate(scores);
  CHECK(m.pupe == doctest::Approx(0.5));
  CHECK(m.p_md == doctest::Approx(0.5));
  CHECK(m.p_coll == doctest::Approx(0.0));
  CHECK(m.pupe == doctest::Approx(m.p_md + m.p_coll).epsilon(1e-15));
  CHECK(m.mseaoa_defined);
  CHECK(m.mseaoa == 0.0);
  CHECK(m.pupe_se > 0.0);
  CHECK(m.trials == 20);
}

TEST_CASE("aggregate hand arithmetic with mixed counts") {
  // Trial 1: 3 active, 1 md; trial 2: 5 active, 1 coll. Ratio of sums:
  // pupe = 2/8; mse = (0.02 + 0.06) / 3.
  TrialScore a;
  a.active_comm = 3;
  a.md_comm = 1;
  a.active_sens = 0;
  TrialScore b;
  b.active_sens = 5;
  b.coll_sens = 1;
  b.detected_sens = 3;
  b.sum_sq_aoa_error = 0.08;
  AggregateMetrics m = aggregate({a, b});
  CHECK(m.pupe == doctest::Approx(0.25));
  CHECK(m.p_md == doctest::Approx(0.125));
  CHECK(m.p_coll == doctest::Approx(0.125));
  CHECK(m.mseaoa == doctest::Approx(0.08 / 3.0));
}

TEST_CASE("undefined mseaoa flag and determinism") {
  TrialScore s;
  s.active_comm = 1;
  s.md_comm = 1;
  AggregateMetrics m = aggregate({s, s, s});
  CHECK_FALSE(m.mseaoa_defined);
  CHECK(m.pupe == doctest::Approx(1.0));
  AggregateMetrics m2 = aggregate({s, s, s});
  CHECK(m.pupe_se == m2.pupe_se);  // fixed bootstrap seed
  CHECK_THROWS_AS(aggregate({}), ValidationError);
}
