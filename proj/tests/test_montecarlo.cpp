// SPDX-License-Identifier: Apache-2.0
//
// pcslam - phase-coherent snapshot SLAM for distributed MIMO networks
// Copyright (C) 2026 The pcslam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <sstream>

#include "pcslam/io/csv.hpp"
#include "pcslam/montecarlo.hpp"

namespace pcslam {
namespace {

const std::vector<Truth> kTruths{{ObjectClass::UE, {-3, 5, -1.4}},
                                 {ObjectClass::VUE, {-3, 15, -1.4}},
                                 {ObjectClass::SP, {2, -7, -1.4}}};

TEST(Match, ExactDetections) {
  const std::vector<Vec3> d{{2, -7, -1.4}, {-3, 5, -1.4}, {-3, 15, -1.4}};
  const auto r = match_detections(d, kTruths, 0.2);
  EXPECT_EQ(r.success, (std::vector<bool>{true, true, true}));
  EXPECT_EQ(r.detection[0], 1u);
  EXPECT_EQ(r.detection[2], 0u);
  EXPECT_EQ(r.distance[1], 0.0);
}

TEST(Match, OutsideRadiusFails) {
  const std::vector<Vec3> d{{-3.25, 5, -1.4}};
  const auto r = match_detections(d, kTruths, 0.2);
  EXPECT_EQ(r.success, (std::vector<bool>{false, false, false}));
  EXPECT_FALSE(r.detection[0].has_value());
  EXPECT_TRUE(std::isnan(r.distance[0]));
}

TEST(Match, OneToOne) {
  const std::vector<Vec3> d{{-3.1, 5, -1.4}, {-3.05, 5, -1.4}};
  const auto r = match_detections(d, kTruths, 0.2);
  EXPECT_TRUE(r.success[0]);
  EXPECT_EQ(r.detection[0], 1u);
  EXPECT_NEAR(r.distance[0], 0.05, 1e-12);
  EXPECT_FALSE(r.success[1]);
  EXPECT_FALSE(r.success[2]);
}

TEST(Match, GlobalClosestPairFirst) {
  // Detection 0 is closer to truth B but truth B has an even closer detection.
  const std::vector<Truth> t{{ObjectClass::UE, {0, 0, 0}}, {ObjectClass::SP, {0.3, 0, 0}}};
  const std::vector<Vec3> d{{0.16, 0, 0}, {0.3, 0, 0}};
  const auto r = match_detections(d, t, 0.2);
  EXPECT_EQ(r.detection[1], 1u);
  EXPECT_EQ(r.detection[0], 0u);
  EXPECT_THROW(match_detections(d, t, 0.0), InvalidArgument);
}

TEST(Stats, BinomialCounting) {
  ObjectStats o{200, 37};
  EXPECT_EQ(o.probability(), 37.0 / 200.0);
  EXPECT_NEAR(o.std_err(), std::sqrt(0.185 * 0.815 / 200), 1e-15);
  EXPECT_EQ((ObjectStats{}).probability(), 0.0);
}

TrialConfig small_config(double spacing, Variant v, std::size_t trials) {
  TrialConfig cfg = reference_trial_config(spacing, v, trials, 2026);
  cfg.imaging.cache_budget_bytes = std::size_t{1} << 30;
  return cfg;
}

TEST(Trial, Reproducible) {
  const auto cfg = small_config(0.2, Variant::Estimated, 1);
  const Imager im(cfg.grid, cfg.base_scenario.aps, cfg.base_scenario.rf.carrier_hz, cfg.imaging);
  for (std::size_t t = 0; t < 3; ++t) {
    const auto a = run_trial(cfg, t, im), b = run_trial(cfg, t, im);
    EXPECT_EQ(a.scenario, b.scenario);
    EXPECT_EQ(a.phases, b.phases);
    EXPECT_EQ(a.match.success, b.match.success);
    ASSERT_EQ(a.detections.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(a.detections[i].position, b.detections[i].position);
      EXPECT_EQ(a.detections[i].amplitudes, b.detections[i].amplitudes);
    }
    EXPECT_FALSE(a.error.has_value());
  }
  EXPECT_NE(run_trial(cfg, 0, im).scenario.ue, run_trial(cfg, 1, im).scenario.ue);
}

TEST(Trial, PlacementRespectsBoxAndSeparation) {
  const auto cfg = small_config(0.2, Variant::Estimated, 1);
  for (std::size_t t = 0; t < 200; ++t) {
    const Scenario s = detail::place_objects(cfg, t);
    EXPECT_GE(s.ue.x, -4.0);
    EXPECT_LT(s.ue.x, 4.0);
    EXPECT_GE(s.ue.y, -8.0);
    EXPECT_LT(s.ue.y, 8.0);
    EXPECT_EQ(s.ue.z, kReferenceObjectZ);
    EXPECT_GE(distance(s.ue, s.scatterers[0].position), 1.0);
  }
}

TEST(Trial, TruthsAreUeMirrorAndScatterer) {
  const auto cfg = small_config(0.2, Variant::Estimated, 1);
  const auto r = run_trial(cfg, 4);
  ASSERT_EQ(r.truths.size(), 3u);
  EXPECT_EQ(r.truths[0].cls, ObjectClass::UE);
  EXPECT_NEAR(r.truths[1].position.y, 20.0 - r.scenario.ue.y, 1e-12);
  EXPECT_EQ(r.truths[2].position, r.scenario.scatterers[0].position);
}

TEST(Trial, OnGridUeIsDetected) {
  auto cfg = small_config(0.05, Variant::Estimated, 1);
  cfg.placement.snap_to_grid = true;
  const Imager im(cfg.grid, cfg.base_scenario.aps, cfg.base_scenario.rf.carrier_hz, cfg.imaging);
  for (std::size_t t = 0; t < 5; ++t) {
    const auto r = run_trial(cfg, t, im);
    EXPECT_TRUE(r.match.success[0]) << "trial " << t;
    EXPECT_EQ(r.detections[0].position, r.scenario.ue);
  }
}

TEST(Trial, PerfectRemovalHelpsTheScatterer) {
  const auto cfg = small_config(0.05, Variant::Estimated, 40);
  const std::vector<double> res{0.05};
  const std::vector<Variant> vs{Variant::Estimated, Variant::PerfectRemoval};
  const auto stats = sweep(cfg, res, vs);
  const auto &est = *stats.find(0.05, Variant::Estimated);
  const auto &pr = *stats.find(0.05, Variant::PerfectRemoval);
  EXPECT_GE(pr[ObjectClass::SP].successes, est[ObjectClass::SP].successes + 10);
  EXPECT_GE(pr[ObjectClass::SP].probability(), 0.5);
}

TEST(Trial, FailuresAreRecorded) {
  auto cfg = small_config(0.2, Variant::Estimated, 2);
  cfg.placement.min_ue_sp_separation_m = 1000.0;
  const auto r = run_trial(cfg, 0);
  ASSERT_TRUE(r.error.has_value());
  EXPECT_EQ(r.error->rfind("InvalidArgument", 0), 0u);
  const std::vector<double> res{0.2};
  const std::vector<Variant> vs{Variant::Estimated};
  const auto stats = sweep(cfg, res, vs);
  EXPECT_EQ(stats.points[0].failed_trials, 2u);
}

TEST(Sweep, CountingAndLayout) {
  const auto cfg = small_config(0.2, Variant::Estimated, 4);
  const std::vector<double> res{0.25, 0.2};
  const std::vector<Variant> vs{Variant::Estimated, Variant::PerfectRemoval};
  std::size_t calls = 0;
  const auto stats = sweep(cfg, res, vs, [&](const SweepPoint &, const TrialResult &) { ++calls; });
  EXPECT_EQ(calls, 16u);
  ASSERT_EQ(stats.points.size(), 4u);
  EXPECT_EQ(stats.points[0].resolution_m, 0.25);
  EXPECT_EQ(stats.points[1].variant, Variant::PerfectRemoval);
  for (const auto &pt : stats.points)
    for (ObjectClass c : kObjectClasses) {
      EXPECT_EQ(pt[c].trials, 4u);
      EXPECT_LE(pt[c].successes, pt[c].trials);
      EXPECT_EQ(pt[c].probability(), pt[c].successes / 4.0);
    }
  EXPECT_EQ(stats.find(0.3, Variant::Estimated), nullptr);
}

std::string sweep_csv(std::size_t threads, std::size_t cache) {
  auto cfg = small_config(0.2, Variant::Estimated, 6);
  cfg.imaging.threads = threads;
  cfg.imaging.cache_budget_bytes = cache;
  const std::vector<double> res{0.2};
  const std::vector<Variant> vs{Variant::Estimated, Variant::PerfectRemoval};
  std::ostringstream os;
  io::write_sweep_csv(os, sweep(cfg, res, vs));
  return os.str();
}

TEST(Sweep, ThreadAndCacheInvariant) {
  const std::string ref = sweep_csv(1, 0);
  EXPECT_EQ(ref, sweep_csv(4, 0));
  EXPECT_EQ(ref, sweep_csv(3, std::size_t{1} << 30));
}

TEST(Sweep, RejectsBadInput) {
  const auto cfg = small_config(0.2, Variant::Estimated, 1);
  const std::vector<double> bad{0.0};
  const std::vector<Variant> vs{Variant::Estimated};
  EXPECT_THROW(sweep(cfg, bad, vs), InvalidArgument);
  auto zero = cfg;
  zero.trials = 0;
  EXPECT_THROW(zero.validate(), InvalidArgument);
}

}  // namespace
}  // namespace pcslam
