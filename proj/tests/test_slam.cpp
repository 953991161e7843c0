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

#include <cmath>
#include <numbers>

#include "pcslam/forward.hpp"
#include "pcslam/imaging.hpp"
#include "pcslam/slam.hpp"

namespace pcslam {
namespace {

constexpr double kFc = 3e9;

const GridSpec kCoarse = GridSpec::planar(-5, 5, -10, 16, -1.4, 0.1);

Vec3 on_grid(const GridSpec &g, const Vec3 &p) { return g.cell_center(g.nearest_cell(p)); }

double rel_norm(std::span<const cdouble> a, std::span<const cdouble> b) {
  return std::sqrt(energy(a)) / std::sqrt(energy(b));
}

// Reference scene with UE and scatterer moved to cells of `g`; the mirror of
// an on-grid UE across y = 10 is on-grid as well.
Scenario on_grid_scene(const GridSpec &g) {
  Scenario s = reference_indoor_scenario();
  s.ue = on_grid(g, s.ue);
  s.scatterers[0].position = on_grid(g, s.scatterers[0].position);
  return s;
}

TEST(Estimate, SteeringVectorResidual) {
  const auto aps = reference_indoor_scenario().aps;
  const Vec3 x{0.4, 1.1, -1.4};
  const auto a = steering_vector(aps, x, kFc);
  const auto est = estimate_component(a.entries, x, aps, kFc);
  EXPECT_NEAR(est.phase, 0.0, 1e-12);
  for (double r : est.amplitudes) EXPECT_NEAR(r, 1.0, 1e-12);
}

TEST(Estimate, RecoversTrueComponent) {
  const Scenario s = on_grid_scene(kCoarse);
  const auto p = enumerate_paths(s, std::vector<double>{0.3, 0, 0})[0];
  const std::vector<PathDescriptor> one{p};
  const auto y = synthesize_paths(one, s.aps.size(), s.rf, NoiseSpec::off());
  const auto a = steering_vector(s.aps, s.ue, kFc);
  const auto est = estimate_component(y.samples, s.ue, s.aps, kFc);
  EXPECT_NEAR(est.phase, 0.3, 1e-12);
  const double sqrt_e = std::sqrt(symbol_energy(s.rf));
  for (std::size_t n = 0; n < s.aps.size(); ++n)
    EXPECT_NEAR(est.amplitudes[n] / (sqrt_e * p.amplitudes[n]), 1.0, 1e-12);
  const auto rec = reconstruct_component(est.amplitudes, est.phase, a);
  std::vector<cdouble> diff(rec.size());
  for (std::size_t n = 0; n < rec.size(); ++n) diff[n] = rec[n] - y.samples[n];
  EXPECT_LE(rel_norm(diff, y.samples), 1e-12);
}

TEST(Estimate, PhaseFoldedIntoHalfTurn) {
  const auto aps = reference_indoor_scenario().aps;
  const Vec3 x{1, 1, -1.4};
  auto a = steering_vector(aps, x, kFc);
  for (double theta : {0.0, 1.0, 3.0, 4.0, 6.0}) {
    std::vector<cdouble> y(a.entries.size());
    for (std::size_t n = 0; n < y.size(); ++n) y[n] = std::polar(2.0, theta) * a.entries[n];
    const auto est = estimate_component(y, x, aps, kFc);
    EXPECT_GE(est.phase, 0.0);
    EXPECT_LT(est.phase, std::numbers::pi);
    EXPECT_NEAR(std::remainder(est.phase - theta, std::numbers::pi), 0.0, 1e-12);
    const double sign = std::cos(est.phase - theta) > 0 ? 1.0 : -1.0;
    for (double r : est.amplitudes) EXPECT_NEAR(r, 2.0 * sign, 1e-12);
  }
}

TEST(Estimate, EnergyIdentityOnRandomData) {
  const auto aps = reference_indoor_scenario().aps;
  Substream rng(42, StreamDomain::Noise, 0, 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<cdouble> y(aps.size());
    for (auto &v : y) {
      const auto [a, b] = rng.normal_pair();
      v = {a, b};
    }
    const Vec3 x{rng.uniform(-5, 5), rng.uniform(-10, 16), -1.4};
    const auto a = steering_vector(aps, x, kFc);
    const auto est = estimate_component(y, x, aps, kFc);
    const auto rec = reconstruct_component(est.amplitudes, est.phase, a);
    std::vector<cdouble> r(y.size());
    for (std::size_t n = 0; n < y.size(); ++n) r[n] = y[n] - rec[n];
    double rho2 = 0.0;
    for (double v : est.amplitudes) rho2 += v * v;
    EXPECT_NEAR((energy(y) - energy(r)) / rho2, 1.0, 1e-12);
  }
}

TEST(Estimate, ZeroResidualIsDegenerate) {
  const auto aps = reference_indoor_scenario().aps;
  const std::vector<cdouble> zero(aps.size());
  EXPECT_FALSE(try_estimate_component(zero, steering_vector(aps, {0, 0, 0}, kFc)).has_value());
  EXPECT_THROW(estimate_component(zero, {0, 0, 0}, aps, kFc), DegenerateEstimate);
  EXPECT_THROW(try_estimate_component(std::vector<cdouble>(2), steering_vector(aps, {}, kFc)),
               LengthMismatch);
}

TEST(Cancel, ZeroAmplitudeLeavesResidual) {
  const auto s = reference_indoor_scenario();
  const auto y = synthesize_snapshot(s, std::vector<double>{1, 2, 3}, NoiseSpec::seeded(1));
  Detection d;
  d.position = {0, 0, -1.4};
  d.amplitudes.assign(s.aps.size(), 0.0);
  d.phase = 1.0;
  EXPECT_EQ(cancel(y, d, s.aps, kFc).samples, y.samples);
}

TEST(Cancel, PiAmbiguityInvariance) {
  const auto s = reference_indoor_scenario();
  const auto y = synthesize_snapshot(s, std::vector<double>{1, 2, 3}, NoiseSpec::seeded(1));
  Detection d;
  d.position = {0.5, 0.5, -1.4};
  const auto est = estimate_component(y.samples, d.position, s.aps, kFc);
  d.amplitudes = est.amplitudes;
  d.phase = est.phase;
  Detection flipped = d;
  flipped.phase += std::numbers::pi;
  for (double &r : flipped.amplitudes) r = -r;
  const auto r1 = cancel(y, d, s.aps, kFc), r2 = cancel(y, flipped, s.aps, kFc);
  for (std::size_t n = 0; n < y.size(); ++n)
    EXPECT_NEAR(std::abs(r1.samples[n] - r2.samples[n]), 0.0, 1e-12 * std::abs(y.samples[n]));
}

class ExactCancellation : public ::testing::TestWithParam<PathKind> {};

TEST_P(ExactCancellation, SingleOnGridTarget) {
  const Scenario s = on_grid_scene(kCoarse);
  const auto paths = enumerate_paths(s, std::vector<double>{0.7, 2.9, 4.1});
  const std::size_t k = static_cast<std::size_t>(GetParam());
  const std::vector<PathDescriptor> one{paths[k]};
  const auto y = synthesize_paths(one, s.aps.size(), s.rf, NoiseSpec::off());
  const auto dets = run_slam(y, kCoarse, s.aps, kFc, StopRule::targets(1));
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].cell_index, kCoarse.nearest_cell(paths[k].apparent_source));
  EXPECT_LE(std::sqrt(dets[0].residual_energy / energy(y.samples)), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(AllKinds, ExactCancellation,
                         ::testing::Values(PathKind::LoS, PathKind::Reflection, PathKind::Scatter));

TEST(StopRules, Validation) {
  EXPECT_THROW(StopRule{}.validate(), InvalidArgument);
  EXPECT_THROW(StopRule::targets(0).validate(), InvalidArgument);
  EXPECT_THROW(StopRule::residual(0.0).validate(), InvalidArgument);
  EXPECT_THROW(StopRule::residual(1.5).validate(), InvalidArgument);
  EXPECT_NO_THROW(StopRule::residual(1.0).validate());
  EXPECT_NO_THROW((StopRule{3, 0.1}.validate()));
}

TEST(Slam, ResidualRuleFiresBeforeFirstExtraction) {
  const auto s = reference_indoor_scenario();
  Snapshot y;
  y.samples = draw_noise(3, 0, s.aps.size(), noise_variance(s.rf));
  EXPECT_TRUE(run_slam(y, kCoarse, s.aps, kFc, StopRule::residual(1.0)).empty());
}

TEST(Slam, MaxTargetsOne) {
  const auto s = reference_indoor_scenario();
  const auto y = synthesize_snapshot(s, std::vector<double>{1, 2, 3}, NoiseSpec::seeded(2));
  const auto dets = run_slam(y, kCoarse, s.aps, kFc, StopRule::targets(1));
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].iteration, 1u);
}

TEST(Slam, ResidualEnergyDecreasesAndRuleStops) {
  const Scenario s = on_grid_scene(kCoarse);
  const auto y = synthesize_snapshot(s, std::vector<double>{1, 2, 3}, NoiseSpec::seeded(2));
  const double e0 = energy(y.samples);
  const auto dets = run_slam(y, kCoarse, s.aps, kFc, StopRule{10, 0.05});
  ASSERT_FALSE(dets.empty());
  double prev = e0;
  for (const auto &d : dets) {
    EXPECT_LE(d.residual_energy, prev);
    prev = d.residual_energy;
  }
  EXPECT_LE(dets.back().residual_energy, 0.05 * e0);
  for (std::size_t i = 0; i + 1 < dets.size(); ++i) EXPECT_GT(dets[i].residual_energy, 0.05 * e0);
}

TEST(Slam, StopsWhenNothingIsLeft) {
  const auto aps = reference_indoor_scenario().aps;
  Snapshot y;
  y.samples.assign(aps.size(), cdouble{});
  const auto dets = run_slam(y, kCoarse, aps, kFc, StopRule::targets(3));
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].residual_energy, 0.0);
}

TEST(Slam, StrongestTargetFirst) {
  const Scenario s = on_grid_scene(kCoarse);
  const auto y = synthesize_snapshot(s, std::vector<double>{0.2, 1.3, 2.4}, NoiseSpec::seeded(6));
  const auto dets = run_slam(y, kCoarse, s.aps, kFc, StopRule::targets(3));
  ASSERT_EQ(dets.size(), 3u);
  EXPECT_EQ(dets[0].cell_index, kCoarse.nearest_cell(s.ue));
  EXPECT_GT(dets[0].peak_value, dets[1].peak_value);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(dets[i].iteration, i + 1);
}

TEST(Oracle, FirstIterationMatchesEstimatedRemovalOnGrid) {
  const Scenario s = on_grid_scene(kCoarse);
  const std::vector<double> phases{0.2, 1.3, 2.4};
  const auto y = synthesize_snapshot(s, phases, NoiseSpec::seeded(6));
  const Imager im(kCoarse, s.aps, kFc);
  const auto est = run_slam(y, im, StopRule::targets(3));
  const auto orc = run_slam_oracle_removal(y, im, StopRule::targets(3), {s, phases, 0.5});
  ASSERT_EQ(orc.size(), 3u);
  EXPECT_EQ(orc[0].cell_index, est[0].cell_index);
  EXPECT_EQ(orc[0].peak_value, est[0].peak_value);
  EXPECT_EQ(orc[0].amplitudes, est[0].amplitudes);
  EXPECT_EQ(orc[0].removal, Removal::Oracle);
  EXPECT_EQ(est[0].removal, Removal::Estimated);
}

TEST(Oracle, SingleTargetEquivalence) {
  Scenario s = on_grid_scene(kCoarse);
  s.surfaces.clear();
  s.scatterers.clear();
  const std::vector<double> phases{0.9};
  const auto y = synthesize_snapshot(s, phases, NoiseSpec::off());
  const Imager im(kCoarse, s.aps, kFc);
  const auto est = run_slam(y, im, StopRule::targets(1));
  const auto orc = run_slam_oracle_removal(y, im, StopRule::targets(1), {s, phases, 0.5});
  EXPECT_EQ(est[0].position, orc[0].position);
  EXPECT_NEAR(std::sqrt(est[0].residual_energy / energy(y.samples)), 0.0, 1e-10);
  EXPECT_NEAR(std::sqrt(orc[0].residual_energy / energy(y.samples)), 0.0, 1e-10);
}

TEST(Oracle, OffGridLosRemovedExactly) {
  const Scenario s = reference_indoor_scenario();
  Scenario off = s;
  off.ue = {-2.967, 5.031, -1.4};
  const std::vector<double> phases{0.2, 1.3, 2.4};
  const auto noise = NoiseSpec::seeded(11);
  const auto y = synthesize_snapshot(off, phases, noise);
  const auto paths = enumerate_paths(off, phases);
  const std::vector<PathDescriptor> nlos{paths[1], paths[2]};
  const auto expect = synthesize_paths(nlos, off.aps.size(), off.rf, noise);
  const auto local = GridSpec::planar(-4, -2, 4, 6, -1.4, 0.01);
  const auto dets = run_slam_oracle_removal(y, local, StopRule::targets(1), {off, phases, 0.5});
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].removal, Removal::Oracle);
  EXPECT_NEAR(dets[0].residual_energy / energy(expect.samples), 1.0, 1e-9);
}

TEST(Oracle, FallsBackOutsideMatchRadius) {
  const Scenario s = on_grid_scene(kCoarse);
  const std::vector<double> phases{0.2, 1.3, 2.4};
  const auto y = synthesize_snapshot(s, phases, NoiseSpec::seeded(6));
  Scenario far = s;
  far.ue = {4.9, -9.9, -1.4};
  far.scatterers[0].position = {4.9, -9.0, -1.4};
  const Imager im(kCoarse, s.aps, kFc);
  const auto est = run_slam(y, im, StopRule::targets(1));
  const auto orc = run_slam_oracle_removal(y, im, StopRule::targets(1), {far, phases, 0.5});
  EXPECT_EQ(orc[0].removal, Removal::Estimated);
  EXPECT_EQ(orc[0].residual_energy, est[0].residual_energy);
  EXPECT_THROW(run_slam_oracle_removal(y, im, StopRule::targets(1), {far, phases, 0.0}),
               InvalidArgument);
}

}  // namespace
}  // namespace pcslam
