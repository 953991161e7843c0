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

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcslam/errors.hpp"
#include "pcslam/forward.hpp"
#include "pcslam/imaging.hpp"
#include "pcslam/rng.hpp"
#include "pcslam/scene.hpp"
#include "pcslam/slam.hpp"

namespace pcslam {

enum class ObjectClass { UE = 0, VUE = 1, SP = 2 };
inline constexpr std::array<ObjectClass, 3> kObjectClasses = {ObjectClass::UE, ObjectClass::VUE,
                                                              ObjectClass::SP};

inline const char *to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::UE: return "UE";
    case ObjectClass::VUE: return "VUE";
    case ObjectClass::SP: return "SP";
  }
  return "?";
}

enum class Variant { Estimated, PerfectRemoval };

inline const char *to_string(Variant v) {
  return v == Variant::Estimated ? "estimated" : "pr";
}

// Continuous uniform placement box for the UE and the scatterers, at a fixed
// known height.
struct Placement {
  double x_min = -4.0, x_max = 4.0;
  double y_min = -8.0, y_max = 8.0;
  double z = kReferenceObjectZ;
  double min_ue_sp_separation_m = 1.0;
  // Snap drawn positions to the nearest search-grid cell (on-grid trials).
  bool snap_to_grid = false;
};

struct TrialConfig {
  Scenario base_scenario;
  Placement placement;
  GridSpec grid;
  double success_radius_m = 0.2;
  double oracle_match_radius_m = 0.5;
  Variant variant = Variant::Estimated;
  std::size_t trials = 500;
  std::uint64_t master_seed = 1;
  ImagingOptions imaging;

  void validate() const {
    if (!(success_radius_m > 0.0)) throw InvalidArgument("success radius must be positive");
    if (!(oracle_match_radius_m > 0.0)) throw InvalidArgument("match radius must be positive");
    if (trials == 0) throw InvalidArgument("trials must be at least 1");
    if (!(placement.x_max >= placement.x_min && placement.y_max >= placement.y_min))
      throw InvalidArgument("placement box is inverted");
    grid.validate();
  }
};

inline constexpr double kDefaultSearchXMin = -5.0, kDefaultSearchXMax = 5.0;
inline constexpr double kDefaultSearchYMin = -10.0, kDefaultSearchYMax = 30.0;
// 3.5 GiB: holds the steering matrix of the default 1 cm search grid.
inline constexpr std::size_t kDefaultSweepCacheBytes = std::size_t{7} << 29;

// Search region for the randomized experiments: the AP footprint plus the
// full band of mirror images across the y = 10 m wall (y up to 28 m).
inline GridSpec default_search_grid(double spacing) {
  return GridSpec::planar(kDefaultSearchXMin, kDefaultSearchXMax, kDefaultSearchYMin,
                          kDefaultSearchYMax, kReferenceObjectZ, spacing);
}

inline TrialConfig reference_trial_config(double spacing, Variant variant, std::size_t trials,
                                          std::uint64_t seed) {
  TrialConfig cfg;
  cfg.base_scenario = reference_indoor_scenario();
  cfg.grid = default_search_grid(spacing);
  cfg.variant = variant;
  cfg.trials = trials;
  cfg.master_seed = seed;
  cfg.imaging.cache_budget_bytes = kDefaultSweepCacheBytes;
  return cfg;
}

struct Truth {
  ObjectClass cls = ObjectClass::UE;
  Vec3 position;
};

struct MatchResult {
  std::vector<bool> success;                         // per truth
  std::vector<std::optional<std::size_t>> detection;  // matched detection per truth
  std::vector<double> distance;                      // NaN when unmatched
};

// Greedy one-to-one matching: repeatedly pair the globally closest
// (detection, truth) within `radius`, then drop both.
inline MatchResult match_detections(std::span<const Vec3> detections, std::span<const Truth> truths,
                                    double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("match radius must be positive");
  MatchResult r;
  r.success.assign(truths.size(), false);
  r.detection.assign(truths.size(), std::nullopt);
  r.distance.assign(truths.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<bool> det_used(detections.size(), false);

  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bd = 0, bt = 0;
    for (std::size_t d = 0; d < detections.size(); ++d) {
      if (det_used[d]) continue;
      for (std::size_t t = 0; t < truths.size(); ++t) {
        if (r.success[t]) continue;
        const double dist = distance(detections[d], truths[t].position);
        if (dist <= radius && dist < best) {
          best = dist;
          bd = d;
          bt = t;
        }
      }
    }
    if (!std::isfinite(best)) break;
    det_used[bd] = true;
    r.success[bt] = true;
    r.detection[bt] = bd;
    r.distance[bt] = best;
  }
  return r;
}

inline MatchResult match_detections(std::span<const Detection> detections,
                                    std::span<const Truth> truths, double radius) {
  std::vector<Vec3> pos;
  pos.reserve(detections.size());
  for (const auto &d : detections) pos.push_back(d.position);
  return match_detections(std::span<const Vec3>(pos), truths, radius);
}

struct TrialResult {
  std::size_t trial = 0;
  Scenario scenario;  // with drawn positions
  std::vector<double> phases;
  std::vector<Truth> truths;
  std::vector<Detection> detections;
  MatchResult match;
  std::optional<std::string> error;  // set when the trial failed
};

namespace detail {

inline Vec3 snap(const GridSpec &g, const Vec3 &p) { return g.cell_center(g.nearest_cell(p)); }

// Draws UE and scatterer positions for one trial from its placement substream.
inline Scenario place_objects(const TrialConfig &cfg, std::size_t trial) {
  Scenario s = cfg.base_scenario;
  const Placement &pl = cfg.placement;
  Substream rng(cfg.master_seed, StreamDomain::Placement, trial, 0);
  auto draw = [&] {
    Vec3 p{rng.uniform(pl.x_min, pl.x_max), rng.uniform(pl.y_min, pl.y_max), pl.z};
    return pl.snap_to_grid ? snap(cfg.grid, p) : p;
  };
  s.ue = draw();
  for (auto &sp : s.scatterers) {
    constexpr int kMaxAttempts = 10000;
    int attempt = 0;
    do {
      sp.position = draw();
      if (++attempt > kMaxAttempts)
        throw InvalidArgument("cannot place scatterer with the requested UE separation");
    } while (distance(sp.position, s.ue) < pl.min_ue_sp_separation_m);
  }
  return s;
}

inline std::vector<Truth> truths_of(const Scenario &s) {
  std::vector<Truth> t;
  t.push_back({ObjectClass::UE, s.ue});
  for (const auto &surf : s.surfaces) t.push_back({ObjectClass::VUE, mirror_point(s.ue, surf)});
  for (const auto &sp : s.scatterers) t.push_back({ObjectClass::SP, sp.position});
  return t;
}

}  // namespace detail

// One randomized trial against a prebuilt imager for cfg.grid.
inline TrialResult run_trial(const TrialConfig &cfg, std::size_t trial, const Imager &imager) {
  TrialResult r;
  r.trial = trial;
  try {
    r.scenario = detail::place_objects(cfg, trial);
    r.truths = detail::truths_of(r.scenario);
    if (const auto v = validate_scenario(r.scenario); !v.empty())
      throw ValidationError(v.front().entity + ": " + v.front().rule);
    r.phases = draw_path_phases(cfg.master_seed, trial, r.scenario.path_count());
    const Snapshot y =
        synthesize_snapshot(r.scenario, r.phases, NoiseSpec::seeded(cfg.master_seed, trial));
    const auto stop = StopRule::targets(r.scenario.path_count());
    if (cfg.variant == Variant::Estimated) {
      r.detections = run_slam(y, imager, stop);
    } else {
      const RemovalOracle oracle{r.scenario, r.phases, cfg.oracle_match_radius_m};
      r.detections = run_slam_oracle_removal(y, imager, stop, oracle);
    }
    r.match = match_detections(std::span<const Detection>(r.detections), r.truths,
                               cfg.success_radius_m);
  } catch (const Error &e) {
    r.error = std::string(e.kind()) + ": " + e.what();
    r.match.success.assign(r.truths.size(), false);
    r.match.detection.assign(r.truths.size(), std::nullopt);
    r.match.distance.assign(r.truths.size(), std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

inline TrialResult run_trial(const TrialConfig &cfg, std::size_t trial) {
  cfg.validate();
  const Imager imager(cfg.grid, cfg.base_scenario.aps, cfg.base_scenario.rf.carrier_hz,
                      cfg.imaging);
  return run_trial(cfg, trial, imager);
}

struct ObjectStats {
  std::size_t trials = 0;  // object instances evaluated
  std::size_t successes = 0;

  double probability() const {
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
  }
  // Binomial standard error.
  double std_err() const {
    if (trials == 0) return 0.0;
    const double p = probability();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  }
};

struct SweepPoint {
  double resolution_m = 0.0;
  Variant variant = Variant::Estimated;
  std::array<ObjectStats, 3> objects{};  // indexed by ObjectClass
  std::size_t failed_trials = 0;

  const ObjectStats &operator[](ObjectClass c) const {
    return objects[static_cast<std::size_t>(c)];
  }
};

struct DetectionStats {
  std::vector<SweepPoint> points;

  const SweepPoint *find(double resolution, Variant variant) const {
    for (const auto &p : points)
      if (p.variant == variant && std::abs(p.resolution_m - resolution) < 1e-12) return &p;
    return nullptr;
  }
};

inline void accumulate(SweepPoint &pt, const TrialResult &r) {
  if (r.error) ++pt.failed_trials;
  for (std::size_t t = 0; t < r.truths.size(); ++t) {
    auto &o = pt.objects[static_cast<std::size_t>(r.truths[t].cls)];
    ++o.trials;
    if (r.match.success[t]) ++o.successes;
  }
}

// Called after every trial with the running point statistics.
using TrialObserver = std::function<void(const SweepPoint &, const TrialResult &)>;

// For each resolution, runs cfg.trials trials per variant on the search grid
// of `tmpl` re-spaced to that resolution. One imager (and steering cache) is
// shared by all trials and variants at a resolution.
inline DetectionStats sweep(const TrialConfig &tmpl, std::span<const double> resolutions,
                            std::span<const Variant> variants,
                            const TrialObserver &observer = {}) {
  for (double r : resolutions)
    if (!(r > 0.0)) throw InvalidArgument("resolutions must be positive");
  DetectionStats stats;
  for (double res : resolutions) {
    TrialConfig cfg = tmpl;
    cfg.grid.spacing = res;
    cfg.validate();
    const Imager imager(cfg.grid, cfg.base_scenario.aps, cfg.base_scenario.rf.carrier_hz,
                        cfg.imaging);
    for (Variant v : variants) {
      cfg.variant = v;
      SweepPoint pt;
      pt.resolution_m = res;
      pt.variant = v;
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const TrialResult r = run_trial(cfg, t, imager);
        accumulate(pt, r);
        if (observer) observer(pt, r);
      }
      stats.points.push_back(pt);
    }
  }
  return stats;
}

}  // namespace pcslam
