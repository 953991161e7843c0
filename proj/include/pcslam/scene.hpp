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

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "pcslam/errors.hpp"
#include "pcslam/vec3.hpp"

namespace pcslam {

// Minimum separation between any two interacting points (UE, AP, scatterer).
inline constexpr double kCoincidenceTolerance = 1e-6;

struct AccessPoint {
  std::size_t id = 0;
  Vec3 position;

  friend bool operator==(const AccessPoint &, const AccessPoint &) = default;
};

// Infinite reflecting plane through `anchor` with unit normal. The normal is
// normalized at construction.
class ReflectingSurface {
 public:
  ReflectingSurface(const Vec3 &anchor, const Vec3 &normal, double attenuation)
      : anchor_(anchor), normal_(normal), attenuation_(attenuation) {
    const double len = pcslam::norm(normal);
    if (!(len > 1e-12) || !std::isfinite(len))
      throw InvalidArgument("reflecting surface normal must be non-zero");
    normal_ *= 1.0 / len;
  }

  const Vec3 &anchor() const { return anchor_; }
  const Vec3 &normal() const { return normal_; }
  double attenuation() const { return attenuation_; }

  double signed_distance(const Vec3 &p) const {
    return dot(normal_, p - anchor_);
  }

  friend bool operator==(const ReflectingSurface &,
                         const ReflectingSurface &) = default;

 private:
  Vec3 anchor_;
  Vec3 normal_;
  double attenuation_;
};

struct ScatterPoint {
  Vec3 position;
  double rcs_m2 = 0.0;

  friend bool operator==(const ScatterPoint &, const ScatterPoint &) = default;
};

// Linear units throughout.
struct RfParams {
  double carrier_hz = 3e9;
  double tx_power_w = 0.01;
  double symbol_bandwidth_hz = 30e3;
  double noise_psd_w_per_hz = 0.0;
  double noise_figure_db = 0.0;
  std::complex<double> pilot{1.0, 0.0};

  friend bool operator==(const RfParams &, const RfParams &) = default;
};

struct Scenario {
  std::vector<AccessPoint> aps;
  Vec3 ue;
  std::vector<ReflectingSurface> surfaces;
  std::vector<ScatterPoint> scatterers;
  RfParams rf;

  std::size_t path_count() const {
    return 1 + surfaces.size() + scatterers.size();
  }

  friend bool operator==(const Scenario &, const Scenario &) = default;
};

// Mirror image of x across the plane: (I - 2 v v^T) x + 2 v v^T mu.
inline Vec3 mirror_point(const Vec3 &x, const ReflectingSurface &surface) {
  const Vec3 &n = surface.normal();
  return x - 2.0 * dot(n, x - surface.anchor()) * n;
}

// Point where the line from `ap` to `vue` crosses the surface plane.
inline Vec3 incidence_point(const Vec3 &ap, const Vec3 &vue,
                            const ReflectingSurface &surface) {
  const Vec3 dir = vue - ap;
  const double denom = dot(surface.normal(), dir);
  if (std::abs(denom) < 1e-12 * pcslam::norm(dir) || pcslam::norm(dir) == 0.0)
    throw ParallelLine("AP-to-VUE line is parallel to the reflecting plane");
  const double t = dot(surface.normal(), surface.anchor() - ap) / denom;
  return ap + t * dir;
}

// One broken invariant: which entity and which rule.
struct Violation {
  std::string entity;
  std::string rule;

  friend bool operator==(const Violation &, const Violation &) = default;
};

inline std::vector<Violation> validate_scenario(const Scenario &s) {
  std::vector<Violation> out;
  auto add = [&out](std::string entity, std::string rule) {
    out.push_back({std::move(entity), std::move(rule)});
  };

  if (s.aps.size() < 2) add("aps", "too-few-aps");
  for (std::size_t i = 0; i < s.aps.size(); ++i) {
    const std::string name = "aps[" + std::to_string(i) + "]";
    if (s.aps[i].id != i) add(name, "ap-id-not-contiguous");
    if (!is_finite(s.aps[i].position)) add(name, "non-finite-position");
  }

  if (!is_finite(s.ue)) add("ue", "non-finite-position");
  for (std::size_t i = 0; i < s.aps.size(); ++i)
    if (distance(s.ue, s.aps[i].position) <= kCoincidenceTolerance)
      add("ue", "ue-coincides-with-ap");

  for (std::size_t i = 0; i < s.surfaces.size(); ++i) {
    const auto &surf = s.surfaces[i];
    const std::string name = "surfaces[" + std::to_string(i) + "]";
    if (!is_finite(surf.anchor()) || !is_finite(surf.normal()))
      add(name, "non-finite-position");
    if (std::abs(norm(surf.normal()) - 1.0) > 1e-12)
      add(name, "normal-not-unit");
    if (!(surf.attenuation() >= 0.0 && surf.attenuation() <= 1.0))
      add(name, "attenuation-out-of-range");
  }

  for (std::size_t i = 0; i < s.scatterers.size(); ++i) {
    const auto &sp = s.scatterers[i];
    const std::string name = "scatterers[" + std::to_string(i) + "]";
    if (!is_finite(sp.position)) add(name, "non-finite-position");
    if (!(sp.rcs_m2 >= 0.0)) add(name, "rcs-negative");
    if (distance(sp.position, s.ue) <= kCoincidenceTolerance)
      add(name, "scatterer-coincides-with-ue");
    for (const auto &ap : s.aps)
      if (distance(sp.position, ap.position) <= kCoincidenceTolerance) {
        add(name, "scatterer-coincides-with-ap");
        break;
      }
  }

  const RfParams &rf = s.rf;
  if (!(rf.carrier_hz > 0.0) || !std::isfinite(rf.carrier_hz))
    add("rf.carrier_hz", "not-positive");
  if (!(rf.tx_power_w > 0.0) || !std::isfinite(rf.tx_power_w))
    add("rf.tx_power_w", "not-positive");
  if (!(rf.symbol_bandwidth_hz > 0.0) || !std::isfinite(rf.symbol_bandwidth_hz))
    add("rf.symbol_bandwidth_hz", "not-positive");
  if (!(rf.noise_psd_w_per_hz >= 0.0) || !std::isfinite(rf.noise_psd_w_per_hz))
    add("rf.noise_psd_w_per_hz", "negative");
  if (!std::isfinite(rf.noise_figure_db)) add("rf.noise_figure_db", "non-finite");
  if (std::abs(std::abs(rf.pilot) - 1.0) > 1e-12) add("rf.pilot", "pilot-not-unit");

  return out;
}

// nx * ny APs on a regular lattice centered on (0, 0) in the plane z=plane_z,
// x running fastest.
inline std::vector<AccessPoint> ceiling_lattice(std::size_t nx, std::size_t ny,
                                                double spacing, double plane_z) {
  std::vector<AccessPoint> aps;
  aps.reserve(nx * ny);
  const double x0 = -0.5 * static_cast<double>(nx - 1) * spacing;
  const double y0 = -0.5 * static_cast<double>(ny - 1) * spacing;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      aps.push_back({aps.size(),
                     {x0 + static_cast<double>(i) * spacing,
                      y0 + static_cast<double>(j) * spacing, plane_z}});
  return aps;
}

inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }

// Object height used by the indoor reference layout: 1.5 m above the floor of
// a 2.9 m room, measured from the ceiling.
inline constexpr double kReferenceObjectZ = -1.4;

// Indoor reference deployment: 50 ceiling APs (5 x 10, 2 m pitch), a wall at
// y = 10 m with attenuation 0.5, one 10 m^2 scatterer, 3 GHz, 10 dBm, 30 kHz,
// -174 dBm/Hz, 8 dB noise figure. UE and scatterer at the on-grid positions
// (-3, 5) and (2, -7).
inline Scenario reference_indoor_scenario() {
  Scenario s;
  s.aps = ceiling_lattice(5, 10, 2.0, 0.0);
  s.ue = {-3.0, 5.0, kReferenceObjectZ};
  s.surfaces.emplace_back(Vec3{0.0, 10.0, 0.0}, Vec3{0.0, 1.0, 0.0}, 0.5);
  s.scatterers.push_back({{2.0, -7.0, kReferenceObjectZ}, 10.0});
  s.rf.carrier_hz = 3e9;
  s.rf.tx_power_w = dbm_to_watts(10.0);
  s.rf.symbol_bandwidth_hz = 30e3;
  s.rf.noise_psd_w_per_hz = dbm_to_watts(-174.0);
  s.rf.noise_figure_db = 8.0;
  return s;
}

}  // namespace pcslam
