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
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcslam/errors.hpp"
#include "pcslam/forward.hpp"
#include "pcslam/imaging.hpp"
#include "pcslam/scene.hpp"

namespace pcslam {

// Below this |sum rho~^2| the common phase is undefined.
inline constexpr double kDegenerateEstimateFloor = 1e-30;

// How a detection's contribution was taken out of the residual.
enum class Removal { Estimated, Oracle };

struct Detection {
  Vec3 position;
  std::vector<double> amplitudes;  // real, may be negative
  double phase = 0.0;              // [0, pi)
  double peak_value = 0.0;
  std::size_t iteration = 0;       // 1-based
  std::size_t cell_index = 0;
  double residual_energy = 0.0;    // after this iteration's removal
  Removal removal = Removal::Estimated;
};

// MaxTargets, ResidualEnergy, or both (whichever fires first).
struct StopRule {
  std::optional<std::size_t> max_targets;
  std::optional<double> residual_fraction;

  static StopRule targets(std::size_t k) { return {k, std::nullopt}; }
  static StopRule residual(double eps) { return {std::nullopt, eps}; }

  void validate() const {
    if (!max_targets && !residual_fraction)
      throw InvalidArgument("stop rule needs max_targets or residual_fraction");
    if (max_targets && *max_targets == 0)
      throw InvalidArgument("max_targets must be positive");
    if (residual_fraction && !(*residual_fraction > 0.0 && *residual_fraction <= 1.0))
      throw InvalidArgument("residual_fraction must lie in (0, 1]");
  }
};

struct ComponentEstimate {
  std::vector<double> amplitudes;
  double phase = 0.0;
};

// Joint ML estimate of a real per-AP amplitude vector and a common phase for
// a source at `a`: rho~ = r .* conj(a), theta = arg(sum rho~^2) / 2 folded
// into [0, pi), rho = Re{rho~ e^{-j theta}}. Empty when the phase is undefined.
inline std::optional<ComponentEstimate> try_estimate_component(std::span<const cdouble> residual,
                                                               const SteeringVector &a) {
  if (residual.size() != a.size()) throw LengthMismatch("residual and steering vector differ");
  std::vector<cdouble> tilde(residual.size());
  cdouble sum_sq{};
  for (std::size_t n = 0; n < residual.size(); ++n) {
    const double yr = residual[n].real(), yi = residual[n].imag();
    const double ar = a.entries[n].real(), ai = a.entries[n].imag();
    tilde[n] = {yr * ar + yi * ai, yi * ar - yr * ai};
    const double tr = tilde[n].real(), ti = tilde[n].imag();
    sum_sq += cdouble{tr * tr - ti * ti, 2.0 * tr * ti};
  }
  if (!(std::abs(sum_sq) >= kDegenerateEstimateFloor)) return std::nullopt;

  double theta = 0.5 * std::arg(sum_sq);
  if (theta < 0.0) theta += std::numbers::pi;
  if (theta >= std::numbers::pi) theta -= std::numbers::pi;

  ComponentEstimate est;
  est.phase = theta;
  est.amplitudes.resize(residual.size());
  const double c = std::cos(theta), s = std::sin(theta);
  for (std::size_t n = 0; n < residual.size(); ++n)
    est.amplitudes[n] = tilde[n].real() * c + tilde[n].imag() * s;
  return est;
}

inline ComponentEstimate estimate_component(std::span<const cdouble> residual, const Vec3 &at,
                                            std::span<const AccessPoint> aps, double carrier_hz) {
  auto est = try_estimate_component(residual, steering_vector(aps, at, carrier_hz));
  if (!est) throw DegenerateEstimate("common phase undefined: sum of squared projections is ~0");
  return *est;
}

// rho e^{j theta} .* a
inline std::vector<cdouble> reconstruct_component(std::span<const double> amplitudes, double phase,
                                                  const SteeringVector &a) {
  if (amplitudes.size() != a.size()) throw LengthMismatch("amplitudes and steering vector differ");
  const cdouble rot = std::polar(1.0, phase);
  std::vector<cdouble> out(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = amplitudes[n] * rot * a.entries[n];
  return out;
}

namespace detail {

inline void subtract_in_place(std::vector<cdouble> &y, std::span<const cdouble> c) {
  for (std::size_t n = 0; n < y.size(); ++n) y[n] -= c[n];
}

}  // namespace detail

// y - rho e^{j theta} .* a(x_hat)
inline Snapshot cancel(const Snapshot &residual, const Detection &det,
                       std::span<const AccessPoint> aps, double carrier_hz) {
  if (residual.size() != aps.size() || det.amplitudes.size() != aps.size())
    throw LengthMismatch("detection, residual and AP count differ");
  Snapshot out = residual;
  const auto a = steering_vector(aps, det.position, carrier_hz);
  detail::subtract_in_place(out.samples, reconstruct_component(det.amplitudes, det.phase, a));
  return out;
}

// Ground truth for the perfect-removal variant.
struct RemovalOracle {
  Scenario scenario;
  std::vector<double> phases;
  double match_radius_m = 0.5;
};

namespace detail {

struct TruthComponent {
  Vec3 position;
  std::vector<cdouble> contribution;
  bool removed = false;
};

inline std::vector<TruthComponent> truth_components(const RemovalOracle &oracle) {
  std::vector<TruthComponent> out;
  for (const auto &p : enumerate_paths(oracle.scenario, oracle.phases))
    out.push_back({p.apparent_source, path_contribution(p, oracle.scenario.rf)});
  return out;
}

inline std::vector<Detection> run_slam_loop(const Snapshot &y, const Imager &imager,
                                            const StopRule &stop, const RemovalOracle *oracle) {
  stop.validate();
  const auto aps = imager.aps();
  if (y.size() != aps.size()) throw LengthMismatch("snapshot does not match AP count");

  std::vector<TruthComponent> truths;
  if (oracle) truths = truth_components(*oracle);

  const double e0 = energy(y.samples);
  std::vector<cdouble> residual = y.samples;
  double e_res = e0;
  SpatialImage img{imager.grid(), std::vector<double>(imager.cell_count())};
  std::vector<Detection> dets;

  for (std::size_t t = 1;; ++t) {
    if (stop.max_targets && dets.size() >= *stop.max_targets) break;
    if (stop.residual_fraction && e_res <= *stop.residual_fraction * e0) break;

    imager.image_into(residual, img.values);
    const Peak peak = argmax_cell(img);
    const auto a = steering_vector(aps, peak.position, imager.carrier_hz());
    const auto est = try_estimate_component(residual, a);

    Detection det;
    det.position = peak.position;
    det.peak_value = peak.value;
    det.iteration = t;
    det.cell_index = peak.index;
    if (est) {
      det.amplitudes = est->amplitudes;
      det.phase = est->phase;
    } else {
      det.amplitudes.assign(aps.size(), 0.0);
    }

    TruthComponent *match = nullptr;
    if (oracle) {
      double best = oracle->match_radius_m;
      for (auto &tc : truths) {
        if (tc.removed) continue;
        const double d = distance(tc.position, peak.position);
        if (d <= best) {
          best = d;
          match = &tc;
        }
      }
    }

    if (match) {
      subtract_in_place(residual, match->contribution);
      match->removed = true;
      det.removal = Removal::Oracle;
    } else if (est) {
      subtract_in_place(residual, reconstruct_component(det.amplitudes, det.phase, a));
    }
    e_res = energy(residual);
    det.residual_energy = e_res;
    const bool removed_nothing = !match && !est;
    dets.push_back(std::move(det));
    // Nothing left to estimate; further iterations would repeat this one.
    if (removed_nothing) break;
  }
  return dets;
}

}  // namespace detail

// Iterative detect / estimate / cancel loop. Each iteration images the
// current residual, takes the global maximum cell, removes the ML estimate of
// that source's contribution and records a Detection.
inline std::vector<Detection> run_slam(const Snapshot &y, const Imager &imager,
                                       const StopRule &stop) {
  return detail::run_slam_loop(y, imager, stop, nullptr);
}

inline std::vector<Detection> run_slam(const Snapshot &y, const GridSpec &grid,
                                       std::span<const AccessPoint> aps, double carrier_hz,
                                       const StopRule &stop, ImagingOptions opts = {}) {
  return run_slam(y, Imager(grid, aps, carrier_hz, opts), stop);
}

// Same loop, but a detection within the match radius of a not-yet-removed
// true source (UE, VUE or scatterer) removes that source's exact noiseless
// contribution instead of the estimate. Simulation only.
inline std::vector<Detection> run_slam_oracle_removal(const Snapshot &y, const Imager &imager,
                                                      const StopRule &stop,
                                                      const RemovalOracle &oracle) {
  if (!(oracle.match_radius_m > 0.0)) throw InvalidArgument("match radius must be positive");
  return detail::run_slam_loop(y, imager, stop, &oracle);
}

inline std::vector<Detection> run_slam_oracle_removal(const Snapshot &y, const GridSpec &grid,
                                                      const StopRule &stop,
                                                      const RemovalOracle &oracle,
                                                      ImagingOptions opts = {}) {
  return run_slam_oracle_removal(
      y, Imager(grid, oracle.scenario.aps, oracle.scenario.rf.carrier_hz, opts), stop, oracle);
}

}  // namespace pcslam
