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

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcslam/errors.hpp"
#include "pcslam/rng.hpp"
#include "pcslam/scene.hpp"

namespace pcslam {

using cdouble = std::complex<double>;

inline constexpr double kSpeedOfLight = 299'792'458.0;

inline double wavelength(const RfParams &rf) { return kSpeedOfLight / rf.carrier_hz; }

// Energy of one pilot symbol of duration 1 / symbol_bandwidth.
inline double symbol_energy(const RfParams &rf) {
  return rf.tx_power_w / rf.symbol_bandwidth_hz;
}

// Total complex variance of the per-AP noise, noise figure included.
inline double noise_variance(const RfParams &rf) {
  return rf.noise_psd_w_per_hz * std::pow(10.0, rf.noise_figure_db / 10.0);
}

// exp(-j 2 pi f_c d / c) for a path of length d. The cycle count is reduced
// to [0, 1) before the trig call so multi-meter paths keep full precision.
// Both the forward model and the steering vectors go through this function.
inline cdouble propagation_phasor(double path_length_m, double carrier_hz) {
  double cycles = path_length_m * (carrier_hz / kSpeedOfLight);
  cycles -= std::floor(cycles);
  const double phase = -2.0 * std::numbers::pi * cycles;
  return {std::cos(phase), std::sin(phase)};
}

enum class PathKind { LoS, Reflection, Scatter };

inline const char *to_string(PathKind k) {
  switch (k) {
    case PathKind::LoS: return "los";
    case PathKind::Reflection: return "reflection";
    case PathKind::Scatter: return "scatter";
  }
  return "?";
}

struct PathDescriptor {
  PathKind kind = PathKind::LoS;
  // Surface or scatterer index for NLoS kinds; 0 for LoS.
  std::size_t source_index = 0;
  // Point the APs observe the path as coming from: UE, VUE or scatterer.
  Vec3 apparent_source;
  std::vector<double> path_lengths;  // meters
  std::vector<double> delays;        // seconds
  std::vector<double> amplitudes;    // dimensionless
  double common_phase = 0.0;         // radians, [0, 2 pi)
};

namespace detail {

inline void require_distance(double d, const char *what) {
  if (!(d >= kCoincidenceTolerance))
    throw DegenerateGeometry(std::string("distance below tolerance: ") + what);
}

inline double wrap_phase(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

}  // namespace detail

// Geometry-only descriptor of one path (common phase left at zero).
// `source_index` selects the surface or scatterer for NLoS kinds.
inline PathDescriptor path_geometry(const Scenario &s, PathKind kind,
                                    std::size_t source_index = 0) {
  const double lambda = wavelength(s.rf);
  const std::size_t n_aps = s.aps.size();
  PathDescriptor p;
  p.kind = kind;
  p.source_index = kind == PathKind::LoS ? 0 : source_index;
  p.path_lengths.resize(n_aps);
  p.amplitudes.resize(n_aps);

  switch (kind) {
    case PathKind::LoS: {
      p.apparent_source = s.ue;
      for (std::size_t n = 0; n < n_aps; ++n) {
        const double d = distance(s.ue, s.aps[n].position);
        detail::require_distance(d, "UE-AP");
        p.path_lengths[n] = d;
        p.amplitudes[n] = lambda / (4.0 * std::numbers::pi * d);
      }
      break;
    }
    case PathKind::Reflection: {
      if (source_index >= s.surfaces.size())
        throw InvalidArgument("surface index out of range");
      const auto &surf = s.surfaces[source_index];
      const Vec3 vue = mirror_point(s.ue, surf);
      p.apparent_source = vue;
      for (std::size_t n = 0; n < n_aps; ++n) {
        const double d = distance(s.aps[n].position, vue);
        detail::require_distance(d, "VUE-AP");
        p.path_lengths[n] = d;
        p.amplitudes[n] = lambda * surf.attenuation() / (4.0 * std::numbers::pi * d);
      }
      break;
    }
    case PathKind::Scatter: {
      if (source_index >= s.scatterers.size())
        throw InvalidArgument("scatterer index out of range");
      const auto &sp = s.scatterers[source_index];
      p.apparent_source = sp.position;
      const double d_ue = distance(s.ue, sp.position);
      detail::require_distance(d_ue, "UE-SP");
      const double four_pi_15 = std::pow(4.0 * std::numbers::pi, 1.5);
      for (std::size_t n = 0; n < n_aps; ++n) {
        const double d_ap = distance(s.aps[n].position, sp.position);
        detail::require_distance(d_ap, "SP-AP");
        p.path_lengths[n] = d_ap + d_ue;
        p.amplitudes[n] = lambda * sp.rcs_m2 / (four_pi_15 * d_ap * d_ue);
      }
      break;
    }
  }

  p.delays.resize(n_aps);
  for (std::size_t n = 0; n < n_aps; ++n) p.delays[n] = p.path_lengths[n] / kSpeedOfLight;
  return p;
}

// LoS first, then one Reflection per surface, then one Scatter per scatterer.
inline std::vector<PathDescriptor> enumerate_paths(const Scenario &s,
                                                   std::span<const double> phases) {
  if (phases.size() != s.path_count())
    throw LengthMismatch("expected " + std::to_string(s.path_count()) +
                         " path phases, got " + std::to_string(phases.size()));
  std::vector<PathDescriptor> paths;
  paths.reserve(s.path_count());
  paths.push_back(path_geometry(s, PathKind::LoS));
  for (std::size_t i = 0; i < s.surfaces.size(); ++i)
    paths.push_back(path_geometry(s, PathKind::Reflection, i));
  for (std::size_t i = 0; i < s.scatterers.size(); ++i)
    paths.push_back(path_geometry(s, PathKind::Scatter, i));
  for (std::size_t m = 0; m < paths.size(); ++m)
    paths[m].common_phase = detail::wrap_phase(phases[m]);
  return paths;
}

// i.i.d. Uniform[0, 2 pi) common phases, one substream per path.
inline std::vector<double> draw_path_phases(std::uint64_t seed, std::uint64_t trial,
                                            std::size_t count) {
  std::vector<double> phases(count);
  for (std::size_t m = 0; m < count; ++m) {
    Substream rng(seed, StreamDomain::PathPhase, trial, m);
    phases[m] = 2.0 * std::numbers::pi * rng.uniform();
  }
  return phases;
}

// Circularly-symmetric complex Gaussian samples of total variance `variance`,
// one substream per AP index.
inline std::vector<cdouble> draw_noise(std::uint64_t seed, std::uint64_t trial,
                                       std::size_t count, double variance) {
  std::vector<cdouble> w(count);
  const double sigma = std::sqrt(0.5 * variance);
  for (std::size_t n = 0; n < count; ++n) {
    Substream rng(seed, StreamDomain::Noise, trial, n);
    const auto [a, b] = rng.normal_pair();
    w[n] = {sigma * a, sigma * b};
  }
  return w;
}

struct NoiseSpec {
  bool enabled = false;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;

  static NoiseSpec off() { return {}; }
  static NoiseSpec seeded(std::uint64_t seed, std::uint64_t trial = 0) {
    return {true, seed, trial};
  }
};

struct SnapshotMeta {
  std::uint64_t scenario_hash = 0;
  std::optional<std::uint64_t> seed;
  bool noise = false;
};

struct Snapshot {
  std::vector<cdouble> samples;
  SnapshotMeta meta;

  std::size_t size() const { return samples.size(); }
};

inline double energy(std::span<const cdouble> y) {
  double e = 0.0;
  for (const auto &v : y) e += std::norm(v);
  return e;
}

// Noiseless per-AP contribution of one path:
// sqrt(E) rho e^{j theta} e^{-j 2 pi f_c tau} zeta.
inline std::vector<cdouble> path_contribution(const PathDescriptor &p, const RfParams &rf) {
  const double sqrt_e = std::sqrt(symbol_energy(rf));
  const cdouble common = std::polar(1.0, p.common_phase) * rf.pilot;
  std::vector<cdouble> out(p.amplitudes.size());
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = sqrt_e * p.amplitudes[n] * common *
             propagation_phasor(p.path_lengths[n], rf.carrier_hz);
  return out;
}

// Sum of the given paths plus (optionally) noise, for `n_aps` receivers.
inline Snapshot synthesize_paths(std::span<const PathDescriptor> paths, std::size_t n_aps,
                                 const RfParams &rf, const NoiseSpec &noise) {
  Snapshot snap;
  snap.samples.assign(n_aps, cdouble{});
  for (const auto &p : paths) {
    if (p.amplitudes.size() != n_aps)
      throw LengthMismatch("path descriptor does not match AP count");
    const auto c = path_contribution(p, rf);
    for (std::size_t n = 0; n < n_aps; ++n) snap.samples[n] += c[n];
  }
  if (noise.enabled) {
    const auto w = draw_noise(noise.seed, noise.trial, n_aps, noise_variance(rf));
    for (std::size_t n = 0; n < n_aps; ++n) snap.samples[n] += w[n];
    snap.meta.seed = noise.seed;
  }
  snap.meta.noise = noise.enabled;
  return snap;
}

// FNV-1a over the bit patterns of every scenario field in a fixed order.
inline std::uint64_t scenario_hash(const Scenario &s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_u64 = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  auto mix_d = [&](double v) { mix_u64(std::bit_cast<std::uint64_t>(v)); };
  auto mix_v = [&](const Vec3 &v) {
    mix_d(v.x);
    mix_d(v.y);
    mix_d(v.z);
  };
  mix_u64(s.aps.size());
  for (const auto &ap : s.aps) {
    mix_u64(ap.id);
    mix_v(ap.position);
  }
  mix_v(s.ue);
  mix_u64(s.surfaces.size());
  for (const auto &surf : s.surfaces) {
    mix_v(surf.anchor());
    mix_v(surf.normal());
    mix_d(surf.attenuation());
  }
  mix_u64(s.scatterers.size());
  for (const auto &sp : s.scatterers) {
    mix_v(sp.position);
    mix_d(sp.rcs_m2);
  }
  mix_d(s.rf.carrier_hz);
  mix_d(s.rf.tx_power_w);
  mix_d(s.rf.symbol_bandwidth_hz);
  mix_d(s.rf.noise_psd_w_per_hz);
  mix_d(s.rf.noise_figure_db);
  mix_d(s.rf.pilot.real());
  mix_d(s.rf.pilot.imag());
  return h;
}

inline Snapshot synthesize_snapshot(const Scenario &s, std::span<const double> phases,
                                    const NoiseSpec &noise) {
  const auto paths = enumerate_paths(s, phases);
  Snapshot snap = synthesize_paths(paths, s.aps.size(), s.rf, noise);
  snap.meta.scenario_hash = scenario_hash(s);
  return snap;
}

}  // namespace pcslam
