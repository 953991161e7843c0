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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pcslam/errors.hpp"
#include "pcslam/forward.hpp"
#include "pcslam/parallel.hpp"
#include "pcslam/scene.hpp"

namespace pcslam {

// Regular search grid of point hypotheses. Cell (i, j, k) sits at
// (x_min + i*spacing, y_min + j*spacing, z_min + k*spacing); linear index
// i + nx*(j + ny*k), x fastest. A planar grid has z_min == z_max.
struct GridSpec {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double z_min = 0.0, z_max = 0.0;
  double spacing = 1.0;

  static GridSpec planar(double x_min, double x_max, double y_min, double y_max,
                         double z, double spacing) {
    return {x_min, x_max, y_min, y_max, z, z, spacing};
  }

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(finite(x_min) && finite(x_max) && finite(y_min) && finite(y_max) &&
          finite(z_min) && finite(z_max) && finite(spacing)))
      throw GridError("grid bounds must be finite");
    if (!(spacing > 0.0)) throw GridError("grid spacing must be positive");
    if (x_max < x_min) throw GridError("grid x range is inverted");
    if (y_max < y_min) throw GridError("grid y range is inverted");
    if (z_max < z_min) throw GridError("grid z range is inverted");
  }

  // floor((max - min) / spacing) + 1, with a relative guard so that 26 / 0.01
  // counts as 2600 and not 2599.
  static std::size_t axis_count(double lo, double hi, double spacing) {
    const double steps = (hi - lo) / spacing;
    return static_cast<std::size_t>(std::floor(steps * (1.0 + 1e-12) + 1e-9)) + 1;
  }

  std::size_t nx() const { return axis_count(x_min, x_max, spacing); }
  std::size_t ny() const { return axis_count(y_min, y_max, spacing); }
  std::size_t nz() const { return axis_count(z_min, z_max, spacing); }
  std::size_t cell_count() const { return nx() * ny() * nz(); }
  bool is_planar() const { return nz() == 1; }

  Vec3 cell_center(std::size_t i, std::size_t j, std::size_t k = 0) const {
    return {x_min + static_cast<double>(i) * spacing,
            y_min + static_cast<double>(j) * spacing,
            z_min + static_cast<double>(k) * spacing};
  }

  Vec3 cell_center(std::size_t linear) const {
    const std::size_t w = nx(), h = ny();
    return cell_center(linear % w, (linear / w) % h, linear / (w * h));
  }

  // Nearest cell to p, clamped to the grid.
  std::size_t nearest_cell(const Vec3 &p) const {
    auto idx = [&](double v, double lo, std::size_t n) {
      const double r = std::round((v - lo) / spacing);
      return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(n - 1)));
    };
    const std::size_t w = nx(), h = ny();
    return idx(p.x, x_min, w) + w * (idx(p.y, y_min, h) + h * idx(p.z, z_min, nz()));
  }
};

struct SpatialImage {
  GridSpec grid;
  std::vector<double> values;
};

struct SteeringVector {
  std::vector<cdouble> entries;

  std::size_t size() const { return entries.size(); }
};

inline SteeringVector steering_vector(std::span<const AccessPoint> aps, const Vec3 &x,
                                      double carrier_hz) {
  SteeringVector a;
  a.entries.reserve(aps.size());
  for (const auto &ap : aps)
    a.entries.push_back(propagation_phasor(distance(x, ap.position), carrier_hz));
  return a;
}

// |a^H y|^2, accumulated over APs in index order with the same arithmetic the
// grid kernel uses, so a single-cell evaluation matches compute_image bitwise.
inline double image_value(std::span<const cdouble> y, const SteeringVector &a) {
  if (y.size() != a.size())
    throw LengthMismatch("snapshot has " + std::to_string(y.size()) +
                         " samples, steering vector " + std::to_string(a.size()));
  double re = 0.0, im = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) {
    const double ar = a.entries[n].real(), ai = a.entries[n].imag();
    const double yr = y[n].real(), yi = y[n].imag();
    re += ar * yr + ai * yi;
    im += ar * yi - ai * yr;
  }
  return re * re + im * im;
}

inline double image_value(const Snapshot &y, const SteeringVector &a) {
  return image_value(std::span<const cdouble>(y.samples), a);
}

struct ImagingOptions {
  std::size_t threads = 0;  // 0: hardware concurrency
  std::size_t max_cells = 100'000'000;
  // Precompute the grid steering matrix when it fits in this many bytes.
  // 0 disables the cache; entries are then recomputed per image.
  std::size_t cache_budget_bytes = 0;
};

// Correlation imager bound to one (grid, AP layout, carrier) triple. Reusing
// one instance across snapshots amortizes the steering computation when the
// cache is enabled. Results are identical with and without the cache and for
// any thread count.
class Imager {
 public:
  static constexpr std::size_t kTile = 256;

  Imager(const GridSpec &grid, std::span<const AccessPoint> aps, double carrier_hz,
         ImagingOptions opts = {})
      : grid_(grid),
        aps_(aps.begin(), aps.end()),
        carrier_hz_(carrier_hz),
        opts_(opts) {
    grid_.validate();
    if (aps_.empty()) throw InvalidArgument("imaging needs at least one AP");
    nx_ = grid_.nx();
    ny_ = grid_.ny();
    nz_ = grid_.nz();
    cells_ = nx_ * ny_ * nz_;
    if (cells_ == 0) throw EmptyGrid("grid has no cells");
    if (cells_ > opts_.max_cells)
      throw GridTooLarge("grid has " + std::to_string(cells_) + " cells, cap is " +
                         std::to_string(opts_.max_cells));
    tiles_ = (cells_ + kTile - 1) / kTile;
    const std::size_t bytes = tiles_ * tile_stride() * sizeof(double);
    if (opts_.cache_budget_bytes != 0 && bytes <= opts_.cache_budget_bytes) build_cache();
  }

  const GridSpec &grid() const { return grid_; }
  std::span<const AccessPoint> aps() const { return aps_; }
  double carrier_hz() const { return carrier_hz_; }
  std::size_t cell_count() const { return cells_; }
  bool cached() const { return !cache_.empty(); }
  Vec3 cell_center(std::size_t linear) const { return center(linear); }

  void image_into(std::span<const cdouble> y, std::span<double> out) const {
    if (y.size() != aps_.size())
      throw LengthMismatch("snapshot has " + std::to_string(y.size()) + " samples, grid has " +
                           std::to_string(aps_.size()) + " APs");
    if (out.size() != cells_) throw LengthMismatch("output buffer does not match grid");

    parallel_for_chunks(tiles_, kTilesPerTask, opts_.threads,
                        [&](std::size_t t_begin, std::size_t t_end) {
                          std::vector<double> scratch;
                          if (!cached()) scratch.resize(tile_stride());
                          for (std::size_t t = t_begin; t < t_end; ++t) {
                            const double *tile;
                            if (cached()) {
                              tile = cache_.data() + t * tile_stride();
                            } else {
                              fill_tile(t, scratch.data());
                              tile = scratch.data();
                            }
                            accumulate_tile(t, tile, y, out);
                          }
                        });
  }

  SpatialImage image(std::span<const cdouble> y) const {
    SpatialImage img{grid_, std::vector<double>(cells_)};
    image_into(y, img.values);
    return img;
  }

  SpatialImage image(const Snapshot &y) const { return image(std::span<const cdouble>(y.samples)); }

 private:
  static constexpr std::size_t kTilesPerTask = 16;

  // Per tile: N rows of real parts, then N rows of imaginary parts, each row
  // kTile cells wide.
  std::size_t tile_stride() const { return 2 * aps_.size() * kTile; }

  Vec3 center(std::size_t linear) const {
    return grid_.cell_center(linear % nx_, (linear / nx_) % ny_, linear / (nx_ * ny_));
  }

  std::size_t tile_len(std::size_t t) const {
    return std::min(kTile, cells_ - t * kTile);
  }

  void fill_tile(std::size_t t, double *tile) const {
    const std::size_t n_aps = aps_.size();
    const std::size_t len = tile_len(t);
    for (std::size_t c = 0; c < len; ++c) {
      const Vec3 p = center(t * kTile + c);
      for (std::size_t n = 0; n < n_aps; ++n) {
        const cdouble a = propagation_phasor(distance(p, aps_[n].position), carrier_hz_);
        tile[n * kTile + c] = a.real();
        tile[(n_aps + n) * kTile + c] = a.imag();
      }
    }
    for (std::size_t c = len; c < kTile; ++c)
      for (std::size_t n = 0; n < 2 * n_aps; ++n) tile[n * kTile + c] = 0.0;
  }

  void accumulate_tile(std::size_t t, const double *tile, std::span<const cdouble> y,
                       std::span<double> out) const {
    const std::size_t n_aps = aps_.size();
    alignas(64) double acc_re[kTile] = {};
    alignas(64) double acc_im[kTile] = {};
    for (std::size_t n = 0; n < n_aps; ++n) {
      const double yr = y[n].real(), yi = y[n].imag();
      const double *ar = tile + n * kTile;
      const double *ai = tile + (n_aps + n) * kTile;
      for (std::size_t c = 0; c < kTile; ++c) {
        acc_re[c] += ar[c] * yr + ai[c] * yi;
        acc_im[c] += ar[c] * yi - ai[c] * yr;
      }
    }
    const std::size_t len = tile_len(t);
    double *dst = out.data() + t * kTile;
    for (std::size_t c = 0; c < len; ++c) dst[c] = acc_re[c] * acc_re[c] + acc_im[c] * acc_im[c];
  }

  void build_cache() {
    cache_.resize(tiles_ * tile_stride());
    parallel_for_chunks(tiles_, kTilesPerTask, opts_.threads,
                        [&](std::size_t b, std::size_t e) {
                          for (std::size_t t = b; t < e; ++t)
                            fill_tile(t, cache_.data() + t * tile_stride());
                        });
  }

  GridSpec grid_;
  std::vector<AccessPoint> aps_;
  double carrier_hz_;
  ImagingOptions opts_;
  std::size_t nx_ = 0, ny_ = 0, nz_ = 0, cells_ = 0, tiles_ = 0;
  std::vector<double> cache_;
};

inline SpatialImage compute_image(std::span<const cdouble> y, const GridSpec &grid,
                                  std::span<const AccessPoint> aps, double carrier_hz,
                                  ImagingOptions opts = {}) {
  opts.cache_budget_bytes = 0;
  return Imager(grid, aps, carrier_hz, opts).image(y);
}

inline SpatialImage compute_image(const Snapshot &y, const GridSpec &grid,
                                  std::span<const AccessPoint> aps, double carrier_hz,
                                  ImagingOptions opts = {}) {
  return compute_image(std::span<const cdouble>(y.samples), grid, aps, carrier_hz, opts);
}

// Normalized spatial ambiguity |a^H(xt) a(x)| / (|a(xt)| |a(x)|), in [0, 1].
inline double ambiguity(const Vec3 &hypothesis, const Vec3 &target,
                        std::span<const AccessPoint> aps, double carrier_hz) {
  if (aps.empty()) throw InvalidArgument("ambiguity needs at least one AP");
  const auto a = steering_vector(aps, hypothesis, carrier_hz);
  const auto b = steering_vector(aps, target, carrier_hz);
  cdouble inner{};
  double na = 0.0, nb = 0.0;
  for (std::size_t n = 0; n < aps.size(); ++n) {
    inner += std::conj(a.entries[n]) * b.entries[n];
    na += std::norm(a.entries[n]);
    nb += std::norm(b.entries[n]);
  }
  return std::min(1.0, std::abs(inner) / std::sqrt(na * nb));
}

// Ambiguity of every grid cell against a fixed reference point, via the
// imaging kernel: A = sqrt(I(a(ref))) / N for unit-modulus steering entries.
inline SpatialImage ambiguity_map(const Vec3 &reference, const GridSpec &grid,
                                  std::span<const AccessPoint> aps, double carrier_hz,
                                  ImagingOptions opts = {}) {
  const auto a = steering_vector(aps, reference, carrier_hz);
  SpatialImage img = compute_image(std::span<const cdouble>(a.entries), grid, aps, carrier_hz, opts);
  const double n = static_cast<double>(aps.size());
  for (double &v : img.values) v = std::min(1.0, std::sqrt(v) / n);
  return img;
}

struct Peak {
  std::size_t index = 0;
  Vec3 position;
  double value = 0.0;
};

// Global maximum; ties go to the lowest linear index.
inline Peak argmax_cell(const SpatialImage &img) {
  if (img.values.empty()) throw EmptyImage("image has no cells");
  std::size_t best = 0;
  for (std::size_t i = 1; i < img.values.size(); ++i)
    if (img.values[i] > img.values[best]) best = i;
  return {best, img.grid.cell_center(best), img.values[best]};
}

}  // namespace pcslam
