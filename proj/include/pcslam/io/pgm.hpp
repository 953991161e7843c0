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
#include <cstdint>
#include <ostream>

#include "pcslam/errors.hpp"
#include "pcslam/imaging.hpp"

namespace pcslam::io {

// Binary 16-bit PGM (P5, maxval 65535, big-endian samples) of a planar image,
// min-max normalized. Width runs along x; the first row is y_max so the map
// reads with +y up. A constant image maps to all zeros.
inline void write_pgm16(std::ostream &os, const SpatialImage &img) {
  if (!img.grid.is_planar()) throw InvalidArgument("heatmaps need a planar grid");
  const std::size_t w = img.grid.nx(), h = img.grid.ny();
  if (img.values.size() != w * h) throw LengthMismatch("image does not match its grid");

  const auto [lo_it, hi_it] = std::minmax_element(img.values.begin(), img.values.end());
  const double lo = *lo_it, span = *hi_it - *lo_it;

  os << "P5\n" << w << ' ' << h << "\n65535\n";
  for (std::size_t row = 0; row < h; ++row) {
    const std::size_t j = h - 1 - row;
    for (std::size_t i = 0; i < w; ++i) {
      const double v = img.values[i + w * j];
      const double t = span > 0.0 ? (v - lo) / span : 0.0;
      const auto q = static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
      const char bytes[2] = {static_cast<char>(q >> 8), static_cast<char>(q & 0xff)};
      os.write(bytes, 2);
    }
  }
}

}  // namespace pcslam::io
