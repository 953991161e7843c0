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

// CSV schemas. Real-valued fields are written in scientific notation with 17
// significant digits, which round-trips every double exactly.
//
//   snapshot     ap_id,re,im
//   image        x,y,value        (x,y,z,value for volumetric grids)
//   detections   iteration,x,y,z,phase,peak_value,residual_energy
//   sweep        resolution_m,variant,object,trials,successes,p_detect,std_err
//   diagnostics  trial,variant,resolution_m,object,truth_x,truth_y,truth_z,
//                success,det_x,det_y,det_z,distance,error

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pcslam/errors.hpp"
#include "pcslam/forward.hpp"
#include "pcslam/imaging.hpp"
#include "pcslam/montecarlo.hpp"
#include "pcslam/slam.hpp"

namespace pcslam::io {

inline constexpr std::string_view kSnapshotHeader = "ap_id,re,im";
inline constexpr std::string_view kImageHeader = "x,y,value";
inline constexpr std::string_view kVolumeHeader = "x,y,z,value";
inline constexpr std::string_view kDetectionHeader =
    "iteration,x,y,z,phase,peak_value,residual_energy";
inline constexpr std::string_view kSweepHeader =
    "resolution_m,variant,object,trials,successes,p_detect,std_err";
inline constexpr std::string_view kDiagnosticsHeader =
    "trial,variant,resolution_m,object,truth_x,truth_y,truth_z,success,det_x,det_y,det_z,"
    "distance,error";

inline std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline void write_snapshot_csv(std::ostream &os, const Snapshot &y) {
  os << kSnapshotHeader << '\n';
  for (std::size_t n = 0; n < y.size(); ++n)
    os << n << ',' << fmt_real(y.samples[n].real()) << ',' << fmt_real(y.samples[n].imag())
       << '\n';
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view chomp(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

inline double parse_real(std::string_view s, std::size_t line) {
  s = chomp(s);
  // strtod handles the full scientific-notation grammar portably.
  std::string tmp(s);
  char *end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size())
    throw ParseError("line " + std::to_string(line) + ": bad number '" + tmp + "'");
  return v;
}

}  // namespace detail

// AP ids must run 0, 1, 2, ... in order.
inline Snapshot read_snapshot_csv(std::istream &is) {
  std::string line;
  if (!std::getline(is, line) || detail::chomp(line) != kSnapshotHeader)
    throw ParseError("snapshot CSV: header must be '" + std::string(kSnapshotHeader) + "'");
  Snapshot y;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::chomp(line).empty()) continue;
    const auto f = detail::split(detail::chomp(line));
    if (f.size() != 3)
      throw ParseError("snapshot CSV line " + std::to_string(lineno) + ": expected 3 fields");
    const double id = detail::parse_real(f[0], lineno);
    if (id != static_cast<double>(y.samples.size()))
      throw ParseError("snapshot CSV line " + std::to_string(lineno) + ": ap_id out of order");
    y.samples.emplace_back(detail::parse_real(f[1], lineno), detail::parse_real(f[2], lineno));
  }
  for (const auto &v : y.samples)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ParseError("snapshot CSV: non-finite sample");
  return y;
}

inline void write_image_csv(std::ostream &os, const SpatialImage &img) {
  const bool planar = img.grid.is_planar();
  os << (planar ? kImageHeader : kVolumeHeader) << '\n';
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    const Vec3 c = img.grid.cell_center(i);
    os << fmt_real(c.x) << ',' << fmt_real(c.y) << ',';
    if (!planar) os << fmt_real(c.z) << ',';
    os << fmt_real(img.values[i]) << '\n';
  }
}

inline void write_detections_csv(std::ostream &os, std::span<const Detection> dets) {
  os << kDetectionHeader << '\n';
  for (const auto &d : dets)
    os << d.iteration << ',' << fmt_real(d.position.x) << ',' << fmt_real(d.position.y) << ','
       << fmt_real(d.position.z) << ',' << fmt_real(d.phase) << ',' << fmt_real(d.peak_value)
       << ',' << fmt_real(d.residual_energy) << '\n';
}

inline void write_sweep_csv(std::ostream &os, const DetectionStats &stats) {
  os << kSweepHeader << '\n';
  for (const auto &pt : stats.points)
    for (ObjectClass c : kObjectClasses) {
      const ObjectStats &o = pt[c];
      os << fmt_real(pt.resolution_m) << ',' << to_string(pt.variant) << ',' << to_string(c)
         << ',' << o.trials << ',' << o.successes << ',' << fmt_real(o.probability()) << ','
         << fmt_real(o.std_err()) << '\n';
    }
}

inline void write_diagnostics_header(std::ostream &os) { os << kDiagnosticsHeader << '\n'; }

inline void write_diagnostics_rows(std::ostream &os, const SweepPoint &pt, const TrialResult &r) {
  for (std::size_t t = 0; t < r.truths.size(); ++t) {
    const Truth &truth = r.truths[t];
    os << r.trial << ',' << to_string(pt.variant) << ',' << fmt_real(pt.resolution_m) << ','
       << to_string(truth.cls) << ',' << fmt_real(truth.position.x) << ','
       << fmt_real(truth.position.y) << ',' << fmt_real(truth.position.z) << ','
       << (r.match.success[t] ? 1 : 0) << ',';
    if (const auto d = r.match.detection[t]) {
      const Vec3 &p = r.detections[*d].position;
      os << fmt_real(p.x) << ',' << fmt_real(p.y) << ',' << fmt_real(p.z) << ','
         << fmt_real(r.match.distance[t]);
    } else {
      os << ",,,";
    }
    std::string err = r.error.value_or("");
    std::replace(err.begin(), err.end(), ',', ';');
    os << ',' << err << '\n';
  }
}

}  // namespace pcslam::io
