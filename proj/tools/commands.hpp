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

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pcslam/io/csv.hpp"
#include "pcslam/io/manifest.hpp"
#include "pcslam/io/pgm.hpp"
#include "pcslam/io/scenario_json.hpp"
#include "pcslam/pcslam.hpp"

namespace pcslam::cli {

// Output file written to <path>.partial and renamed into place on commit().
// Uncommitted outputs are removed on destruction, so a failed command
// leaves nothing behind.
class AtomicOutput {
 public:
  explicit AtomicOutput(std::string path) : path_(std::move(path)), tmp_(path_ + ".partial") {
    stream_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!stream_) throw IoError("cannot open output file: " + path_);
  }
  AtomicOutput(const AtomicOutput &) = delete;
  AtomicOutput &operator=(const AtomicOutput &) = delete;
  ~AtomicOutput() {
    if (!committed_) {
      stream_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  std::ostream &stream() { return stream_; }
  const std::string &path() const { return path_; }

  void commit() {
    stream_.flush();
    if (!stream_) throw IoError("write failed: " + path_);
    stream_.close();
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::string path_;
  std::string tmp_;
  std::ofstream stream_;
  bool committed_ = false;
};

inline std::vector<double> parse_number_list(const std::string &text, const char *what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const std::string item = text.substr(start, pos == std::string::npos ? pos : pos - start);
    char *end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(v))
      throw InvalidArgument(std::string(what) + ": bad number '" + item + "'");
    out.push_back(v);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

// "xmin,xmax,ymin,ymax,z,spacing"
inline GridSpec parse_grid(const std::string &text) {
  std::vector<double> v;
  try {
    v = parse_number_list(text, "--grid");
  } catch (const InvalidArgument &e) {
    throw GridError(e.what());
  }
  if (v.size() != 6) throw GridError("--grid expects xmin,xmax,ymin,ymax,z,spacing");
  GridSpec g = GridSpec::planar(v[0], v[1], v[2], v[3], v[4], v[5]);
  g.validate();
  return g;
}

inline Vec3 parse_point(const std::string &text, const char *what) {
  const auto v = parse_number_list(text, what);
  if (v.size() != 3) throw InvalidArgument(std::string(what) + " expects x,y,z");
  return {v[0], v[1], v[2]};
}

inline Snapshot load_snapshot(const std::string &path, const Scenario &s) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot file: " + path);
  Snapshot y = io::read_snapshot_csv(in);
  if (y.size() != s.aps.size())
    throw ValidationError("snapshot has " + std::to_string(y.size()) + " samples, scenario has " +
                          std::to_string(s.aps.size()) + " APs");
  y.meta.scenario_hash = scenario_hash(s);
  return y;
}

struct Context {
  std::vector<std::string> argv;
  std::size_t threads = 0;
  bool quiet = false;
};

inline void write_manifest(const Context &ctx, const std::string &output, std::uint64_t hash,
                           std::optional<std::uint64_t> seed, nlohmann::json params) {
  io::RunManifest m;
  m.scenario_hash = hash;
  m.master_seed = seed;
  m.command_line = ctx.argv;
  m.timestamp = io::utc_timestamp();
  m.parameters = std::move(params);
  AtomicOutput out(output + ".manifest.json");
  out.stream() << m.to_json().dump(2) << '\n';
  out.commit();
}

inline nlohmann::json grid_json(const GridSpec &g) {
  return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min}, {"y_max", g.y_max},
          {"z", g.z_min},     {"spacing", g.spacing}};
}

struct SynthArgs {
  std::string scenario, out;
  std::uint64_t seed = 1;
  std::uint64_t trial = 0;
  bool no_noise = false;
};

inline void cmd_synth(const Context &ctx, const SynthArgs &a) {
  const Scenario s = io::parse_scenario(a.scenario);
  const auto phases = draw_path_phases(a.seed, a.trial, s.path_count());
  const NoiseSpec noise = a.no_noise ? NoiseSpec::off() : NoiseSpec::seeded(a.seed, a.trial);
  const Snapshot y = synthesize_snapshot(s, phases, noise);
  AtomicOutput out(a.out);
  io::write_snapshot_csv(out.stream(), y);
  out.commit();
  write_manifest(ctx, a.out, scenario_hash(s), a.seed,
                 {{"command", "synth"}, {"trial", a.trial}, {"noise", !a.no_noise},
                  {"phases", phases}});
}

struct ImageArgs {
  std::string scenario, snapshot, grid, out, heatmap;
  std::size_t max_cells = 100'000'000;
};

inline void cmd_image(const Context &ctx, const ImageArgs &a) {
  const GridSpec g = parse_grid(a.grid);
  const Scenario s = io::parse_scenario(a.scenario);
  const Snapshot y = load_snapshot(a.snapshot, s);
  ImagingOptions opts;
  opts.threads = ctx.threads;
  opts.max_cells = a.max_cells;
  const SpatialImage img = compute_image(y, g, s.aps, s.rf.carrier_hz, opts);

  AtomicOutput out(a.out);
  io::write_image_csv(out.stream(), img);
  std::optional<AtomicOutput> heat;
  if (!a.heatmap.empty()) {
    heat.emplace(a.heatmap);
    io::write_pgm16(heat->stream(), img);
  }
  out.commit();
  if (heat) heat->commit();
  const nlohmann::json params = {{"command", "image"}, {"grid", grid_json(g)},
                                 {"snapshot", a.snapshot}};
  write_manifest(ctx, a.out, scenario_hash(s), std::nullopt, params);
  if (heat) write_manifest(ctx, a.heatmap, scenario_hash(s), std::nullopt, params);
}

struct SlamArgs {
  std::string scenario, snapshot, grid, out;
  std::optional<std::size_t> max_targets;
  std::optional<double> residual_eps;
  std::size_t max_cells = 100'000'000;
};

// Residual-energy fraction used when no stop rule is given.
inline constexpr double kDefaultResidualEps = 1e-3;

inline void cmd_slam(const Context &ctx, const SlamArgs &a) {
  const GridSpec g = parse_grid(a.grid);
  StopRule stop{a.max_targets, a.residual_eps};
  if (!stop.max_targets && !stop.residual_fraction) stop.residual_fraction = kDefaultResidualEps;
  stop.validate();
  const Scenario s = io::parse_scenario(a.scenario);
  const Snapshot y = load_snapshot(a.snapshot, s);
  ImagingOptions opts;
  opts.threads = ctx.threads;
  opts.max_cells = a.max_cells;
  const auto dets = run_slam(y, g, s.aps, s.rf.carrier_hz, stop, opts);

  AtomicOutput out(a.out);
  io::write_detections_csv(out.stream(), dets);
  out.commit();
  nlohmann::json params = {{"command", "slam"}, {"grid", grid_json(g)}, {"snapshot", a.snapshot}};
  params["max_targets"] = stop.max_targets ? nlohmann::json(*stop.max_targets) : nlohmann::json();
  params["residual_eps"] =
      stop.residual_fraction ? nlohmann::json(*stop.residual_fraction) : nlohmann::json();
  write_manifest(ctx, a.out, scenario_hash(s), std::nullopt, params);
}

struct AmbiguityArgs {
  std::string scenario, ref, grid, out;
  std::size_t max_cells = 100'000'000;
};

inline void cmd_ambiguity(const Context &ctx, const AmbiguityArgs &a) {
  const GridSpec g = parse_grid(a.grid);
  const Vec3 ref = parse_point(a.ref, "--ref");
  const Scenario s = io::parse_scenario(a.scenario);
  ImagingOptions opts;
  opts.threads = ctx.threads;
  opts.max_cells = a.max_cells;
  const SpatialImage map = ambiguity_map(ref, g, s.aps, s.rf.carrier_hz, opts);
  AtomicOutput out(a.out);
  io::write_image_csv(out.stream(), map);
  out.commit();
  write_manifest(ctx, a.out, scenario_hash(s), std::nullopt,
                 {{"command", "ambiguity"}, {"grid", grid_json(g)},
                  {"ref", {ref.x, ref.y, ref.z}}});
}

struct SweepArgs {
  std::string scenario, resolutions, variant = "both", out, diagnostics, search;
  std::size_t trials = 500;
  std::uint64_t seed = 1;
  std::size_t cache_mb = kDefaultSweepCacheBytes >> 20;
  bool snap_to_grid = false;
};

inline std::vector<Variant> parse_variants(const std::string &v) {
  if (v == "estimated") return {Variant::Estimated};
  if (v == "pr") return {Variant::PerfectRemoval};
  if (v == "both") return {Variant::Estimated, Variant::PerfectRemoval};
  throw InvalidArgument("--variant must be estimated, pr or both");
}

inline void cmd_sweep(const Context &ctx, const SweepArgs &a) {
  const auto resolutions = parse_number_list(a.resolutions, "--resolutions");
  for (double r : resolutions)
    if (!(r > 0.0)) throw InvalidArgument("--resolutions must be positive");
  const auto variants = parse_variants(a.variant);
  if (a.trials == 0) throw InvalidArgument("--trials must be at least 1");

  TrialConfig cfg;
  cfg.base_scenario = io::parse_scenario(a.scenario);
  cfg.grid = default_search_grid(resolutions.front());
  if (!a.search.empty()) {
    const auto b = parse_number_list(a.search, "--search");
    if (b.size() != 5) throw GridError("--search expects xmin,xmax,ymin,ymax,z");
    cfg.grid = GridSpec::planar(b[0], b[1], b[2], b[3], b[4], resolutions.front());
  }
  cfg.grid.validate();
  cfg.placement.z = cfg.grid.z_min;
  cfg.placement.snap_to_grid = a.snap_to_grid;
  cfg.trials = a.trials;
  cfg.master_seed = a.seed;
  cfg.imaging.threads = ctx.threads;
  cfg.imaging.cache_budget_bytes = a.cache_mb << 20;

  AtomicOutput out(a.out);
  std::optional<AtomicOutput> diag;
  if (!a.diagnostics.empty()) {
    diag.emplace(a.diagnostics);
    io::write_diagnostics_header(diag->stream());
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto observer = [&](const SweepPoint &pt, const TrialResult &r) {
    if (diag) io::write_diagnostics_rows(diag->stream(), pt, r);
    const std::size_t done = r.trial + 1;
    if (!ctx.quiet && (done == cfg.trials || done % 50 == 0)) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::fprintf(stderr, "[%8.1fs] resolution %.4g m, %s: %zu/%zu trials\n", secs,
                   pt.resolution_m, to_string(pt.variant), done, cfg.trials);
    }
  };
  const DetectionStats stats = sweep(cfg, resolutions, variants, observer);

  io::write_sweep_csv(out.stream(), stats);
  out.commit();
  if (diag) diag->commit();

  std::vector<std::string> vnames;
  for (Variant v : variants) vnames.push_back(to_string(v));
  const Placement &pl = cfg.placement;
  const nlohmann::json params = {{"command", "sweep"},
                  {"resolutions", resolutions},
                  {"variants", vnames},
                  {"trials", a.trials},
                  {"search_grid", grid_json(cfg.grid)},
                  {"placement",
                   {{"distribution", "uniform"},
                    {"x", {pl.x_min, pl.x_max}},
                    {"y", {pl.y_min, pl.y_max}},
                    {"z", pl.z},
                    {"min_ue_sp_separation_m", pl.min_ue_sp_separation_m},
                    {"snap_to_grid", pl.snap_to_grid}}},
                  {"success_radius_m", cfg.success_radius_m},
                  {"oracle_match_radius_m", cfg.oracle_match_radius_m}};
  write_manifest(ctx, a.out, scenario_hash(cfg.base_scenario), a.seed, params);
  if (diag) write_manifest(ctx, a.diagnostics, scenario_hash(cfg.base_scenario), a.seed, params);
}

}  // namespace pcslam::cli
