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

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using namespace pcslam;

int fail(int code, const std::string &kind, const std::string &msg) {
  std::string line = msg;
  for (char &c : line)
    if (c == '\n') c = ' ';
  std::fprintf(stderr, "pcslam: %s: %s\n", kind.c_str(), line.c_str());
  return code;
}

// Usage and input-validation problems exit with 2, everything else with 1.
int exit_code_for(const Error &e) {
  const std::string_view k = e.kind();
  if (k == "ParseError" || k == "ValidationError" || k == "GridError" ||
      k == "InvalidArgument" || k == "GridTooLarge" || k == "EmptyGrid")
    return 2;
  return 1;
}

}  // namespace

int main(int argc, char **argv) {
  cli::Context ctx;
  ctx.argv.assign(argv, argv + argc);

  CLI::App app{"Phase-coherent snapshot localization and mapping for distributed MIMO"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.add_option("--threads", ctx.threads, "Worker threads (0 = all cores)");
  app.add_flag("--quiet", ctx.quiet, "Suppress progress output");

  cli::SynthArgs synth;
  auto *s = app.add_subcommand("synth", "Synthesize one snapshot from a scenario");
  s->add_option("--scenario", synth.scenario, "Scenario JSON")->required();
  s->add_option("--seed", synth.seed, "Master seed for path phases and noise")->required();
  s->add_option("--trial", synth.trial, "Trial index within the seed");
  s->add_flag("--no-noise", synth.no_noise, "Omit receiver noise");
  s->add_option("--out", synth.out, "Snapshot CSV")->required();

  cli::ImageArgs image;
  auto *im = app.add_subcommand("image", "Compute the spatial image of a snapshot");
  im->add_option("--scenario", image.scenario)->required();
  im->add_option("--snapshot", image.snapshot)->required();
  im->add_option("--grid", image.grid, "xmin,xmax,ymin,ymax,z,spacing")->required();
  im->add_option("--out", image.out, "Image CSV")->required();
  im->add_option("--heatmap", image.heatmap, "Optional 16-bit PGM heatmap");
  im->add_option("--max-cells", image.max_cells, "Refuse grids larger than this");

  cli::SlamArgs slam;
  auto *sl = app.add_subcommand("slam", "Run iterative detection and cancellation");
  sl->add_option("--scenario", slam.scenario)->required();
  sl->add_option("--snapshot", slam.snapshot)->required();
  sl->add_option("--grid", slam.grid, "xmin,xmax,ymin,ymax,z,spacing")->required();
  sl->add_option("--out", slam.out, "Detections CSV")->required();
  sl->add_option("--max-targets", slam.max_targets, "Stop after K detections");
  sl->add_option("--residual-eps", slam.residual_eps,
                 "Stop when residual energy falls below this fraction of the input");
  sl->add_option("--max-cells", slam.max_cells, "Refuse grids larger than this");

  cli::AmbiguityArgs amb;
  auto *am = app.add_subcommand("ambiguity", "Map the spatial ambiguity around a point");
  am->add_option("--scenario", amb.scenario)->required();
  am->add_option("--ref", amb.ref, "x,y,z")->required();
  am->add_option("--grid", amb.grid, "xmin,xmax,ymin,ymax,z,spacing")->required();
  am->add_option("--out", amb.out, "Ambiguity CSV")->required();
  am->add_option("--max-cells", amb.max_cells, "Refuse grids larger than this");

  cli::SweepArgs sw;
  auto *swc = app.add_subcommand("sweep", "Monte Carlo detection probability sweep");
  swc->add_option("--scenario", sw.scenario)->required();
  swc->add_option("--resolutions", sw.resolutions, "Comma-separated grid spacings [m]")
      ->required();
  swc->add_option("--trials", sw.trials, "Trials per resolution and variant");
  swc->add_option("--seed", sw.seed, "Master seed")->required();
  swc->add_option("--variant", sw.variant, "estimated, pr or both");
  swc->add_option("--out", sw.out, "Sweep CSV")->required();
  swc->add_option("--diagnostics", sw.diagnostics, "Optional per-trial CSV");
  swc->add_option("--search", sw.search, "Search region xmin,xmax,ymin,ymax,z");
  swc->add_option("--cache-mb", sw.cache_mb, "Steering cache budget in MiB (0 disables)");
  swc->add_flag("--snap-to-grid", sw.snap_to_grid, "Place objects on cell centers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return fail(2, "usage", e.what());
  }

  try {
    if (*s) cli::cmd_synth(ctx, synth);
    else if (*im) cli::cmd_image(ctx, image);
    else if (*sl) cli::cmd_slam(ctx, slam);
    else if (*am) cli::cmd_ambiguity(ctx, amb);
    else if (*swc) cli::cmd_sweep(ctx, sw);
  } catch (const Error &e) {
    return fail(exit_code_for(e), std::string(e.kind()), e.what());
  } catch (const std::exception &e) {
    return fail(1, "error", e.what());
  }
  return 0;
}
