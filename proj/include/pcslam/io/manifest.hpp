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
#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcslam/version.hpp"

namespace pcslam::io {

inline std::string format_hash(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Written next to every CLI output as <output>.manifest.json.
struct RunManifest {
  std::string tool_version = kVersion;
  std::uint64_t scenario_hash = 0;
  std::optional<std::uint64_t> master_seed;
  std::vector<std::string> command_line;
  std::string timestamp;  // UTC, ISO 8601
  nlohmann::json parameters = nlohmann::json::object();

  nlohmann::json to_json() const {
    nlohmann::json j = {{"tool", "pcslam"},
                        {"tool_version", tool_version},
                        {"scenario_hash", format_hash(scenario_hash)},
                        {"command_line", command_line},
                        {"timestamp", timestamp},
                        {"parameters", parameters}};
    j["master_seed"] = master_seed ? nlohmann::json(*master_seed) : nlohmann::json(nullptr);
    return j;
  }
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace pcslam::io
