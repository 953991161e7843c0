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

// Scenario files (JSON).
//
//   {
//     "aps":        [[x, y, z], ...]  or  {"nx": 5, "ny": 10, "spacing": 2.0, "plane_z": 0.0},
//     "ue":         [x, y, z],
//     "surfaces":   [{"anchor": [x, y, z], "normal": [x, y, z], "attenuation": 0.5}, ...],
//     "scatterers": [{"position": [x, y, z], "rcs_m2": 10.0}, ...],
//     "rf": {"carrier_hz": 3e9, "tx_power_dbm": 10, "symbol_bandwidth_hz": 30e3,
//            "noise_psd_dbm_hz": -174, "noise_figure_db": 8}
//   }
//
// Coordinates in meters, origin at the ceiling center, z negative downward.
// The lattice generator centers an nx * ny grid on (0, 0) at z = plane_z.
// Power quantities in dBm are converted to watts at load. Unknown keys are
// rejected.

#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "pcslam/errors.hpp"
#include "pcslam/scene.hpp"

namespace pcslam::io {

using nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json &obj, std::initializer_list<std::string_view> allowed,
                                const std::string &path) {
  for (const auto &item : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || item.key() == a;
    if (!ok) throw ParseError(path + (path.empty() ? "" : ".") + item.key() + ": unknown key");
  }
}

inline const json &require(const json &obj, const char *key, const std::string &path) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError(path + (path.empty() ? "" : ".") + key + ": missing required key");
  return *it;
}

inline double as_number(const json &j, const std::string &path) {
  if (!j.is_number()) throw ParseError(path + ": expected a number");
  return j.get<double>();
}

inline Vec3 as_vec3(const json &j, const std::string &path) {
  if (!j.is_array() || j.size() != 3) throw ParseError(path + ": expected [x, y, z]");
  return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]"),
          as_number(j[2], path + "[2]")};
}

inline std::size_t as_count(const json &j, const std::string &path) {
  if (!j.is_number_integer() || j.get<long long>() <= 0)
    throw ParseError(path + ": expected a positive integer");
  return j.get<std::size_t>();
}

inline json vec3_json(const Vec3 &v) { return json::array({v.x, v.y, v.z}); }

}  // namespace detail

// Parses and validates. Error messages carry the offending key path.
inline Scenario scenario_from_json(const json &doc) {
  using namespace detail;
  if (!doc.is_object()) throw ParseError("scenario: expected a JSON object");
  reject_unknown_keys(doc, {"aps", "ue", "surfaces", "scatterers", "rf"}, "");

  Scenario s;
  const json &aps = require(doc, "aps", "");
  if (aps.is_array()) {
    for (std::size_t i = 0; i < aps.size(); ++i)
      s.aps.push_back({i, as_vec3(aps[i], "aps[" + std::to_string(i) + "]")});
  } else if (aps.is_object()) {
    reject_unknown_keys(aps, {"nx", "ny", "spacing", "plane_z"}, "aps");
    const double spacing = as_number(require(aps, "spacing", "aps"), "aps.spacing");
    if (!(spacing > 0.0)) throw ValidationError("aps.spacing: must be positive");
    s.aps = ceiling_lattice(as_count(require(aps, "nx", "aps"), "aps.nx"),
                            as_count(require(aps, "ny", "aps"), "aps.ny"), spacing,
                            as_number(require(aps, "plane_z", "aps"), "aps.plane_z"));
  } else {
    throw ParseError("aps: expected a list of positions or a lattice generator");
  }

  s.ue = as_vec3(require(doc, "ue", ""), "ue");

  if (const auto it = doc.find("surfaces"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("surfaces: expected a list");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = "surfaces[" + std::to_string(i) + "]";
      const json &o = (*it)[i];
      if (!o.is_object()) throw ParseError(p + ": expected an object");
      reject_unknown_keys(o, {"anchor", "normal", "attenuation"}, p);
      const Vec3 normal = as_vec3(require(o, "normal", p), p + ".normal");
      if (!(norm(normal) > 1e-12)) throw ValidationError(p + ".normal: zero normal");
      s.surfaces.emplace_back(as_vec3(require(o, "anchor", p), p + ".anchor"), normal,
                              as_number(require(o, "attenuation", p), p + ".attenuation"));
    }
  }

  if (const auto it = doc.find("scatterers"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("scatterers: expected a list");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = "scatterers[" + std::to_string(i) + "]";
      const json &o = (*it)[i];
      if (!o.is_object()) throw ParseError(p + ": expected an object");
      reject_unknown_keys(o, {"position", "rcs_m2"}, p);
      s.scatterers.push_back({as_vec3(require(o, "position", p), p + ".position"),
                              as_number(require(o, "rcs_m2", p), p + ".rcs_m2")});
    }
  }

  const json &rf = require(doc, "rf", "");
  if (!rf.is_object()) throw ParseError("rf: expected an object");
  reject_unknown_keys(rf,
                      {"carrier_hz", "tx_power_dbm", "symbol_bandwidth_hz", "noise_psd_dbm_hz",
                       "noise_figure_db"},
                      "rf");
  s.rf.carrier_hz = as_number(require(rf, "carrier_hz", "rf"), "rf.carrier_hz");
  s.rf.tx_power_w = dbm_to_watts(as_number(require(rf, "tx_power_dbm", "rf"), "rf.tx_power_dbm"));
  s.rf.symbol_bandwidth_hz =
      as_number(require(rf, "symbol_bandwidth_hz", "rf"), "rf.symbol_bandwidth_hz");
  s.rf.noise_psd_w_per_hz =
      dbm_to_watts(as_number(require(rf, "noise_psd_dbm_hz", "rf"), "rf.noise_psd_dbm_hz"));
  s.rf.noise_figure_db = as_number(require(rf, "noise_figure_db", "rf"), "rf.noise_figure_db");

  if (const auto v = validate_scenario(s); !v.empty()) {
    std::string msg;
    for (const auto &item : v) {
      if (!msg.empty()) msg += "; ";
      msg += item.entity + ": " + item.rule;
    }
    throw ValidationError(msg);
  }
  return s;
}

inline Scenario parse_scenario_string(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(doc);
}

inline Scenario parse_scenario(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_string(buf.str());
}

// APs are always written as an explicit position list.
inline json scenario_to_json(const Scenario &s) {
  using detail::vec3_json;
  json doc;
  doc["aps"] = json::array();
  for (const auto &ap : s.aps) doc["aps"].push_back(vec3_json(ap.position));
  doc["ue"] = vec3_json(s.ue);
  doc["surfaces"] = json::array();
  for (const auto &surf : s.surfaces)
    doc["surfaces"].push_back({{"anchor", vec3_json(surf.anchor())},
                               {"normal", vec3_json(surf.normal())},
                               {"attenuation", surf.attenuation()}});
  doc["scatterers"] = json::array();
  for (const auto &sp : s.scatterers)
    doc["scatterers"].push_back({{"position", vec3_json(sp.position)}, {"rcs_m2", sp.rcs_m2}});
  doc["rf"] = {{"carrier_hz", s.rf.carrier_hz},
               {"tx_power_dbm", watts_to_dbm(s.rf.tx_power_w)},
               {"symbol_bandwidth_hz", s.rf.symbol_bandwidth_hz},
               {"noise_psd_dbm_hz", watts_to_dbm(s.rf.noise_psd_w_per_hz)},
               {"noise_figure_db", s.rf.noise_figure_db}};
  return doc;
}

}  // namespace pcslam::io
