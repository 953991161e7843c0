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

// Umbrella header for the core library (no I/O).

#pragma once

#include "pcslam/errors.hpp"
#include "pcslam/forward.hpp"
#include "pcslam/imaging.hpp"
#include "pcslam/montecarlo.hpp"
#include "pcslam/parallel.hpp"
#include "pcslam/rng.hpp"
#include "pcslam/scene.hpp"
#include "pcslam/slam.hpp"
#include "pcslam/vec3.hpp"
#include "pcslam/version.hpp"
