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

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcslam {

// All library failures derive from Error. kind() is a stable machine-readable
// tag used by the CLI for its one-line error reports.
class Error : public std::runtime_error {
 public:
  Error(std::string_view kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  std::string_view kind() const noexcept { return kind_; }

 private:
  std::string_view kind_;
};

#define PCSLAM_DEFINE_ERROR(Name)                                       \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string &what) : Error(#Name, what) {}      \
  }

PCSLAM_DEFINE_ERROR(ParallelLine);
PCSLAM_DEFINE_ERROR(DegenerateGeometry);
PCSLAM_DEFINE_ERROR(InvalidArgument);
PCSLAM_DEFINE_ERROR(LengthMismatch);
PCSLAM_DEFINE_ERROR(GridError);
PCSLAM_DEFINE_ERROR(GridTooLarge);
PCSLAM_DEFINE_ERROR(EmptyImage);
PCSLAM_DEFINE_ERROR(EmptyGrid);
PCSLAM_DEFINE_ERROR(DegenerateEstimate);
PCSLAM_DEFINE_ERROR(ParseError);
PCSLAM_DEFINE_ERROR(ValidationError);
PCSLAM_DEFINE_ERROR(IoError);

#undef PCSLAM_DEFINE_ERROR

}  // namespace pcslam
