// Copyright 2026 The Crownforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace crownforge {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Degenerate or inconsistent geometry (rings, masks, windows).
struct GeometryError : Error {
  using Error::Error;
};

/// Malformed on-disk data: raster headers, GeoJSON, manifests, predictions.
struct FormatError : Error {
  using Error::Error;
};

/// Inputs that are well-formed but violate a pipeline precondition.
struct ValidationError : Error {
  using Error::Error;
};

}  // namespace crownforge
