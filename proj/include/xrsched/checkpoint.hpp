// Copyright 2026 The xrsched Authors. All rights reserved.
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

#ifndef XRSCHED_CHECKPOINT_HPP_
#define XRSCHED_CHECKPOINT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xrsched/q_network.hpp"

namespace xrsched {

// File layout: 8-byte magic, u32 format version, u32 manifest length, the
// JSON manifest (network config, per-layer shapes, parameter count), then the
// flat float32 parameter array. Integers and floats are little-endian.
inline constexpr char kCheckpointMagic[8] = {'X', 'R', 'S', 'Q', 'N', 'E', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

nlohmann::json CheckpointManifest(const QNetworkConfig& config);

// Written atomically.
void SaveCheckpoint(const std::string& path, const QNetworkConfig& config,
                    const std::vector<float>& params);

// Throws ManifestError when the file is malformed or its manifest differs
// from `expected`.
std::vector<float> LoadCheckpoint(const std::string& path, const QNetworkConfig& expected);

}  // namespace xrsched

#endif  // XRSCHED_CHECKPOINT_HPP_
