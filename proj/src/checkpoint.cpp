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

#include "xrsched/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "xrsched/errors.hpp"
#include "xrsched/experiment.hpp"
#include "xrsched/experiment_config.hpp"

namespace xrsched {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

template <typename T>
void Append(std::string& out, const T& v) {
  const char* p = reinterpret_cast<const char*>(&v);
  out.append(p, sizeof(T));
}

template <typename T>
T Read(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw ManifestError("checkpoint is truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

nlohmann::json CheckpointManifest(const QNetworkConfig& config) {
  const QNetwork<float> net(config);
  nlohmann::json layers = nlohmann::json::array();
  int i = 0;
  for (const auto& g : net.conv_geometry()) {
    layers.push_back({{"name", "conv" + std::to_string(i) + ".weight"},
                      {"shape", {g.out_c, g.in_c, g.kernel, g.kernel}}});
    layers.push_back({{"name", "conv" + std::to_string(i) + ".bias"}, {"shape", {g.out_c}}});
    ++i;
  }
  i = 0;
  for (const auto& d : net.dense_geometry()) {
    layers.push_back({{"name", "dense" + std::to_string(i) + ".weight"}, {"shape", {d.out, d.in}}});
    layers.push_back({{"name", "dense" + std::to_string(i) + ".bias"}, {"shape", {d.out}}});
    ++i;
  }
  return {{"network", ToJson(config)}, {"layers", layers}, {"num_params", net.num_params()}};
}

void SaveCheckpoint(const std::string& path, const QNetworkConfig& config,
                    const std::vector<float>& params) {
  const nlohmann::json manifest = CheckpointManifest(config);
  if (params.size() != manifest["num_params"].get<std::size_t>()) {
    throw ConfigError("parameter count does not match the network");
  }
  const std::string text = manifest.dump();
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  Append(out, kCheckpointVersion);
  Append(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  Append(out, static_cast<std::uint64_t>(params.size()));
  out.append(reinterpret_cast<const char*>(params.data()), params.size() * sizeof(float));
  WriteFileAtomic(path, out);
}

std::vector<float> LoadCheckpoint(const std::string& path, const QNetworkConfig& expected) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ManifestError("cannot open checkpoint " + path);
  const std::string in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (in.size() < sizeof(kCheckpointMagic) ||
      std::memcmp(in.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw ManifestError(path + " is not a checkpoint file");
  }
  std::size_t pos = sizeof(kCheckpointMagic);
  const auto version = Read<std::uint32_t>(in, pos);
  if (version != kCheckpointVersion) {
    throw ManifestError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto len = Read<std::uint32_t>(in, pos);
  if (pos + len > in.size()) throw ManifestError("checkpoint is truncated");
  const auto manifest = nlohmann::json::parse(in.substr(pos, len), nullptr, false);
  pos += len;
  if (manifest.is_discarded()) throw ManifestError("checkpoint manifest is not valid JSON");
  if (manifest != CheckpointManifest(expected)) {
    throw ManifestError("checkpoint manifest does not match the configured network");
  }
  const auto count = Read<std::uint64_t>(in, pos);
  if (count != manifest["num_params"].get<std::uint64_t>() ||
      in.size() - pos != count * sizeof(float)) {
    throw ManifestError("checkpoint parameter block has the wrong size");
  }
  std::vector<float> params(count);
  std::memcpy(params.data(), in.data() + pos, count * sizeof(float));
  return params;
}

}  // namespace xrsched
