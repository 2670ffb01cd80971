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

#include "xrsched/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xrsched/errors.hpp"

namespace xrsched {
namespace {

constexpr double kSymbolsPerSlot = 14.0;
constexpr double kSubcarriersPerRb = 12.0;
constexpr double kBaseSpacingKhz = 15.0;

// Ratio that must be a positive integer; tolerant to decimal input such as
// 0.0625 ms or 69.12 MHz.
int IntegerRatio(double value, double unit, const char* field) {
  const double ratio = value / unit;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * rounded) {
    throw ConfigError(std::string(field) + " = " + std::to_string(value) +
                      " is not a positive integer multiple of " +
                      std::to_string(unit));
  }
  return static_cast<int>(rounded);
}

}  // namespace

double MinSymbolDurationMs(const GridSpec& spec) {
  return 1.0 / (kSymbolsPerSlot * std::ldexp(1.0, spec.mu_max));
}

double MinBandwidthKhz(const GridSpec& spec) {
  return kSubcarriersPerRb * kBaseSpacingKhz * std::ldexp(1.0, spec.mu_min);
}

GridDims DeriveGrid(const GridSpec& spec) {
  if (spec.mu_min < 0 || spec.mu_max < spec.mu_min) {
    throw ConfigError("numerology bounds must satisfy 0 <= mu_min <= mu_max");
  }
  if (spec.mu_max > 16) throw ConfigError("mu_max is unreasonably large");
  const double dt = MinSymbolDurationMs(spec);
  const double db = MinBandwidthKhz(spec);
  GridDims dims;
  dims.n_time_units = IntegerRatio(spec.frame_duration_ms, dt, "frame_duration_ms");
  dims.n_freq_units = IntegerRatio(spec.system_bandwidth_khz, db, "system_bandwidth_khz");
  dims.rb_size_shz = dt * db;
  return dims;
}

BwpShape MakeBwpShape(int mu, int eta, const GridSpec& spec) {
  if (mu < spec.mu_min || mu > spec.mu_max) {
    throw DomainError("numerology " + std::to_string(mu) + " outside [" +
                      std::to_string(spec.mu_min) + ", " +
                      std::to_string(spec.mu_max) + "]");
  }
  if (eta < 1 || eta > kMaxMinislotSymbols) {
    throw MinislotError("mini-slot of " + std::to_string(eta) +
                        " symbols outside [1, 14]");
  }
  BwpShape shape;
  shape.mu = mu;
  shape.eta = eta;
  shape.time_len_units = eta << (spec.mu_max - mu);
  shape.freq_width_units = 1 << (mu - spec.mu_min);
  return shape;
}

std::string_view TierName(Tier tier) { return tier == Tier::kBt ? "BT" : "ET"; }

bool ValidateAllocationSet(std::span<const BwpAllocation> allocs,
                           const GridDims& dims) {
  std::vector<char> used(static_cast<std::size_t>(std::max(dims.num_cells(), 0)), 0);
  for (const auto& a : allocs) {
    if (a.shape.time_len_units < 1 || a.shape.freq_width_units < 1) return false;
    if (a.time_offset_units < 0 || a.freq_offset_units < 0) return false;
    if (a.time_end() > dims.n_time_units || a.freq_end() > dims.n_freq_units) {
      return false;
    }
    for (int f = a.freq_offset_units; f < a.freq_end(); ++f) {
      for (int t = a.time_offset_units; t < a.time_end(); ++t) {
        char& cell = used[static_cast<std::size_t>(f) * dims.n_time_units + t];
        if (cell != 0) return false;
        cell = 1;
      }
    }
  }
  return true;
}

std::uint8_t EncodeCell(int ue_index, Tier tier) {
  return static_cast<std::uint8_t>(((ue_index + 1) & 0x7f) |
                                   (tier == Tier::kEt ? 0x80 : 0));
}

ResourceGrid::ResourceGrid(const GridDims& dims)
    : dims_(dims),
      cells_(static_cast<std::size_t>(dims.num_cells()), 0),
      prefix_(static_cast<std::size_t>(dims.n_freq_units + 1) *
                  (dims.n_time_units + 1),
              0),
      frontier_(static_cast<std::size_t>(dims.n_freq_units), 0) {}

int ResourceGrid::CountOccupied(int time, int freq, int time_len,
                                int freq_width) const {
  const int stride = dims_.n_time_units + 1;
  auto at = [&](int f, int t) { return prefix_[static_cast<std::size_t>(f) * stride + t]; };
  const int t1 = time + time_len;
  const int f1 = freq + freq_width;
  return at(f1, t1) - at(freq, t1) - at(f1, time) + at(freq, time);
}

bool ResourceGrid::IsFree(int time, int freq, int time_len,
                          int freq_width) const {
  if (time < 0 || freq < 0 || time_len < 1 || freq_width < 1) return false;
  if (time + time_len > dims_.n_time_units ||
      freq + freq_width > dims_.n_freq_units) {
    return false;
  }
  return CountOccupied(time, freq, time_len, freq_width) == 0;
}

std::optional<Placement> ResourceGrid::FindPlacement(const BwpShape& shape) const {
  const int last_t = dims_.n_time_units - shape.time_len_units;
  const int last_f = dims_.n_freq_units - shape.freq_width_units;
  if (shape.time_len_units < 1 || shape.freq_width_units < 1) return std::nullopt;
  if (shape.area_rbs() > free_cells()) return std::nullopt;
  for (int t = 0; t <= last_t; ++t) {
    for (int f = 0; f <= last_f; ++f) {
      if (CountOccupied(t, f, shape.time_len_units, shape.freq_width_units) == 0) {
        return Placement{t, f};
      }
    }
  }
  return std::nullopt;
}

std::optional<BwpAllocation> ResourceGrid::Place(int ue_index, Tier tier,
                                                 const BwpShape& shape) {
  auto where = FindPlacement(shape);
  if (!where) return std::nullopt;
  BwpAllocation alloc{ue_index, tier, shape, where->time_offset,
                      where->freq_offset};
  Occupy(alloc);
  return alloc;
}

void ResourceGrid::Occupy(const BwpAllocation& a) {
  if (!IsFree(a.time_offset_units, a.freq_offset_units, a.shape.time_len_units,
              a.shape.freq_width_units)) {
    throw ContractError("allocation rectangle is out of bounds or overlaps");
  }
  const std::uint8_t c = EncodeCell(a.ue_index, a.tier);
  for (int f = a.freq_offset_units; f < a.freq_end(); ++f) {
    for (int t = a.time_offset_units; t < a.time_end(); ++t) {
      cells_[static_cast<std::size_t>(f) * dims_.n_time_units + t] = c;
    }
    frontier_[static_cast<std::size_t>(f)] =
        std::max(frontier_[static_cast<std::size_t>(f)], a.time_end());
  }
  used_cells_ += a.shape.area_rbs();
  RebuildPrefix();
}

void ResourceGrid::RebuildPrefix() {
  const int stride = dims_.n_time_units + 1;
  for (int f = 0; f < dims_.n_freq_units; ++f) {
    int row = 0;
    for (int t = 0; t < dims_.n_time_units; ++t) {
      row += occupied(t, f) ? 1 : 0;
      prefix_[static_cast<std::size_t>(f + 1) * stride + t + 1] =
          prefix_[static_cast<std::size_t>(f) * stride + t + 1] + row;
    }
  }
}

}  // namespace xrsched
