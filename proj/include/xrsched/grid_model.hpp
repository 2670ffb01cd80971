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

#ifndef XRSCHED_GRID_MODEL_HPP_
#define XRSCHED_GRID_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace xrsched {

// System numerology bounds plus the frame extent in time and frequency.
struct GridSpec {
  int mu_min = 4;
  int mu_max = 6;
  double frame_duration_ms = 0.0625;
  double system_bandwidth_khz = 69120.0;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Shortest OFDM symbol supported by the system, 1 / (14 * 2^mu_max) ms.
double MinSymbolDurationMs(const GridSpec& spec);
// Narrowest bandwidth part, 12 * 15 * 2^mu_min kHz.
double MinBandwidthKhz(const GridSpec& spec);

// Integer resource grid. One unit is a resource block of
// MinSymbolDurationMs x MinBandwidthKhz (ms * kHz == s * Hz).
struct GridDims {
  int n_time_units = 0;
  int n_freq_units = 0;
  double rb_size_shz = 0.0;

  int num_cells() const { return n_time_units * n_freq_units; }
};

// Throws ConfigError naming the offending field when T or B is not an
// integer multiple of the resource-block extent.
GridDims DeriveGrid(const GridSpec& spec);

inline constexpr int kMaxMinislotSymbols = 14;

// Rectangle occupied by one bandwidth part. Its area in resource blocks is
// eta * 2^(mu_max - mu_min) regardless of mu.
struct BwpShape {
  int time_len_units = 0;
  int freq_width_units = 0;
  int mu = 0;
  int eta = 0;

  int area_rbs() const { return time_len_units * freq_width_units; }
  friend bool operator==(const BwpShape&, const BwpShape&) = default;
};

// Throws DomainError for mu outside [mu_min, mu_max] and MinislotError for
// eta outside [1, 14].
BwpShape MakeBwpShape(int mu, int eta, const GridSpec& spec);

enum class Tier : std::uint8_t { kBt = 0, kEt = 1 };

std::string_view TierName(Tier tier);

struct BwpAllocation {
  int ue_index = 0;
  Tier tier = Tier::kBt;
  BwpShape shape;
  int time_offset_units = 0;
  int freq_offset_units = 0;

  int time_end() const { return time_offset_units + shape.time_len_units; }
  int freq_end() const { return freq_offset_units + shape.freq_width_units; }
  friend bool operator==(const BwpAllocation&, const BwpAllocation&) = default;
};

struct Placement {
  int time_offset = 0;
  int freq_offset = 0;
  friend bool operator==(const Placement&, const Placement&) = default;
};

// True iff every rectangle lies inside the grid and no two rectangles share
// a cell. In-bounds packing implies both the frame-duration and the
// system-bandwidth budgets.
bool ValidateAllocationSet(std::span<const BwpAllocation> allocs,
                           const GridDims& dims);

// Occupancy map of one frame with owner/tier labels, plus the per-row
// boundary line of allocated area.
//
// Cell codes: 0 is idle; otherwise bits 0..6 hold owner + 1 and bit 7 is set
// for the enhancement tier.
class ResourceGrid {
 public:
  ResourceGrid() = default;
  explicit ResourceGrid(const GridDims& dims);

  const GridDims& dims() const { return dims_; }

  // First-fit position for `shape`: smallest time offset, then smallest
  // frequency offset. Empty when the shape fits nowhere.
  std::optional<Placement> FindPlacement(const BwpShape& shape) const;

  // Places at FindPlacement and returns the allocation, or nullopt.
  std::optional<BwpAllocation> Place(int ue_index, Tier tier,
                                     const BwpShape& shape);

  // Marks an explicit rectangle. Throws ContractError if it is out of bounds
  // or overlaps.
  void Occupy(const BwpAllocation& alloc);

  bool IsFree(int time, int freq, int time_len, int freq_width) const;
  bool occupied(int time, int freq) const { return code(time, freq) != 0; }
  std::uint8_t code(int time, int freq) const {
    return cells_[static_cast<std::size_t>(freq) * dims_.n_time_units + time];
  }
  // Row-major codes, freq rows of n_time_units entries.
  std::span<const std::uint8_t> codes() const { return cells_; }

  int free_cells() const { return dims_.num_cells() - used_cells_; }
  // Per frequency row: one past the last occupied time index (0 if empty).
  std::span<const int> frontier() const { return frontier_; }

 private:
  void RebuildPrefix();
  int CountOccupied(int time, int freq, int time_len, int freq_width) const;

  GridDims dims_;
  std::vector<std::uint8_t> cells_;
  // (n_freq + 1) x (n_time + 1) summed-area table of occupancy.
  std::vector<int> prefix_;
  std::vector<int> frontier_;
  int used_cells_ = 0;
};

std::uint8_t EncodeCell(int ue_index, Tier tier);

}  // namespace xrsched

#endif  // XRSCHED_GRID_MODEL_HPP_
