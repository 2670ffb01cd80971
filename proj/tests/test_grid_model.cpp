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

#include <gtest/gtest.h>

#include <optional>
#include <vector>

#include "xrsched/errors.hpp"
#include "xrsched/rng.hpp"

namespace xrsched {
namespace {

TEST(GridModel, MinimumResourceBlockExtents) {
  GridSpec spec;
  // 1 ms slot of 14 symbols at 2^6 x 15 kHz spacing.
  EXPECT_DOUBLE_EQ(MinSymbolDurationMs(spec), 1.0 / 896.0);
  // 12 subcarriers of 2^4 x 15 kHz.
  EXPECT_DOUBLE_EQ(MinBandwidthKhz(spec), 2880.0);
}

TEST(GridModel, ReferenceGridIs56By24) {
  const GridDims d = DeriveGrid(GridSpec{});
  EXPECT_EQ(d.n_time_units, 56);
  EXPECT_EQ(d.n_freq_units, 24);
  EXPECT_EQ(d.num_cells(), 1344);
  EXPECT_NEAR(d.rb_size_shz, 2880.0 / 896.0, 1e-12);
}

TEST(GridModel, SingleNumerologyGrid) {
  GridSpec spec{5, 5, 1.0, 5760.0 * 4};
  const GridDims d = DeriveGrid(spec);
  EXPECT_EQ(d.n_time_units, 14 * 32);
  EXPECT_EQ(d.n_freq_units, 4);
}

TEST(GridModel, NonIntegerSpanNamesTheField) {
  GridSpec spec;
  spec.frame_duration_ms = 0.063;
  try {
    DeriveGrid(spec);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("frame_duration_ms"), std::string::npos);
  }
  spec = GridSpec{};
  spec.system_bandwidth_khz = 70000.0;
  try {
    DeriveGrid(spec);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("system_bandwidth_khz"), std::string::npos);
  }
}

TEST(GridModel, InvertedNumerologyRangeRejected) {
  EXPECT_THROW(DeriveGrid(GridSpec{6, 4, 0.0625, 69120.0}), ConfigError);
}

TEST(GridModel, BwpAreaIsFourEtaForEveryNumerology) {
  const GridSpec spec;
  for (int mu : {4, 5, 6}) {
    for (int eta : {2, 4, 7}) {
      const BwpShape s = MakeBwpShape(mu, eta, spec);
      EXPECT_EQ(s.area_rbs(), 4 * eta) << "mu=" << mu << " eta=" << eta;
      EXPECT_EQ(s.freq_width_units, 1 << (mu - 4));
      EXPECT_EQ(s.time_len_units, eta * (1 << (6 - mu)));
    }
  }
  EXPECT_EQ(MakeBwpShape(5, 2, spec).area_rbs(), 8);
}

TEST(GridModel, BwpDomainErrors) {
  const GridSpec spec;
  EXPECT_THROW(MakeBwpShape(3, 2, spec), DomainError);
  EXPECT_THROW(MakeBwpShape(7, 2, spec), DomainError);
  EXPECT_THROW(MakeBwpShape(5, 0, spec), MinislotError);
  EXPECT_THROW(MakeBwpShape(5, 15, spec), MinislotError);
  EXPECT_NO_THROW(MakeBwpShape(5, 14, spec));
}

TEST(GridModel, FirstPlacementOnEmptyGridIsOrigin) {
  ResourceGrid g(DeriveGrid(GridSpec{}));
  const auto p = g.FindPlacement(MakeBwpShape(6, 7, GridSpec{}));
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(*p, (Placement{0, 0}));
}

TEST(GridModel, FullGridHasNoPlacement) {
  const GridDims d = DeriveGrid(GridSpec{});
  ResourceGrid g(d);
  g.Occupy(BwpAllocation{0, Tier::kBt, BwpShape{d.n_time_units, d.n_freq_units, 4, 14}, 0, 0});
  EXPECT_EQ(g.free_cells(), 0);
  EXPECT_FALSE(g.FindPlacement(MakeBwpShape(6, 2, GridSpec{})).has_value());
}

TEST(GridModel, OccupyRejectsOverlapAndOutOfBounds) {
  ResourceGrid g(GridDims{8, 4, 1.0});
  const BwpShape s{4, 2, 4, 1};
  g.Occupy(BwpAllocation{0, Tier::kBt, s, 0, 0});
  EXPECT_THROW(g.Occupy(BwpAllocation{1, Tier::kBt, s, 2, 1}), ContractError);
  EXPECT_THROW(g.Occupy(BwpAllocation{1, Tier::kBt, s, 6, 0}), ContractError);
  EXPECT_NO_THROW(g.Occupy(BwpAllocation{1, Tier::kEt, s, 4, 0}));
}

TEST(GridModel, CellCodesCarryOwnerAndTier) {
  ResourceGrid g(GridDims{4, 2, 1.0});
  g.Occupy(BwpAllocation{2, Tier::kEt, BwpShape{1, 1, 4, 1}, 3, 1});
  EXPECT_EQ(g.code(3, 1), EncodeCell(2, Tier::kEt));
  EXPECT_EQ(EncodeCell(2, Tier::kEt), 0x83);
  EXPECT_EQ(EncodeCell(0, Tier::kBt), 0x01);
  EXPECT_EQ(g.code(0, 0), 0);
  EXPECT_EQ(g.frontier()[1], 4);
  EXPECT_EQ(g.frontier()[0], 0);
}

TEST(GridModel, ValidateAllocationSetDetectsOverlap) {
  const GridDims d{8, 4, 1.0};
  const BwpShape s{4, 2, 4, 1};
  std::vector<BwpAllocation> ok{{0, Tier::kBt, s, 0, 0}, {1, Tier::kBt, s, 4, 0},
                                {0, Tier::kEt, s, 0, 2}};
  EXPECT_TRUE(ValidateAllocationSet(ok, d));
  std::vector<BwpAllocation> clash{{0, Tier::kBt, s, 0, 0}, {1, Tier::kBt, s, 3, 1}};
  EXPECT_FALSE(ValidateAllocationSet(clash, d));
  std::vector<BwpAllocation> outside{{0, Tier::kBt, s, 5, 0}};
  EXPECT_FALSE(ValidateAllocationSet(outside, d));
  EXPECT_TRUE(ValidateAllocationSet({}, d));
}

// Cell-by-cell scan in the documented first-fit order.
std::optional<Placement> BruteForcePlacement(const std::vector<std::vector<bool>>& busy, int n_t,
                                             int n_f, const BwpShape& s) {
  for (int t = 0; t + s.time_len_units <= n_t; ++t) {
    for (int f = 0; f + s.freq_width_units <= n_f; ++f) {
      bool free = true;
      for (int dt = 0; dt < s.time_len_units && free; ++dt) {
        for (int df = 0; df < s.freq_width_units && free; ++df) {
          free = !busy[static_cast<std::size_t>(t + dt)][static_cast<std::size_t>(f + df)];
        }
      }
      if (free) return Placement{t, f};
    }
  }
  return std::nullopt;
}

TEST(GridModelProperty, PlacementMatchesBruteForceOnSmallGrids) {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n_t = 1 + static_cast<int>(rng.UniformIndex(16));
    const int n_f = 1 + static_cast<int>(rng.UniformIndex(8));
    ResourceGrid g(GridDims{n_t, n_f, 1.0});
    std::vector<std::vector<bool>> busy(static_cast<std::size_t>(n_t),
                                        std::vector<bool>(static_cast<std::size_t>(n_f), false));
    for (int step = 0; step < 40; ++step) {
      BwpShape s{1 + static_cast<int>(rng.UniformIndex(6)),
                 1 + static_cast<int>(rng.UniformIndex(3)), 4, 1};
      const auto expected = BruteForcePlacement(busy, n_t, n_f, s);
      const auto got = g.FindPlacement(s);
      ASSERT_EQ(got.has_value(), expected.has_value());
      if (!got) continue;
      ASSERT_EQ(*got, *expected);
      const auto alloc = g.Place(step % 3, Tier::kBt, s);
      ASSERT_TRUE(alloc.has_value());
      for (int dt = 0; dt < s.time_len_units; ++dt) {
        for (int df = 0; df < s.freq_width_units; ++df) {
          busy[static_cast<std::size_t>(got->time_offset + dt)]
              [static_cast<std::size_t>(got->freq_offset + df)] = true;
        }
      }
    }
    int used = 0;
    for (int t = 0; t < n_t; ++t) {
      for (int f = 0; f < n_f; ++f) {
        ASSERT_EQ(g.occupied(t, f), busy[static_cast<std::size_t>(t)][static_cast<std::size_t>(f)]);
        used += g.occupied(t, f);
      }
    }
    EXPECT_EQ(g.free_cells(), n_t * n_f - used);
  }
}

TEST(GridModelProperty, PlacedAllocationsAlwaysValidate) {
  Rng rng(99);
  const GridSpec spec;
  const GridDims d = DeriveGrid(spec);
  for (int trial = 0; trial < 50; ++trial) {
    ResourceGrid g(d);
    std::vector<BwpAllocation> placed;
    for (int k = 0; k < 200; ++k) {
      const int mu = 4 + static_cast<int>(rng.UniformIndex(3));
      const int eta = std::vector<int>{2, 4, 7}[rng.UniformIndex(3)];
      if (auto a = g.Place(k % 4, k % 2 ? Tier::kEt : Tier::kBt, MakeBwpShape(mu, eta, spec))) {
        placed.push_back(*a);
      }
    }
    EXPECT_TRUE(ValidateAllocationSet(placed, d));
    int area = 0;
    for (const auto& a : placed) area += a.shape.area_rbs();
    EXPECT_EQ(area, d.num_cells() - g.free_cells());
  }
}

}  // namespace
}  // namespace xrsched
