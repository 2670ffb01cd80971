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

#include "xrsched/radio_link.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "xrsched/errors.hpp"
#include "xrsched/grid_model.hpp"
#include "xrsched/rng.hpp"

namespace xrsched {
namespace {

constexpr double kPi = 3.14159265358979323846;

TEST(RadioLink, PathGainReferenceValues) {
  EXPECT_NEAR(PathGain(1.0, 28e9), 7.2696e-7, 7.2696e-7 * 1e-4);
  EXPECT_NEAR(PathGain(10.0, 28e9), 7.2696e-9, 7.2696e-9 * 1e-4);
  EXPECT_NEAR(PathGain(200.0, 28e9), 1.8174e-11, 1.8174e-11 * 1e-4);
}

TEST(RadioLink, PathGainRejectsSubMetreDistance) {
  EXPECT_THROW(PathGain(0.5, 28e9), DomainError);
  EXPECT_THROW(PathGain(0.0, 28e9), DomainError);
  EXPECT_THROW(PathGain(10.0, 0.0), DomainError);
}

TEST(RadioLink, SnrAt200MetresMatchesHandBudget) {
  // Hand budget: wavelength 3e8/28e9, 25 dBi total antenna gain,
  // -47 dBm/Hz split four ways, -169 dBm/Hz noise, 30 dB aggregate loss.
  const double lambda = 3e8 / 28e9;
  const double gain = std::pow(lambda / (4.0 * kPi * 200.0), 2.0);
  const double p_n = std::pow(10.0, -7.7) / 4.0;
  const double noise = std::pow(10.0, -19.9);
  const double hand = std::pow(10.0, 2.5) * gain * p_n / noise / 1000.0;

  const LinkState s = MakeLinkState(LinkParams{}, 200.0, 4);
  EXPECT_NEAR(s.snr_linear, hand, hand * 1e-12);
  EXPECT_NEAR(s.snr_linear, 2.277, 2.277 * 0.005);
  EXPECT_NEAR(PerUePsdWattPerHz(LinkParams{}, 4), 4.988e-9, 4.988e-9 * 1e-3);
}

TEST(RadioLink, UnitGainIdentity) {
  LinkParams link;
  link.tx_gain_dbi = 0.0;
  link.rx_gain_dbi = 0.0;
  link.link_loss_db = 0.0;
  const double p_n = 1e-9;
  const double gain = DbmToWatt(link.noise_psd_dbm_hz) / p_n;
  EXPECT_NEAR(Snr(link, gain, p_n), 1.0, 1e-12);
}

TEST(RadioLink, SnrIsLinearInPsd) {
  const LinkParams link;
  const double g = PathGain(50.0, link.carrier_frequency_hz);
  EXPECT_DOUBLE_EQ(Snr(link, g, 2e-9), 2.0 * Snr(link, g, 1e-9));
}

TEST(RadioLink, BitsPerBwp) {
  const double rb = 2880.0 / 896.0;
  EXPECT_EQ(BwpRateBits(0.0, 2.277), 0.0);
  EXPECT_NEAR(BwpRateBits(8 * rb, 2.277), 44.0, 44.0 * 0.005);
  EXPECT_NEAR(BwpRateBits(36 * rb, 2.277), 198.2, 198.2 * 0.005);
  EXPECT_THROW(BwpRateBits(-1.0, 1.0), DomainError);
}

TEST(RadioLinkProperty, RateAdditiveAndMonotone) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.Uniform(0.0, 500.0);
    const double b = rng.Uniform(0.0, 500.0);
    const double snr = rng.Uniform(0.0, 1e4);
    EXPECT_NEAR(BwpRateBits(a + b, snr), BwpRateBits(a, snr) + BwpRateBits(b, snr),
                1e-9 * BwpRateBits(a + b, snr) + 1e-12);
    EXPECT_LT(BwpRateBits(a, snr), BwpRateBits(a + 1.0, snr));
    EXPECT_LT(BwpRateBits(a + 1.0, snr), BwpRateBits(a + 1.0, snr + 1.0));
    EXPECT_EQ(BwpRateBits(a, 0.0), 0.0);
  }
}

TEST(RadioLinkProperty, UnitAuditPerFrameVersusPerSecond) {
  const GridDims d = DeriveGrid(GridSpec{});
  const double rb_ms_khz = (1.0 / 896.0) * 2880.0;  // ms * kHz == s * Hz
  EXPECT_NEAR(d.rb_size_shz, rb_ms_khz, 1e-12 * rb_ms_khz);
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const double snr = rng.Uniform(0.01, 1e3);
    const int rbs = 1 + static_cast<int>(rng.UniformIndex(1344));
    const double per_frame = BwpRateBits(rbs * d.rb_size_shz, snr);
    // Per-second path: bandwidth share times spectral efficiency, then
    // scaled by the fraction of the frame the area represents.
    const double bw_hz = rbs * 2880e3;
    const double per_second = bw_hz * std::log2(1.0 + snr) * (1.0 / 896.0) * 1e-3;
    EXPECT_NEAR(per_frame, per_second, 1e-12 * per_second);
  }
}

TEST(RadioLinkProperty, DecibelRoundTrip) {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double db = rng.Uniform(-200.0, 100.0);
    EXPECT_NEAR(LinearToDb(DbToLinear(db)), db, 1e-12 * std::max(1.0, std::abs(db)));
    EXPECT_NEAR(WattToDbm(DbmToWatt(db)), db, 1e-12 * std::max(1.0, std::abs(db)));
    const double lin = DbToLinear(db);
    EXPECT_NEAR(DbToLinear(LinearToDb(lin)), lin, 1e-12 * lin);
  }
}

}  // namespace
}  // namespace xrsched
