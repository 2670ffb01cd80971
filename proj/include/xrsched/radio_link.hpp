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

#ifndef XRSCHED_RADIO_LINK_HPP_
#define XRSCHED_RADIO_LINK_HPP_

namespace xrsched {

inline constexpr double kSpeedOfLight = 3e8;

enum class PsdSplit { kEqual };

// Link-budget constants shared by all UEs of a scenario.
//
// `link_loss_db` is an aggregate SNR loss (noise figure, implementation and
// feeder losses) applied on top of the antenna/path/PSD budget. The default
// profile carries 30 dB, which puts a 200 m UE at an SNR of about 2.28 with
// four UEs sharing the transmit PSD. Set it to 0 for the bare budget.
struct LinkParams {
  double carrier_frequency_hz = 28e9;
  double tx_gain_dbi = 15.0;
  double rx_gain_dbi = 10.0;
  double noise_psd_dbm_hz = -169.0;
  double total_tx_psd_dbm_hz = -47.0;
  double link_loss_db = 30.0;
  PsdSplit psd_split = PsdSplit::kEqual;

  friend bool operator==(const LinkParams&, const LinkParams&) = default;
};

struct LinkState {
  double distance_m = 0.0;
  double channel_power_gain = 0.0;
  double snr_linear = 0.0;
  // log2(1 + snr), bits/s/Hz.
  double spectral_efficiency = 0.0;
};

double DbToLinear(double db);
double LinearToDb(double linear);
// dBm (or dBm/Hz) to W (or W/Hz).
double DbmToWatt(double dbm);
double WattToDbm(double watt);

// Free-space large-scale gain (c / (4 pi f_c))^2 / d^2. Throws DomainError
// for d < 1 m or f_c <= 0.
double PathGain(double distance_m, double carrier_frequency_hz);

// Transmit PSD of one UE, W/Hz, under the configured split.
double PerUePsdWattPerHz(const LinkParams& link, int n_ues);

// G_t * G_r * gain * p_n / noise / loss, all in linear units.
double Snr(const LinkParams& link, double channel_gain, double per_ue_psd_w_hz);

// Bits carried in one frame by a time-frequency area (s * Hz) at a given SNR.
double BwpRateBits(double area_shz, double snr_linear);

LinkState MakeLinkState(const LinkParams& link, double distance_m, int n_ues);

}  // namespace xrsched

#endif  // XRSCHED_RADIO_LINK_HPP_
