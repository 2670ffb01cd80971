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

#include <cmath>
#include <numbers>
#include <string>

#include "xrsched/errors.hpp"

namespace xrsched {

double DbToLinear(double db) { return std::pow(10.0, db / 10.0); }

double LinearToDb(double linear) { return 10.0 * std::log10(linear); }

double DbmToWatt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double WattToDbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

double PathGain(double distance_m, double carrier_frequency_hz) {
  if (!(distance_m >= 1.0)) {
    throw DomainError("distance " + std::to_string(distance_m) +
                      " m is below the 1 m minimum");
  }
  if (!(carrier_frequency_hz > 0.0)) {
    throw DomainError("carrier frequency must be positive");
  }
  const double wavelength_term =
      kSpeedOfLight / (4.0 * std::numbers::pi * carrier_frequency_hz);
  return wavelength_term * wavelength_term / (distance_m * distance_m);
}

double PerUePsdWattPerHz(const LinkParams& link, int n_ues) {
  if (n_ues < 1) throw DomainError("PSD split needs at least one UE");
  switch (link.psd_split) {
    case PsdSplit::kEqual:
      return DbmToWatt(link.total_tx_psd_dbm_hz) / n_ues;
  }
  throw InternalError("unknown PSD split policy");
}

double Snr(const LinkParams& link, double channel_gain,
           double per_ue_psd_w_hz) {
  if (!(channel_gain > 0.0) || !(per_ue_psd_w_hz > 0.0)) {
    throw DomainError("SNR inputs must be positive");
  }
  const double antenna = DbToLinear(link.tx_gain_dbi + link.rx_gain_dbi);
  const double noise = DbmToWatt(link.noise_psd_dbm_hz);
  return antenna * channel_gain * per_ue_psd_w_hz / noise /
         DbToLinear(link.link_loss_db);
}

double BwpRateBits(double area_shz, double snr_linear) {
  if (area_shz < 0.0) throw DomainError("negative time-frequency area");
  return area_shz * std::log2(1.0 + snr_linear);
}

LinkState MakeLinkState(const LinkParams& link, double distance_m, int n_ues) {
  LinkState s;
  s.distance_m = distance_m;
  s.channel_power_gain = PathGain(distance_m, link.carrier_frequency_hz);
  s.snr_linear = Snr(link, s.channel_power_gain, PerUePsdWattPerHz(link, n_ues));
  s.spectral_efficiency = std::log2(1.0 + s.snr_linear);
  return s;
}

}  // namespace xrsched
