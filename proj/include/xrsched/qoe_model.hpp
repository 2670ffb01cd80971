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

#ifndef XRSCHED_QOE_MODEL_HPP_
#define XRSCHED_QOE_MODEL_HPP_

namespace xrsched {

// How per-frame bits are turned into a coverage-normalized rate.
enum class RateNormalization {
  kPerSecond,  // bits / (T * C)
  kPerFrame,   // bits / C
};

// Two-tier 360-degree video QoE parameters of one UE.
struct QoeParams {
  double a = 0.0;
  double b = 1.0;
  double fov_prob = 0.8;
  double bt_coverage_deg2 = 360.0 * 180.0;
  double et_coverage_deg2 = 135.0 * 135.0;
  double min_qoe = 4.9;
  double peak_factor = 5.0;
  // Logarithm base of Q(x) = a + b log(x); 0 selects the natural log.
  double log_base = 0.0;

  double peak_qoe() const { return peak_factor * min_qoe; }
};

// a + b log(x). Throws UndefinedQoeError for x <= 0.
double QoeFn(double rate, const QoeParams& params);

double EffectiveRate(double bits_per_frame, double frame_duration_s,
                     double coverage_deg2,
                     RateNormalization norm = RateNormalization::kPerSecond);

// (1 - rho) q_bt + rho q_xi.
double CombinedQoe(double q_bt, double q_xi, double fov_prob);

struct QoeReport {
  double q_bt = 0.0;
  double q_combined = 0.0;
  double effective_bt_rate = 0.0;
  double effective_total_rate = 0.0;
  // C1 and C2 both hold.
  bool served = false;
  // False when the BT rate is zero and Q was not evaluated.
  bool evaluated = false;
};

bool MeetsMinimum(double q_bt, const QoeParams& params);
bool WithinPeak(double q_bt, const QoeParams& params);

// Evaluates a UE from its per-frame tier rates. With `include_et == false`
// the ET term is dropped and q_combined == q_bt (free-viewpoint delivery).
// A zero BT rate yields an unevaluated, unserved report.
QoeReport EvaluateQoe(double bt_bits, double et_bits, double frame_duration_s,
                      const QoeParams& params,
                      RateNormalization norm = RateNormalization::kPerSecond,
                      bool include_et = true);

}  // namespace xrsched

#endif  // XRSCHED_QOE_MODEL_HPP_
