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

#include "xrsched/qoe_model.hpp"

#include <cmath>
#include <string>

#include "xrsched/errors.hpp"

namespace xrsched {

double QoeFn(double rate, const QoeParams& params) {
  if (!(rate > 0.0)) {
    throw UndefinedQoeError("QoE is undefined for rate " + std::to_string(rate));
  }
  double log_rate = std::log(rate);
  if (params.log_base > 0.0) log_rate /= std::log(params.log_base);
  return params.a + params.b * log_rate;
}

double EffectiveRate(double bits_per_frame, double frame_duration_s,
                     double coverage_deg2, RateNormalization norm) {
  if (bits_per_frame == 0.0) return 0.0;
  if (norm == RateNormalization::kPerFrame) return bits_per_frame / coverage_deg2;
  return bits_per_frame / (frame_duration_s * coverage_deg2);
}

double CombinedQoe(double q_bt, double q_xi, double fov_prob) {
  if (fov_prob < 0.0 || fov_prob > 1.0) {
    throw DomainError("FoV probability outside [0, 1]");
  }
  return (1.0 - fov_prob) * q_bt + fov_prob * q_xi;
}

bool MeetsMinimum(double q_bt, const QoeParams& params) {
  return q_bt >= params.min_qoe;
}

bool WithinPeak(double q_bt, const QoeParams& params) {
  return q_bt <= params.peak_qoe();
}

QoeReport EvaluateQoe(double bt_bits, double et_bits, double frame_duration_s,
                      const QoeParams& params, RateNormalization norm,
                      bool include_et) {
  QoeReport r;
  r.effective_bt_rate =
      EffectiveRate(bt_bits, frame_duration_s, params.bt_coverage_deg2, norm);
  const double et_rate =
      include_et ? EffectiveRate(et_bits, frame_duration_s,
                                 params.et_coverage_deg2, norm)
                 : 0.0;
  r.effective_total_rate = r.effective_bt_rate + et_rate;
  if (!(r.effective_bt_rate > 0.0)) return r;
  r.evaluated = true;
  r.q_bt = QoeFn(r.effective_bt_rate, params);
  if (include_et) {
    const double q_xi = QoeFn(r.effective_total_rate, params);
    r.q_combined = CombinedQoe(r.q_bt, q_xi, params.fov_prob);
  } else {
    r.q_combined = r.q_bt;
  }
  r.served = MeetsMinimum(r.q_bt, params) && WithinPeak(r.q_bt, params);
  return r;
}

}  // namespace xrsched
