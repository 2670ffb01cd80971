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

#ifndef XRSCHED_Q_NETWORK_HPP_
#define XRSCHED_Q_NETWORK_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "xrsched/errors.hpp"
#include "xrsched/rng.hpp"

namespace xrsched {

struct ConvLayerSpec {
  int filters = 16;
  int kernel = 3;
  int stride = 1;
  friend bool operator==(const ConvLayerSpec&, const ConvLayerSpec&) = default;
};

enum class Activation { kRelu, kIdentity };

// Grid map -> convolutions (same padding) -> flatten ++ aux vector -> dense
// hidden layers -> one linear output per action.
struct QNetworkConfig {
  int in_channels = 3;
  int in_height = 0;
  int in_width = 0;
  int aux_input_dim = 0;
  std::vector<ConvLayerSpec> conv_layers{{16, 3, 1}, {32, 3, 1}};
  std::vector<int> dense_layers{128};
  int output_dim = 9;
  Activation activation = Activation::kRelu;

  friend bool operator==(const QNetworkConfig&, const QNetworkConfig&) = default;
};

// Heap storage with Eigen's alignment, so vectorized kernels round the same way
// wherever the buffer lands.
template <typename T>
using AlignedVector = std::vector<T, Eigen::aligned_allocator<T>>;

// A minibatch laid out sample-major: grid is B x (C*H*W), aux is B x A.
template <typename T>
struct NetInput {
  int batch = 0;
  std::vector<T> grid;
  std::vector<T> aux;
};

template <typename T>
class QNetwork {
 public:
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using MapMat = Eigen::Map<Mat>;
  using CMapMat = Eigen::Map<const Mat>;
  using CMapVec = Eigen::Map<const Vec>;

  struct ConvGeom {
    int in_c, in_h, in_w;
    int out_c, out_h, out_w;
    int kernel, stride, pad;
    std::size_t w_off, b_off;
    int k_dim() const { return in_c * kernel * kernel; }
    int out_plane() const { return out_h * out_w; }
  };
  struct DenseGeom {
    int in, out;
    std::size_t w_off, b_off;
    bool hidden;
  };

  // Per-call scratch. Holds every activation needed by Backward.
  struct Workspace {
    int batch = 0;
    std::vector<Mat> cols_t;        // per conv: (B*Ho*Wo) x K
    std::vector<std::vector<T>> conv_pre;  // per conv: B x F x Ho x Wo
    std::vector<std::vector<T>> conv_act;
    std::vector<Mat> dense_in;      // per dense: in x B
    std::vector<Mat> dense_pre;     // per dense: out x B
    Mat output;                     // output_dim x B
    // Scratch reused across calls to avoid large reallocations.
    Mat conv_out_t;
    Mat dz, dx;
    Mat d_out_t, d_cols_t;
    std::vector<T> d_act;
  };

  explicit QNetwork(QNetworkConfig config) : config_(std::move(config)) {
    const auto& c = config_;
    if (c.in_channels < 1 || c.in_height < 1 || c.in_width < 1 || c.aux_input_dim < 0 ||
        c.output_dim < 1) {
      throw ConfigError("network input/output dimensions must be positive");
    }
    std::size_t off = 0;
    int ch = c.in_channels, h = c.in_height, w = c.in_width;
    for (const auto& spec : c.conv_layers) {
      if (spec.filters < 1 || spec.kernel < 1 || spec.stride < 1) {
        throw ConfigError("conv layer sizes must be positive");
      }
      ConvGeom g;
      g.in_c = ch;
      g.in_h = h;
      g.in_w = w;
      g.kernel = spec.kernel;
      g.stride = spec.stride;
      g.pad = spec.kernel / 2;
      g.out_c = spec.filters;
      g.out_h = (h + 2 * g.pad - spec.kernel) / spec.stride + 1;
      g.out_w = (w + 2 * g.pad - spec.kernel) / spec.stride + 1;
      if (g.out_h < 1 || g.out_w < 1) throw ConfigError("conv layer collapses the grid");
      g.w_off = off;
      off += static_cast<std::size_t>(g.out_c) * g.k_dim();
      g.b_off = off;
      off += static_cast<std::size_t>(g.out_c);
      conv_.push_back(g);
      ch = g.out_c;
      h = g.out_h;
      w = g.out_w;
    }
    flat_dim_ = ch * h * w;
    int in = flat_dim_ + c.aux_input_dim;
    std::vector<int> widths = c.dense_layers;
    widths.push_back(c.output_dim);
    for (std::size_t i = 0; i < widths.size(); ++i) {
      if (widths[i] < 1) throw ConfigError("dense layer widths must be positive");
      DenseGeom d;
      d.in = in;
      d.out = widths[i];
      d.hidden = i + 1 < widths.size();
      d.w_off = off;
      off += static_cast<std::size_t>(d.out) * d.in;
      d.b_off = off;
      off += static_cast<std::size_t>(d.out);
      dense_.push_back(d);
      in = d.out;
    }
    num_params_ = off;
  }

  const QNetworkConfig& config() const { return config_; }
  std::size_t num_params() const { return num_params_; }
  int grid_size() const { return config_.in_channels * config_.in_height * config_.in_width; }
  const std::vector<ConvGeom>& conv_geometry() const { return conv_; }
  const std::vector<DenseGeom>& dense_geometry() const { return dense_; }

  // Fan-in scaled uniform weights, U(-1/sqrt(fan_in), 1/sqrt(fan_in)); the
  // same bound for biases.
  std::vector<T> InitParams(Rng& rng) const {
    std::vector<T> p(num_params_);
    auto fill = [&](std::size_t from, std::size_t count, int fan_in) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (std::size_t i = 0; i < count; ++i) p[from + i] = static_cast<T>(rng.Uniform(-bound, bound));
    };
    for (const auto& g : conv_) {
      fill(g.w_off, static_cast<std::size_t>(g.out_c) * g.k_dim(), g.k_dim());
      fill(g.b_off, static_cast<std::size_t>(g.out_c), g.k_dim());
    }
    for (const auto& d : dense_) {
      fill(d.w_off, static_cast<std::size_t>(d.out) * d.in, d.in);
      fill(d.b_off, static_cast<std::size_t>(d.out), d.in);
    }
    return p;
  }

  // Returns the output_dim x B value matrix (also kept in ws.output).
  const Mat& Forward(std::span<const T> params, const NetInput<T>& x, Workspace& ws) const {
    CheckParams(params);
    const int B = x.batch;
    if (B < 1 || x.grid.size() != static_cast<std::size_t>(B) * grid_size() ||
        x.aux.size() != static_cast<std::size_t>(B) * config_.aux_input_dim) {
      throw ConfigError("network input does not match the configured dimensions");
    }
    ws.batch = B;
    ws.cols_t.resize(conv_.size());
    ws.conv_pre.resize(conv_.size());
    ws.conv_act.resize(conv_.size());
    ws.dense_in.resize(dense_.size());
    ws.dense_pre.resize(dense_.size());

    const T* in = x.grid.data();
    for (std::size_t l = 0; l < conv_.size(); ++l) {
      const ConvGeom& g = conv_[l];
      Im2ColT(g, B, in, ws.cols_t[l]);
      const int n = B * g.out_plane();
      CMapMat w(params.data() + g.w_off, g.out_c, g.k_dim());
      CMapVec b(params.data() + g.b_off, g.out_c);
      Mat& out_t = ws.conv_out_t;
      out_t.resize(n, g.out_c);
      out_t.noalias() = ws.cols_t[l] * w.transpose();
      out_t.rowwise() += b.transpose();
      auto& pre = ws.conv_pre[l];
      auto& act = ws.conv_act[l];
      pre.resize(static_cast<std::size_t>(n) * g.out_c);
      act.resize(pre.size());
      const int plane = g.out_plane();
      for (int bi = 0; bi < B; ++bi) {
        for (int f = 0; f < g.out_c; ++f) {
          const T* src = out_t.data() + static_cast<std::size_t>(f) * n +
                         static_cast<std::size_t>(bi) * plane;
          const std::size_t dst = (static_cast<std::size_t>(bi) * g.out_c + f) * plane;
          for (int p = 0; p < plane; ++p) {
            pre[dst + p] = src[p];
            act[dst + p] = Activate(src[p]);
          }
        }
      }
      in = act.data();
    }

    // First dense input: flattened features followed by the aux vector.
    Mat& x0 = ws.dense_in[0];
    x0.resize(flat_dim_ + config_.aux_input_dim, B);
    for (int bi = 0; bi < B; ++bi) {
      std::copy_n(in + static_cast<std::size_t>(bi) * flat_dim_, flat_dim_, x0.col(bi).data());
      std::copy_n(x.aux.data() + static_cast<std::size_t>(bi) * config_.aux_input_dim,
                  config_.aux_input_dim, x0.col(bi).data() + flat_dim_);
    }
    for (std::size_t l = 0; l < dense_.size(); ++l) {
      const DenseGeom& d = dense_[l];
      CMapMat w(params.data() + d.w_off, d.out, d.in);
      CMapVec b(params.data() + d.b_off, d.out);
      Mat& z = ws.dense_pre[l];
      z.noalias() = w * ws.dense_in[l];
      z.colwise() += b;
      if (d.hidden) {
        ws.dense_in[l + 1] = z.unaryExpr([this](T v) { return Activate(v); });
      } else {
        ws.output = z;
      }
    }
    return ws.output;
  }

  // Accumulates dLoss/dparams into `grad` given dLoss/doutput (output_dim x B)
  // for the batch last passed through Forward with the same workspace.
  void Backward(std::span<const T> params, Workspace& ws, const Mat& d_out,
                std::span<T> grad) const {
    CheckParams(params);
    if (grad.size() != num_params_) throw ConfigError("gradient buffer has the wrong size");
    const int B = ws.batch;
    Mat& dz = ws.dz;
    dz = d_out;
    for (std::size_t li = dense_.size(); li-- > 0;) {
      const DenseGeom& d = dense_[li];
      if (d.hidden) {
        const Mat& z = ws.dense_pre[li];
        for (Eigen::Index i = 0; i < dz.size(); ++i) dz.data()[i] *= Derivative(z.data()[i]);
      }
      MapMat gw(grad.data() + d.w_off, d.out, d.in);
      Eigen::Map<Vec> gb(grad.data() + d.b_off, d.out);
      gw.noalias() += dz * ws.dense_in[li].transpose();
      gb += dz.rowwise().sum();
      if (li == 0 && conv_.empty()) break;
      CMapMat w(params.data() + d.w_off, d.out, d.in);
      ws.dx.resize(d.in, B);
      ws.dx.noalias() = w.transpose() * dz;
      dz.swap(ws.dx);
    }
    if (conv_.empty()) return;

    // dz now holds d(first dense input); keep the flattened conv part.
    std::vector<T>& d_act = ws.d_act;
    d_act.resize(static_cast<std::size_t>(B) * flat_dim_);
    for (int bi = 0; bi < B; ++bi) {
      std::copy_n(dz.col(bi).data(), flat_dim_, d_act.data() + static_cast<std::size_t>(bi) * flat_dim_);
    }
    for (std::size_t li = conv_.size(); li-- > 0;) {
      const ConvGeom& g = conv_[li];
      const int plane = g.out_plane();
      const int n = B * plane;
      const auto& pre = ws.conv_pre[li];
      Mat& d_out_t = ws.d_out_t;
      d_out_t.resize(n, g.out_c);
      for (int bi = 0; bi < B; ++bi) {
        for (int f = 0; f < g.out_c; ++f) {
          const std::size_t src = (static_cast<std::size_t>(bi) * g.out_c + f) * plane;
          T* dst = d_out_t.data() + static_cast<std::size_t>(f) * n + static_cast<std::size_t>(bi) * plane;
          for (int p = 0; p < plane; ++p) dst[p] = d_act[src + p] * Derivative(pre[src + p]);
        }
      }
      MapMat gw(grad.data() + g.w_off, g.out_c, g.k_dim());
      Eigen::Map<Vec> gb(grad.data() + g.b_off, g.out_c);
      gw.noalias() += d_out_t.transpose() * ws.cols_t[li];
      gb += d_out_t.colwise().sum().transpose();
      if (li == 0) break;
      CMapMat w(params.data() + g.w_off, g.out_c, g.k_dim());
      Mat& d_cols_t = ws.d_cols_t;
      d_cols_t.resize(n, g.k_dim());
      d_cols_t.noalias() = d_out_t * w;
      d_act.assign(static_cast<std::size_t>(B) * g.in_c * g.in_h * g.in_w, T(0));
      Col2ImT(g, B, d_cols_t, d_act.data());
    }
  }

  // Pre-activations of every rectifier unit from the last Forward.
  std::vector<T> HiddenPreActivations(const Workspace& ws) const {
    std::vector<T> out;
    for (const auto& pre : ws.conv_pre) out.insert(out.end(), pre.begin(), pre.end());
    for (std::size_t l = 0; l < dense_.size(); ++l) {
      if (!dense_[l].hidden) continue;
      const Mat& z = ws.dense_pre[l];
      out.insert(out.end(), z.data(), z.data() + z.size());
    }
    return out;
  }

 private:
  T Activate(T v) const {
    return config_.activation == Activation::kRelu ? (v > T(0) ? v : T(0)) : v;
  }
  T Derivative(T z) const {
    return config_.activation == Activation::kRelu ? (z > T(0) ? T(1) : T(0)) : T(1);
  }

  void CheckParams(std::span<const T> params) const {
    if (params.size() != num_params_) {
      throw ConfigError("parameter vector has " + std::to_string(params.size()) +
                        " entries, network expects " + std::to_string(num_params_));
    }
  }

  // cols_t(j, r): j = (b, oy, ox), r = (c, ky, kx).
  static void Im2ColT(const ConvGeom& g, int B, const T* in, Mat& cols_t) {
    const int plane = g.out_plane();
    const Eigen::Index n = static_cast<Eigen::Index>(B) * plane;
    cols_t.resize(n, g.k_dim());
    for (int c = 0; c < g.in_c; ++c) {
      for (int ky = 0; ky < g.kernel; ++ky) {
        for (int kx = 0; kx < g.kernel; ++kx) {
          const int r = (c * g.kernel + ky) * g.kernel + kx;
          T* dst = cols_t.data() + static_cast<std::size_t>(r) * n;
          for (int b = 0; b < B; ++b) {
            const T* src = in + (static_cast<std::size_t>(b) * g.in_c + c) * g.in_h * g.in_w;
            for (int oy = 0; oy < g.out_h; ++oy) {
              const int iy = oy * g.stride - g.pad + ky;
              T* row = dst + static_cast<std::size_t>(b) * plane + static_cast<std::size_t>(oy) * g.out_w;
              if (iy < 0 || iy >= g.in_h) {
                std::fill_n(row, g.out_w, T(0));
                continue;
              }
              for (int ox = 0; ox < g.out_w; ++ox) {
                const int ix = ox * g.stride - g.pad + kx;
                row[ox] = (ix < 0 || ix >= g.in_w) ? T(0) : src[iy * g.in_w + ix];
              }
            }
          }
        }
      }
    }
  }

  static void Col2ImT(const ConvGeom& g, int B, const Mat& d_cols_t, T* d_in) {
    const int plane = g.out_plane();
    const std::size_t n = static_cast<std::size_t>(B) * plane;
    for (int c = 0; c < g.in_c; ++c) {
      for (int ky = 0; ky < g.kernel; ++ky) {
        for (int kx = 0; kx < g.kernel; ++kx) {
          const int r = (c * g.kernel + ky) * g.kernel + kx;
          const T* src = d_cols_t.data() + static_cast<std::size_t>(r) * n;
          for (int b = 0; b < B; ++b) {
            T* dst = d_in + (static_cast<std::size_t>(b) * g.in_c + c) * g.in_h * g.in_w;
            for (int oy = 0; oy < g.out_h; ++oy) {
              const int iy = oy * g.stride - g.pad + ky;
              if (iy < 0 || iy >= g.in_h) continue;
              const T* row = src + static_cast<std::size_t>(b) * plane + static_cast<std::size_t>(oy) * g.out_w;
              for (int ox = 0; ox < g.out_w; ++ox) {
                const int ix = ox * g.stride - g.pad + kx;
                if (ix >= 0 && ix < g.in_w) dst[iy * g.in_w + ix] += row[ox];
              }
            }
          }
        }
      }
    }
  }

  QNetworkConfig config_;
  std::vector<ConvGeom> conv_;
  std::vector<DenseGeom> dense_;
  int flat_dim_ = 0;
  std::size_t num_params_ = 0;
};

}  // namespace xrsched

#endif  // XRSCHED_Q_NETWORK_HPP_
