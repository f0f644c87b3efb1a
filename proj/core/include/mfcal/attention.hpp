// Copyright 2026 The mfcal Authors. All Rights Reserved.
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

#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "mfcal/field.hpp"
#include "mfcal/holder.hpp"

namespace mfcal {

double sigmoid(double x) noexcept;

/// Spatial mean per channel.
std::vector<double> gap(const Field& stack);

/// Spatial population standard deviation per channel.
std::vector<double> gsp(const Field& stack);

/// Two-layer excitation MLP: sigmoid(W2 relu(W1 s + b1) + b2).
/// W1 is hidden x channels, W2 is channels x hidden, both row-major.
struct BottleneckMlp {
  std::size_t channels = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;
  bool use_bias = true;

  /// hidden = floor(channels / reduction); requires 1 <= reduction < channels.
  static BottleneckMlp zeros(std::size_t channels, std::size_t reduction);

  /// Weights uniform in ±sqrt(6 / (fan_in + fan_out)), biases zero.
  static BottleneckMlp glorot(std::size_t channels, std::size_t reduction,
                              std::mt19937_64& rng);

  void validate() const;
};

/// Intermediate values of one MLP evaluation.
struct MlpTrace {
  std::vector<double> squeeze;
  std::vector<double> pre_hidden;
  std::vector<double> hidden;
  std::vector<double> logits;
  std::vector<double> gates;
};

MlpTrace run_mlp(const BottleneckMlp& mlp, std::span<const double> squeeze);

struct ChannelRecalibration {
  std::vector<double> gates;
  Field output;
};

/// Squeeze-and-excitation with the squeeze taken from `squeeze_source`:
/// gates = mlp(GAP(source)), output = stack ⊙ gates. Passing the stack as
/// its own source gives cSE; passing a normalized exponent map gives the
/// monofractal recalibration.
ChannelRecalibration se_forward(const Field& stack, const BottleneckMlp& mlp,
                                const Field& squeeze_source);

/// 1x1 projection of the channels to a single spatial logit.
struct SpatialProjection {
  std::vector<double> weights;
  double bias = 0.0;
};

struct ScseOutput {
  std::vector<double> channel_gates;
  Field spatial_gates;  // H x W x 1
  Field output;
};

/// Elementwise max of the channel branch (stack ⊙ channel gates) and the
/// spatial branch (stack ⊙ sigmoid(projection)).
ScseOutput scse_forward(const Field& stack, const BottleneckMlp& mlp,
                        const SpatialProjection& spatial);

/// Style recalibration: t_c = w_mean_c GAP_c + w_std_c GSP_c, gates =
/// sigmoid(norm(t)). `norm` is applied in inference form with its running
/// statistics, since a single instance carries no batch statistics.
struct SrmParams {
  std::vector<double> w_mean;
  std::vector<double> w_std;
  NormState norm;
};

ChannelRecalibration srm_forward(const Field& stack, const SrmParams& params);

struct FrequencyPair {
  std::size_t i = 0;
  std::size_t j = 0;
};

/// DCT-II basis B[h][w] = cos(pi i (h + 1/2) / H) cos(pi j (w + 1/2) / W),
/// H x W x 1. (0, 0) is the all-ones field.
Field dct_basis(std::size_t height, std::size_t width, std::size_t i, std::size_t j);

/// The `count` lowest frequencies ordered by i + j, then by i.
std::vector<FrequencyPair> lowest_frequencies(std::size_t count, std::size_t height,
                                              std::size_t width);

/// Per-channel DCT squeeze: channel c of group g = c / (C / groups) is
/// reduced against the basis of freqs[g].
std::vector<double> dct_squeeze(const Field& stack, std::span<const FrequencyPair> freqs);

/// Frequency channel attention: dct_squeeze, then the same MLP and
/// multiplicative recalibration as se_forward. C must be divisible by the
/// number of frequency pairs.
ChannelRecalibration fca_forward(const Field& stack, const BottleneckMlp& mlp,
                                 std::span<const FrequencyPair> freqs);

// Monofractal recalibration -------------------------------------------------

struct MonoParams {
  BottleneckMlp mlp;
  NormState norm;  // applied to the exponent map, one entry per channel
};

struct MonoOutput {
  std::vector<AlphaMap> alpha;
  std::vector<Field> normalized;
  std::vector<MlpTrace> trace;
  std::vector<Field> output;
  NormStats stats;
};

/// For every instance of the batch: alpha = holder_map(x), H = norm(alpha)
/// (batch statistics unless frozen), gates = mlp(GAP(H)), out = x ⊙ gates.
MonoOutput mono_forward(std::span<const Field> batch, const MonoParams& params,
                        const HolderConfig& holder);

struct MlpGradients {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;
};

struct MonoGradients {
  MlpGradients mlp;
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<Field> stack;
};

/// Gradients of L = sum(upstream ⊙ output) through mono_forward, including
/// the path from the input through the exponent map.
MonoGradients mono_backward(std::span<const Field> batch, const MonoParams& params,
                            const HolderConfig& holder,
                            std::span<const Field> upstream);

// Multifractal recalibration ------------------------------------------------

struct MultiParams {
  std::vector<double> centers;    // learnable exponents, one per level set
  std::vector<double> sharpness;  // inverse widths s*_q
  NormState level_norm;           // one entry per level set

  std::size_t levels() const noexcept { return centers.size(); }

  /// Q centers evenly spaced over [lo, hi] (the midpoint when Q = 1),
  /// sharpness 1, identity normalization.
  static MultiParams spanning(std::size_t levels, double lo, double hi,
                              NormMode mode = NormMode::kPerInstance);

  void validate() const;
};

/// Soft level-set membership, one H x W x C field per level:
/// softmax over q of -s_q (alpha - center_q)^2.
std::vector<Field> multi_membership(const AlphaMap& alpha, const MultiParams& params);

struct MultiOutput {
  std::vector<Field> gate;    // sigmoid(sum_q relu(norm_q(p_q)))
  std::vector<Field> output;  // stack + gate
  std::vector<std::vector<Field>> membership;
  std::vector<std::vector<Field>> normalized;  // pre-activation, per instance and level
  NormStats stats;                              // per level
};

/// Each level's membership is normalized over (h, w, c) and the batch.
MultiOutput multi_forward(std::span<const Field> stack, std::span<const AlphaMap> alpha,
                          const MultiParams& params);

struct MultiGradients {
  std::vector<double> centers;
  std::vector<double> sharpness;
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<Field> stack;
  std::vector<Field> alpha;
};

/// Gradients of L = sum(upstream ⊙ output) through multi_forward. The ReLU
/// derivative at 0 is taken as 0.
MultiGradients multi_backward(std::span<const Field> stack, std::span<const AlphaMap> alpha,
                              const MultiParams& params, std::span<const Field> upstream);

}  // namespace mfcal
