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

#include "mfcal/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mfcal/error.hpp"
#include "mfcal/parallel.hpp"

namespace mfcal {

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> gap(const Field& stack) {
  const std::size_t C = stack.channels();
  std::vector<double> out(C, 0.0);
  const auto v = stack.values();
  for (std::size_t p = 0; p < stack.pixels(); ++p) {
    for (std::size_t c = 0; c < C; ++c) out[c] += v[p * C + c];
  }
  for (double& m : out) m /= static_cast<double>(stack.pixels());
  return out;
}

std::vector<double> gsp(const Field& stack) {
  const std::size_t C = stack.channels();
  const std::vector<double> mean = gap(stack);
  std::vector<double> out(C, 0.0);
  const auto v = stack.values();
  for (std::size_t p = 0; p < stack.pixels(); ++p) {
    for (std::size_t c = 0; c < C; ++c) {
      const double d = v[p * C + c] - mean[c];
      out[c] += d * d;
    }
  }
  for (double& s : out) s = std::sqrt(s / static_cast<double>(stack.pixels()));
  return out;
}

// BottleneckMlp --------------------------------------------------------------

namespace {

std::size_t hidden_width(std::size_t channels, std::size_t reduction) {
  if (reduction < 1 || reduction >= channels) {
    throw_invalid("reduction must satisfy 1 <= reduction < channels (got " +
                  std::to_string(reduction) + " for " + std::to_string(channels) +
                  " channels)");
  }
  return channels / reduction;
}

}  // namespace

BottleneckMlp BottleneckMlp::zeros(std::size_t channels, std::size_t reduction) {
  BottleneckMlp mlp;
  mlp.channels = channels;
  mlp.hidden = hidden_width(channels, reduction);
  mlp.w1.assign(mlp.hidden * channels, 0.0);
  mlp.b1.assign(mlp.hidden, 0.0);
  mlp.w2.assign(channels * mlp.hidden, 0.0);
  mlp.b2.assign(channels, 0.0);
  return mlp;
}

BottleneckMlp BottleneckMlp::glorot(std::size_t channels, std::size_t reduction,
                                    std::mt19937_64& rng) {
  BottleneckMlp mlp = zeros(channels, reduction);
  const double limit =
      std::sqrt(6.0 / static_cast<double>(mlp.hidden + mlp.channels));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& w : mlp.w1) w = dist(rng);
  for (double& w : mlp.w2) w = dist(rng);
  return mlp;
}

void BottleneckMlp::validate() const {
  if (channels == 0 || hidden == 0) throw_invalid("MLP has empty layers");
  if (w1.size() != hidden * channels || w2.size() != channels * hidden ||
      b1.size() != hidden || b2.size() != channels) {
    throw_invalid("MLP parameter shapes are inconsistent");
  }
}

MlpTrace run_mlp(const BottleneckMlp& mlp, std::span<const double> squeeze) {
  mlp.validate();
  if (squeeze.size() != mlp.channels) {
    throw_invalid("squeeze has " + std::to_string(squeeze.size()) +
                  " channels, MLP expects " + std::to_string(mlp.channels));
  }
  MlpTrace t;
  t.squeeze.assign(squeeze.begin(), squeeze.end());
  t.pre_hidden.assign(mlp.hidden, 0.0);
  t.hidden.assign(mlp.hidden, 0.0);
  for (std::size_t j = 0; j < mlp.hidden; ++j) {
    double z = mlp.use_bias ? mlp.b1[j] : 0.0;
    for (std::size_t c = 0; c < mlp.channels; ++c) z += mlp.w1[j * mlp.channels + c] * squeeze[c];
    t.pre_hidden[j] = z;
    t.hidden[j] = z > 0.0 ? z : 0.0;
  }
  t.logits.assign(mlp.channels, 0.0);
  t.gates.assign(mlp.channels, 0.0);
  for (std::size_t c = 0; c < mlp.channels; ++c) {
    double z = mlp.use_bias ? mlp.b2[c] : 0.0;
    for (std::size_t j = 0; j < mlp.hidden; ++j) z += mlp.w2[c * mlp.hidden + j] * t.hidden[j];
    t.logits[c] = z;
    t.gates[c] = sigmoid(z);
  }
  return t;
}

namespace {

Field scale_channels(const Field& stack, const std::vector<double>& gates) {
  Field out(stack.height(), stack.width(), stack.channels());
  const std::size_t C = stack.channels();
  const auto in = stack.values();
  auto o = out.values();
  for (std::size_t p = 0; p < stack.pixels(); ++p) {
    for (std::size_t c = 0; c < C; ++c) o[p * C + c] = in[p * C + c] * gates[c];
  }
  return out;
}

}  // namespace

ChannelRecalibration se_forward(const Field& stack, const BottleneckMlp& mlp,
                                const Field& squeeze_source) {
  require_same_shape(stack, squeeze_source, "se_forward");
  const MlpTrace t = run_mlp(mlp, gap(squeeze_source));
  return {t.gates, scale_channels(stack, t.gates)};
}

ScseOutput scse_forward(const Field& stack, const BottleneckMlp& mlp,
                        const SpatialProjection& spatial) {
  const std::size_t C = stack.channels();
  if (spatial.weights.size() != C) {
    throw_invalid("spatial projection has " + std::to_string(spatial.weights.size()) +
                  " weights for " + std::to_string(C) + " channels");
  }
  const MlpTrace t = run_mlp(mlp, gap(stack));
  ScseOutput out{t.gates, Field(stack.height(), stack.width(), 1),
                 Field(stack.height(), stack.width(), C)};
  const auto in = stack.values();
  auto o = out.output.values();
  for (std::size_t p = 0; p < stack.pixels(); ++p) {
    double z = spatial.bias;
    for (std::size_t c = 0; c < C; ++c) z += spatial.weights[c] * in[p * C + c];
    const double s = sigmoid(z);
    out.spatial_gates.values()[p] = s;
    for (std::size_t c = 0; c < C; ++c) {
      const double x = in[p * C + c];
      o[p * C + c] = std::max(x * t.gates[c], x * s);
    }
  }
  return out;
}

ChannelRecalibration srm_forward(const Field& stack, const SrmParams& params) {
  const std::size_t C = stack.channels();
  if (params.w_mean.size() != C || params.w_std.size() != C) {
    throw_invalid("SRM weights must have one entry per channel");
  }
  params.norm.validate(C);
  const std::vector<double> mean = gap(stack);
  const std::vector<double> sd = gsp(stack);
  std::vector<double> gates(C);
  for (std::size_t c = 0; c < C; ++c) {
    const double t = params.w_mean[c] * mean[c] + params.w_std[c] * sd[c];
    const double n = (t - params.norm.running_mean[c]) /
                         std::sqrt(params.norm.running_var[c] + params.norm.variance_floor) *
                         params.norm.gamma[c] +
                     params.norm.beta[c];
    gates[c] = sigmoid(n);
  }
  return {gates, scale_channels(stack, gates)};
}

Field dct_basis(std::size_t height, std::size_t width, std::size_t i, std::size_t j) {
  if (i >= height || j >= width) {
    throw_invalid("DCT frequency (" + std::to_string(i) + ", " + std::to_string(j) +
                  ") out of range for " + std::to_string(height) + "x" +
                  std::to_string(width));
  }
  Field out(height, width, 1);
  const double pi = std::numbers::pi;
  for (std::size_t h = 0; h < height; ++h) {
    const double ch = i == 0 ? 1.0 : std::cos(pi * i * (h + 0.5) / height);
    for (std::size_t w = 0; w < width; ++w) {
      const double cw = j == 0 ? 1.0 : std::cos(pi * j * (w + 0.5) / width);
      out(h, w, 0) = ch * cw;
    }
  }
  return out;
}

std::vector<FrequencyPair> lowest_frequencies(std::size_t count, std::size_t height,
                                              std::size_t width) {
  if (count > height * width) throw_invalid("more frequencies requested than exist");
  std::vector<FrequencyPair> out;
  for (std::size_t total = 0; out.size() < count; ++total) {
    for (std::size_t i = 0; i <= total && out.size() < count; ++i) {
      const std::size_t j = total - i;
      if (i < height && j < width) out.push_back({i, j});
    }
  }
  return out;
}

std::vector<double> dct_squeeze(const Field& stack, std::span<const FrequencyPair> freqs) {
  const std::size_t C = stack.channels();
  if (freqs.empty()) throw_invalid("FCA needs at least one frequency");
  if (C % freqs.size() != 0) {
    throw_invalid("FCA: " + std::to_string(C) + " channels are not divisible into " +
                  std::to_string(freqs.size()) + " groups");
  }
  const std::size_t group = C / freqs.size();
  std::vector<double> out(C, 0.0);
  for (std::size_t g = 0; g < freqs.size(); ++g) {
    const Field basis = dct_basis(stack.height(), stack.width(), freqs[g].i, freqs[g].j);
    for (std::size_t c = g * group; c < (g + 1) * group; ++c) {
      double acc = 0.0;
      for (std::size_t h = 0; h < stack.height(); ++h) {
        for (std::size_t w = 0; w < stack.width(); ++w) acc += stack(h, w, c) * basis(h, w, 0);
      }
      out[c] = acc;
    }
  }
  return out;
}

ChannelRecalibration fca_forward(const Field& stack, const BottleneckMlp& mlp,
                                 std::span<const FrequencyPair> freqs) {
  const MlpTrace t = run_mlp(mlp, dct_squeeze(stack, freqs));
  return {t.gates, scale_channels(stack, t.gates)};
}

// Monofractal ------------------------------------------------------------------

namespace {

void require_batch(std::span<const Field> batch, const char* what) {
  if (batch.empty()) throw_invalid(std::string(what) + ": empty batch");
  for (const Field& f : batch) require_same_shape(batch.front(), f, what);
}

}  // namespace

MonoOutput mono_forward(std::span<const Field> batch, const MonoParams& params,
                        const HolderConfig& holder) {
  require_batch(batch, "mono_forward");
  params.mlp.validate();
  if (params.mlp.channels != batch.front().channels()) {
    throw_invalid("mono_forward: MLP channel count does not match the stack");
  }
  MonoOutput out;
  out.alpha.resize(batch.size());
  parallel_for(batch.size(), [&](std::size_t b) {
    out.alpha[b] = holder_map(batch[b], holder.scales, holder.epsilon);
  });
  out.normalized = normalize_batch_with(out.alpha, params.norm, &out.stats);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    out.trace.push_back(run_mlp(params.mlp, gap(out.normalized[b])));
    out.output.push_back(scale_channels(batch[b], out.trace.back().gates));
  }
  return out;
}

// Multifractal ---------------------------------------------------------------------

MultiParams MultiParams::spanning(std::size_t levels, double lo, double hi, NormMode mode) {
  if (levels < 1) throw_invalid("multifractal recalibration needs Q >= 1");
  MultiParams params;
  for (std::size_t q = 0; q < levels; ++q) {
    params.centers.push_back(levels == 1 ? 0.5 * (lo + hi)
                                         : lo + (hi - lo) * static_cast<double>(q) /
                                                    static_cast<double>(levels - 1));
  }
  params.sharpness.assign(levels, 1.0);
  params.level_norm = NormState::identity(levels, mode);
  return params;
}

void MultiParams::validate() const {
  if (centers.empty()) throw_invalid("multifractal recalibration needs Q >= 1");
  if (sharpness.size() != centers.size()) {
    throw_invalid("sharpness and centers must have the same length");
  }
  for (std::size_t q = 0; q < centers.size(); ++q) {
    if (!std::isfinite(centers[q]) || !std::isfinite(sharpness[q])) {
      throw_invalid("multifractal parameters must be finite");
    }
  }
  level_norm.validate(centers.size());
}

std::vector<Field> multi_membership(const AlphaMap& alpha, const MultiParams& params) {
  params.validate();
  const std::size_t Q = params.levels();
  std::vector<Field> out;
  out.reserve(Q);
  for (std::size_t q = 0; q < Q; ++q) out.emplace_back(alpha.height(), alpha.width(), alpha.channels());
  std::vector<double> logits(Q);
  const auto a = alpha.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    double top = -INFINITY;
    for (std::size_t q = 0; q < Q; ++q) {
      const double d = a[i] - params.centers[q];
      logits[q] = -params.sharpness[q] * d * d;
      top = std::max(top, logits[q]);
    }
    double total = 0.0;
    for (std::size_t q = 0; q < Q; ++q) {
      logits[q] = std::exp(logits[q] - top);
      total += logits[q];
    }
    for (std::size_t q = 0; q < Q; ++q) out[q].values()[i] = logits[q] / total;
  }
  return out;
}

MultiOutput multi_forward(std::span<const Field> stack, std::span<const AlphaMap> alpha,
                          const MultiParams& params) {
  require_batch(stack, "multi_forward");
  if (alpha.size() != stack.size()) throw_invalid("multi_forward: batch size mismatch");
  for (std::size_t b = 0; b < stack.size(); ++b) {
    require_same_shape(stack[b], alpha[b], "multi_forward");
  }
  params.validate();
  const std::size_t Q = params.levels();
  const std::size_t B = stack.size();

  MultiOutput out;
  out.membership.resize(B);
  for (std::size_t b = 0; b < B; ++b) out.membership[b] = multi_membership(alpha[b], params);

  // Level statistics over (batch, h, w, c).
  const NormState& norm = params.level_norm;
  out.stats = NormStats{std::vector<double>(Q, 0.0), std::vector<double>(Q, 0.0)};
  if (norm.mode == NormMode::kFrozen) {
    out.stats = NormStats{norm.running_mean, norm.running_var};
  } else {
    const double n = static_cast<double>(B * stack.front().size());
    for (std::size_t q = 0; q < Q; ++q) {
      double mean = 0.0;
      for (std::size_t b = 0; b < B; ++b) {
        for (double v : out.membership[b][q].values()) mean += v;
      }
      mean /= n;
      double var = 0.0;
      for (std::size_t b = 0; b < B; ++b) {
        for (double v : out.membership[b][q].values()) var += (v - mean) * (v - mean);
      }
      out.stats.mean[q] = mean;
      out.stats.var[q] = var / n;
    }
  }

  out.normalized.resize(B);
  for (std::size_t b = 0; b < B; ++b) {
    const Field& x = stack[b];
    Field gate(x.height(), x.width(), x.channels());
    std::vector<Field> pre;
    for (std::size_t q = 0; q < Q; ++q) {
      const double scale = norm.gamma[q] / std::sqrt(out.stats.var[q] + norm.variance_floor);
      Field z(x.height(), x.width(), x.channels());
      const auto p = out.membership[b][q].values();
      auto zv = z.values();
      auto gv = gate.values();
      for (std::size_t i = 0; i < zv.size(); ++i) {
        zv[i] = (p[i] - out.stats.mean[q]) * scale + norm.beta[q];
        gv[i] += zv[i] > 0.0 ? zv[i] : 0.0;
      }
      pre.push_back(std::move(z));
    }
    for (double& g : gate.values()) g = sigmoid(g);
    Field o(x.height(), x.width(), x.channels());
    const auto xv = x.values();
    const auto gv = gate.values();
    auto ov = o.values();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = xv[i] + gv[i];
    out.normalized[b] = std::move(pre);
    out.gate.push_back(std::move(gate));
    out.output.push_back(std::move(o));
  }
  return out;
}

}  // namespace mfcal
