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

#include <cmath>

#include "mfcal/attention.hpp"
#include "mfcal/error.hpp"

namespace mfcal {
namespace {

void require_upstream(std::span<const Field> batch, std::span<const Field> upstream,
                      const char* what) {
  if (upstream.size() != batch.size()) throw_invalid(std::string(what) + ": upstream batch size mismatch");
  for (std::size_t b = 0; b < batch.size(); ++b) require_same_shape(batch[b], upstream[b], what);
}

// Backward of the batch normalization y = gamma * (x - m) / sqrt(v + eps) + beta
// for one channel/level. `dy` and `xhat` are flattened over everything that
// shares the statistics. With batch statistics the mean and variance depend
// on x; frozen statistics make the map affine.
void norm_backward(std::span<const double> dy, std::span<const double> xhat, double gamma,
                   double inv_std, bool batch_stats, std::span<double> dx,
                   double& dgamma, double& dbeta) {
  const double n = static_cast<double>(dy.size());
  double sum_dy = 0.0;
  double sum_dy_xhat = 0.0;
  for (std::size_t i = 0; i < dy.size(); ++i) {
    sum_dy += dy[i];
    sum_dy_xhat += dy[i] * xhat[i];
  }
  dgamma += sum_dy_xhat;
  dbeta += sum_dy;
  const double g = gamma * inv_std;
  for (std::size_t i = 0; i < dy.size(); ++i) {
    dx[i] = batch_stats ? g * (dy[i] - sum_dy / n - xhat[i] * sum_dy_xhat / n) : g * dy[i];
  }
}

}  // namespace

MonoGradients mono_backward(std::span<const Field> batch, const MonoParams& params,
                            const HolderConfig& holder, std::span<const Field> upstream) {
  require_upstream(batch, upstream, "mono_backward");
  const MonoOutput fwd = mono_forward(batch, params, holder);
  const BottleneckMlp& mlp = params.mlp;
  const std::size_t C = mlp.channels;
  const std::size_t Hd = mlp.hidden;
  const std::size_t B = batch.size();

  MonoGradients grad;
  grad.mlp.w1.assign(Hd * C, 0.0);
  grad.mlp.b1.assign(Hd, 0.0);
  grad.mlp.w2.assign(C * Hd, 0.0);
  grad.mlp.b2.assign(C, 0.0);
  grad.gamma.assign(C, 0.0);
  grad.beta.assign(C, 0.0);

  // dL/d squeeze per instance, and the direct multiplicative path.
  std::vector<std::vector<double>> d_squeeze(B, std::vector<double>(C, 0.0));
  for (std::size_t b = 0; b < B; ++b) {
    const Field& x = batch[b];
    const Field& up = upstream[b];
    const MlpTrace& t = fwd.trace[b];
    Field dx(x.height(), x.width(), C);
    std::vector<double> d_gate(C, 0.0);
    for (std::size_t p = 0; p < x.pixels(); ++p) {
      for (std::size_t c = 0; c < C; ++c) {
        const std::size_t i = p * C + c;
        d_gate[c] += up.values()[i] * x.values()[i];
        dx.values()[i] = up.values()[i] * t.gates[c];
      }
    }
    std::vector<double> d_logit(C);
    for (std::size_t c = 0; c < C; ++c) {
      d_logit[c] = d_gate[c] * t.gates[c] * (1.0 - t.gates[c]);
      if (mlp.use_bias) grad.mlp.b2[c] += d_logit[c];
      for (std::size_t j = 0; j < Hd; ++j) grad.mlp.w2[c * Hd + j] += d_logit[c] * t.hidden[j];
    }
    for (std::size_t j = 0; j < Hd; ++j) {
      double d_hidden = 0.0;
      for (std::size_t c = 0; c < C; ++c) d_hidden += mlp.w2[c * Hd + j] * d_logit[c];
      const double d_pre = t.pre_hidden[j] > 0.0 ? d_hidden : 0.0;
      if (mlp.use_bias) grad.mlp.b1[j] += d_pre;
      for (std::size_t c = 0; c < C; ++c) {
        grad.mlp.w1[j * C + c] += d_pre * t.squeeze[c];
        d_squeeze[b][c] += mlp.w1[j * C + c] * d_pre;
      }
    }
    grad.stack.push_back(std::move(dx));
  }

  // Through GAP and the normalization, one channel at a time.
  const bool batch_stats = params.norm.mode != NormMode::kFrozen;
  const std::size_t n_pix = batch.front().pixels();
  std::vector<Field> d_alpha(B, Field(batch.front().height(), batch.front().width(), C));
  std::vector<double> dy(B * n_pix);
  std::vector<double> xhat(B * n_pix);
  std::vector<double> dx(B * n_pix);
  for (std::size_t c = 0; c < C; ++c) {
    const double inv_std = 1.0 / std::sqrt(fwd.stats.var[c] + params.norm.variance_floor);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t p = 0; p < n_pix; ++p) {
        dy[b * n_pix + p] = d_squeeze[b][c] / static_cast<double>(n_pix);
        xhat[b * n_pix + p] = (fwd.alpha[b].values()[p * C + c] - fwd.stats.mean[c]) * inv_std;
      }
    }
    norm_backward(dy, xhat, params.norm.gamma[c], inv_std, batch_stats, dx, grad.gamma[c],
                  grad.beta[c]);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t p = 0; p < n_pix; ++p) d_alpha[b].values()[p * C + c] = dx[b * n_pix + p];
    }
  }

  for (std::size_t b = 0; b < B; ++b) {
    const Field through_alpha = holder_map_vjp(batch[b], holder.scales, holder.epsilon, d_alpha[b]);
    auto g = grad.stack[b].values();
    const auto t = through_alpha.values();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += t[i];
  }
  return grad;
}

MultiGradients multi_backward(std::span<const Field> stack, std::span<const AlphaMap> alpha,
                              const MultiParams& params, std::span<const Field> upstream) {
  require_upstream(stack, upstream, "multi_backward");
  const MultiOutput fwd = multi_forward(stack, alpha, params);
  const std::size_t Q = params.levels();
  const std::size_t B = stack.size();
  const std::size_t n = stack.front().size();
  const NormState& norm = params.level_norm;

  MultiGradients grad;
  grad.centers.assign(Q, 0.0);
  grad.sharpness.assign(Q, 0.0);
  grad.gamma.assign(Q, 0.0);
  grad.beta.assign(Q, 0.0);

  // dL/d pre-activation z_q, flattened over (batch, element) per level.
  std::vector<std::vector<double>> dz(Q, std::vector<double>(B * n, 0.0));
  for (std::size_t b = 0; b < B; ++b) {
    const auto up = upstream[b].values();
    const auto g = fwd.gate[b].values();
    for (std::size_t i = 0; i < n; ++i) {
      const double d_sum = up[i] * g[i] * (1.0 - g[i]);
      for (std::size_t q = 0; q < Q; ++q) {
        dz[q][b * n + i] = fwd.normalized[b][q].values()[i] > 0.0 ? d_sum : 0.0;
      }
    }
    grad.stack.push_back(upstream[b]);
  }

  // Through each level's normalization to the memberships.
  const bool batch_stats = norm.mode != NormMode::kFrozen;
  std::vector<std::vector<double>> dp(Q, std::vector<double>(B * n, 0.0));
  std::vector<double> xhat(B * n);
  for (std::size_t q = 0; q < Q; ++q) {
    const double inv_std = 1.0 / std::sqrt(fwd.stats.var[q] + norm.variance_floor);
    for (std::size_t b = 0; b < B; ++b) {
      const auto p = fwd.membership[b][q].values();
      for (std::size_t i = 0; i < n; ++i) xhat[b * n + i] = (p[i] - fwd.stats.mean[q]) * inv_std;
    }
    norm_backward(dz[q], xhat, norm.gamma[q], inv_std, batch_stats, dp[q], grad.gamma[q],
                  grad.beta[q]);
  }

  // Softmax backward, then the squared-distance logits.
  for (std::size_t b = 0; b < B; ++b) {
    Field da(alpha[b].height(), alpha[b].width(), alpha[b].channels());
    const auto a = alpha[b].values();
    for (std::size_t i = 0; i < n; ++i) {
      double weighted = 0.0;
      for (std::size_t q = 0; q < Q; ++q) weighted += fwd.membership[b][q].values()[i] * dp[q][b * n + i];
      double d_alpha = 0.0;
      for (std::size_t q = 0; q < Q; ++q) {
        const double p = fwd.membership[b][q].values()[i];
        const double d_logit = p * (dp[q][b * n + i] - weighted);
        const double d = a[i] - params.centers[q];
        grad.centers[q] += d_logit * 2.0 * params.sharpness[q] * d;
        grad.sharpness[q] -= d_logit * d * d;
        d_alpha -= d_logit * 2.0 * params.sharpness[q] * d;
      }
      da.values()[i] = d_alpha;
    }
    grad.alpha.push_back(std::move(da));
  }
  return grad;
}

}  // namespace mfcal
