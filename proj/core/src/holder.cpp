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

#include "mfcal/holder.hpp"

#include <cmath>
#include <string>

#include "mfcal/error.hpp"
#include "mfcal/grid.hpp"
#include "mfcal/parallel.hpp"
#include "mfcal/regression.hpp"

namespace mfcal {

ScaleSet::ScaleSet(std::vector<std::size_t> sides) : sides_(std::move(sides)) {
  if (sides_.size() < 2) throw_invalid("scale set needs at least two sides");
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    if (sides_[i] < 1) throw_invalid("window sides must be >= 1");
    if (i > 0 && sides_[i] <= sides_[i - 1]) {
      throw_invalid("window sides must be strictly increasing");
    }
  }
}

ScaleSet ScaleSet::defaults() { return ScaleSet({2, 3, 4}); }

std::vector<double> ScaleSet::log_sides() const {
  std::vector<double> out;
  out.reserve(sides_.size());
  for (std::size_t k : sides_) out.push_back(std::log(static_cast<double>(k)));
  return out;
}

namespace {

void require_measure(const Field& field, double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw_invalid("epsilon must be finite and >= 0");
  }
  if (!field.all_finite()) throw_invalid("field values must be finite");
  if (!field.all_nonnegative()) throw_invalid("measure must be nonnegative");
}

}  // namespace

std::vector<Field> box_measures(const Field& field, const ScaleSet& scales,
                                double epsilon) {
  require_measure(field, epsilon);
  const SummedAreaTable sat = integral_image(field);
  std::vector<Field> out;
  out.reserve(scales.size());
  for (std::size_t side : scales.sides()) {
    Field m = window_sum(sat, side);
    if (epsilon != 0.0) {
      for (double& v : m.values()) v += epsilon;
    }
    out.push_back(std::move(m));
  }
  return out;
}

AlphaMap holder_map(const Field& field, const ScaleSet& scales, double epsilon) {
  const std::vector<Field> measures = box_measures(field, scales, epsilon);
  const SlopeFit fit(scales.log_sides());
  AlphaMap out(field.height(), field.width(), field.channels());
  const std::size_t r = scales.size();
  const std::size_t per_row = field.width() * field.channels();
  parallel_for(field.height(), [&](std::size_t h) {
    std::vector<double> y(r);
    const std::size_t base = h * per_row;
    for (std::size_t i = base; i < base + per_row; ++i) {
      for (std::size_t k = 0; k < r; ++k) y[k] = std::log(measures[k].values()[i]);
      out.values()[i] = fit.slope(y);
    }
  });
  return out;
}

Field holder_map_vjp(const Field& field, const ScaleSet& scales, double epsilon,
                     const Field& upstream) {
  require_same_shape(field, upstream, "holder_map_vjp");
  const std::vector<Field> measures = box_measures(field, scales, epsilon);
  const SlopeFit fit(scales.log_sides());
  Field grad(field.height(), field.width(), field.channels());
  for (std::size_t k = 0; k < scales.size(); ++k) {
    // d alpha(x) / d mu_k(x) = w_k / mu_k(x); scatter through the transposed
    // window of side k.
    Field local(field.height(), field.width(), field.channels());
    const double w = fit.weight(k);
    const auto up = upstream.values();
    const auto mu = measures[k].values();
    auto lv = local.values();
    for (std::size_t i = 0; i < lv.size(); ++i) lv[i] = up[i] * w / mu[i];
    const Field spread = window_sum(integral_image(local), adjoint_reach(scales.sides()[k]));
    auto g = grad.values();
    const auto s = spread.values();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += s[i];
  }
  return grad;
}

std::vector<double> mean_alpha(const AlphaMap& map) {
  return mean_alpha_interior(map, 0);
}

std::vector<double> mean_alpha_interior(const AlphaMap& map, std::size_t border) {
  if (2 * border >= map.height() || 2 * border >= map.width()) {
    throw_invalid("interior border " + std::to_string(border) +
                  " leaves no pixels");
  }
  const std::size_t C = map.channels();
  std::vector<double> sums(C, 0.0);
  for (std::size_t h = border; h < map.height() - border; ++h) {
    for (std::size_t w = border; w < map.width() - border; ++w) {
      for (std::size_t c = 0; c < C; ++c) sums[c] += map(h, w, c);
    }
  }
  const double count = static_cast<double>((map.height() - 2 * border) *
                                           (map.width() - 2 * border));
  for (double& s : sums) s /= count;
  return sums;
}

// Normalization -------------------------------------------------------------

NormState NormState::identity(std::size_t channels, NormMode mode) {
  NormState state;
  state.gamma.assign(channels, 1.0);
  state.beta.assign(channels, 0.0);
  state.running_mean.assign(channels, 0.0);
  state.running_var.assign(channels, 1.0);
  state.mode = mode;
  return state;
}

void NormState::validate(std::size_t expected_channels) const {
  if (gamma.size() != expected_channels || beta.size() != expected_channels ||
      running_mean.size() != expected_channels ||
      running_var.size() != expected_channels) {
    throw_invalid("normalization state has " + std::to_string(gamma.size()) +
                  " channels, expected " + std::to_string(expected_channels));
  }
  for (std::size_t c = 0; c < expected_channels; ++c) {
    if (!std::isfinite(gamma[c]) || !std::isfinite(beta[c])) {
      throw_invalid("normalization affine parameters must be finite");
    }
    if (!(running_var[c] >= 0.0)) {
      throw_invalid("running variance must be >= 0");
    }
  }
}

NormStats channel_statistics(std::span<const Field> batch) {
  if (batch.empty()) throw_invalid("normalization needs a nonempty batch");
  const std::size_t C = batch.front().channels();
  NormStats stats{std::vector<double>(C, 0.0), std::vector<double>(C, 0.0)};
  std::size_t n = 0;
  for (const Field& map : batch) {
    require_same_shape(batch.front(), map, "channel_statistics");
    const auto v = map.values();
    for (std::size_t p = 0; p < map.pixels(); ++p) {
      for (std::size_t c = 0; c < C; ++c) stats.mean[c] += v[p * C + c];
    }
    n += map.pixels();
  }
  for (double& m : stats.mean) m /= static_cast<double>(n);
  for (const Field& map : batch) {
    const auto v = map.values();
    for (std::size_t p = 0; p < map.pixels(); ++p) {
      for (std::size_t c = 0; c < C; ++c) {
        const double d = v[p * C + c] - stats.mean[c];
        stats.var[c] += d * d;
      }
    }
  }
  for (double& s : stats.var) s /= static_cast<double>(n);
  return stats;
}

NormStats channel_statistics(const Field& map) {
  return channel_statistics(std::span<const Field>(&map, 1));
}

std::vector<Field> normalize_batch_with(std::span<const Field> batch,
                                        const NormState& state, NormStats* used) {
  if (batch.empty()) throw_invalid("normalization needs a nonempty batch");
  const std::size_t C = batch.front().channels();
  state.validate(C);
  NormStats stats = state.mode == NormMode::kFrozen
                        ? NormStats{state.running_mean, state.running_var}
                        : channel_statistics(batch);
  std::vector<double> scale(C);
  for (std::size_t c = 0; c < C; ++c) {
    scale[c] = state.gamma[c] / std::sqrt(stats.var[c] + state.variance_floor);
  }
  std::vector<Field> out;
  out.reserve(batch.size());
  for (const Field& map : batch) {
    require_same_shape(batch.front(), map, "normalize");
    Field o(map.height(), map.width(), C);
    const auto in = map.values();
    auto ov = o.values();
    for (std::size_t p = 0; p < map.pixels(); ++p) {
      for (std::size_t c = 0; c < C; ++c) {
        const std::size_t i = p * C + c;
        ov[i] = (in[i] - stats.mean[c]) * scale[c] + state.beta[c];
      }
    }
    out.push_back(std::move(o));
  }
  if (used != nullptr) *used = std::move(stats);
  return out;
}

Field normalize_with(const Field& map, const NormState& state, NormStats* used) {
  return std::move(normalize_batch_with(std::span<const Field>(&map, 1), state, used).front());
}

Field normalize(const Field& map, NormState& state) {
  NormStats stats;
  Field out = normalize_with(map, state, &stats);
  if (state.mode == NormMode::kAccumulate) {
    const double m = state.momentum;
    for (std::size_t c = 0; c < map.channels(); ++c) {
      state.running_mean[c] = (1.0 - m) * state.running_mean[c] + m * stats.mean[c];
      state.running_var[c] = (1.0 - m) * state.running_var[c] + m * stats.var[c];
    }
  }
  return out;
}

}  // namespace mfcal
