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
#include <span>
#include <vector>

#include "mfcal/field.hpp"

namespace mfcal {

/// Floor added to every box measure before taking logs.
inline constexpr double kDefaultEpsilon = 1e-6;
/// Variance floor of the exponent normalization.
inline constexpr double kNormVarianceFloor = 1e-5;

/// Strictly increasing window sides k_1 < ... < k_r, r >= 2.
class ScaleSet {
 public:
  explicit ScaleSet(std::vector<std::size_t> sides);

  /// {2, 3, 4}.
  static ScaleSet defaults();

  const std::vector<std::size_t>& sides() const noexcept { return sides_; }
  std::size_t size() const noexcept { return sides_.size(); }
  std::size_t largest() const noexcept { return sides_.back(); }

  /// log k for every side, the regression abscissa.
  std::vector<double> log_sides() const;

 private:
  std::vector<std::size_t> sides_;
};

/// Scale set and epsilon floor used to turn a field into exponents.
struct HolderConfig {
  ScaleSet scales = ScaleSet::defaults();
  double epsilon = kDefaultEpsilon;
};

/// One field per scale: window_sum(field, k) + epsilon.
std::vector<Field> box_measures(const Field& field, const ScaleSet& scales,
                                double epsilon = kDefaultEpsilon);

/// Per pixel and channel, the OLS slope of log mu(B_k(x)) against log k.
AlphaMap holder_map(const Field& field, const ScaleSet& scales,
                    double epsilon = kDefaultEpsilon);

/// Vector-Jacobian product of holder_map: given dL/d alpha, returns dL/d field.
Field holder_map_vjp(const Field& field, const ScaleSet& scales, double epsilon,
                     const Field& upstream);

/// Spatial mean per channel.
std::vector<double> mean_alpha(const AlphaMap& map);

/// Spatial mean per channel over pixels at least `border` away from every
/// image edge. Throws if no such pixel exists.
std::vector<double> mean_alpha_interior(const AlphaMap& map, std::size_t border);

enum class NormMode {
  kAccumulate,  // normalize with current statistics and fold them into the running ones
  kFrozen,      // normalize with running statistics
  kPerInstance, // normalize with current statistics only
};

/// Per-channel affine normalization with running statistics.
struct NormState {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  NormMode mode = NormMode::kPerInstance;
  double momentum = 0.1;
  double variance_floor = kNormVarianceFloor;

  /// gamma = 1, beta = 0, running mean 0 and variance 1.
  static NormState identity(std::size_t channels,
                            NormMode mode = NormMode::kPerInstance);

  std::size_t channels() const noexcept { return gamma.size(); }
  void validate(std::size_t expected_channels) const;
};

/// Statistics a normalization pass actually used, per channel.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> var;
};

/// Per-channel mean and population variance over every pixel of every
/// field in the batch.
NormStats channel_statistics(std::span<const Field> batch);
NormStats channel_statistics(const Field& map);

/// (x - mean) / sqrt(var + floor) * gamma + beta with the statistics chosen
/// by state.mode: running statistics when frozen, otherwise the statistics
/// of the input (over the whole batch). Does not touch the running statistics.
std::vector<Field> normalize_batch_with(std::span<const Field> batch,
                                        const NormState& state,
                                        NormStats* used = nullptr);
Field normalize_with(const Field& map, const NormState& state, NormStats* used = nullptr);

/// normalize_with, then in accumulate mode folds the current statistics
/// into the running ones with state.momentum.
Field normalize(const Field& map, NormState& state);

}  // namespace mfcal
