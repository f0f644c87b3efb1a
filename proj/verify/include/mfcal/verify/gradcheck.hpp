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
#include <cstdint>
#include <string>

namespace mfcal::verify {

struct GradCheckOptions {
  std::size_t probes = 200;
  double step = 1e-5;
  double tolerance = 1e-4;
  /// Probes are skipped when any ReLU input lies within this distance of 0.
  double kink_margin = 1e-3;
  /// Denominator floor of the relative error, for gradients near zero.
  double scale_floor = 1e-6;
  bool use_bias = true;
  std::uint64_t seed = 7;
};

struct GradCheckReport {
  std::size_t checked = 0;
  std::size_t excluded = 0;
  std::size_t failures = 0;
  double max_relative_error = 0.0;
  std::string worst;  // description of the worst probe

  bool passed(std::size_t wanted) const noexcept { return failures == 0 && checked >= wanted; }
};

/// Central-difference check of mono_backward on random batches of two
/// 2 x 2 x 4 stacks, alternating batch and frozen statistics.
GradCheckReport check_mono_gradients(const GradCheckOptions& options);

/// Same for multi_backward with Q = 4.
GradCheckReport check_multi_gradients(const GradCheckOptions& options);

}  // namespace mfcal::verify
