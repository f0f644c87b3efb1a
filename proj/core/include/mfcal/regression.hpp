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

#include <span>
#include <vector>

namespace mfcal {

/// Ordinary least-squares slope of y on x:
///   sum_i (x_i - x̄)(y_i - ȳ) / sum_i (x_i - x̄)^2
/// Throws kInvalidArgument for fewer than two points or constant x.
double ols_slope(std::span<const double> x, std::span<const double> y);

/// Precomputed OLS design for a fixed abscissa, so that many ordinates can
/// be regressed against it with the same association order as ols_slope.
class SlopeFit {
 public:
  explicit SlopeFit(std::span<const double> x);

  std::size_t size() const noexcept { return centered_.size(); }
  std::span<const double> centered_x() const noexcept { return centered_; }
  double sxx() const noexcept { return sxx_; }

  /// Slope for ordinates y (size must equal size()).
  double slope(std::span<const double> y) const;

  /// d slope / d y_i = centered_x[i] / sxx.
  double weight(std::size_t i) const noexcept { return centered_[i] / sxx_; }

 private:
  std::vector<double> centered_;
  double sxx_ = 0.0;
};

}  // namespace mfcal
