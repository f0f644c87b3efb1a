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

#include "mfcal/regression.hpp"

#include "mfcal/error.hpp"

namespace mfcal {

SlopeFit::SlopeFit(std::span<const double> x) {
  if (x.size() < 2) throw_invalid("slope fit needs at least two points");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  centered_.reserve(x.size());
  for (double v : x) {
    const double d = v - mean;
    centered_.push_back(d);
    sxx_ += d * d;
  }
  if (!(sxx_ > 0.0)) throw_invalid("slope fit needs distinct abscissae");
}

double SlopeFit::slope(std::span<const double> y) const {
  const std::size_t n = centered_.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += y[i];
  mean /= static_cast<double>(n);
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxy += centered_[i] * (y[i] - mean);
  return sxy / sxx_;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw_invalid("ols_slope: length mismatch");
  return SlopeFit(x).slope(y);
}

}  // namespace mfcal
