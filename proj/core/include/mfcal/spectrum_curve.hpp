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

#include <vector>

namespace mfcal {

struct SpectrumPoint {
  double alpha = 0.0;
  double f = 0.0;

  friend bool operator==(const SpectrumPoint&, const SpectrumPoint&) = default;
};

/// Sampled multifractal spectrum f(alpha), alpha strictly increasing.
struct SpectrumCurve {
  std::vector<SpectrumPoint> samples;

  /// Sorts by alpha and merges samples whose alpha differ by at most
  /// `merge_tol`, keeping the larger f.
  static SpectrumCurve from_points(std::vector<SpectrumPoint> points,
                                   double merge_tol = 1e-12);

  bool empty() const noexcept { return samples.empty(); }
  std::size_t size() const noexcept { return samples.size(); }

  /// Sample with the largest f (first one on ties). Curve must be nonempty.
  const SpectrumPoint& max_sample() const;

  /// Location of the spectrum maximum. A least-squares parabola is fitted
  /// to the samples with f >= max f - `band`; its vertex is returned when
  /// the fit is concave and lies inside the band, otherwise max_sample().
  /// The returned f is always the largest sampled f.
  SpectrumPoint peak(double band = 0.2) const;

  /// Largest f - alpha over the samples.
  double max_excess_over_alpha() const;
};

}  // namespace mfcal
