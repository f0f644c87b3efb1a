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

#include "mfcal/spectrum_curve.hpp"

#include <algorithm>
#include <cmath>

#include "mfcal/error.hpp"

namespace mfcal {

SpectrumCurve SpectrumCurve::from_points(std::vector<SpectrumPoint> points,
                                         double merge_tol) {
  std::stable_sort(points.begin(), points.end(),
                   [](const SpectrumPoint& a, const SpectrumPoint& b) {
                     return a.alpha < b.alpha;
                   });
  SpectrumCurve curve;
  for (const auto& pt : points) {
    if (!curve.samples.empty() &&
        pt.alpha - curve.samples.back().alpha <= merge_tol) {
      curve.samples.back().f = std::max(curve.samples.back().f, pt.f);
      continue;
    }
    curve.samples.push_back(pt);
  }
  return curve;
}

const SpectrumPoint& SpectrumCurve::max_sample() const {
  if (samples.empty()) throw_invalid("spectrum curve is empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].f > samples[best].f) best = i;
  }
  return samples[best];
}

SpectrumPoint SpectrumCurve::peak(double band) const {
  const SpectrumPoint top = max_sample();
  // Normal equations for f = c0 + c1 a + c2 a^2 in coordinates centered on
  // the top sample.
  double s[5] = {0, 0, 0, 0, 0};
  double t[3] = {0, 0, 0};
  double lo = top.alpha;
  double hi = top.alpha;
  std::size_t used = 0;
  for (const auto& pt : samples) {
    if (pt.f < top.f - band) continue;
    const double a = pt.alpha - top.alpha;
    double power = 1.0;
    for (int k = 0; k < 5; ++k) {
      s[k] += power;
      if (k < 3) t[k] += power * pt.f;
      power *= a;
    }
    lo = std::min(lo, pt.alpha);
    hi = std::max(hi, pt.alpha);
    ++used;
  }
  if (used < 3) return top;
  // Solve the 3x3 symmetric system by Cramer's rule.
  const double m[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
  auto det3 = [](const double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double d = det3(m);
  if (!(std::abs(d) > 0.0)) return top;
  double m1[3][3];
  double m2[3][3];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      m1[r][c] = c == 1 ? t[r] : m[r][c];
      m2[r][c] = c == 2 ? t[r] : m[r][c];
    }
  }
  const double c1 = det3(m1) / d;
  const double c2 = det3(m2) / d;
  if (!(c2 < 0.0)) return top;
  const double vertex = top.alpha - c1 / (2.0 * c2);
  if (vertex < lo || vertex > hi) return top;
  return {vertex, top.f};
}

double SpectrumCurve::max_excess_over_alpha() const {
  double worst = -INFINITY;
  for (const auto& pt : samples) worst = std::max(worst, pt.f - pt.alpha);
  return worst;
}

}  // namespace mfcal
