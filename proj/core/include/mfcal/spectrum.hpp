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

#include <cstdint>
#include <vector>

#include "mfcal/cascade.hpp"
#include "mfcal/field.hpp"
#include "mfcal/holder.hpp"
#include "mfcal/spectrum_curve.hpp"

namespace mfcal {

/// Measures of one object at consecutive dyadic depths:
/// levels[i] holds the cells at depth first_depth + i.
struct DepthSeries {
  int first_depth = 1;
  std::vector<Field> levels;

  int last_depth() const noexcept {
    return first_depth + static_cast<int>(levels.size()) - 1;
  }
};

/// Cascades of `base` regenerated at every depth in [k_min, k_max].
DepthSeries cascade_series(const CascadeSpec& base, int k_min, int k_max);

/// Coarsens a 1 x 2^K or 2^K x 2^K single-channel measure by summing dyadic
/// blocks, returning the `count` finest depths ending at K.
DepthSeries dyadic_pyramid(const Field& finest, int count);

struct HistogramOptions {
  int bins = 32;
  /// Kernel width in units of -log2 mass. Zero selects it from the data.
  double log_mass_bandwidth = 0.0;
  /// Bins whose smoothed count drops below this at any depth are dropped.
  double min_count = 0.5;
};

/// Histogram-method spectrum.
///
/// Coarse exponents alpha = -log2(mu) / k of every occupied cell are counted
/// into `bins` shared bins spanning the exponent range at the deepest level.
/// Counts are accumulated with a Gaussian kernel of fixed width in -log2 mass
/// (so a bin counts cells per unit of log-mass at every depth, which removes
/// the aliasing between fixed alpha bins and the 1/k exponent lattice of
/// exact cascades). f per bin is the OLS slope of ln N_k against k ln 2.
///
/// The automatic width is max(half the median gap between distinct log-mass
/// values at the coarsest depth, Silverman's rule on those values, half a
/// bin at the coarsest depth).
SpectrumCurve histogram_spectrum(const DepthSeries& series,
                                 const HistogramOptions& options = {});

/// Kernel width histogram_spectrum would pick for `series`.
double histogram_bandwidth(const DepthSeries& series, int bins);

/// Partition function Z(q, k) = sum_i mu_i^q and its Legendre pair.
struct PartitionFunction {
  std::vector<double> q_values;
  std::vector<int> depths;
  /// log2 Z(q_i, depths[j]) at [i * depths.size() + j].
  std::vector<double> log2_z;
  std::vector<double> tau;
  std::vector<double> alpha;
  std::vector<double> f;
  /// True where alpha came from a one-sided difference (the two end q's).
  std::vector<std::uint8_t> one_sided;

  double log2_partition(std::size_t qi, std::size_t di) const {
    return log2_z[qi * depths.size() + di];
  }

  /// D_q = tau(q) / (q - 1); throws for q == 1.
  double generalized_dimension(std::size_t qi) const;
};

struct MomentsSpectrum {
  PartitionFunction partition;
  /// (alpha(q), f(alpha(q))) over all q, sorted by alpha.
  SpectrumCurve curve;
  /// Same, restricted to the q's with central differences.
  SpectrumCurve interior_curve;
};

/// Method of moments: tau(q) is the OLS slope of log2 Z(q, k) against -k;
/// alpha(q) = d tau / d q by central differences (one-sided at the ends);
/// f = q alpha - tau. q_values must be strictly increasing, at least three,
/// with spacing <= 0.5.
MomentsSpectrum moments_spectrum(const DepthSeries& series,
                                 const std::vector<double>& q_values);

/// q from lo to hi inclusive in steps of `step`.
std::vector<double> q_grid(double lo, double hi, double step);

/// Number of points emitted by clt_spectrum for nonzero variance.
inline constexpr int kCltSamples = 65;

/// Gaussian approximation of the spectrum from exponent samples:
///   f(alpha) = D - (alpha - m)^2 / (2 s^2 k ln 2)
/// with m, s the sample mean and standard deviation. Sampled on m ± 3s
/// (the center point is m itself) and clipped to 0 <= f <= alpha.
SpectrumCurve clt_spectrum(const AlphaMap& samples, int k, double support_dim);

/// Box-counting dimension of the nonzero set of `mask` with non-overlapping
/// side-k tiles: OLS slope of ln N_k against -ln k.
double box_dimension(const Field& mask, const ScaleSet& scales);

}  // namespace mfcal
