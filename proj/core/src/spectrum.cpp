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

#include "mfcal/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mfcal/error.hpp"
#include "mfcal/parallel.hpp"
#include "mfcal/regression.hpp"

namespace mfcal {

DepthSeries cascade_series(const CascadeSpec& base, int k_min, int k_max) {
  if (k_min < 1 || k_max < k_min) throw_invalid("invalid depth range");
  DepthSeries series;
  series.first_depth = k_min;
  for (int k = k_min; k <= k_max; ++k) {
    CascadeSpec spec = base;
    spec.depth = k;
    series.levels.push_back(spec.dims == CascadeDims::kTwoProduct
                                ? generate_product_2d(spec)
                                : generate_cascade(spec));
  }
  return series;
}

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

Field coarsen(const Field& f) {
  const bool one_d = f.height() == 1;
  const std::size_t H = one_d ? 1 : f.height() / 2;
  const std::size_t W = f.width() / 2;
  Field out(H, W, 1);
  for (std::size_t h = 0; h < H; ++h) {
    for (std::size_t w = 0; w < W; ++w) {
      if (one_d) {
        out(0, w, 0) = f(0, 2 * w, 0) + f(0, 2 * w + 1, 0);
      } else {
        out(h, w, 0) = f(2 * h, 2 * w, 0) + f(2 * h, 2 * w + 1, 0) +
                       f(2 * h + 1, 2 * w, 0) + f(2 * h + 1, 2 * w + 1, 0);
      }
    }
  }
  return out;
}

// Positive cells of a measure, normalized to unit mass.
std::vector<double> normalized_mass(const Field& field) {
  if (!field.all_finite() || !field.all_nonnegative()) {
    throw_invalid("measure must be finite and nonnegative");
  }
  const double total = field.sum();
  if (!(total > 0.0)) throw_numerical("measure has zero total mass");
  std::vector<double> out;
  out.reserve(field.size());
  for (double v : field.values()) {
    if (v > 0.0) out.push_back(v / total);
  }
  return out;
}

// Sorted -log2 masses of the occupied cells.
std::vector<double> sorted_log_mass(const Field& field) {
  std::vector<double> mass = normalized_mass(field);
  for (double& v : mass) v = -std::log2(v);
  std::sort(mass.begin(), mass.end());
  return mass;
}

void require_series(const DepthSeries& series) {
  if (series.levels.size() < 2) throw_invalid("spectrum estimation needs at least 2 depths");
  if (series.first_depth < 1) throw_invalid("depths must be >= 1");
}

double depth_of(const DepthSeries& s, std::size_t i) {
  return static_cast<double>(s.first_depth + static_cast<int>(i));
}

}  // namespace

DepthSeries dyadic_pyramid(const Field& finest, int count) {
  if (finest.channels() != 1) throw_invalid("dyadic_pyramid needs one channel");
  const bool one_d = finest.height() == 1;
  if (!is_power_of_two(finest.width()) ||
      (!one_d && finest.height() != finest.width())) {
    throw_invalid("dyadic_pyramid needs a 1 x 2^K or 2^K x 2^K field");
  }
  const int depth = log2_exact(finest.width());
  if (count < 1 || count > depth) {
    throw_invalid("dyadic_pyramid: count must lie in [1, " + std::to_string(depth) + "]");
  }
  std::vector<Field> levels{finest};
  for (int i = 1; i < count; ++i) levels.push_back(coarsen(levels.back()));
  std::reverse(levels.begin(), levels.end());
  return DepthSeries{depth - count + 1, std::move(levels)};
}

// Histogram method -----------------------------------------------------------

namespace {

double median_distinct_gap(const std::vector<double>& sorted) {
  std::vector<double> gaps;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double gap = sorted[i] - sorted[i - 1];
    if (gap > 1e-9 * std::max(1.0, std::abs(sorted[i]))) gaps.push_back(gap);
  }
  if (gaps.empty()) return 0.0;
  const std::size_t mid = gaps.size() / 2;
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(mid), gaps.end());
  return gaps[mid];
}

double silverman(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return 1.06 * sd * std::pow(static_cast<double>(v.size()), -0.2);
}

struct ExponentRange {
  double lo = 0.0;
  double hi = 0.0;
};

ExponentRange deepest_range(const std::vector<double>& deepest_log_mass, double k) {
  return {deepest_log_mass.front() / k, deepest_log_mass.back() / k};
}

}  // namespace

double histogram_bandwidth(const DepthSeries& series, int bins) {
  require_series(series);
  if (bins < 4) throw_invalid("histogram needs at least 4 bins");
  const std::vector<double> coarse = sorted_log_mass(series.levels.front());
  const std::vector<double> deep = sorted_log_mass(series.levels.back());
  const ExponentRange range = deepest_range(deep, depth_of(series, series.levels.size() - 1));
  const double bin_width = (range.hi - range.lo) / bins;
  return std::max({0.5 * median_distinct_gap(coarse), silverman(coarse),
                   0.5 * bin_width * series.first_depth});
}

SpectrumCurve histogram_spectrum(const DepthSeries& series,
                                 const HistogramOptions& options) {
  require_series(series);
  if (options.bins < 4) throw_invalid("histogram needs at least 4 bins");
  const std::size_t depths = series.levels.size();
  std::vector<std::vector<double>> log_mass(depths);
  parallel_for(depths, [&](std::size_t i) { log_mass[i] = sorted_log_mass(series.levels[i]); });

  std::vector<double> x(depths);
  for (std::size_t i = 0; i < depths; ++i) x[i] = depth_of(series, i) * std::numbers::ln2;
  const SlopeFit fit(x);

  const double deepest_k = depth_of(series, depths - 1);
  const ExponentRange range = deepest_range(log_mass.back(), deepest_k);

  // Single exponent value (monofractal or point mass): one bin holding every
  // occupied cell.
  if (range.hi - range.lo <= 1e-12 * std::max(1.0, std::abs(range.hi))) {
    std::vector<double> y(depths);
    for (std::size_t i = 0; i < depths; ++i) {
      y[i] = std::log(static_cast<double>(log_mass[i].size()));
    }
    double alpha = 0.0;
    for (double v : log_mass.back()) alpha += v / deepest_k;
    alpha /= static_cast<double>(log_mass.back().size());
    return SpectrumCurve::from_points({{alpha, fit.slope(y)}});
  }

  const int bins = options.bins;
  const double bin_width = (range.hi - range.lo) / bins;
  const double bandwidth = options.log_mass_bandwidth > 0.0
                               ? options.log_mass_bandwidth
                               : histogram_bandwidth(series, bins);
  const double norm = 1.0 / (bandwidth * std::sqrt(2.0 * std::numbers::pi));
  const double reach = 8.0 * bandwidth;

  // counts[b * depths + i]
  std::vector<double> counts(static_cast<std::size_t>(bins) * depths, 0.0);
  parallel_for(static_cast<std::size_t>(bins), [&](std::size_t b) {
    const double center = range.lo + (static_cast<double>(b) + 0.5) * bin_width;
    for (std::size_t i = 0; i < depths; ++i) {
      const double target = depth_of(series, i) * center;
      const auto& lm = log_mass[i];
      auto it = std::lower_bound(lm.begin(), lm.end(), target - reach);
      double n = 0.0;
      for (; it != lm.end() && *it <= target + reach; ++it) {
        const double z = (target - *it) / bandwidth;
        n += std::exp(-0.5 * z * z);
      }
      counts[b * depths + i] = n * norm;
    }
  });

  std::vector<SpectrumPoint> points;
  std::vector<double> y(depths);
  for (int b = 0; b < bins; ++b) {
    bool occupied = true;
    for (std::size_t i = 0; i < depths; ++i) {
      const double n = counts[static_cast<std::size_t>(b) * depths + i];
      if (!(n >= options.min_count)) {
        occupied = false;
        break;
      }
      y[i] = std::log(n);
    }
    if (!occupied) continue;
    const double center = range.lo + (b + 0.5) * bin_width;
    points.push_back({center, fit.slope(y)});
  }
  return SpectrumCurve::from_points(std::move(points));
}

// Method of moments ------------------------------------------------------------

double PartitionFunction::generalized_dimension(std::size_t qi) const {
  const double q = q_values.at(qi);
  if (q == 1.0) throw_invalid("D_q is undefined at q = 1 in this form");
  return tau[qi] / (q - 1.0);
}

std::vector<double> q_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw_invalid("invalid q grid");
  std::vector<double> q;
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  for (std::size_t i = 0; i <= n; ++i) q.push_back(lo + static_cast<double>(i) * step);
  return q;
}

MomentsSpectrum moments_spectrum(const DepthSeries& series,
                                 const std::vector<double>& q_values) {
  require_series(series);
  if (q_values.size() < 3) throw_invalid("method of moments needs at least 3 q values");
  for (std::size_t i = 1; i < q_values.size(); ++i) {
    const double dq = q_values[i] - q_values[i - 1];
    if (!(dq > 0.0)) throw_invalid("q values must be strictly increasing");
    if (dq > 0.5 + 1e-12) throw_invalid("q spacing must be <= 0.5");
  }

  const std::size_t depths = series.levels.size();
  const std::size_t nq = q_values.size();
  PartitionFunction pf;
  pf.q_values = q_values;
  for (std::size_t i = 0; i < depths; ++i) pf.depths.push_back(series.first_depth + static_cast<int>(i));
  pf.log2_z.assign(nq * depths, 0.0);

  std::vector<std::vector<double>> log_mass(depths);
  parallel_for(depths, [&](std::size_t i) {
    log_mass[i] = normalized_mass(series.levels[i]);
    for (double& v : log_mass[i]) v = std::log2(v);
  });

  parallel_for(nq, [&](std::size_t qi) {
    const double q = q_values[qi];
    for (std::size_t i = 0; i < depths; ++i) {
      // log2 sum 2^(q log2 mu), shifted by the largest term.
      double top = -INFINITY;
      for (double lm : log_mass[i]) top = std::max(top, q * lm);
      double acc = 0.0;
      for (double lm : log_mass[i]) acc += std::exp2(q * lm - top);
      pf.log2_z[qi * depths + i] = top + std::log2(acc);
    }
  });

  std::vector<double> neg_k(depths);
  for (std::size_t i = 0; i < depths; ++i) neg_k[i] = -depth_of(series, i);
  const SlopeFit fit(neg_k);
  pf.tau.resize(nq);
  for (std::size_t qi = 0; qi < nq; ++qi) {
    pf.tau[qi] = fit.slope(std::span<const double>(pf.log2_z).subspan(qi * depths, depths));
  }

  pf.alpha.resize(nq);
  pf.f.resize(nq);
  pf.one_sided.assign(nq, 0);
  for (std::size_t qi = 0; qi < nq; ++qi) {
    const std::size_t lo = qi == 0 ? 0 : qi - 1;
    const std::size_t hi = qi + 1 == nq ? qi : qi + 1;
    pf.one_sided[qi] = (qi == 0 || qi + 1 == nq) ? 1 : 0;
    pf.alpha[qi] = (pf.tau[hi] - pf.tau[lo]) / (q_values[hi] - q_values[lo]);
    pf.f[qi] = q_values[qi] * pf.alpha[qi] - pf.tau[qi];
  }

  std::vector<SpectrumPoint> all;
  std::vector<SpectrumPoint> interior;
  for (std::size_t qi = 0; qi < nq; ++qi) {
    all.push_back({pf.alpha[qi], pf.f[qi]});
    if (!pf.one_sided[qi]) interior.push_back({pf.alpha[qi], pf.f[qi]});
  }
  MomentsSpectrum out;
  out.partition = std::move(pf);
  out.curve = SpectrumCurve::from_points(std::move(all), 1e-9);
  out.interior_curve = SpectrumCurve::from_points(std::move(interior), 1e-9);
  return out;
}

// Gaussian approximation -------------------------------------------------------

SpectrumCurve clt_spectrum(const AlphaMap& samples, int k, double support_dim) {
  if (k < 1) throw_invalid("clt_spectrum: k must be >= 1");
  if (!(support_dim >= 0.0)) throw_invalid("clt_spectrum: support dimension must be >= 0");
  const auto v = samples.values();
  if (v.size() < 16) throw_invalid("clt_spectrum needs at least 16 samples");
  double mean = 0.0;
  for (double a : v) mean += a;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double a : v) ss += (a - mean) * (a - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));

  auto clip = [](double alpha, double f) { return std::clamp(f, 0.0, std::max(0.0, alpha)); };
  if (!(sd > 0.0)) {
    return SpectrumCurve::from_points({{mean, clip(mean, support_dim)}});
  }
  const int half = (kCltSamples - 1) / 2;
  const double step = 3.0 * sd / half;
  const double curvature = 1.0 / (2.0 * sd * sd * k * std::numbers::ln2);
  std::vector<SpectrumPoint> points;
  points.reserve(kCltSamples);
  for (int i = -half; i <= half; ++i) {
    const double alpha = i == 0 ? mean : mean + i * step;
    const double d = alpha - mean;
    points.push_back({alpha, clip(alpha, support_dim - d * d * curvature)});
  }
  return SpectrumCurve::from_points(std::move(points), 0.0);
}

// Box counting -------------------------------------------------------------------

double box_dimension(const Field& mask, const ScaleSet& scales) {
  const std::size_t H = mask.height();
  const std::size_t W = mask.width();
  bool any = false;
  for (double v : mask.values()) any = any || v != 0.0;
  if (!any) throw_numerical("box_dimension: mask is empty");

  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t side : scales.sides()) {
    const std::size_t rows = (H + side - 1) / side;
    const std::size_t cols = (W + side - 1) / side;
    std::size_t occupied = 0;
    for (std::size_t ti = 0; ti < rows; ++ti) {
      for (std::size_t tj = 0; tj < cols; ++tj) {
        bool hit = false;
        for (std::size_t h = ti * side; h < std::min(H, (ti + 1) * side) && !hit; ++h) {
          for (std::size_t w = tj * side; w < std::min(W, (tj + 1) * side) && !hit; ++w) {
            for (std::size_t c = 0; c < mask.channels(); ++c) {
              if (mask(h, w, c) != 0.0) {
                hit = true;
                break;
              }
            }
          }
        }
        occupied += hit ? 1 : 0;
      }
    }
    x.push_back(-std::log(static_cast<double>(side)));
    y.push_back(std::log(static_cast<double>(occupied)));
  }
  return ols_slope(x, y);
}

}  // namespace mfcal
