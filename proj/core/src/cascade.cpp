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

#include "mfcal/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfcal/error.hpp"

namespace mfcal {

CascadeSpec CascadeSpec::binomial(double p, int depth, CascadeDims dims) {
  CascadeSpec spec;
  spec.weights = {p, 1.0 - p};
  spec.depth = depth;
  spec.dims = dims;
  return spec;
}

void CascadeSpec::validate() const {
  if (weights.size() < 2) throw_invalid("cascade needs at least two weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0 && w < 1.0)) {
      throw_invalid("cascade weights must lie in the open interval (0, 1)");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw_invalid("cascade weights must sum to 1");
  }
  if (depth < 1) throw_invalid("cascade depth must be >= 1");
  if (dims == CascadeDims::kTwoProduct) {
    if (weights.size() != 2) {
      throw_invalid("2-D product cascades are binomial (two weights)");
    }
    if (depth > kMaxDepth2d) {
      throw_invalid("2-D cascade depth " + std::to_string(depth) +
                    " exceeds the cap of " + std::to_string(kMaxDepth2d) +
                    " (4^k doubles)");
    }
  }
  const double cells = std::pow(static_cast<double>(weights.size()), depth);
  if (cells > static_cast<double>(kMaxCells1d)) {
    throw_invalid("1-D cascade with " + std::to_string(weights.size()) +
                  "^" + std::to_string(depth) + " cells exceeds the 2^28 cap");
  }
}

Field generate_cascade(const CascadeSpec& spec) {
  spec.validate();
  const std::size_t m = spec.arity();
  std::vector<double> cells{1.0};
  for (int round = 0; round < spec.depth; ++round) {
    std::vector<double> next(cells.size() * m);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        next[i * m + j] = cells[i] * spec.weights[j];
      }
    }
    cells = std::move(next);
  }
  const std::size_t n = cells.size();
  return Field(1, n, 1, std::move(cells));
}

Field generate_binomial(const CascadeSpec& spec) {
  if (spec.weights.size() != 2) {
    throw_invalid("binomial cascade needs exactly two weights");
  }
  CascadeSpec one_d = spec;
  one_d.dims = CascadeDims::kOne;
  return generate_cascade(one_d);
}

Field generate_product_2d(const CascadeSpec& spec) {
  spec.validate();
  CascadeSpec one_d = spec;
  one_d.dims = CascadeDims::kOne;
  const Field line = generate_binomial(one_d);
  const std::size_t n = line.width();
  Field out(n, n, 1);
  const auto mu = line.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j, 0) = mu[i] * mu[j];
  }
  return out;
}

namespace {

void require_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw_invalid("p must lie in (0, 1)");
}

void require_fraction(double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw_invalid("phi must lie in [0, 1]");
}

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

double analytic_alpha(double phi, double p) {
  require_fraction(phi);
  require_probability(p);
  return -(phi * std::log2(p) + (1.0 - phi) * std::log2(1.0 - p));
}

double analytic_f(double phi) {
  require_fraction(phi);
  return -(xlog2x(phi) + xlog2x(1.0 - phi));
}

SpectrumCurve analytic_spectrum(double p, int n_points, CascadeDims dims) {
  require_probability(p);
  if (n_points < 3) throw_invalid("analytic_spectrum needs n_points >= 3");
  const double scale = dims == CascadeDims::kTwoProduct ? 2.0 : 1.0;
  std::vector<SpectrumPoint> points;
  points.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double phi = static_cast<double>(i) / (n_points - 1);
    points.push_back({scale * analytic_alpha(phi, p), scale * analytic_f(phi)});
  }
  return SpectrumCurve::from_points(std::move(points));
}

double analytic_tau(double p, double q) {
  require_probability(p);
  return -std::log2(std::pow(p, q) + std::pow(1.0 - p, q));
}

double analytic_tau_alpha(double p, double q) {
  require_probability(p);
  const double a = std::pow(p, q);
  const double b = std::pow(1.0 - p, q);
  return -(a * std::log(p) + b * std::log(1.0 - p)) / ((a + b) * std::log(2.0));
}

Field restrict_measure(const Field& field, const Field& mask) {
  require_same_shape(field, mask, "restrict_measure");
  double mass = 0.0;
  const auto m = mask.values();
  const auto v = field.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (m[i] != 0.0 && m[i] != 1.0) {
      throw_invalid("restrict_measure: mask values must be 0 or 1");
    }
    if (m[i] == 1.0) mass += v[i];
  }
  if (!(mass > 0.0)) throw_numerical("restriction has zero measure");
  Field out(field.height(), field.width(), field.channels());
  auto o = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    o[i] = m[i] == 1.0 ? v[i] / mass : 0.0;
  }
  return out;
}

}  // namespace mfcal
