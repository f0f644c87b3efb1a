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

#include "mfcal/field.hpp"
#include "mfcal/spectrum_curve.hpp"

namespace mfcal {

enum class CascadeDims { kOne, kTwoProduct };

/// Largest supported refinement depth for 2-D product cascades. A depth-14
/// field holds 4^14 = 268M doubles (2 GiB).
inline constexpr int kMaxDepth2d = 14;
/// Largest number of cells for a 1-D cascade (2^28 doubles, 2 GiB).
inline constexpr std::uint64_t kMaxCells1d = std::uint64_t{1} << 28;

/// Deterministic multiplicative cascade on the unit interval (or its
/// product square). weights[j] is the mass fraction passed to child j.
struct CascadeSpec {
  std::vector<double> weights;
  int depth = 1;
  CascadeDims dims = CascadeDims::kOne;
  std::uint64_t seed = 0;  // reserved for randomized variants

  static CascadeSpec binomial(double p, int depth,
                              CascadeDims dims = CascadeDims::kOne);

  /// Throws kInvalidArgument on weights outside (0, 1), weights not summing
  /// to 1 (tolerance 1e-12), depth < 1, or a depth beyond the memory caps.
  void validate() const;

  std::size_t arity() const noexcept { return weights.size(); }
};

/// 1-D cascade as a 1 x m^k single-channel field. Cell i holds the product
/// of the weights selected by the base-m digits of i, most significant
/// first; for the binomial case that is p^n0 (1-p)^(k-n0).
Field generate_cascade(const CascadeSpec& spec);

/// Binomial 1-D cascade; spec must have exactly two weights.
Field generate_binomial(const CascadeSpec& spec);

/// 2^k x 2^k product measure, cell (i, j) = mu1(i) * mu1(j).
Field generate_product_2d(const CascadeSpec& spec);

/// Coarse Hölder exponent of any binomial cell whose fraction of zero
/// digits is phi: -(phi log2 p + (1 - phi) log2 (1 - p)).
double analytic_alpha(double phi, double p);

/// Binary entropy in bits with 0 log 0 = 0; the spectrum value at phi.
double analytic_f(double phi);

/// (alpha, f) sampled at n_points zero-fractions uniformly spaced in [0, 1].
/// Both coordinates are doubled for the 2-D product cascade.
SpectrumCurve analytic_spectrum(double p, int n_points,
                                CascadeDims dims = CascadeDims::kOne);

/// tau(q) = -log2(p^q + (1-p)^q) of the 1-D binomial cascade.
double analytic_tau(double p, double q);

/// alpha(q) = d tau / d q in closed form.
double analytic_tau_alpha(double p, double q);

/// Conditioned measure mu(. ∩ Y) / mu(Y) for a binary mask Y.
Field restrict_measure(const Field& field, const Field& mask);

}  // namespace mfcal
