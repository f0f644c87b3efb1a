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

// Independent reference implementations. Nothing here calls the core
// routine it is meant to check: windows are summed by explicit loops,
// cascades are built cell by cell from bit counts, and the recalibration
// references evaluate every formula directly.

#include <cstdint>
#include <vector>

#include "mfcal/attention.hpp"
#include "mfcal/field.hpp"

namespace mfcal::verify {

/// Side-s window sum by a direct loop over the clipped window.
Field brute_window_sum(const Field& field, std::size_t side);

/// 1 x 2^k cascade with cell i = p^n0(i) (1-p)^(k-n0(i)).
Field bitcount_binomial(double p, int depth);

/// Number of zero bits in the low `depth` bits of i.
int zero_bits(std::uint64_t i, int depth);

std::uint64_t binomial_coefficient(int n, int k);

/// Per pixel: OLS slope of log(window sum + eps) against log side.
Field brute_holder_map(const Field& field, const std::vector<std::size_t>& sides, double eps);

std::vector<double> brute_gap(const Field& stack);
std::vector<double> brute_gsp(const Field& stack);
std::vector<double> brute_mlp_gates(const BottleneckMlp& mlp, const std::vector<double>& squeeze);

Field brute_se(const Field& stack, const BottleneckMlp& mlp, const Field& source);
Field brute_scse(const Field& stack, const BottleneckMlp& mlp, const SpatialProjection& spatial);
Field brute_srm(const Field& stack, const SrmParams& params);
Field brute_fca(const Field& stack, const BottleneckMlp& mlp, const std::vector<FrequencyPair>& freqs);

/// Batch-statistics (or frozen) normalization, per channel.
std::vector<Field> brute_normalize(const std::vector<Field>& batch, const NormState& state);

std::vector<Field> brute_mono(const std::vector<Field>& batch, const MonoParams& params,
                              const std::vector<std::size_t>& sides, double eps);

std::vector<Field> brute_membership(const Field& alpha, const MultiParams& params);

/// Gate fields sigmoid(sum_q relu(norm_q(p_q))); output = stack + gate.
std::vector<Field> brute_multi(const std::vector<Field>& stack, const std::vector<Field>& alpha,
                               const MultiParams& params);

double max_abs_diff(const Field& a, const Field& b);

}  // namespace mfcal::verify
