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

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "mfcal/attention.hpp"
#include "mfcal/error.hpp"
#include "mfcal/verify/oracles.hpp"

using namespace mfcal;
using doctest::Approx;

namespace {

BottleneckMlp random_mlp(std::mt19937_64& rng, std::size_t c, bool bias = true) {
  BottleneckMlp mlp = BottleneckMlp::glorot(c, 2, rng);
  mlp.use_bias = bias;
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  for (double& b : mlp.b1) b = d(rng);
  for (double& b : mlp.b2) b = d(rng);
  return mlp;
}

}  // namespace

TEST_CASE("pooling") {
  CHECK(gap(Field(3, 3, 1, 4.0))[0] == 4.0);
  CHECK(gsp(Field(3, 3, 1, 4.0))[0] == 0.0);
  const Field two(1, 2, 1, {0.0, 2.0});
  CHECK(gap(two)[0] == 1.0);
  CHECK(gsp(two)[0] == 1.0);

  std::mt19937_64 rng(31);
  const Field f = test::random_field(rng, 8, 8, 5);
  const std::vector<double> g = gap(f);
  const std::vector<double> bg = verify::brute_gap(f);
  const std::vector<double> s = gsp(f);
  const std::vector<double> bs = verify::brute_gsp(f);
  for (std::size_t c = 0; c < 5; ++c) {
    CHECK(std::abs(g[c] - bg[c]) < 1e-15);
    CHECK(std::abs(s[c] - bs[c]) < 1e-12);
  }
}

TEST_CASE("mlp construction") {
  CHECK_THROWS_AS(BottleneckMlp::zeros(4, 4), Error);
  CHECK_THROWS_AS(BottleneckMlp::zeros(4, 0), Error);
  CHECK(BottleneckMlp::zeros(8, 2).hidden == 4);
  CHECK(BottleneckMlp::zeros(7, 2).hidden == 3);
  std::mt19937_64 rng(1);
  const BottleneckMlp g = BottleneckMlp::glorot(8, 2, rng);
  const double limit = std::sqrt(6.0 / 12.0);
  for (double w : g.w1) CHECK(std::abs(w) <= limit);
  for (double b : g.b1) CHECK(b == 0.0);
}

TEST_CASE("squeeze-and-excitation") {
  std::mt19937_64 rng(32);
  const Field x = test::random_field(rng, 5, 6, 4);
  const BottleneckMlp zero = BottleneckMlp::zeros(4, 2);
  const ChannelRecalibration half = se_forward(x, zero, x);
  for (double g : half.gates) CHECK(g == 0.5);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(half.output.values()[i] == x.values()[i] / 2);

  BottleneckMlp saturated = zero;
  saturated.b2.assign(4, 50.0);
  const ChannelRecalibration sat = se_forward(x, saturated, x);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(sat.output.values()[i] == Approx(x.values()[i]).epsilon(1e-15));

  const BottleneckMlp mlp = random_mlp(rng, 4);
  const ChannelRecalibration r = se_forward(x, mlp, x);
  const std::vector<double> ref = verify::brute_mlp_gates(mlp, verify::brute_gap(x));
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(std::abs(r.gates[c] - ref[c]) < 1e-12);
    CHECK(r.gates[c] > 0.0);
    CHECK(r.gates[c] < 1.0);
  }
  for (std::size_t p = 0; p < x.pixels(); ++p) {
    for (std::size_t c = 0; c < 4; ++c) CHECK(r.output.values()[p * 4 + c] == x.values()[p * 4 + c] * r.gates[c]);
  }
  CHECK_THROWS_AS(se_forward(x, mlp, Field(5, 6, 3)), Error);
  CHECK_THROWS_AS(se_forward(Field(5, 6, 3), mlp, Field(5, 6, 3)), Error);
}

TEST_CASE("scSE") {
  std::mt19937_64 rng(33);
  const Field x = test::random_field(rng, 6, 6, 4);
  const BottleneckMlp mlp = random_mlp(rng, 4);
  const ScseOutput zero = scse_forward(x, mlp, SpatialProjection{std::vector<double>(4, 0.0), 0.0});
  const Field channel = se_forward(x, mlp, x).output;
  for (double s : zero.spatial_gates.values()) CHECK(s == 0.5);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(zero.output.values()[i] == std::max(channel.values()[i], x.values()[i] / 2));
  }

  const SpatialProjection spatial{{0.3, -0.7, 1.1, 0.2}, -0.1};
  CHECK(verify::max_abs_diff(scse_forward(x, mlp, spatial).output, verify::brute_scse(x, mlp, spatial)) < 1e-12);
  CHECK_THROWS_AS(scse_forward(x, mlp, SpatialProjection{{1.0}, 0.0}), Error);
}

TEST_CASE("SRM") {
  std::mt19937_64 rng(34);
  const Field x = test::random_field(rng, 6, 6, 4);
  SrmParams p{{0.5, -1.0, 2.0, 0.1}, {1.0, 0.3, -0.4, 2.0}, NormState::identity(4, NormMode::kFrozen)};
  p.norm.running_mean = {0.1, 0.2, -0.1, 0.0};
  p.norm.running_var = {0.5, 1.5, 1.0, 2.0};
  CHECK(verify::max_abs_diff(srm_forward(x, p).output, verify::brute_srm(x, p)) < 1e-12);

  // Without the style term the gate only sees the mean.
  SrmParams mean_only = p;
  mean_only.w_std.assign(4, 0.0);
  Field shifted = x;
  const std::vector<double> m = gap(x);
  for (std::size_t i = 0; i < x.size(); ++i) shifted.values()[i] = m[i % 4];
  const std::vector<double> a = srm_forward(x, mean_only).gates;
  const std::vector<double> b = srm_forward(shifted, mean_only).gates;
  for (std::size_t c = 0; c < 4; ++c) CHECK(a[c] == Approx(b[c]).epsilon(1e-14));
}

TEST_CASE("DCT basis") {
  const Field dc = dct_basis(5, 7, 0, 0);
  for (double v : dc.values()) CHECK(v == 1.0);
  const std::vector<FrequencyPair> freqs = lowest_frequencies(10, 8, 8);
  CHECK(freqs[0].i == 0);
  CHECK(freqs[1].i == 0);
  CHECK(freqs[1].j == 1);
  CHECK(freqs[2].i == 1);
  CHECK(freqs[2].j == 0);
  for (std::size_t a = 0; a < freqs.size(); ++a) {
    for (std::size_t b = a + 1; b < freqs.size(); ++b) {
      const Field u = dct_basis(8, 8, freqs[a].i, freqs[a].j);
      const Field v = dct_basis(8, 8, freqs[b].i, freqs[b].j);
      double dot = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) dot += u.values()[i] * v.values()[i];
      CHECK(std::abs(dot) < 1e-9);
    }
  }
  CHECK_THROWS_AS(dct_basis(4, 4, 4, 0), Error);
}

TEST_CASE("FCA") {
  std::mt19937_64 rng(35);
  const Field ints = test::integer_field(rng, 8, 8, 8, 255);
  const std::vector<FrequencyPair> dc = {{0, 0}};
  const std::vector<double> sq = dct_squeeze(ints, dc);
  const std::vector<double> m = gap(ints);
  for (std::size_t c = 0; c < 8; ++c) CHECK(sq[c] == 64.0 * m[c]);

  const Field x = test::random_field(rng, 8, 8, 8);
  const BottleneckMlp mlp = random_mlp(rng, 8);
  for (std::size_t groups : {1, 2, 4, 8}) {
    const std::vector<FrequencyPair> f = lowest_frequencies(groups, 8, 8);
    CHECK(verify::max_abs_diff(fca_forward(x, mlp, f).output, verify::brute_fca(x, mlp, f)) < 1e-9);
  }
  const std::vector<FrequencyPair> single = {{1, 2}};
  CHECK(verify::max_abs_diff(fca_forward(x, mlp, single).output, verify::brute_fca(x, mlp, single)) < 1e-9);
  CHECK_THROWS_AS(fca_forward(x, mlp, lowest_frequencies(3, 8, 8)), Error);
}

TEST_CASE("monofractal recalibration") {
  std::mt19937_64 rng(36);
  const std::vector<Field> batch = {test::random_field(rng, 8, 8, 4), test::random_field(rng, 8, 8, 4)};
  MonoParams params{BottleneckMlp::zeros(4, 2), NormState::identity(4)};
  const MonoOutput half = mono_forward(batch, params, HolderConfig{});
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t i = 0; i < batch[b].size(); ++i) CHECK(half.output[b].values()[i] == batch[b].values()[i] / 2);
  }

  params.mlp = random_mlp(rng, 4);
  for (NormMode mode : {NormMode::kPerInstance, NormMode::kFrozen}) {
    params.norm = NormState::identity(4, mode);
    params.norm.running_mean.assign(4, 2.0);
    const MonoOutput out = mono_forward(batch, params, HolderConfig{});
    const std::vector<Field> ref = verify::brute_mono(batch, params, {2, 3, 4}, kDefaultEpsilon);
    for (std::size_t b = 0; b < 2; ++b) CHECK(verify::max_abs_diff(out.output[b], ref[b]) < 1e-9);
  }
}

TEST_CASE("monofractal argmax is scale invariant with epsilon zero") {
  std::mt19937_64 rng(37);
  const std::vector<Field> batch = {test::random_field(rng, 8, 8, 4, 0.1, 1.0)};
  std::vector<Field> scaled = batch;
  for (double& v : scaled[0].values()) v *= 9.0;
  MonoParams params{random_mlp(rng, 4), NormState::identity(4, NormMode::kFrozen)};
  params.norm.running_mean.assign(4, 2.0);
  HolderConfig holder;
  holder.epsilon = 0.0;
  const std::vector<double> a = mono_forward(batch, params, holder).trace[0].gates;
  const std::vector<double> b = mono_forward(scaled, params, holder).trace[0].gates;
  CHECK(std::max_element(a.begin(), a.end()) - a.begin() == std::max_element(b.begin(), b.end()) - b.begin());
}

TEST_CASE("level-set membership") {
  std::mt19937_64 rng(38);
  const Field alpha = test::random_field(rng, 5, 5, 3, -2.0, 2.0);
  const MultiParams one = MultiParams::spanning(1, -1.0, 1.0);
  const std::vector<Field> single = multi_membership(alpha, one);
  for (double v : single[0].values()) CHECK(v == 1.0);

  MultiParams sep = MultiParams::spanning(3, -10.0, 10.0);
  const Field at_center(1, 1, 1, 0.0);
  CHECK(multi_membership(at_center, sep)[1].values()[0] == Approx(1.0).epsilon(1e-15));

  MultiParams p = MultiParams::spanning(6, -2.0, 2.0);
  std::uniform_real_distribution<double> d(0.3, 3.0);
  for (double& s : p.sharpness) s = d(rng);
  const std::vector<Field> m = multi_membership(alpha, p);
  const std::vector<Field> ref = verify::brute_membership(alpha, p);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    double total = 0.0;
    for (std::size_t q = 0; q < 6; ++q) {
      total += m[q].values()[i];
      CHECK(std::abs(m[q].values()[i] - ref[q].values()[i]) < 1e-12);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }

  // Shifting every center by c while shifting alpha by c leaves the
  // memberships unchanged.
  MultiParams shifted = p;
  for (double& c : shifted.centers) c += 0.75;
  Field moved = alpha;
  for (double& v : moved.values()) v += 0.75;
  const std::vector<Field> m2 = multi_membership(moved, shifted);
  for (std::size_t q = 0; q < 6; ++q) CHECK(verify::max_abs_diff(m[q], m2[q]) < 1e-12);
}

TEST_CASE("multifractal recalibration") {
  std::mt19937_64 rng(39);
  const std::vector<Field> stack = {test::random_field(rng, 6, 6, 4), test::random_field(rng, 6, 6, 4)};
  const std::vector<Field> alpha = {test::random_field(rng, 6, 6, 4, -1.0, 1.0),
                                    test::random_field(rng, 6, 6, 4, -1.0, 1.0)};

  const MultiOutput single = multi_forward(stack, alpha, MultiParams::spanning(1, -1, 1));
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t i = 0; i < stack[b].size(); ++i) {
      CHECK(single.gate[b].values()[i] == 0.5);
      CHECK(single.output[b].values()[i] == stack[b].values()[i] + 0.5);
    }
  }

  MultiParams dead = MultiParams::spanning(4, -1, 1);
  dead.level_norm.beta.assign(4, -100.0);
  const MultiOutput d = multi_forward(stack, alpha, dead);
  for (double g : d.gate[0].values()) CHECK(g == 0.5);

  MultiParams p = MultiParams::spanning(4, -1, 1);
  p.sharpness = {0.5, 1.0, 2.0, 1.5};
  p.level_norm.gamma = {1.0, 0.7, 1.3, 0.9};
  p.level_norm.beta = {0.1, -0.2, 0.3, 0.0};
  const MultiOutput out = multi_forward(stack, alpha, p);
  const std::vector<Field> ref = verify::brute_multi(stack, alpha, p);
  for (std::size_t b = 0; b < 2; ++b) {
    CHECK(verify::max_abs_diff(out.output[b], ref[b]) < 1e-12);
    for (std::size_t i = 0; i < stack[b].size(); ++i) {
      const double g = out.gate[b].values()[i];
      CHECK(g > 0.0);
      CHECK(g < 1.0);
      CHECK(out.output[b].values()[i] == stack[b].values()[i] + g);
    }
  }
  CHECK_THROWS_AS(multi_forward(stack, std::vector<Field>{alpha[0]}, p), Error);
}
