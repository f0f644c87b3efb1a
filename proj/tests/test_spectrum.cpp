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
#include "mfcal/cascade.hpp"
#include "mfcal/error.hpp"
#include "mfcal/holder.hpp"
#include "mfcal/spectrum.hpp"

using namespace mfcal;
using doctest::Approx;

namespace {

const double kAlphaStar = 1.0849625007211562;  // -log2(p (1 - p)) / 2 for p = 2/3

DepthSeries binomial_series(double p, int k0, int k1, CascadeDims dims = CascadeDims::kOne) {
  return cascade_series(CascadeSpec::binomial(p, k0, dims), k0, k1);
}

}  // namespace

TEST_CASE("dyadic pyramid sums blocks") {
  const Field fine = generate_binomial(CascadeSpec::binomial(0.3, 6));
  const DepthSeries pyr = dyadic_pyramid(fine, 3);
  REQUIRE(pyr.levels.size() == 3);
  CHECK(pyr.first_depth == 4);
  CHECK(pyr.last_depth() == 6);
  const Field coarse = generate_binomial(CascadeSpec::binomial(0.3, 4));
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    CHECK(pyr.levels[0].values()[i] == Approx(coarse.values()[i]).epsilon(1e-13));
  }
  const Field square = generate_product_2d(CascadeSpec::binomial(0.3, 5, CascadeDims::kTwoProduct));
  const DepthSeries sq = dyadic_pyramid(square, 2);
  CHECK(sq.levels[0].height() == 16);
  CHECK(sq.levels[0].sum() == Approx(1.0));
}

TEST_CASE("histogram method, monofractal limit") {
  const SpectrumCurve c = histogram_spectrum(binomial_series(0.5, 6, 10));
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c.samples[0].alpha - 1.0) < 0.02);
  CHECK(std::abs(c.samples[0].f - 1.0) < 0.02);
}

TEST_CASE("histogram method, binomial p = 2/3") {
  const SpectrumCurve c = histogram_spectrum(binomial_series(2.0 / 3.0, 8, 12));
  const SpectrumPoint peak = c.peak();
  CHECK(std::abs(peak.f - 1.0) < 0.1);
  CHECK(std::abs(peak.alpha - kAlphaStar) < 0.05);
  CHECK(c.max_excess_over_alpha() <= 1e-6);
}

TEST_CASE("histogram method on other weights") {
  for (double p : {0.55, 0.8}) {
    const SpectrumPoint peak = histogram_spectrum(binomial_series(p, 8, 12)).peak();
    CHECK(std::abs(peak.alpha - analytic_alpha(0.5, p)) < 0.05);
    CHECK(std::abs(peak.f - 1.0) < 0.1);
  }
}

TEST_CASE("histogram method, point mass") {
  DepthSeries s;
  s.first_depth = 4;
  for (int k = 4; k <= 8; ++k) {
    Field f(1, std::size_t{1} << k, 1, 0.0);
    f.values()[0] = 1.0;
    s.levels.push_back(f);
  }
  const SpectrumCurve c = histogram_spectrum(s);
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c.samples[0].alpha) < 1e-9);
  CHECK(std::abs(c.samples[0].f) < 1e-9);
}

TEST_CASE("histogram method preconditions") {
  CHECK_THROWS_AS(histogram_spectrum(binomial_series(0.6, 8, 8)), Error);
  HistogramOptions few;
  few.bins = 3;
  CHECK_THROWS_AS(histogram_spectrum(binomial_series(0.6, 6, 8), few), Error);
}

TEST_CASE("method of moments") {
  const MomentsSpectrum m = moments_spectrum(binomial_series(2.0 / 3.0, 8, 12), q_grid(-5, 5, 0.25));
  const PartitionFunction& pf = m.partition;
  REQUIRE(pf.q_values.size() == 41);
  for (std::size_t i = 0; i < pf.q_values.size(); ++i) {
    CHECK(std::abs(pf.tau[i] - analytic_tau(2.0 / 3.0, pf.q_values[i])) < 0.02);
    if (i > 0) CHECK(pf.tau[i] >= pf.tau[i - 1]);
    if (pf.q_values[i] == 0.0) CHECK(std::abs(pf.f[i] - 1.0) < 0.05);
    if (pf.q_values[i] == 1.0) {
      CHECK(std::abs(pf.tau[i]) < 1e-9);
      for (std::size_t d = 0; d < pf.depths.size(); ++d) CHECK(std::abs(pf.log2_partition(i, d)) < 1e-9);
    }
  }
  CHECK(pf.one_sided.front() == 1);
  CHECK(pf.one_sided.back() == 1);
  CHECK(pf.one_sided[20] == 0);
  CHECK(m.curve.max_excess_over_alpha() <= 1e-6);
  CHECK(m.interior_curve.size() == m.curve.size() - 2);

  // Generalized dimensions: D_0 = 1 for full support.
  CHECK(pf.generalized_dimension(20) == Approx(1.0));
  CHECK_THROWS_AS(pf.generalized_dimension(24), Error);
}

TEST_CASE("moments preconditions") {
  const DepthSeries s = binomial_series(0.6, 6, 8);
  CHECK_THROWS_AS(moments_spectrum(s, {0.0, 1.0}), Error);
  CHECK_THROWS_AS(moments_spectrum(s, {0.0, 1.0, 0.5}), Error);
  CHECK_THROWS_AS(moments_spectrum(s, {0.0, 1.0, 2.0}), Error);
}

TEST_CASE("moments max f matches the support dimension") {
  const Field mu = generate_product_2d(CascadeSpec::binomial(0.7, 8, CascadeDims::kTwoProduct));
  const MomentsSpectrum m = moments_spectrum(dyadic_pyramid(mu, 4), q_grid(-3, 3, 0.25));
  Field support = mu;
  for (double& v : support.values()) v = v > 0 ? 1.0 : 0.0;
  const double d = box_dimension(support, ScaleSet({2, 4, 8}));
  CHECK(std::abs(m.curve.max_sample().f - d) < 0.1);
}

TEST_CASE("histogram and moments agree at the peak") {
  const DepthSeries s = binomial_series(2.0 / 3.0, 8, 12);
  const SpectrumPoint h = histogram_spectrum(s).peak();
  const SpectrumPoint m = moments_spectrum(s, q_grid(-5, 5, 0.25)).curve.peak();
  CHECK(std::abs(h.alpha - m.alpha) < 0.1);
  CHECK(std::abs(h.f - m.f) < 0.1);
}

TEST_CASE("gaussian spectrum") {
  const SpectrumCurve flat = clt_spectrum(Field(4, 4, 1, 2.0), 10, 2.0);
  REQUIRE(flat.size() == 1);
  CHECK(flat.samples[0].alpha == 2.0);
  CHECK(flat.samples[0].f == 2.0);

  std::mt19937_64 rng(21);
  const Field samples = test::random_field(rng, 8, 8, 1, 1.5, 2.5);
  const SpectrumCurve c = clt_spectrum(samples, 10, 2.0);
  CHECK(c.size() == static_cast<std::size_t>(kCltSamples));
  CHECK(c.max_sample().alpha == mean_alpha(samples)[0]);
  CHECK(c.max_sample().f == 2.0);
  CHECK(c.max_excess_over_alpha() <= 1e-6);

  CHECK_THROWS_AS(clt_spectrum(Field(3, 3, 1, 1.0), 10, 2.0), Error);

  const Field mu = generate_product_2d(CascadeSpec::binomial(2.0 / 3.0, 10, CascadeDims::kTwoProduct));
  const SpectrumCurve g = clt_spectrum(holder_map(mu, ScaleSet::defaults(), 0.0), 10, 2.0);
  CHECK(std::abs(g.max_sample().alpha - 2.0 * kAlphaStar) < 0.05);
}

TEST_CASE("box dimension") {
  const ScaleSet s({2, 4, 8});
  CHECK(std::abs(box_dimension(Field(64, 64, 1, 1.0), s) - 2.0) < 1e-9);
  Field point(64, 64, 1, 0.0);
  point(5, 9, 0) = 1.0;
  CHECK(std::abs(box_dimension(point, s)) < 1e-9);
  Field line(64, 64, 1, 0.0);
  for (std::size_t w = 0; w < 64; ++w) line(30, w, 0) = 1.0;
  CHECK(std::abs(box_dimension(line, s) - 1.0) < 0.05);
  try {
    box_dimension(Field(8, 8, 1, 0.0), s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumerical);
  }
}

TEST_CASE("spectrum curve peak") {
  const SpectrumCurve c = SpectrumCurve::from_points({{1.0, 0.5}, {2.0, 1.0}, {3.0, 0.5}, {2.0, 0.9}});
  REQUIRE(c.size() == 3);
  CHECK(c.samples[1].f == 1.0);
  CHECK(c.peak(0.6).alpha == Approx(2.0));
  const SpectrumCurve skew = SpectrumCurve::from_points({{0.0, 0.0}, {1.0, 0.9}, {2.0, 1.0}, {3.0, 0.3}});
  CHECK(skew.peak().alpha == skew.max_sample().alpha);
}
