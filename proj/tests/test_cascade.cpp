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

#include "helpers.hpp"
#include "mfcal/cascade.hpp"
#include "mfcal/error.hpp"
#include "mfcal/verify/oracles.hpp"

using namespace mfcal;
using doctest::Approx;

TEST_CASE("binomial cascade examples") {
  const Field uniform = generate_binomial(CascadeSpec::binomial(0.5, 3));
  CHECK(uniform.width() == 8);
  for (double v : uniform.values()) CHECK(v == 0.125);

  const Field k1 = generate_binomial(CascadeSpec::binomial(2.0 / 3.0, 1));
  CHECK(k1.values()[0] == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(k1.values()[1] == Approx(1.0 / 3.0).epsilon(1e-15));

  const Field k2 = generate_binomial(CascadeSpec::binomial(2.0 / 3.0, 2));
  const double expect[] = {4.0 / 9, 2.0 / 9, 2.0 / 9, 1.0 / 9};
  for (int i = 0; i < 4; ++i) CHECK(k2.values()[i] == Approx(expect[i]).epsilon(1e-15));
}

TEST_CASE("cascade matches the bit-count oracle and sums to one") {
  for (double p : {0.2, 0.5, 2.0 / 3.0, 0.9}) {
    for (int k = 1; k <= 14; ++k) {
      const Field f = generate_binomial(CascadeSpec::binomial(p, k));
      CHECK(verify::max_abs_diff(f, verify::bitcount_binomial(p, k)) <= 1e-12);
      CHECK(std::abs(f.sum() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("cell exponents match the analytic exponent") {
  const double p = 2.0 / 3.0;
  const int k = 11;
  const Field f = generate_binomial(CascadeSpec::binomial(p, k));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const int n0 = verify::zero_bits(i, k);
    const double coarse = -std::log2(f.values()[i]) / k;
    CHECK(std::abs(coarse - analytic_alpha(static_cast<double>(n0) / k, p)) <= 1e-12);
  }
}

TEST_CASE("product cascade") {
  const Field uniform = generate_product_2d(CascadeSpec::binomial(0.5, 2, CascadeDims::kTwoProduct));
  CHECK(uniform.height() == 4);
  for (double v : uniform.values()) CHECK(v == 0.0625);

  const Field k1 = generate_product_2d(CascadeSpec::binomial(2.0 / 3.0, 1, CascadeDims::kTwoProduct));
  CHECK(k1(0, 0, 0) == Approx(4.0 / 9));
  CHECK(k1(0, 1, 0) == Approx(2.0 / 9));
  CHECK(k1(1, 0, 0) == Approx(2.0 / 9));
  CHECK(k1(1, 1, 0) == Approx(1.0 / 9));

  const int k = 6;
  const Field line = generate_binomial(CascadeSpec::binomial(0.3, k));
  const Field square = generate_product_2d(CascadeSpec::binomial(0.3, k, CascadeDims::kTwoProduct));
  CHECK(std::abs(square.sum() - 1.0) <= 1e-12);
  for (std::size_t i = 0; i < square.height(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < square.width(); ++j) row += square(i, j, 0);
    CHECK(row == Approx(line.values()[i]).epsilon(1e-12));
  }
}

TEST_CASE("multinomial cascade") {
  CascadeSpec spec;
  spec.weights = {0.5, 0.3, 0.2};
  spec.depth = 4;
  const Field f = generate_cascade(spec);
  CHECK(f.width() == 81);
  CHECK(std::abs(f.sum() - 1.0) <= 1e-12);
  // Cell 5 = digits 0012 in base 3.
  CHECK(f.values()[5] == Approx(0.5 * 0.5 * 0.3 * 0.2).epsilon(1e-14));
}

TEST_CASE("cascade spec validation") {
  CHECK_THROWS_AS(CascadeSpec::binomial(1.0, 3).validate(), Error);
  CHECK_THROWS_AS(CascadeSpec::binomial(0.0, 3).validate(), Error);
  CHECK_THROWS_AS(CascadeSpec::binomial(0.5, 0).validate(), Error);
  CHECK_THROWS_AS(CascadeSpec::binomial(0.5, kMaxDepth2d + 1, CascadeDims::kTwoProduct).validate(), Error);
  CascadeSpec bad;
  bad.weights = {0.5, 0.4};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("analytic exponents and spectrum") {
  for (double phi : {0.0, 0.3, 1.0}) CHECK(analytic_alpha(phi, 0.5) == Approx(1.0));
  CHECK(analytic_alpha(0.5, 2.0 / 3.0) == Approx(1.0849625007).epsilon(1e-10));
  CHECK(analytic_alpha(2.0 / 3.0, 2.0 / 3.0) == Approx(0.9182958341).epsilon(1e-10));
  CHECK(analytic_f(0.5) == 1.0);
  CHECK(analytic_f(0.0) == 0.0);
  CHECK(analytic_f(1.0) == 0.0);
  CHECK(analytic_f(2.0 / 3.0) == Approx(0.9182958341).epsilon(1e-10));

  const SpectrumCurve one = analytic_spectrum(2.0 / 3.0, 101);
  CHECK(one.max_sample().f == Approx(1.0));
  CHECK(one.max_sample().alpha == Approx(1.0849625007).epsilon(1e-10));
  CHECK(one.max_excess_over_alpha() <= 1e-9);
  for (std::size_t i = 1; i < one.size(); ++i) CHECK(one.samples[i].alpha > one.samples[i - 1].alpha);

  const SpectrumCurve two = analytic_spectrum(2.0 / 3.0, 101, CascadeDims::kTwoProduct);
  CHECK(two.max_sample().f == Approx(2.0));
  CHECK(two.max_excess_over_alpha() <= 1e-9);

  const SpectrumCurve flat = analytic_spectrum(0.5, 33);
  REQUIRE(flat.size() == 1);
  CHECK(flat.samples[0].alpha == Approx(1.0));
  CHECK(flat.samples[0].f == Approx(1.0));
}

TEST_CASE("analytic tau") {
  for (double p : {0.2, 2.0 / 3.0}) {
    CHECK(analytic_tau(p, 1.0) == Approx(0.0).epsilon(1e-15));
    CHECK(analytic_tau(p, 0.0) == Approx(-1.0));
  }
  const double a0 = analytic_tau_alpha(2.0 / 3.0, 0.0);
  CHECK(a0 == Approx(1.0849625007).epsilon(1e-10));
  CHECK(0.0 * a0 - analytic_tau(2.0 / 3.0, 0.0) == Approx(1.0));
  for (double q : {-3.0, -0.5, 0.7, 4.0}) {
    const double h = 1e-6;
    const double fd = (analytic_tau(0.3, q + h) - analytic_tau(0.3, q - h)) / (2 * h);
    CHECK(analytic_tau_alpha(0.3, q) == Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("restricted measure") {
  const Field mu = generate_binomial(CascadeSpec::binomial(0.5, 2));
  CHECK(restrict_measure(mu, Field(1, 4, 1, 1.0)) == mu);

  const Field half_mask(1, 4, 1, {1, 1, 0, 0});
  const Field r = restrict_measure(mu, half_mask);
  CHECK(r.values()[0] == 0.5);
  CHECK(r.values()[1] == 0.5);
  CHECK(r.values()[2] == 0.0);
  CHECK(restrict_measure(r, half_mask) == r);

  try {
    restrict_measure(mu, Field(1, 4, 1, 0.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumerical);
    CHECK(std::string(e.what()).find("restriction has zero measure") != std::string::npos);
  }
  CHECK_THROWS_AS(restrict_measure(mu, Field(1, 4, 1, 0.5)), Error);
}
