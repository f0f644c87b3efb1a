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

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mfcal/io.hpp"

namespace mfcal::verify {

/// Reference values the criteria compare against. Overriding one (the
/// CLI's --golden key=value) lets a fault be injected on purpose.
struct Golden {
  double monofractal_alpha = 2.0;
  double product_alpha = 0.0;  // 2 * analytic_alpha(1/2, 2/3), filled in by defaults()
  double support_dim = 2.0;
  double tau_offset = 0.0;     // added to analytic_tau
  double box_full = 2.0;
  double box_point = 0.0;
  double box_line = 1.0;
  double membership_total = 1.0;
  double threshold_k = 2.0;

  static Golden defaults();
  /// Applies key=value; returns false for an unknown key.
  bool set(const std::string& key, double value);
  static std::vector<std::string> keys();
};

struct AcceptanceOptions {
  Golden golden = Golden::defaults();
  /// MLPs without biases; covariance records use the uncentered form.
  bool strict_paper = false;
  /// Second worker count for the determinism criterion. Zero picks one that
  /// differs from the current setting.
  std::size_t alternate_threads = 0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  // zero when the criterion has none
  std::string mode;         // "default" or "strict-paper"
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  /// File name -> content of every artifact the suite produces.
  std::map<std::string, Bytes> artifacts;

  bool passed() const noexcept;
};

AcceptanceReport run_acceptance(const AcceptanceOptions& options = {});

/// The artifact set alone, as produced with the current worker count.
std::map<std::string, Bytes> build_artifacts(const AcceptanceOptions& options);

/// "[PASS] 3 multifractal oracle (1.23 s): detail"
std::string format_result(const CriterionResult& result);

}  // namespace mfcal::verify
