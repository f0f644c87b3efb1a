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

// Runs the acceptance criteria and prints one line per criterion.

#include <cstdio>

#include "mfcal/verify/acceptance.hpp"

int main() {
  const mfcal::verify::AcceptanceReport report = mfcal::verify::run_acceptance();
  for (const auto& r : report.criteria) std::printf("%s\n", mfcal::verify::format_result(r).c_str());
  std::printf("%s\n", report.passed() ? "all criteria passed" : "acceptance FAILED");
  return report.passed() ? 0 : 1;
}
