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
#include <functional>

namespace mfcal {

/// Process-wide worker cap. Zero restores the default (hardware concurrency).
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs body(i) for i in [0, n) across up to thread_count() workers.
///
/// Indices are split into contiguous static blocks. Every index is
/// evaluated by exactly one worker, so any body that writes only to
/// slot i produces bit-identical results for every worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mfcal
