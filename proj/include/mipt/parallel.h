// Copyright 2026 The mipt-quan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIPT_PARALLEL_H
#define MIPT_PARALLEL_H

#include <cstddef>
#include <functional>

namespace mipt {

/// Number of worker threads used by data-parallel loops. Reads MIPT_THREADS
/// on first use, falling back to the hardware concurrency.
size_t worker_count();
void set_worker_count(size_t n);

/// Calls body(i) for every i in [0, n). Each index is handled exactly once;
/// callers write results into slot i so the output never depends on the
/// worker count. Exceptions from workers are rethrown on the calling thread.
void parallel_for(size_t n, const std::function<void(size_t)> &body);

}  // namespace mipt

#endif
