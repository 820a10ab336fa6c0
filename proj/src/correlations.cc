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

#include "mipt/correlations.h"

#include <stdexcept>

namespace mipt {

MeanError spatiotemporal_corr(const std::vector<TrajectoryRecord> &records, size_t dt) {
    if (records.empty()) {
        throw std::invalid_argument("correlator needs at least one record");
    }
    size_t L = records[0].L;
    size_t T = 2 * L;
    if (dt < 1 || dt >= T) {
        throw std::invalid_argument("dt must lie in [1, 2L)");
    }
    size_t points = (T - dt) * L;
    std::vector<uint64_t> hits(points, 0);
    for (const auto &r : records) {
        if (r.L != L) {
            throw std::invalid_argument("records must share L");
        }
        for (size_t t0 = 0; t0 + dt < T; t0++) {
            for (size_t x = 0; x < L; x++) {
                hits[t0 * L + x] += r.bit(t0, x) & r.bit(t0 + dt, x);
            }
        }
    }
    std::vector<double> per_point(points);
    double m = static_cast<double>(records.size());
    for (size_t i = 0; i < points; i++) {
        per_point[i] = static_cast<double>(hits[i]) / m;
    }
    return mean_error(per_point);
}

}  // namespace mipt
