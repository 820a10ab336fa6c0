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

#include "mipt/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mipt {

MeanError mean_error(const std::vector<double> &values) {
    MeanError out;
    if (values.empty()) {
        return out;
    }
    double n = static_cast<double>(values.size());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0;
        for (double v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.error = std::sqrt(ss / (n - 1) / n);
    }
    return out;
}

std::vector<double> average_ranks(const std::vector<double> &values) {
    std::vector<size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            j++;
        }
        double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (size_t k = i; k <= j; k++) {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    return ranks;
}

double spearman(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("spearman needs equal-length inputs");
    }
    if (a.size() < 2) {
        return 0.0;
    }
    auto ra = average_ranks(a);
    auto rb = average_ranks(b);
    double n = static_cast<double>(a.size());
    double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (size_t i = 0; i < ra.size(); i++) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0 || sbb == 0) {
        return 0.0;
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace mipt
