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

#include "mipt/orderparam.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "mipt/circuits.h"
#include "mipt/stats.h"

namespace mipt {

uint64_t sweep_cell_seed(uint64_t master_seed, size_t L, double gamma) {
    return hash64(hash64(master_seed, L), std::bit_cast<uint64_t>(gamma));
}

SweepTable sq_sweep(const std::vector<size_t> &Ls, const std::vector<double> &gammas, size_t M,
                    const NoiseModel &noise, uint64_t master_seed) {
    if (M < 100) {
        throw std::invalid_argument("sweeps need at least 100 trajectories per cell");
    }
    SweepTable table;
    for (size_t L : Ls) {
        for (double gamma : gammas) {
            CircuitConfig cfg;
            cfg.L = L;
            cfg.gamma = gamma;
            cfg.task = TaskKind::ReferenceQubit;
            cfg.noise = noise;
            cfg.master_seed = sweep_cell_seed(master_seed, L, gamma);
            TrajectorySampler sampler(cfg);
            auto results = sampler.sample_reference_many(0, M);
            std::vector<double> sq(M);
            for (size_t i = 0; i < M; i++) {
                sq[i] = results[i].s_q;
            }
            MeanError me = mean_error(sq);
            table.push_back({L, gamma, me.mean, me.error, M});
        }
    }
    return table;
}

double crossing_estimate(const SweepTable &table, size_t L1, size_t L2) {
    std::map<double, double> a, b;
    for (const auto &row : table) {
        if (row.L == L1) a[row.gamma] = row.mean_sq;
        if (row.L == L2) b[row.gamma] = row.mean_sq;
    }
    if (L1 == L2 || a.empty() || a.size() != b.size()) {
        throw std::invalid_argument("both sizes must be present on the same gamma grid");
    }
    std::vector<double> g, f;
    for (const auto &[gamma, v] : a) {
        auto it = b.find(gamma);
        if (it == b.end()) {
            throw std::invalid_argument("both sizes must be present on the same gamma grid");
        }
        g.push_back(gamma);
        f.push_back(v - it->second);
    }

    std::vector<double> roots;
    double span_lo = 0, span_hi = 0;
    for (size_t i = 0; i < g.size(); i++) {
        bool found = false;
        double lo = g[i], hi = g[i];
        if (f[i] == 0) {
            roots.push_back(g[i]);
            found = true;
        } else if (i + 1 < g.size() && f[i + 1] != 0 && (f[i] < 0) != (f[i + 1] < 0)) {
            double t = f[i] / (f[i] - f[i + 1]);
            roots.push_back(g[i] + t * (g[i + 1] - g[i]));
            hi = g[i + 1];
            found = true;
        }
        if (found) {
            if (roots.size() == 1) span_lo = lo;
            span_hi = hi;
        }
    }
    if (roots.empty()) {
        throw NoCrossing("curves do not cross on the gamma grid");
    }
    double mid = 0.5 * (span_lo + span_hi);
    double best = roots[0];
    for (double r : roots) {
        if (std::abs(r - mid) < std::abs(best - mid)) {
            best = r;
        }
    }
    return best;
}

}  // namespace mipt
