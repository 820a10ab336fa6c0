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

#include "mipt/quan/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mipt/parallel.h"
#include "mipt/stats.h"

namespace mipt::quan {

std::vector<double> predict_sets(const ModelParams &params, const std::vector<TrajectorySet> &sets) {
    std::vector<double> out(sets.size());
    parallel_for(sets.size(), [&](size_t i) { out[i] = predict(sets[i], params); });
    return out;
}

EvalMetrics eval_metrics(const ModelParams &params, const std::vector<GammaData> &data, uint64_t seed) {
    if (data.empty()) {
        throw std::invalid_argument("no datasets to evaluate");
    }
    std::vector<size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return data[a].gamma < data[b].gamma; });

    EvalMetrics out;
    double correct = 0;
    size_t labeled = 0;
    for (size_t i : order) {
        if (data[i].records.size() < params.config.N) {
            throw std::invalid_argument("dataset has fewer records than the model's N");
        }
        Rng rng(hash64(seed, i));
        auto sets = class_sets(data[i], params.config.N, rng);
        auto preds = predict_sets(params, sets);
        MeanError me = mean_error(preds);
        out.per_gamma.push_back({data[i].gamma, me.mean, me.error, preds.size()});
        if (data[i].label) {
            double Y = *data[i].label;
            for (double y : preds) correct += Y * y + (1.0 - Y) * (1.0 - y);
            labeled += preds.size();
        }
    }
    if (labeled > 0) {
        out.pcorr = correct / static_cast<double>(labeled);
    }
    std::vector<double> g, y;
    for (const auto &row : out.per_gamma) {
        g.push_back(row.gamma);
        y.push_back(row.mean_prediction);
    }
    out.gamma_star = gamma_star(g, y);
    if (out.gamma_star && g.size() >= 2) {
        out.sharpness = sharpness(g, y, *out.gamma_star);
    }
    return out;
}

std::optional<double> gamma_star(const std::vector<double> &gammas, const std::vector<double> &mean_y) {
    if (gammas.size() != mean_y.size()) {
        throw std::invalid_argument("gamma and prediction grids differ in length");
    }
    // A crossing needs a sign change between points off the 0.5 line; a curve
    // that only touches or sits on 0.5 has none.
    std::optional<size_t> prev;
    for (size_t i = 0; i < gammas.size(); i++) {
        double f = mean_y[i] - 0.5;
        if (f == 0.0) continue;
        if (prev && (mean_y[*prev] - 0.5 < 0) != (f < 0)) {
            size_t a = *prev;
            if (i == a + 1) {
                double f0 = mean_y[a] - 0.5;
                double t = f0 / (f0 - f);
                return gammas[a] + t * (gammas[i] - gammas[a]);
            }
            double sum = 0;
            for (size_t k = a + 1; k < i; k++) sum += gammas[k];
            return sum / static_cast<double>(i - a - 1);
        }
        prev = i;
    }
    return std::nullopt;
}

double sharpness(const std::vector<double> &gammas, const std::vector<double> &mean_y, double at) {
    size_t n = gammas.size();
    if (n < 2 || mean_y.size() != n) {
        throw std::invalid_argument("sharpness needs at least two grid points");
    }
    size_t k = 0;
    for (size_t i = 1; i < n; i++) {
        if (std::abs(gammas[i] - at) < std::abs(gammas[k] - at)) k = i;
    }
    size_t lo = k == 0 ? 0 : k - 1;
    size_t hi = k + 1 == n ? k : k + 1;
    return (mean_y[hi] - mean_y[lo]) / (gammas[hi] - gammas[lo]);
}

std::optional<size_t> minimal_sample_complexity(const std::map<size_t, double> &loss_by_M, double epsilon) {
    for (const auto &[M, loss] : loss_by_M) {
        if (loss <= epsilon) {
            return M;
        }
    }
    return std::nullopt;
}

}  // namespace mipt::quan
