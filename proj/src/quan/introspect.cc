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

#include "mipt/quan/introspect.h"

#include <cmath>
#include <map>
#include <stdexcept>

#include "mipt/parallel.h"
#include "mipt/stats.h"

namespace mipt::quan {

namespace {

std::vector<double> temporal_output(const ModelParams &params, const TrajectoryRecord &record) {
    TemporalCache cache;
    return temporal_block(record, params, nullptr, cache);
}

std::vector<double> project(const Tensor &w, const std::vector<double> &y) {
    std::vector<double> out(w.rows, 0.0);
    for (size_t r = 0; r < w.rows; r++) {
        const double *wr = w.row(r);
        double s = 0;
        for (size_t c = 0; c < w.cols; c++) s += wr[c] * y[c];
        out[r] = s;
    }
    return out;
}

double dot(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); i++) s += a[i] * b[i];
    return s;
}

}  // namespace

double intertraj_scores_raw(const ModelParams &params, const TrajectoryRecord &record_i,
                            const TrajectoryRecord &record_j) {
    auto qi = project(params.inter[0].Q, temporal_output(params, record_i));
    auto kj = project(params.inter[0].K, temporal_output(params, record_j));
    return dot(qi, kj);
}

BornScoreTable group_by_born(const std::vector<double> &probabilities, const std::vector<double> &scores) {
    size_t n = probabilities.size();
    if (scores.size() != n * n) {
        throw std::invalid_argument("score matrix must be n x n");
    }
    std::map<long, std::pair<double, size_t>> bins;
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            if (i == j) continue;
            double q = probabilities[i] * probabilities[j];
            if (!(q > 0)) {
                throw std::invalid_argument("Born probabilities must be positive");
            }
            long b = static_cast<long>(std::floor(kBinsPerDecade * std::log10(q)));
            auto &cell = bins[b];
            cell.first += scores[i * n + j];
            cell.second++;
        }
    }
    BornScoreTable table;
    std::vector<double> centers, means;
    for (const auto &[b, cell] : bins) {
        BornScoreRow row;
        row.q_lo = std::pow(10.0, static_cast<double>(b) / kBinsPerDecade);
        row.q_hi = std::pow(10.0, static_cast<double>(b + 1) / kBinsPerDecade);
        row.q_center = std::pow(10.0, (static_cast<double>(b) + 0.5) / kBinsPerDecade);
        row.mean_score = cell.first / static_cast<double>(cell.second);
        row.pairs = cell.second;
        table.rows.push_back(row);
        centers.push_back(row.q_center);
        means.push_back(row.mean_score);
    }
    if (table.rows.size() >= 2) {
        table.spearman = spearman(centers, means);
    }
    return table;
}

BornScoreTable attention_vs_born(const ModelParams &params, const std::vector<TrajectoryRecord> &records,
                                 size_t t, const BornEstimate &born) {
    size_t n = records.size();
    if (n < 2) {
        throw std::invalid_argument("need at least two records");
    }
    std::vector<std::vector<double>> q(n), k(n);
    std::vector<double> probs(n);
    parallel_for(n, [&](size_t i) {
        auto y = temporal_output(params, records[i]);
        q[i] = project(params.inter[0].Q, y);
        k[i] = project(params.inter[0].K, y);
        probs[i] = born.probability(slice_key(records[i], t));
    });
    std::vector<double> scores(n * n, 0.0);
    parallel_for(n, [&](size_t i) {
        for (size_t j = 0; j < n; j++) scores[i * n + j] = dot(q[i], k[j]);
    });
    return group_by_born(probs, scores);
}

}  // namespace mipt::quan
