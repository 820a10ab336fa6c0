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

#ifndef MIPT_QUAN_INTROSPECT_H
#define MIPT_QUAN_INTROSPECT_H

#include <vector>

#include "mipt/borndist.h"
#include "mipt/quan/model.h"

namespace mipt::quan {

/// Unnormalized first-layer inter-trajectory score (Q_s y_i) . (K_s y_j),
/// without the 1/sqrt(L) factor or softmax.
double intertraj_scores_raw(const ModelParams &params, const TrajectoryRecord &record_i,
                            const TrajectoryRecord &record_j);

struct BornScoreRow {
    double q_lo = 0.0;
    double q_hi = 0.0;
    /// Geometric bin center.
    double q_center = 0.0;
    double mean_score = 0.0;
    size_t pairs = 0;
};

struct BornScoreTable {
    /// Ascending in q.
    std::vector<BornScoreRow> rows;
    /// Spearman correlation between bin center and mean score; 0 with fewer than two bins.
    double spearman = 0.0;
};

constexpr int kBinsPerDecade = 8;

/// Groups all ordered pairs i != j by q = p_i p_j in log bins and averages the raw score.
BornScoreTable attention_vs_born(const ModelParams &params, const std::vector<TrajectoryRecord> &records,
                                 size_t t, const BornEstimate &born);

/// Same grouping for externally supplied scores, indexed [i * n + j].
BornScoreTable group_by_born(const std::vector<double> &probabilities, const std::vector<double> &scores);

}  // namespace mipt::quan

#endif
