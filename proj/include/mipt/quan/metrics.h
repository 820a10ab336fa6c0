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

#ifndef MIPT_QUAN_METRICS_H
#define MIPT_QUAN_METRICS_H

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "mipt/quan/model.h"
#include "mipt/quan/train.h"

namespace mipt::quan {

struct GammaPrediction {
    double gamma = 0.0;
    double mean_prediction = 0.0;
    double error = 0.0;
    size_t sets = 0;
};

struct EvalMetrics {
    /// Sorted by gamma.
    std::vector<GammaPrediction> per_gamma;
    /// Mean of Y y + (1 - Y)(1 - y) over labeled sets; empty without labels.
    std::optional<double> pcorr;
    /// Empty when the mean prediction never crosses 0.5.
    std::optional<double> gamma_star;
    std::optional<double> sharpness;
};

/// Eval-mode predictions for every set.
std::vector<double> predict_sets(const ModelParams &params, const std::vector<TrajectorySet> &sets);

/// Sets are drawn once per gamma with a seed derived from `seed`.
EvalMetrics eval_metrics(const ModelParams &params, const std::vector<GammaData> &data, uint64_t seed);

/// First linear-interpolated crossing of 0.5 along ascending gamma. Points
/// exactly at 0.5 between a sign change give the mean of their gammas; a
/// curve that never changes side has no crossing.
std::optional<double> gamma_star(const std::vector<double> &gammas, const std::vector<double> &mean_y);

/// Centered difference of mean_y at the grid point nearest `at` (one-sided at the edges).
double sharpness(const std::vector<double> &gammas, const std::vector<double> &mean_y, double at);

/// Smallest M whose loss is at most epsilon; empty when none qualifies.
std::optional<size_t> minimal_sample_complexity(const std::map<size_t, double> &loss_by_M,
                                                double epsilon = 0.1);

}  // namespace mipt::quan

#endif
