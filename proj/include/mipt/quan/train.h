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

#ifndef MIPT_QUAN_TRAIN_H
#define MIPT_QUAN_TRAIN_H

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mipt/circuits.h"
#include "mipt/dataset.h"
#include "mipt/quan/model.h"

namespace mipt::quan {

struct TrainConfig {
    ModelConfig model;
    double learning_rate = 1e-4;
    double l2 = 5e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    /// Sets per minibatch = max(1, trajectories_per_batch / N).
    size_t trajectories_per_batch = 32768;
    size_t max_epochs = 2000;
    /// Stop after this many epochs without a new best test loss; 0 disables.
    size_t patience = 200;
    size_t shuffle_period = 10;
    uint64_t seed = 0;

    void validate() const;
};

struct AdamState {
    std::vector<std::vector<double>> m, v;
    uint64_t step = 0;

    explicit AdamState(const ModelParams &params);
};

/// Adam with bias correction; the L2 term is added to the gradient first.
void adam_step(ModelParams &params, const ModelParams &grads, AdamState &state, const TrainConfig &config);

/// All records measured at one gamma. Unlabeled data is evaluated but not trained on.
struct GammaData {
    double gamma = 0.0;
    std::optional<uint8_t> label;
    std::vector<TrajectoryRecord> records;
};

/// Sets of N records drawn from one gamma class, all carrying that class label.
std::vector<TrajectorySet> class_sets(const GammaData &data, size_t N, Rng &rng);

struct EpochLoss {
    size_t epoch = 0;
    double train_loss = 0.0;
    double test_loss = 0.0;
};

struct TrainResult {
    ModelParams best;
    size_t best_epoch = 0;
    double best_test_loss = 0.0;
    std::vector<EpochLoss> history;
};

/// Mean BCE over labeled sets in eval mode.
double evaluate_loss(const ModelParams &params, const std::vector<TrajectorySet> &sets);

/// Trains from a fresh initialization and keeps the parameters with the lowest
/// test loss. Test sets are drawn once from `test`.
TrainResult train(const std::vector<GammaData> &train_data, const std::vector<GammaData> &test_data,
                  const TrainConfig &config, const std::function<void(const EpochLoss &)> &on_epoch = {});

}  // namespace mipt::quan

#endif
