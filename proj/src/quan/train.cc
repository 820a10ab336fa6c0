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

#include "mipt/quan/train.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mipt/parallel.h"

namespace mipt::quan {

namespace {

// Sets per gradient chunk. Chunks are reduced in index order, so the result
// does not depend on the worker count.
constexpr size_t kChunk = 4;

enum Stream : uint64_t { kInit = 1, kTestSets = 2, kTrainSets = 3, kOrder = 4, kDrop = 5 };

uint64_t stream(uint64_t seed, Stream s) { return hash64(seed, static_cast<uint64_t>(s)); }

}  // namespace

void TrainConfig::validate() const {
    model.validate();
    if (!(learning_rate > 0) || !(l2 >= 0) || !(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1) ||
        !(adam_eps > 0)) {
        throw std::invalid_argument("invalid optimizer settings");
    }
    if (trajectories_per_batch == 0 || max_epochs == 0 || shuffle_period == 0) {
        throw std::invalid_argument("batch size, epochs and shuffle period must be positive");
    }
}

AdamState::AdamState(const ModelParams &params) {
    for (const Tensor *t : params.tensors()) {
        m.emplace_back(t->size(), 0.0);
        v.emplace_back(t->size(), 0.0);
    }
}

void adam_step(ModelParams &params, const ModelParams &grads, AdamState &state, const TrainConfig &config) {
    state.step++;
    double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    auto ps = params.tensors();
    auto gs = grads.tensors();
    for (size_t i = 0; i < ps.size(); i++) {
        std::vector<double> &m = state.m[i];
        std::vector<double> &v = state.v[i];
        for (size_t j = 0; j < ps[i]->size(); j++) {
            double p = ps[i]->values[j];
            double g = gs[i]->values[j] + config.l2 * p;
            m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g;
            v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g * g;
            double mhat = m[j] / bc1;
            double vhat = v[j] / bc2;
            ps[i]->values[j] = p - config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_eps);
        }
    }
}

std::vector<TrajectorySet> class_sets(const GammaData &data, size_t N, Rng &rng) {
    SetPartition part = make_sets(data.records, N, rng);
    for (TrajectorySet &s : part.sets) {
        s.label = data.label.value_or(0);
    }
    return std::move(part.sets);
}

double evaluate_loss(const ModelParams &params, const std::vector<TrajectorySet> &sets) {
    if (sets.empty()) {
        throw std::invalid_argument("no sets to evaluate");
    }
    std::vector<double> preds(sets.size()), labels(sets.size());
    parallel_for(sets.size(), [&](size_t i) {
        preds[i] = predict(sets[i], params);
        labels[i] = static_cast<double>(sets[i].label);
    });
    return bce_loss(preds, labels);
}

TrainResult train(const std::vector<GammaData> &train_data, const std::vector<GammaData> &test_data,
                  const TrainConfig &config, const std::function<void(const EpochLoss &)> &on_epoch) {
    config.validate();
    size_t N = config.model.N;
    auto check = [&](const std::vector<GammaData> &data, const char *what) {
        if (data.empty()) {
            throw std::invalid_argument(std::string(what) + " data has no classes");
        }
        for (const GammaData &d : data) {
            if (!d.label) {
                throw std::invalid_argument(std::string(what) + " data must be labeled");
            }
            if (d.records.size() < N) {
                throw std::invalid_argument(std::string(what) + " class has fewer records than N");
            }
            for (const TrajectoryRecord &r : d.records) {
                if (r.L != config.model.L) {
                    throw std::invalid_argument("record L does not match the model");
                }
            }
        }
    };
    check(train_data, "training");
    check(test_data, "test");

    TrainResult result{ModelParams::initialize(config.model, stream(config.seed, kInit)), 0,
                       std::numeric_limits<double>::infinity(), {}};
    ModelParams params = result.best;

    std::vector<TrajectorySet> test_sets;
    for (size_t c = 0; c < test_data.size(); c++) {
        Rng rng(hash64(stream(config.seed, kTestSets), c));
        auto sets = class_sets(test_data[c], N, rng);
        test_sets.insert(test_sets.end(), sets.begin(), sets.end());
    }

    AdamState adam(params);
    size_t batch_sets = std::max<size_t>(1, config.trajectories_per_batch / N);
    std::vector<TrajectorySet> train_sets;
    uint64_t global_step = 0;

    for (size_t epoch = 0; epoch < config.max_epochs; epoch++) {
        if (epoch % config.shuffle_period == 0) {
            train_sets.clear();
            for (size_t c = 0; c < train_data.size(); c++) {
                Rng rng(hash64(hash64(stream(config.seed, kTrainSets), c), epoch / config.shuffle_period));
                auto sets = class_sets(train_data[c], N, rng);
                train_sets.insert(train_sets.end(), sets.begin(), sets.end());
            }
        }
        Rng order_rng(hash64(stream(config.seed, kOrder), epoch));
        std::vector<size_t> order = random_permutation(train_sets.size(), order_rng);

        double epoch_loss = 0;
        for (size_t start = 0; start < order.size(); start += batch_sets) {
            size_t count = std::min(batch_sets, order.size() - start);
            size_t chunks = (count + kChunk - 1) / kChunk;
            std::vector<ModelParams> chunk_grads(chunks, ModelParams(config.model));
            std::vector<double> chunk_loss(chunks, 0.0);
            uint64_t step_key = hash64(stream(config.seed, kDrop), global_step);
            parallel_for(chunks, [&](size_t ch) {
                size_t lo = ch * kChunk, hi = std::min(count, lo + kChunk);
                for (size_t i = lo; i < hi; i++) {
                    Rng drop(hash64(step_key, i));
                    chunk_loss[ch] += set_loss_and_grad(train_sets[order[start + i]], params, &drop,
                                                        chunk_grads[ch]);
                }
            });
            for (size_t ch = 1; ch < chunks; ch++) {
                chunk_grads[0].add_scaled(chunk_grads[ch], 1.0);
            }
            ModelParams &grads = chunk_grads[0];
            for (Tensor *t : grads.tensors()) {
                for (double &g : t->values) g /= static_cast<double>(count);
            }
            adam_step(params, grads, adam, config);
            global_step++;
            for (double l : chunk_loss) epoch_loss += l;
        }

        EpochLoss entry{epoch + 1, epoch_loss / static_cast<double>(order.size()),
                        evaluate_loss(params, test_sets)};
        result.history.push_back(entry);
        if (on_epoch) on_epoch(entry);
        if (entry.test_loss < result.best_test_loss) {
            result.best_test_loss = entry.test_loss;
            result.best_epoch = entry.epoch;
            result.best = params;
        } else if (config.patience > 0 && entry.epoch - result.best_epoch >= config.patience) {
            break;
        }
    }
    return result;
}

}  // namespace mipt::quan
