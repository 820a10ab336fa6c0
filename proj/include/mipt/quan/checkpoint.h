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

#ifndef MIPT_QUAN_CHECKPOINT_H
#define MIPT_QUAN_CHECKPOINT_H

#include <string>

#include "mipt/quan/model.h"

namespace mipt::quan {

struct CheckpointMeta {
    size_t epoch = 0;
    double test_loss = 0.0;
    uint64_t seed = 0;
};

struct Checkpoint {
    ModelParams params;
    CheckpointMeta meta;
};

/// JSON text with fixed key order: format, config, tensors, metadata.
std::string checkpoint_to_string(const ModelParams &params, const CheckpointMeta &meta);
Checkpoint checkpoint_from_string(const std::string &text);

void save_checkpoint(const std::string &path, const ModelParams &params, const CheckpointMeta &meta);
/// Throws std::runtime_error on unreadable or malformed files.
Checkpoint load_checkpoint(const std::string &path);

}  // namespace mipt::quan

#endif
