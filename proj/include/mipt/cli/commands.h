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

#ifndef MIPT_CLI_COMMANDS_H
#define MIPT_CLI_COMMANDS_H

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mipt/circuits.h"
#include "mipt/quan/train.h"

namespace mipt::cli {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

/// Entry point shared by the `mipt` binary and the tests. `args[0]` is the
/// program name. CSV output without an --out path goes to `out`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Simulates M records per class. Phase and reference-qubit tasks give one
/// class per gamma labeled by `labels`; the distinguish task gives a psi
/// (label 0) and a phi (label 1) class per gamma.
std::vector<quan::GammaData> generate_classes(TaskKind task, size_t L, const std::vector<double> &gammas,
                                              const std::vector<uint8_t> &labels, size_t M,
                                              const NoiseModel &noise, uint64_t seed);

/// Seed of the file or class for (gamma, initial state) under a run seed.
uint64_t class_seed(uint64_t seed, double gamma, InitialState initial);

}  // namespace mipt::cli

#endif
