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

#ifndef MIPT_ORDERPARAM_H
#define MIPT_ORDERPARAM_H

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mipt/statevec.h"

namespace mipt {

struct SweepRow {
    size_t L = 0;
    double gamma = 0.0;
    /// Mean reference-qubit entropy in bits.
    double mean_sq = 0.0;
    double error = 0.0;
    size_t M = 0;
};

using SweepTable = std::vector<SweepRow>;

/// M reference-qubit trajectories per (L, gamma) cell. Each cell draws from
/// its own stream derived from (master_seed, L, gamma). Requires M >= 100.
SweepTable sq_sweep(const std::vector<size_t> &Ls, const std::vector<double> &gammas, size_t M,
                    const NoiseModel &noise, uint64_t master_seed);

/// Seed of one sweep cell.
uint64_t sweep_cell_seed(uint64_t master_seed, size_t L, double gamma);

class NoCrossing : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Gamma where the piecewise-linear <S_Q>(gamma) curves of L1 and L2 meet.
/// With several intersections, the one nearest the middle of the span of
/// sign changes is returned. Throws NoCrossing when the curves never meet.
double crossing_estimate(const SweepTable &table, size_t L1, size_t L2);

}  // namespace mipt

#endif
