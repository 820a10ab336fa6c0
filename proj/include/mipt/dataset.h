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

#ifndef MIPT_DATASET_H
#define MIPT_DATASET_H

#include <cstdint>
#include <string>
#include <vector>

#include "mipt/circuits.h"
#include "mipt/rng.h"

/// Trajectory files.
///
/// Layout (little-endian):
///   "MQTJ" | u16 version=1 | u16 L | u16 T | f64 gamma | u8 task | u8 label |
///   u8 noise_flag | f64 p1q | f64 p2q | u64 count | u64 master_seed
/// followed by `count` records of ceil(2L^2 / 8) bytes each. Bit index
/// t * L + x lives in byte (index / 8) at bit (index % 8), LSB first.
///
/// Record i is assumed to be trajectory index i of the master seed, so its
/// trajectory_seed is reconstructed as hash64(master_seed, i) on read.
namespace mipt {

constexpr uint16_t kTrajectoryFileVersion = 1;
constexpr size_t kTrajectoryHeaderBytes = 53;

struct DatasetMeta {
    size_t L = 0;
    double gamma = 0.0;
    TaskKind task = TaskKind::StateDistinguish;
    uint8_t label = 0;
    NoiseModel noise;
    uint64_t master_seed = 0;
};

struct TrajectoryFile {
    DatasetMeta meta;
    std::vector<TrajectoryRecord> records;
};

size_t record_bytes(size_t L);
std::vector<uint8_t> pack_bits(const TrajectoryRecord &record);
void unpack_bits(const uint8_t *bytes, TrajectoryRecord &record);

/// Throws std::invalid_argument when a record disagrees with the metadata.
void write_trajectories(const std::string &path, const DatasetMeta &meta,
                        const std::vector<TrajectoryRecord> &records);
/// Throws std::runtime_error on bad magic, version, or truncated payload.
TrajectoryFile read_trajectories(const std::string &path);

/// `<path without extension>.manifest.json`.
std::string manifest_path(const std::string &path);
std::string sha256_file(const std::string &path);
/// Writes the JSON sidecar {l, t, gamma, task, label, count, seed, sha256}.
void write_manifest(const std::string &path, const DatasetMeta &meta, size_t count);

struct TrajectorySet {
    std::vector<TrajectoryRecord> records;
    uint8_t label = 0;
};

struct SetPartition {
    std::vector<TrajectorySet> sets;
    /// Set when N exceeds the number of records.
    bool too_few_records = false;
};

/// Uniform random permutation of [0, n) by Fisher-Yates.
std::vector<size_t> random_permutation(size_t n, Rng &rng);

/// Permutes the records and cuts floor(M / N) consecutive sets of N.
SetPartition make_sets(const std::vector<TrajectoryRecord> &records, size_t N, Rng &rng);

/// make_sets keyed by (master_seed, epoch / 10), so the partition is stable
/// for ten epochs at a time.
SetPartition reshuffle_sets(const std::vector<TrajectoryRecord> &records, size_t N, size_t epoch,
                            uint64_t master_seed);

/// Cyclic spatial shift: out(t, x) = in(t, (x - shift) mod L).
TrajectoryRecord translate_record(const TrajectoryRecord &record, long shift);

}  // namespace mipt

#endif
