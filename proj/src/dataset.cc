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

#include "mipt/dataset.h"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mipt {

namespace {

template <typename T>
void put_le(std::vector<uint8_t> &out, T value) {
    static_assert(std::is_integral_v<T>);
    for (size_t i = 0; i < sizeof(T); i++) {
        out.push_back(static_cast<uint8_t>(static_cast<uint64_t>(value) >> (8 * i)));
    }
}

void put_f64(std::vector<uint8_t> &out, double value) {
    put_le<uint64_t>(out, std::bit_cast<uint64_t>(value));
}

template <typename T>
T get_le(const uint8_t *p) {
    uint64_t v = 0;
    for (size_t i = 0; i < sizeof(T); i++) {
        v |= static_cast<uint64_t>(p[i]) << (8 * i);
    }
    return static_cast<T>(v);
}

double get_f64(const uint8_t *p) {
    return std::bit_cast<double>(get_le<uint64_t>(p));
}

}  // namespace

size_t record_bytes(size_t L) {
    return (2 * L * L + 7) / 8;
}

std::vector<uint8_t> pack_bits(const TrajectoryRecord &record) {
    std::vector<uint8_t> out(record_bytes(record.L), 0);
    for (size_t i = 0; i < record.bits.size(); i++) {
        if (record.bits[i]) {
            out[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
        }
    }
    return out;
}

void unpack_bits(const uint8_t *bytes, TrajectoryRecord &record) {
    size_t n = 2 * record.L * record.L;
    record.bits.resize(n);
    for (size_t i = 0; i < n; i++) {
        record.bits[i] = (bytes[i / 8] >> (i % 8)) & 1u;
    }
}

void write_trajectories(const std::string &path, const DatasetMeta &meta,
                        const std::vector<TrajectoryRecord> &records) {
    if (meta.L == 0 || meta.L > 0xFFFF / 2) {
        throw std::invalid_argument("invalid L in dataset metadata");
    }
    for (const auto &r : records) {
        if (r.L != meta.L || r.bits.size() != 2 * meta.L * meta.L) {
            throw std::invalid_argument("record shape does not match dataset metadata");
        }
        if (r.gamma != meta.gamma || r.task != meta.task || r.label != meta.label) {
            throw std::invalid_argument("record metadata does not match dataset metadata");
        }
    }

    std::vector<uint8_t> buf;
    buf.reserve(kTrajectoryHeaderBytes + records.size() * record_bytes(meta.L));
    buf.insert(buf.end(), {'M', 'Q', 'T', 'J'});
    put_le<uint16_t>(buf, kTrajectoryFileVersion);
    put_le<uint16_t>(buf, static_cast<uint16_t>(meta.L));
    put_le<uint16_t>(buf, static_cast<uint16_t>(2 * meta.L));
    put_f64(buf, meta.gamma);
    put_le<uint8_t>(buf, static_cast<uint8_t>(meta.task));
    put_le<uint8_t>(buf, meta.label);
    put_le<uint8_t>(buf, meta.noise.any() ? 1 : 0);
    put_f64(buf, meta.noise.p1q);
    put_f64(buf, meta.noise.p2q);
    put_le<uint64_t>(buf, records.size());
    put_le<uint64_t>(buf, meta.master_seed);
    for (const auto &r : records) {
        auto packed = pack_bits(r);
        buf.insert(buf.end(), packed.begin(), packed.end());
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out.write(reinterpret_cast<const char *>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

TrajectoryFile read_trajectories(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::vector<uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < kTrajectoryHeaderBytes) {
        throw std::runtime_error("'" + path + "' is too short for a trajectory header");
    }
    if (std::memcmp(buf.data(), "MQTJ", 4) != 0) {
        throw std::runtime_error("'" + path + "' has bad magic");
    }
    const uint8_t *p = buf.data() + 4;
    uint16_t version = get_le<uint16_t>(p);
    if (version != kTrajectoryFileVersion) {
        throw std::runtime_error("unsupported trajectory file version " + std::to_string(version));
    }
    TrajectoryFile f;
    f.meta.L = get_le<uint16_t>(p + 2);
    uint16_t T = get_le<uint16_t>(p + 4);
    if (f.meta.L == 0 || T != 2 * f.meta.L) {
        throw std::runtime_error("inconsistent L/T in trajectory header");
    }
    f.meta.gamma = get_f64(p + 6);
    uint8_t task = p[14];
    if (task > 2) {
        throw std::runtime_error("unknown task code in trajectory header");
    }
    f.meta.task = static_cast<TaskKind>(task);
    f.meta.label = p[15];
    uint8_t noise_flag = p[16];
    f.meta.noise.p1q = get_f64(p + 17);
    f.meta.noise.p2q = get_f64(p + 25);
    if ((noise_flag != 0) != f.meta.noise.any()) {
        throw std::runtime_error("noise flag disagrees with noise rates");
    }
    uint64_t count = get_le<uint64_t>(p + 33);
    f.meta.master_seed = get_le<uint64_t>(p + 41);

    size_t rb = record_bytes(f.meta.L);
    if (count > (buf.size() - kTrajectoryHeaderBytes) / rb ||
        buf.size() != kTrajectoryHeaderBytes + count * rb) {
        throw std::runtime_error("'" + path + "' payload length does not match its record count");
    }
    f.records.resize(count);
    for (uint64_t i = 0; i < count; i++) {
        TrajectoryRecord &r = f.records[i];
        r.L = f.meta.L;
        r.gamma = f.meta.gamma;
        r.task = f.meta.task;
        r.label = f.meta.label;
        r.trajectory_seed = hash64(f.meta.master_seed, i);
        unpack_bits(buf.data() + kTrajectoryHeaderBytes + i * rb, r);
    }
    return f;
}

std::string manifest_path(const std::string &path) {
    size_t slash = path.find_last_of('/');
    size_t dot = path.find_last_of('.');
    std::string base = (dot != std::string::npos && (slash == std::string::npos || dot > slash))
                           ? path.substr(0, dot)
                           : path;
    return base + ".manifest.json";
}

std::string sha256_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    EVP_MD_CTX *ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char chunk[1 << 16];
    while (in) {
        in.read(chunk, sizeof(chunk));
        EVP_DigestUpdate(ctx, chunk, static_cast<size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; i++) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

void write_manifest(const std::string &path, const DatasetMeta &meta, size_t count) {
    nlohmann::ordered_json j;
    j["l"] = meta.L;
    j["t"] = 2 * meta.L;
    j["gamma"] = meta.gamma;
    j["task"] = task_name(meta.task);
    j["label"] = meta.label;
    j["count"] = count;
    j["seed"] = meta.master_seed;
    j["sha256"] = sha256_file(path);
    std::ofstream out(manifest_path(path), std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write manifest for '" + path + "'");
    }
    out << j.dump(2) << "\n";
}

std::vector<size_t> random_permutation(size_t n, Rng &rng) {
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; i++) {
        perm[i] = i;
    }
    for (size_t i = n; i > 1; i--) {
        size_t j = rng.below(i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

SetPartition make_sets(const std::vector<TrajectoryRecord> &records, size_t N, Rng &rng) {
    if (N == 0) {
        throw std::invalid_argument("set size must be at least 1");
    }
    SetPartition out;
    if (N > records.size()) {
        out.too_few_records = true;
        return out;
    }
    auto perm = random_permutation(records.size(), rng);
    size_t num_sets = records.size() / N;
    out.sets.resize(num_sets);
    for (size_t s = 0; s < num_sets; s++) {
        TrajectorySet &set = out.sets[s];
        set.records.reserve(N);
        for (size_t k = 0; k < N; k++) {
            set.records.push_back(records[perm[s * N + k]]);
        }
        set.label = set.records[0].label;
    }
    return out;
}

SetPartition reshuffle_sets(const std::vector<TrajectoryRecord> &records, size_t N, size_t epoch,
                            uint64_t master_seed) {
    Rng rng(hash64(master_seed, epoch / 10));
    return make_sets(records, N, rng);
}

TrajectoryRecord translate_record(const TrajectoryRecord &record, long shift) {
    long L = static_cast<long>(record.L);
    long s = ((shift % L) + L) % L;
    TrajectoryRecord out = record;
    for (size_t t = 0; t < record.num_slices(); t++) {
        for (long x = 0; x < L; x++) {
            out.bits[t * record.L + static_cast<size_t>((x + s) % L)] = record.bits[t * record.L + x];
        }
    }
    return out;
}

}  // namespace mipt
