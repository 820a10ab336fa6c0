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

#ifndef MIPT_RNG_H
#define MIPT_RNG_H

#include <cstdint>
#include <limits>

namespace mipt {

/// SplitMix64 finalizer.
uint64_t mix64(uint64_t x);

/// Combines a seed with a stream index into a new independent key.
uint64_t hash64(uint64_t seed, uint64_t index);

/// Counter-based random stream: the i-th output is mix64(key + i * golden).
///
/// Streams are split by deriving a new key with hash64, so any (seed, index)
/// pair maps to a reproducible stream regardless of which thread consumes it.
class Rng {
   public:
    using result_type = uint64_t;

    explicit Rng(uint64_t key) : key_(key) {}
    Rng(uint64_t seed, uint64_t index) : key_(hash64(seed, index)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next(); }
    uint64_t next();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform double in (0, 1]; safe to take the log of.
    double uniform_open0();
    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n);

    Rng split(uint64_t index) const { return Rng(hash64(key_, index)); }

    uint64_t key() const { return key_; }
    uint64_t counter() const { return counter_; }

   private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

}  // namespace mipt

#endif
