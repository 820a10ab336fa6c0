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

#include "mipt/rng.h"

namespace mipt {

namespace {
constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

uint64_t hash64(uint64_t seed, uint64_t index) {
    return mix64(mix64(seed + kGolden) ^ mix64(index * kGolden + 0x632BE59BD9B4E019ULL));
}

uint64_t Rng::next() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double Rng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open0() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

uint64_t Rng::below(uint64_t n) {
    // Lemire's multiply-shift with rejection.
    uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    uint64_t low = static_cast<uint64_t>(m);
    if (low < n) {
        uint64_t threshold = -n % n;
        while (low < threshold) {
            x = next();
            m = static_cast<__uint128_t>(x) * n;
            low = static_cast<uint64_t>(m);
        }
    }
    return static_cast<uint64_t>(m >> 64);
}

}  // namespace mipt
