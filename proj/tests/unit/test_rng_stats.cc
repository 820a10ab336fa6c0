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
#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mipt/parallel.h"
#include "mipt/rng.h"
#include "mipt/stats.h"

namespace mipt {
namespace {

TEST(Rng, SameKeyGivesSameStream) {
    Rng a(42, 7), b(42, 7);
    for (int i = 0; i < 100; i++) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, DistinctIndicesGiveDistinctStreams) {
    Rng a(42, 7), b(42, 8);
    EXPECT_NE(a.next(), b.next());
}

TEST(Rng, UniformInUnitInterval) {
    Rng r(1);
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; i++) {
        double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
}

TEST(Rng, BelowStaysInRange) {
    Rng r(3);
    std::set<uint64_t> seen;
    for (int i = 0; i < 1000; i++) {
        uint64_t v = r.below(5);
        ASSERT_LT(v, 5u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 5u);
}

TEST(Stats, MeanErrorOfKnownSample) {
    MeanError m = mean_error({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    // sample std sqrt(5/3), divided by sqrt(4)
    EXPECT_NEAR(m.error, std::sqrt(5.0 / 3.0) / 2.0, 1e-12);
}

TEST(Stats, SpearmanOfMonotoneAndReversed) {
    std::vector<double> a = {1, 2, 3, 4, 5};
    std::vector<double> b = {10, 20, 30, 40, 500};
    std::vector<double> c = {5, 4, 3, 2, 1};
    EXPECT_NEAR(spearman(a, b), 1.0, 1e-12);
    EXPECT_NEAR(spearman(a, c), -1.0, 1e-12);
}

TEST(Stats, AverageRanksHandleTies) {
    std::vector<double> r = average_ranks({3.0, 1.0, 3.0});
    EXPECT_DOUBLE_EQ(r[1], 1.0);
    EXPECT_DOUBLE_EQ(r[0], 2.5);
    EXPECT_DOUBLE_EQ(r[2], 2.5);
}

TEST(Parallel, VisitsEveryIndexOnce) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](size_t i) { hits[i]++; });
    for (int h : hits) EXPECT_EQ(h, 1);
}

}  // namespace
}  // namespace mipt
