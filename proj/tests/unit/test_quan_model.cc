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

#include <algorithm>
#include <cmath>
#include <set>

#include "mipt/quan/checkpoint.h"
#include "mipt/quan/model.h"
#include "mipt/quan/tensor.h"
#include "support/reference_quan.h"

namespace mipt::quan {
namespace {

TrajectoryRecord random_record(size_t L, Rng &rng) {
    TrajectoryRecord r;
    r.L = L;
    r.bits.resize(2 * L * L);
    for (auto &b : r.bits) b = static_cast<uint8_t>(rng.below(2));
    return r;
}

TrajectorySet random_set(size_t L, size_t N, uint8_t label, Rng &rng) {
    TrajectorySet s;
    s.label = label;
    for (size_t i = 0; i < N; i++) s.records.push_back(random_record(L, rng));
    return s;
}

ModelConfig small_config() {
    ModelConfig c;
    c.L = 4;
    c.N = 4;
    c.n_e = 2;
    c.d_h = 4;
    return c;
}

void expect_rows_sum_to_one(const Mat &a) {
    for (size_t i = 0; i < a.rows; i++) {
        double s = 0;
        for (size_t j = 0; j < a.cols; j++) s += a(i, j);
        EXPECT_NEAR(s, 1.0, 1e-9);
    }
}

TEST(QuanTensor, LayerNormHasZeroMeanUnitVariance) {
    Mat x(2, 5);
    for (size_t i = 0; i < x.v.size(); i++) x.v[i] = std::sin(1.0 + i);
    std::vector<double> gain(5, 1.0), bias(5, 0.0);
    LayerNormCache cache;
    Mat y = layer_norm(x, gain.data(), bias.data(), cache);
    for (size_t r = 0; r < 2; r++) {
        double mu = 0, var = 0;
        for (size_t c = 0; c < 5; c++) mu += y(r, c);
        mu /= 5;
        for (size_t c = 0; c < 5; c++) var += (y(r, c) - mu) * (y(r, c) - mu);
        EXPECT_NEAR(mu, 0.0, 1e-12);
        EXPECT_NEAR(var / 5, 1.0, 1e-4);
    }
}

TEST(QuanTensor, MatmulConventions) {
    Mat a(2, 3);
    a.v = {1, 2, 3, 4, 5, 6};
    std::vector<double> b = {1, 0, 1, 0, 1, 0};  // 2 x 3
    Mat c = matmul_nt(a, b.data(), 2, 3);
    EXPECT_DOUBLE_EQ(c(0, 0), 4);
    EXPECT_DOUBLE_EQ(c(0, 1), 2);
    EXPECT_DOUBLE_EQ(c(1, 0), 10);
    std::vector<double> d = {1, 0, 0, 1, 1, 1};  // 3 x 2
    Mat e = matmul_nn(a, d.data(), 3, 2);
    EXPECT_DOUBLE_EQ(e(0, 0), 4);
    EXPECT_DOUBLE_EQ(e(1, 1), 11);
}

TEST(QuanModel, EmbeddingShapeAndLookup) {
    ModelConfig c;
    ModelParams p = ModelParams::initialize(c, 1);
    TrajectoryRecord zero;
    zero.L = 8;
    zero.bits.assign(128, 0);
    Mat x = embed(zero, p);
    EXPECT_EQ(x.rows, 8u);
    EXPECT_EQ(x.cols, 32u);
    for (size_t tau = 0; tau < 8; tau++)
        for (size_t mu = 0; mu < 32; mu++) EXPECT_EQ(x(tau, mu), p.embed_table(0, mu % 4));
    TrajectoryRecord a = zero, b = zero;
    a.bits[1] = 1;  // pair (0,1) at t=0 reads 01
    b.bits[0] = 1;  // pair (0,1) at t=0 reads 10
    Mat xa = embed(a, p), xb = embed(b, p);
    for (size_t e = 0; e < 4; e++) {
        EXPECT_EQ(xa(0, e), p.embed_table(1, e));
        EXPECT_EQ(xb(0, e), p.embed_table(2, e));
    }
}

TEST(QuanModel, OddSlicesPairAcrossBoundary) {
    ModelConfig c = small_config();
    TrajectoryRecord r;
    r.L = 4;
    r.bits.assign(32, 0);
    r.bits[1 * 4 + 3] = 1;  // t=1, x=3 is first of wrapped pair (3,0)
    auto idx = cluster_indices(r);
    ASSERT_EQ(idx.size(), 8u * 2u);
    EXPECT_EQ(idx[1 * 2 + 1], 2);
    EXPECT_EQ(idx[1 * 2 + 0], 0);
    (void)c;
}

TEST(QuanModel, SabShapesAndSoftmaxRows) {
    ModelConfig c;
    ModelParams p = ModelParams::initialize(c, 2);
    Rng rng(3);
    Mat x = embed(random_record(8, rng), p);
    SabCache cache;
    Mat out = sab_forward(x, p.temporal[0], 1 / std::sqrt(16.0), true, 0.0, nullptr, cache);
    EXPECT_EQ(out.rows, 8u);
    EXPECT_EQ(out.cols, 16u);
    expect_rows_sum_to_one(cache.attn);
}

TEST(QuanModel, ConstantInputGivesUniformAttention) {
    ModelConfig c;
    ModelParams p = ModelParams::initialize(c, 2);
    TrajectoryRecord zero;
    zero.L = 8;
    zero.bits.assign(128, 0);
    SabCache cache;
    sab_forward(embed(zero, p), p.temporal[0], 0.25, true, 0.0, nullptr, cache);
    for (double w : cache.attn.v) EXPECT_NEAR(w, 1.0 / 8, 1e-12);
}

TEST(QuanModel, AllSoftmaxRowsSumToOne) {
    ModelConfig c;
    ModelParams p = ModelParams::initialize(c, 4);
    Rng rng(5);
    TrajectorySet s = random_set(8, 16, 0, rng);
    ForwardCache cache;
    forward(s, p, nullptr, cache);
    for (const auto &t : cache.temporal)
        for (const auto &sab : t.sab) expect_rows_sum_to_one(sab.attn);
    for (const auto &sab : cache.inter.sab) expect_rows_sum_to_one(sab.attn);
    double w = 0;
    for (double v : cache.pab.weights) w += v;
    EXPECT_NEAR(w, 1.0, 1e-9);
}

TEST(QuanModel, DropAttentionIdentityAndUnbiased) {
    Mat w(3, 3);
    for (size_t i = 0; i < 9; i++) w.v[i] = (i + 1) / 45.0 * 3;
    Mat same = w;
    Rng rng(1);
    drop_attention(same, 0.0, rng);
    EXPECT_EQ(same.v, w.v);
    std::vector<double> acc(9, 0);
    const int n = 10000;
    for (int k = 0; k < n; k++) {
        Mat m = w;
        drop_attention(m, 0.1, rng);
        for (size_t i = 0; i < 9; i++) acc[i] += m.v[i];
    }
    for (size_t i = 0; i < 9; i++) {
        double sd = w.v[i] * std::sqrt(0.1 / 0.9 / n);
        EXPECT_NEAR(acc[i] / n, w.v[i], 4 * sd);
    }
}

TEST(QuanModel, EvalForwardIsDeterministicAndTrainingDiffers) {
    ModelConfig c = small_config();
    ModelParams p = ModelParams::initialize(c, 6);
    Rng rng(7);
    TrajectorySet s = random_set(4, 4, 1, rng);
    EXPECT_EQ(predict(s, p), predict(s, p));
    ForwardCache cache;
    Rng drop(9);
    double trained = forward(s, p, &drop, cache);
    EXPECT_NE(trained, predict(s, p));
}

TEST(QuanModel, PermutationInvariance) {
    for (size_t N : {1, 4, 64}) {
        ModelConfig c;
        c.N = N;
        ModelParams p = ModelParams::initialize(c, 8 + N);
        Rng rng(N);
        TrajectorySet s = random_set(8, N, 0, rng);
        double base = predict(s, p);
        for (int rep = 0; rep < 3; rep++) {
            TrajectorySet t = s;
            for (size_t i = N; i > 1; i--) std::swap(t.records[i - 1], t.records[rng.below(i)]);
            EXPECT_NEAR(predict(t, p), base, 1e-12);
        }
    }
}

TEST(QuanModel, RejectsWrongSetSize) {
    ModelConfig c = small_config();
    ModelParams p = ModelParams::initialize(c, 1);
    Rng rng(1);
    EXPECT_THROW(predict(random_set(4, 3, 0, rng), p), std::invalid_argument);
}

TEST(QuanModel, ReferenceForwardAgrees) {
    for (bool inter : {true, false}) {
        for (bool attn : {true, false}) {
            ModelConfig c = small_config();
            c.use_intertraj = inter;
            c.use_attention = attn;
            ModelParams p = ModelParams::initialize(c, 10);
            Rng rng(11);
            TrajectorySet s = random_set(4, 4, 1, rng);
            ForwardCache cache;
            forward(s, p, nullptr, cache);
            testing::ReferenceQuan<long double> ref(p);
            EXPECT_NEAR(cache.logit, double(ref.logit(s)), 1e-12);
        }
    }
}

/// Checks every entry against central differences and records which tensors
/// received a nonzero gradient. A tensor may be legitimately flat for one
/// draw (e.g. a ReLU layer with no active unit), so coverage is judged over
/// several seeds by the caller.
void gradient_check(const ModelConfig &c, uint64_t seed, std::set<std::string> &touched_names) {
    ModelParams p = ModelParams::initialize(c, seed);
    Rng rng(seed + 100);
    TrajectorySet s = random_set(c.L, c.N, static_cast<uint8_t>(seed % 2), rng);
    ModelParams g(c);
    set_loss_and_grad(s, p, nullptr, g);
    const long double h = 1e-5L;
    auto gt = g.tensors();
    size_t checked = 0;
    for (size_t ti = 0; ti < gt.size(); ti++) {
        const Tensor &grad = *gt[ti];
        if (std::any_of(grad.values.begin(), grad.values.end(), [](double v) { return v != 0; }))
            touched_names.insert(grad.name);
        for (size_t i = 0; i < grad.size(); i++) {
            testing::ReferenceQuan<long double> plus(p), minus(p);
            plus.perturb(grad.name, i, h);
            minus.perturb(grad.name, i, -h);
            double fd = double((plus.loss(s) - minus.loss(s)) / (2 * h));
            double an = grad.values[i];
            if (std::abs(an) > 1e-8) {
                checked++;
                EXPECT_LT(std::abs(an - fd) / std::max(std::abs(an), std::abs(fd)), 1e-4)
                    << grad.name << "[" << i << "] analytic " << an << " fd " << fd;
            } else {
                EXPECT_LT(std::abs(fd), 1e-7) << grad.name << "[" << i << "] analytic " << an << " fd " << fd;
            }
        }
    }
    EXPECT_GT(checked, p.parameter_count() / 2);
}

TEST(QuanModel, GradientMatchesFiniteDifferences) {
    std::set<std::string> touched;
    for (uint64_t seed : {1, 2, 3}) gradient_check(small_config(), seed, touched);
    ModelParams names(small_config());
    for (const Tensor *t : names.tensors()) EXPECT_TRUE(touched.count(t->name)) << t->name;
}

TEST(QuanModel, GradientMatchesFiniteDifferencesWithoutIntertraj) {
    ModelConfig c = small_config();
    c.use_intertraj = false;
    ModelParams p = ModelParams::initialize(c, 4);
    Rng rng(5);
    TrajectorySet s = random_set(4, 4, 1, rng);
    ModelParams g(c);
    set_loss_and_grad(s, p, nullptr, g);
    testing::ReferenceQuan<long double> plus(p), minus(p);
    plus.perturb("temporal0.Q", 3, 1e-5L);
    minus.perturb("temporal0.Q", 3, -1e-5L);
    double fd = double((plus.loss(s) - minus.loss(s)) / 2e-5L);
    EXPECT_NEAR(g.temporal[0].Q.values[3], fd, 1e-4 * std::abs(fd) + 1e-10);
    for (double v : g.inter[0].Q.values) EXPECT_EQ(v, 0.0);
}

TEST(QuanModel, OutputBiasGradientIsPredictionMinusLabel) {
    ModelConfig c = small_config();
    ModelParams p = ModelParams::initialize(c, 12);
    Rng rng(13);
    for (uint8_t label : {0, 1}) {
        TrajectorySet s = random_set(4, 4, label, rng);
        ModelParams g(c);
        set_loss_and_grad(s, p, nullptr, g);
        EXPECT_NEAR(g.b_p.values[0], predict(s, p) - label, 1e-12);
    }
}

TEST(QuanModel, BceExamples) {
    EXPECT_NEAR(bce_loss({1.0, 0.0}, {1.0, 0.0}), 0.0, 1e-11);
    EXPECT_NEAR(bce_loss({0.5, 0.5, 0.5}, {1, 0, 1}), std::log(2.0), 1e-15);
    EXPECT_NEAR(bce_loss({0.9, 0.2}, {1, 0}), -0.5 * (std::log(0.9) + std::log(0.8)), 1e-15);
    EXPECT_NEAR(bce_loss({0.9, 0.2}, {1, 0}), 0.1643, 1e-4);
    EXPECT_TRUE(std::isfinite(bce(0.0, 1.0)));
    EXPECT_EQ(bce_dlogit(0.0, 1.0), 0.0);
    EXPECT_NEAR(bce_dlogit(0.3, 1.0), -0.7, 1e-15);
}

TEST(QuanModel, InitializationScheme) {
    ModelConfig c;
    ModelParams p = ModelParams::initialize(c, 3);
    double bound = 1 / std::sqrt(double(p.temporal[0].Q.cols));
    for (double v : p.temporal[0].Q.values) EXPECT_LE(std::abs(v), bound);
    for (double v : p.temporal[0].ln1_gain.values) EXPECT_EQ(v, 1.0);
    for (double v : p.temporal[0].ln1_bias.values) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(p.b_p.values[0], 0.0);
    ModelParams q = ModelParams::initialize(c, 3);
    EXPECT_EQ(checkpoint_to_string(p, {}), checkpoint_to_string(q, {}));
}

TEST(QuanModel, ConfigValidation) {
    ModelConfig c;
    c.L = 7;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ModelConfig();
    c.drop_rate = 1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(QuanCheckpoint, RoundTripIsExact) {
    ModelConfig c = small_config();
    c.use_intertraj = false;
    ModelParams p = ModelParams::initialize(c, 5);
    std::string text = checkpoint_to_string(p, {12, 0.125, 99});
    Checkpoint back = checkpoint_from_string(text);
    EXPECT_EQ(back.meta.epoch, 12u);
    EXPECT_EQ(back.meta.test_loss, 0.125);
    EXPECT_EQ(back.meta.seed, 99u);
    EXPECT_FALSE(back.params.config.use_intertraj);
    auto a = p.tensors();
    auto b = back.params.tensors();
    for (size_t i = 0; i < a.size(); i++) EXPECT_EQ(a[i]->values, b[i]->values);
    EXPECT_EQ(checkpoint_to_string(back.params, back.meta), text);
}

TEST(QuanCheckpoint, RejectsMalformed) {
    EXPECT_THROW(checkpoint_from_string("{}"), std::exception);
    std::string text = checkpoint_to_string(ModelParams::initialize(small_config(), 1), {});
    size_t at = text.find("\"W_p\"");
    ASSERT_NE(at, std::string::npos);
    text.replace(at, 5, "\"W_x\"");
    EXPECT_THROW(checkpoint_from_string(text), std::exception);
}

}  // namespace
}  // namespace mipt::quan
