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

#ifndef MIPT_QUAN_MODEL_H
#define MIPT_QUAN_MODEL_H

#include <cstdint>
#include <vector>

#include "mipt/circuits.h"
#include "mipt/dataset.h"
#include "mipt/quan/tensor.h"
#include "mipt/rng.h"

namespace mipt::quan {

struct ModelConfig {
    size_t L = 8;
    size_t N = 16;
    size_t n_e = 4;
    size_t d_h = 16;
    double drop_rate = 0.1;
    /// When false the inter-trajectory stack is skipped and z = sigmoid(y).
    bool use_intertraj = true;
    /// When false every attention term is dropped: temporal layers keep only
    /// the Q x path, the inter-trajectory stack is skipped and the pooling
    /// block averages members with equal weights.
    bool use_attention = true;

    /// Throws std::invalid_argument on inconsistent sizes.
    void validate() const;
};

/// One self-attention block: Q, K, V are d_out x d_in, O is d_out x d_out.
struct SabParams {
    Tensor Q, K, V, O;
    Tensor ln1_gain, ln1_bias, ln2_gain, ln2_bias;
};

struct ModelParams {
    ModelConfig config;

    Tensor embed_table;  // 4 x n_e, rows for clusters 00, 01, 10, 11
    SabParams temporal[2];
    Tensor t_ff, t_ln_gain, t_ln_bias, W_t, b_t;
    SabParams inter[2];
    Tensor S_p, K_p, V_p, p_ff;
    Tensor p_ln1_gain, p_ln1_bias, p_ln2_gain, p_ln2_bias;
    Tensor W_p, b_p;

    /// Allocates all tensors with zero values.
    explicit ModelParams(const ModelConfig &config = ModelConfig());

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases, unit gains.
    static ModelParams initialize(const ModelConfig &config, uint64_t seed);

    /// Tensors in a fixed order; pointers stay valid while this object lives.
    std::vector<Tensor *> tensors();
    std::vector<const Tensor *> tensors() const;
    size_t parameter_count() const;
    void zero();
    /// this += scale * other; shapes must match.
    void add_scaled(const ModelParams &other, double scale);
};

/// Cluster row index of every (slice, pair), laid out as [t][pair].
std::vector<uint8_t> cluster_indices(const TrajectoryRecord &record);

/// (L, n_e * L) embedding: new slice k concatenates original slices 2k and 2k+1.
Mat embed(const TrajectoryRecord &record, const ModelParams &params);

struct SabCache {
    Mat x, q, k, v;
    Mat attn;       // post-softmax weights
    Mat keep;       // dropout scale per weight (empty without dropout)
    Mat h, h1, a, h2, out;
    LayerNormCache ln1, ln2;
};

/// Self-attention block. `drop_rng` enables DropAttention with rate `drop_rate`.
Mat sab_forward(const Mat &x, const SabParams &p, double scale, bool use_attention, double drop_rate,
                Rng *drop_rng, SabCache &cache);
/// Returns dL/dx and accumulates parameter gradients into `g`.
Mat sab_backward(const Mat &dout, const SabParams &p, double scale, bool use_attention,
                 const SabCache &cache, SabParams &g);

/// Applies DropAttention in place; returns the per-entry scale used.
Mat drop_attention(Mat &weights, double drop_rate, Rng &rng);

struct TemporalCache {
    std::vector<uint8_t> clusters;
    SabCache sab[2];
    Mat u, a_f, r;
    LayerNormCache ln;
};

/// Per-trajectory output of length L.
std::vector<double> temporal_block(const TrajectoryRecord &record, const ModelParams &params, Rng *drop_rng,
                                   TemporalCache &cache);

struct InterCache {
    SabCache sab[2];
};

/// (N, L) -> z (N, L).
Mat intertraj_stack(const Mat &y, const ModelParams &params, InterCache &cache);

struct PabCache {
    Mat z, kz, vz;
    std::vector<double> weights;  // pooling weights over members
    Mat p, p1, a, p2, r;
    LayerNormCache ln1, ln2;
    double logit = 0.0;
};

/// Returns the logit; the prediction is sigmoid(logit).
double pab_decode(const Mat &z, const ModelParams &params, PabCache &cache);

struct ForwardCache {
    std::vector<TemporalCache> temporal;
    Mat y, z;
    InterCache inter;
    PabCache pab;
    double logit = 0.0;
    double prediction = 0.0;
};

/// Full model on one set. Dropout is active only when `drop_rng` is non-null.
double forward(const TrajectorySet &set, const ModelParams &params, Rng *drop_rng, ForwardCache &cache);
/// Eval-mode forward without exposing the cache.
double predict(const TrajectorySet &set, const ModelParams &params);

/// Accumulates dL/dparams for a loss with dL/dlogit = `dlogit`.
void backward(const ModelParams &params, const ForwardCache &cache, double dlogit, ModelParams &grads);

/// Clamped binary cross-entropy of a single prediction.
double bce(double prediction, double label);
/// Mean clamped BCE.
double bce_loss(const std::vector<double> &predictions, const std::vector<double> &labels);
/// dBCE/dlogit for a sigmoid output; zero when the prediction is clamped.
double bce_dlogit(double prediction, double label);

/// Forward + backward of one set; returns the loss and accumulates gradients.
double set_loss_and_grad(const TrajectorySet &set, const ModelParams &params, Rng *drop_rng,
                         ModelParams &grads);

}  // namespace mipt::quan

#endif
