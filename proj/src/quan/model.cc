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

#include "mipt/quan/model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mipt::quan {

namespace {

constexpr double kClampLo = 1e-12;
constexpr double kClampHi = 1.0 - 1e-12;

void init_sab(SabParams &p, const std::string &prefix, size_t d_in, size_t d_out) {
    p.Q = Tensor(prefix + ".Q", d_out, d_in);
    p.K = Tensor(prefix + ".K", d_out, d_in);
    p.V = Tensor(prefix + ".V", d_out, d_in);
    p.O = Tensor(prefix + ".O", d_out, d_out);
    p.ln1_gain = Tensor(prefix + ".ln1.gain", 1, d_out);
    p.ln1_bias = Tensor(prefix + ".ln1.bias", 1, d_out);
    p.ln2_gain = Tensor(prefix + ".ln2.gain", 1, d_out);
    p.ln2_bias = Tensor(prefix + ".ln2.bias", 1, d_out);
}

template <typename Sab, typename Out>
void push_sab(Sab &p, Out &out) {
    for (auto *t : {&p.Q, &p.K, &p.V, &p.O, &p.ln1_gain, &p.ln1_bias, &p.ln2_gain, &p.ln2_bias}) {
        out.push_back(t);
    }
}

template <typename P, typename Out>
void collect(P &m, Out &out) {
    out.push_back(&m.embed_table);
    push_sab(m.temporal[0], out);
    push_sab(m.temporal[1], out);
    for (auto *t : {&m.t_ff, &m.t_ln_gain, &m.t_ln_bias, &m.W_t, &m.b_t}) out.push_back(t);
    push_sab(m.inter[0], out);
    push_sab(m.inter[1], out);
    for (auto *t : {&m.S_p, &m.K_p, &m.V_p, &m.p_ff, &m.p_ln1_gain, &m.p_ln1_bias, &m.p_ln2_gain,
                    &m.p_ln2_bias, &m.W_p, &m.b_p}) {
        out.push_back(t);
    }
}

bool ends_with(const std::string &s, const std::string &suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Mat sigmoid_mat(const Mat &x) {
    Mat y(x.rows, x.cols);
    for (size_t i = 0; i < x.v.size(); i++) y.v[i] = sigmoid(x.v[i]);
    return y;
}

Mat relu_mat(const Mat &x) {
    Mat y(x.rows, x.cols);
    for (size_t i = 0; i < x.v.size(); i++) y.v[i] = x.v[i] > 0 ? x.v[i] : 0.0;
    return y;
}

void add_into(Mat &a, const Mat &b) {
    for (size_t i = 0; i < a.v.size(); i++) a.v[i] += b.v[i];
}

/// dL/dpre for y = sigmoid(pre), given dL/dy and y.
Mat sigmoid_backward(const Mat &dy, const Mat &y) {
    Mat d(dy.rows, dy.cols);
    for (size_t i = 0; i < dy.v.size(); i++) d.v[i] = dy.v[i] * y.v[i] * (1.0 - y.v[i]);
    return d;
}

Mat relu_backward(const Mat &dy, const Mat &pre) {
    Mat d(dy.rows, dy.cols);
    for (size_t i = 0; i < dy.v.size(); i++) d.v[i] = pre.v[i] > 0 ? dy.v[i] : 0.0;
    return d;
}

double temporal_scale(const ModelConfig &c) { return 1.0 / std::sqrt(static_cast<double>(c.d_h)); }
double set_scale(const ModelConfig &c) { return 1.0 / std::sqrt(static_cast<double>(c.L)); }

bool inter_active(const ModelConfig &c) { return c.use_attention && c.use_intertraj; }

}  // namespace

void ModelConfig::validate() const {
    if (L < 2 || L % 2 != 0) {
        throw std::invalid_argument("L must be even and at least 2");
    }
    if (N < 1 || n_e < 1 || d_h < 1) {
        throw std::invalid_argument("N, n_e and d_h must be positive");
    }
    if (!(drop_rate >= 0.0 && drop_rate < 1.0)) {
        throw std::invalid_argument("drop rate must lie in [0, 1)");
    }
}

ModelParams::ModelParams(const ModelConfig &c) : config(c) {
    c.validate();
    embed_table = Tensor("embed_table", 4, c.n_e);
    init_sab(temporal[0], "temporal0", c.n_e * c.L, c.d_h);
    init_sab(temporal[1], "temporal1", c.d_h, c.d_h);
    t_ff = Tensor("t_ff", c.d_h, c.d_h);
    t_ln_gain = Tensor("t_ln.gain", 1, c.d_h);
    t_ln_bias = Tensor("t_ln.bias", 1, c.d_h);
    W_t = Tensor("W_t", 1, c.d_h);
    b_t = Tensor("b_t", 1, 1);
    init_sab(inter[0], "inter0", c.L, c.L);
    init_sab(inter[1], "inter1", c.L, c.L);
    S_p = Tensor("S_p", 1, c.L);
    K_p = Tensor("K_p", c.L, c.L);
    V_p = Tensor("V_p", c.L, c.L);
    p_ff = Tensor("p_ff", c.L, c.L);
    p_ln1_gain = Tensor("p_ln1.gain", 1, c.L);
    p_ln1_bias = Tensor("p_ln1.bias", 1, c.L);
    p_ln2_gain = Tensor("p_ln2.gain", 1, c.L);
    p_ln2_bias = Tensor("p_ln2.bias", 1, c.L);
    W_p = Tensor("W_p", 1, c.L);
    b_p = Tensor("b_p", 1, 1);
}

ModelParams ModelParams::initialize(const ModelConfig &config, uint64_t seed) {
    ModelParams p(config);
    Rng rng(seed);
    for (Tensor *t : p.tensors()) {
        if (ends_with(t->name, ".gain")) {
            std::fill(t->values.begin(), t->values.end(), 1.0);
        } else if (ends_with(t->name, ".bias") || t->name == "b_t" || t->name == "b_p") {
            t->zero();
        } else {
            double bound = 1.0 / std::sqrt(static_cast<double>(t->cols));
            for (double &v : t->values) v = bound * (2.0 * rng.uniform() - 1.0);
        }
    }
    return p;
}

std::vector<Tensor *> ModelParams::tensors() {
    std::vector<Tensor *> out;
    collect(*this, out);
    return out;
}

std::vector<const Tensor *> ModelParams::tensors() const {
    std::vector<const Tensor *> out;
    collect(*this, out);
    return out;
}

size_t ModelParams::parameter_count() const {
    size_t n = 0;
    for (const Tensor *t : tensors()) n += t->size();
    return n;
}

void ModelParams::zero() {
    for (Tensor *t : tensors()) t->zero();
}

void ModelParams::add_scaled(const ModelParams &other, double scale) {
    auto mine = tensors();
    auto theirs = other.tensors();
    for (size_t i = 0; i < mine.size(); i++) {
        if (mine[i]->size() != theirs[i]->size()) {
            throw std::invalid_argument("parameter shapes differ");
        }
        for (size_t j = 0; j < mine[i]->size(); j++) {
            mine[i]->values[j] += scale * theirs[i]->values[j];
        }
    }
}

std::vector<uint8_t> cluster_indices(const TrajectoryRecord &record) {
    size_t L = record.L;
    if (L % 2 != 0 || record.bits.size() != 2 * L * L) {
        throw std::invalid_argument("record shape does not match an even-L trajectory");
    }
    size_t pairs = L / 2;
    std::vector<uint8_t> out(2 * L * pairs);
    for (size_t t = 0; t < 2 * L; t++) {
        for (size_t j = 0; j < pairs; j++) {
            size_t a = (t % 2 == 0) ? 2 * j : 2 * j + 1;
            size_t b = (t % 2 == 0) ? 2 * j + 1 : (2 * j + 2) % L;
            out[t * pairs + j] = static_cast<uint8_t>(2 * record.bit(t, a) + record.bit(t, b));
        }
    }
    return out;
}

namespace {

Mat embed_from_clusters(const std::vector<uint8_t> &clusters, const ModelParams &params) {
    size_t L = params.config.L, n_e = params.config.n_e, pairs = L / 2;
    Mat x(L, n_e * L);
    for (size_t t = 0; t < 2 * L; t++) {
        double *row = x.row(t / 2) + (t % 2) * pairs * n_e;
        for (size_t j = 0; j < pairs; j++) {
            const double *e = params.embed_table.row(clusters[t * pairs + j]);
            std::copy(e, e + n_e, row + j * n_e);
        }
    }
    return x;
}

void embed_backward(const std::vector<uint8_t> &clusters, const Mat &dx, const ModelConfig &c,
                    Tensor &g_table) {
    size_t L = c.L, n_e = c.n_e, pairs = L / 2;
    for (size_t t = 0; t < 2 * L; t++) {
        const double *row = dx.row(t / 2) + (t % 2) * pairs * n_e;
        for (size_t j = 0; j < pairs; j++) {
            double *g = g_table.row(clusters[t * pairs + j]);
            for (size_t e = 0; e < n_e; e++) g[e] += row[j * n_e + e];
        }
    }
}

}  // namespace

Mat embed(const TrajectoryRecord &record, const ModelParams &params) {
    if (record.L != params.config.L) {
        throw std::invalid_argument("record L does not match the model");
    }
    return embed_from_clusters(cluster_indices(record), params);
}

Mat drop_attention(Mat &weights, double drop_rate, Rng &rng) {
    Mat keep(weights.rows, weights.cols);
    double scale = 1.0 / (1.0 - drop_rate);
    for (size_t i = 0; i < weights.v.size(); i++) {
        keep.v[i] = rng.uniform() < drop_rate ? 0.0 : scale;
        weights.v[i] *= keep.v[i];
    }
    return keep;
}

Mat sab_forward(const Mat &x, const SabParams &p, double scale, bool use_attention, double drop_rate,
                Rng *drop_rng, SabCache &c) {
    size_t d_in = p.Q.cols, d_out = p.Q.rows, n = x.rows;
    if (x.cols != d_in) {
        throw std::invalid_argument("attention input width mismatch");
    }
    c.x = x;
    c.q = matmul_nt(x, p.Q.values.data(), d_out, d_in);
    c.h = c.q;
    c.keep = Mat();
    if (use_attention) {
        c.k = matmul_nt(x, p.K.values.data(), d_out, d_in);
        c.v = matmul_nt(x, p.V.values.data(), d_out, d_in);
        c.attn = matmul_nt(c.q, c.k.v.data(), n, d_out);
        for (double &a : c.attn.v) a *= scale;
        softmax_rows(c.attn);
        Mat used = c.attn;
        if (drop_rng != nullptr && drop_rate > 0.0) {
            c.keep = drop_attention(used, drop_rate, *drop_rng);
        }
        add_into(c.h, matmul_nn(used, c.v.v.data(), n, d_out));
    }
    c.h1 = layer_norm(c.h, p.ln1_gain.values.data(), p.ln1_bias.values.data(), c.ln1);
    c.a = matmul_nt(c.h1, p.O.values.data(), d_out, d_out);
    c.h2 = relu_mat(c.a);
    add_into(c.h2, c.h1);
    c.out = layer_norm(c.h2, p.ln2_gain.values.data(), p.ln2_bias.values.data(), c.ln2);
    return c.out;
}

Mat sab_backward(const Mat &dout, const SabParams &p, double scale, bool use_attention, const SabCache &c,
                 SabParams &g) {
    size_t d_in = p.Q.cols, d_out = p.Q.rows, n = dout.rows;
    Mat dh2 = layer_norm_backward(dout, p.ln2_gain.values.data(), c.ln2, g.ln2_gain.values.data(),
                                  g.ln2_bias.values.data());
    Mat da = relu_backward(dh2, c.a);
    add_matmul_tn(g.O.values.data(), da, c.h1);
    Mat dh1 = dh2;
    add_into(dh1, matmul_nn(da, p.O.values.data(), d_out, d_out));
    Mat dh = layer_norm_backward(dh1, p.ln1_gain.values.data(), c.ln1, g.ln1_gain.values.data(),
                                 g.ln1_bias.values.data());

    Mat dq = dh;
    if (!use_attention) {
        add_matmul_tn(g.Q.values.data(), dq, c.x);
        return matmul_nn(dq, p.Q.values.data(), d_out, d_in);
    }
    Mat used = c.attn;
    bool dropped = !c.keep.v.empty();
    if (dropped) {
        for (size_t i = 0; i < used.v.size(); i++) used.v[i] *= c.keep.v[i];
    }
    Mat dused = matmul_nt(dh, c.v.v.data(), n, d_out);
    Mat dv(n, d_out);
    add_matmul_tn(dv.v.data(), used, dh);
    if (dropped) {
        for (size_t i = 0; i < dused.v.size(); i++) dused.v[i] *= c.keep.v[i];
    }
    Mat dA = softmax_rows_backward(c.attn, dused);
    for (double &v : dA.v) v *= scale;
    add_into(dq, matmul_nn(dA, c.k.v.data(), n, d_out));
    Mat dk(n, d_out);
    add_matmul_tn(dk.v.data(), dA, c.q);

    add_matmul_tn(g.Q.values.data(), dq, c.x);
    add_matmul_tn(g.K.values.data(), dk, c.x);
    add_matmul_tn(g.V.values.data(), dv, c.x);

    Mat dx = matmul_nn(dq, p.Q.values.data(), d_out, d_in);
    add_into(dx, matmul_nn(dk, p.K.values.data(), d_out, d_in));
    add_into(dx, matmul_nn(dv, p.V.values.data(), d_out, d_in));
    return dx;
}

std::vector<double> temporal_block(const TrajectoryRecord &record, const ModelParams &params, Rng *drop_rng,
                                   TemporalCache &c) {
    const ModelConfig &cfg = params.config;
    if (record.L != cfg.L) {
        throw std::invalid_argument("record L does not match the model");
    }
    c.clusters = cluster_indices(record);
    Mat x = embed_from_clusters(c.clusters, params);
    double scale = temporal_scale(cfg);
    Mat s1 = sab_forward(x, params.temporal[0], scale, cfg.use_attention, cfg.drop_rate, drop_rng, c.sab[0]);
    Mat s2 = sab_forward(s1, params.temporal[1], scale, cfg.use_attention, cfg.drop_rate, drop_rng, c.sab[1]);
    c.u = sigmoid_mat(s2);
    c.a_f = matmul_nt(c.u, params.t_ff.values.data(), cfg.d_h, cfg.d_h);
    Mat f = relu_mat(c.a_f);
    c.r = layer_norm(f, params.t_ln_gain.values.data(), params.t_ln_bias.values.data(), c.ln);
    std::vector<double> y(cfg.L);
    for (size_t tau = 0; tau < cfg.L; tau++) {
        const double *rr = c.r.row(tau);
        double s = params.b_t.values[0];
        for (size_t j = 0; j < cfg.d_h; j++) s += rr[j] * params.W_t.values[j];
        y[tau] = s;
    }
    return y;
}

namespace {

void temporal_backward(const std::vector<double> &dy, const ModelParams &params, const TemporalCache &c,
                       ModelParams &g) {
    const ModelConfig &cfg = params.config;
    Mat dr(cfg.L, cfg.d_h);
    for (size_t tau = 0; tau < cfg.L; tau++) {
        g.b_t.values[0] += dy[tau];
        const double *rr = c.r.row(tau);
        double *drr = dr.row(tau);
        for (size_t j = 0; j < cfg.d_h; j++) {
            g.W_t.values[j] += dy[tau] * rr[j];
            drr[j] = dy[tau] * params.W_t.values[j];
        }
    }
    Mat df = layer_norm_backward(dr, params.t_ln_gain.values.data(), c.ln, g.t_ln_gain.values.data(),
                                 g.t_ln_bias.values.data());
    Mat da = relu_backward(df, c.a_f);
    add_matmul_tn(g.t_ff.values.data(), da, c.u);
    Mat du = matmul_nn(da, params.t_ff.values.data(), cfg.d_h, cfg.d_h);
    Mat ds2 = sigmoid_backward(du, c.u);
    double scale = temporal_scale(cfg);
    Mat ds1 = sab_backward(ds2, params.temporal[1], scale, cfg.use_attention, c.sab[1], g.temporal[1]);
    Mat dx = sab_backward(ds1, params.temporal[0], scale, cfg.use_attention, c.sab[0], g.temporal[0]);
    embed_backward(c.clusters, dx, cfg, g.embed_table);
}

}  // namespace

Mat intertraj_stack(const Mat &y, const ModelParams &params, InterCache &c) {
    double scale = set_scale(params.config);
    Mat s1 = sab_forward(y, params.inter[0], scale, true, 0.0, nullptr, c.sab[0]);
    Mat s2 = sab_forward(s1, params.inter[1], scale, true, 0.0, nullptr, c.sab[1]);
    return sigmoid_mat(s2);
}

double pab_decode(const Mat &z, const ModelParams &params, PabCache &c) {
    const ModelConfig &cfg = params.config;
    size_t L = cfg.L, n = z.rows;
    if (z.cols != L || n == 0) {
        throw std::invalid_argument("pooling input must be (N, L) with N >= 1");
    }
    const double *s = params.S_p.values.data();
    c.z = z;
    c.vz = matmul_nt(z, params.V_p.values.data(), L, L);
    c.weights.assign(n, 1.0 / static_cast<double>(n));
    if (cfg.use_attention) {
        c.kz = matmul_nt(z, params.K_p.values.data(), L, L);
        Mat e(1, n);
        double scale = set_scale(cfg);
        for (size_t a = 0; a < n; a++) {
            const double *kr = c.kz.row(a);
            double dot = 0;
            for (size_t j = 0; j < L; j++) dot += s[j] * kr[j];
            e.v[a] = dot * scale;
        }
        softmax_rows(e);
        c.weights = e.v;
    }
    c.p = Mat(1, L);
    for (size_t j = 0; j < L; j++) c.p.v[j] = s[j];
    for (size_t a = 0; a < n; a++) {
        const double *vr = c.vz.row(a);
        for (size_t j = 0; j < L; j++) c.p.v[j] += c.weights[a] * vr[j];
    }
    c.p1 = layer_norm(c.p, params.p_ln1_gain.values.data(), params.p_ln1_bias.values.data(), c.ln1);
    c.a = matmul_nt(c.p1, params.p_ff.values.data(), L, L);
    c.p2 = relu_mat(c.a);
    add_into(c.p2, c.p1);
    c.r = layer_norm(c.p2, params.p_ln2_gain.values.data(), params.p_ln2_bias.values.data(), c.ln2);
    double logit = params.b_p.values[0];
    for (size_t j = 0; j < L; j++) logit += c.r.v[j] * params.W_p.values[j];
    c.logit = logit;
    return logit;
}

namespace {

/// Returns dL/dz.
Mat pab_backward(double dlogit, const ModelParams &params, const PabCache &c, ModelParams &g) {
    const ModelConfig &cfg = params.config;
    size_t L = cfg.L, n = c.z.rows;
    g.b_p.values[0] += dlogit;
    Mat dr(1, L);
    for (size_t j = 0; j < L; j++) {
        g.W_p.values[j] += dlogit * c.r.v[j];
        dr.v[j] = dlogit * params.W_p.values[j];
    }
    Mat dp2 = layer_norm_backward(dr, params.p_ln2_gain.values.data(), c.ln2, g.p_ln2_gain.values.data(),
                                  g.p_ln2_bias.values.data());
    Mat da = relu_backward(dp2, c.a);
    add_matmul_tn(g.p_ff.values.data(), da, c.p1);
    Mat dp1 = dp2;
    add_into(dp1, matmul_nn(da, params.p_ff.values.data(), L, L));
    Mat dp = layer_norm_backward(dp1, params.p_ln1_gain.values.data(), c.ln1, g.p_ln1_gain.values.data(),
                                 g.p_ln1_bias.values.data());

    for (size_t j = 0; j < L; j++) g.S_p.values[j] += dp.v[j];
    Mat dvz(n, L);
    for (size_t a = 0; a < n; a++) {
        for (size_t j = 0; j < L; j++) dvz(a, j) = c.weights[a] * dp.v[j];
    }
    add_matmul_tn(g.V_p.values.data(), dvz, c.z);
    Mat dz = matmul_nn(dvz, params.V_p.values.data(), L, L);

    if (cfg.use_attention) {
        Mat w(1, n), dw(1, n);
        w.v = c.weights;
        for (size_t a = 0; a < n; a++) {
            const double *vr = c.vz.row(a);
            double s = 0;
            for (size_t j = 0; j < L; j++) s += dp.v[j] * vr[j];
            dw.v[a] = s;
        }
        Mat de = softmax_rows_backward(w, dw);
        double scale = set_scale(cfg);
        const double *s = params.S_p.values.data();
        Mat dkz(n, L);
        for (size_t a = 0; a < n; a++) {
            const double *kr = c.kz.row(a);
            for (size_t j = 0; j < L; j++) {
                g.S_p.values[j] += de.v[a] * scale * kr[j];
                dkz(a, j) = de.v[a] * scale * s[j];
            }
        }
        add_matmul_tn(g.K_p.values.data(), dkz, c.z);
        add_into(dz, matmul_nn(dkz, params.K_p.values.data(), L, L));
    }
    return dz;
}

}  // namespace

double forward(const TrajectorySet &set, const ModelParams &params, Rng *drop_rng, ForwardCache &c) {
    const ModelConfig &cfg = params.config;
    size_t n = set.records.size();
    if (n != cfg.N) {
        throw std::invalid_argument("set size does not match the model's N");
    }
    c.temporal.resize(n);
    c.y = Mat(n, cfg.L);
    for (size_t a = 0; a < n; a++) {
        std::vector<double> ya = temporal_block(set.records[a], params, drop_rng, c.temporal[a]);
        std::copy(ya.begin(), ya.end(), c.y.row(a));
    }
    c.z = inter_active(cfg) ? intertraj_stack(c.y, params, c.inter) : sigmoid_mat(c.y);
    c.logit = pab_decode(c.z, params, c.pab);
    c.prediction = sigmoid(c.logit);
    return c.prediction;
}

double predict(const TrajectorySet &set, const ModelParams &params) {
    ForwardCache cache;
    return forward(set, params, nullptr, cache);
}

void backward(const ModelParams &params, const ForwardCache &c, double dlogit, ModelParams &g) {
    const ModelConfig &cfg = params.config;
    Mat dz = pab_backward(dlogit, params, c.pab, g);
    Mat dy;
    if (inter_active(cfg)) {
        double scale = set_scale(cfg);
        Mat ds2 = sigmoid_backward(dz, c.z);
        Mat ds1 = sab_backward(ds2, params.inter[1], scale, true, c.inter.sab[1], g.inter[1]);
        dy = sab_backward(ds1, params.inter[0], scale, true, c.inter.sab[0], g.inter[0]);
    } else {
        dy = sigmoid_backward(dz, c.z);
    }
    for (size_t a = 0; a < c.temporal.size(); a++) {
        std::vector<double> dya(dy.row(a), dy.row(a) + cfg.L);
        temporal_backward(dya, params, c.temporal[a], g);
    }
}

double bce(double prediction, double label) {
    double y = std::clamp(prediction, kClampLo, kClampHi);
    return -(label * std::log(y) + (1.0 - label) * std::log(1.0 - y));
}

double bce_loss(const std::vector<double> &predictions, const std::vector<double> &labels) {
    if (predictions.size() != labels.size() || predictions.empty()) {
        throw std::invalid_argument("predictions and labels must be non-empty and equal in length");
    }
    double s = 0;
    for (size_t i = 0; i < predictions.size(); i++) s += bce(predictions[i], labels[i]);
    return s / static_cast<double>(predictions.size());
}

double bce_dlogit(double prediction, double label) {
    if (prediction < kClampLo || prediction > kClampHi) {
        return 0.0;
    }
    return prediction - label;
}

double set_loss_and_grad(const TrajectorySet &set, const ModelParams &params, Rng *drop_rng,
                         ModelParams &grads) {
    ForwardCache cache;
    double y = forward(set, params, drop_rng, cache);
    double label = static_cast<double>(set.label);
    backward(params, cache, bce_dlogit(y, label), grads);
    return bce(y, label);
}

}  // namespace mipt::quan
