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

#include "mipt/statevec.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mipt {

namespace {

constexpr double kNeverSample = 1e-15;

void check_qubit(const PureState &state, size_t q) {
    if (q >= state.num_qubits) {
        throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for " +
                                std::to_string(state.num_qubits) + " qubits");
    }
}

inline size_t insert_zero(size_t k, size_t pos) {
    size_t low = k & ((size_t{1} << pos) - 1);
    return ((k >> pos) << (pos + 1)) | low;
}

// Chooses an outcome from the probability of 0 using one uniform draw.
int choose_outcome(double p0, double p1, Rng &rng) {
    double u = rng.uniform();
    p0 = std::clamp(p0, 0.0, 1.0);
    p1 = std::clamp(p1, 0.0, 1.0);
    if (p1 < kNeverSample) {
        return 0;
    }
    if (p0 < kNeverSample) {
        return 1;
    }
    return u < p0 ? 0 : 1;
}

// Reduced density matrix entries (rho00, rho11, rho01) of qubit q.
void qubit_moments(const PureState &state, size_t q, double &r00, double &r11, Complex &r01) {
    size_t pos = state.bit_position(q);
    size_t mask = size_t{1} << pos;
    size_t half = state.dim() >> 1;
    r00 = 0;
    r11 = 0;
    r01 = 0;
    const Complex *a = state.amplitudes.data();
    for (size_t k = 0; k < half; k++) {
        size_t i0 = insert_zero(k, pos);
        Complex v0 = a[i0];
        Complex v1 = a[i0 | mask];
        r00 += std::norm(v0);
        r11 += std::norm(v1);
        r01 += v0 * std::conj(v1);
    }
}

double kraus_probability(const Eigen::Matrix2cd &k, double r00, double r11, Complex r01) {
    Eigen::Matrix2cd rho;
    rho << r00, r01, std::conj(r01), r11;
    return (k * rho * k.adjoint()).trace().real();
}

}  // namespace

PureState PureState::zeros(size_t n) {
    if (n == 0 || n > 30) {
        throw std::invalid_argument("number of qubits must be in [1, 30]");
    }
    PureState s;
    s.num_qubits = n;
    s.amplitudes.assign(size_t{1} << n, Complex(0, 0));
    s.amplitudes[0] = 1;
    return s;
}

PureState PureState::plus(size_t n) {
    PureState s = zeros(n);
    double a = 1.0 / std::sqrt(static_cast<double>(s.dim()));
    std::fill(s.amplitudes.begin(), s.amplitudes.end(), Complex(a, 0));
    return s;
}

PureState PureState::from_amplitudes(size_t n, std::vector<Complex> amps) {
    if (n == 0 || n > 30 || amps.size() != (size_t{1} << n)) {
        throw std::invalid_argument("amplitude vector length must be 2^num_qubits");
    }
    PureState s;
    s.num_qubits = n;
    s.amplitudes = std::move(amps);
    return s;
}

double PureState::norm_squared() const {
    double total = 0;
    for (const auto &a : amplitudes) {
        total += std::norm(a);
    }
    return total;
}

void PureState::normalize() {
    double n2 = norm_squared();
    if (n2 <= 0) {
        throw std::runtime_error("cannot normalize a zero state");
    }
    double scale = 1.0 / std::sqrt(n2);
    for (auto &a : amplitudes) {
        a *= scale;
    }
}

PureState tensor(const PureState &first, const PureState &second) {
    PureState out;
    out.num_qubits = first.num_qubits + second.num_qubits;
    out.amplitudes.resize(first.dim() * second.dim());
    for (size_t i = 0; i < first.dim(); i++) {
        for (size_t j = 0; j < second.dim(); j++) {
            out.amplitudes[i * second.dim() + j] = first.amplitudes[i] * second.amplitudes[j];
        }
    }
    return out;
}

void NoiseModel::validate() const {
    if (!(p1q >= 0.0 && p1q <= 1.0) || !(p2q >= 0.0 && p2q <= 1.0)) {
        throw std::invalid_argument("noise probabilities must lie in [0, 1]");
    }
}

Gate1Q gate_rx(double theta) {
    Gate1Q g;
    double c = std::cos(theta / 2);
    double s = std::sin(theta / 2);
    g.matrix << Complex(c, 0), Complex(0, s), Complex(0, s), Complex(c, 0);
    return g;
}

Gate1Q gate_pauli(int which) {
    Gate1Q g;
    switch (which) {
        case 0:
            g.matrix = Eigen::Matrix2cd::Identity();
            break;
        case 1:
            g.matrix << 0, 1, 1, 0;
            break;
        case 2:
            g.matrix << 0, Complex(0, -1), Complex(0, 1), 0;
            break;
        case 3:
            g.matrix << 1, 0, 0, -1;
            break;
        default:
            throw std::invalid_argument("pauli index must be in [0, 3]");
    }
    return g;
}

double unitarity_error(const Eigen::MatrixXcd &m) {
    Eigen::MatrixXcd d = m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    return d.cwiseAbs().maxCoeff();
}

Gate2Q reunitarize(const Eigen::Matrix4cd &m) {
    if (unitarity_error(m) >= 0.05) {
        throw std::invalid_argument("matrix is too far from unitary to re-unitarize");
    }
    Eigen::Matrix4cd h = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(h);
    Eigen::Vector4d w = eig.eigenvalues();
    if (w.minCoeff() < 0.25) {
        throw std::invalid_argument("matrix has a singular value below 0.5");
    }
    Eigen::Vector4d inv_sqrt = w.cwiseSqrt().cwiseInverse();
    Eigen::Matrix4cd h_inv_sqrt = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().adjoint();
    Gate2Q g;
    g.matrix = m * h_inv_sqrt;
    return g;
}

void apply_operator_1q(PureState &state, const Eigen::Matrix2cd &op, size_t q) {
    check_qubit(state, q);
    size_t pos = state.bit_position(q);
    size_t mask = size_t{1} << pos;
    size_t half = state.dim() >> 1;
    const Complex m00 = op(0, 0), m01 = op(0, 1), m10 = op(1, 0), m11 = op(1, 1);
    Complex *a = state.amplitudes.data();
    for (size_t k = 0; k < half; k++) {
        size_t i0 = insert_zero(k, pos);
        size_t i1 = i0 | mask;
        Complex v0 = a[i0];
        Complex v1 = a[i1];
        a[i0] = m00 * v0 + m01 * v1;
        a[i1] = m10 * v0 + m11 * v1;
    }
}

void apply_1q(PureState &state, const Gate1Q &gate, size_t q) {
    apply_operator_1q(state, gate.matrix, q);
}

void apply_2q(PureState &state, const Gate2Q &gate, size_t qa, size_t qb) {
    check_qubit(state, qa);
    check_qubit(state, qb);
    if (qa == qb) {
        throw std::invalid_argument("two-qubit gate needs distinct qubits");
    }
    size_t pa = state.bit_position(qa);
    size_t pb = state.bit_position(qb);
    size_t ma = size_t{1} << pa;
    size_t mb = size_t{1} << pb;
    size_t lo = std::min(pa, pb);
    size_t hi = std::max(pa, pb);
    size_t lo_stride = size_t{1} << lo;
    size_t hi_stride = size_t{1} << hi;

    Complex g[4][4];
    for (int r = 0; r < 4; r++) {
        for (int c = 0; c < 4; c++) {
            g[r][c] = gate.matrix(r, c);
        }
    }
    Complex *a = state.amplitudes.data();
    // Blocks of indices with both target bits clear; the innermost run is contiguous.
    for (size_t outer = 0; outer < state.dim(); outer += 2 * hi_stride) {
        for (size_t mid = outer; mid < outer + hi_stride; mid += 2 * lo_stride) {
            Complex *p00 = a + mid;
            Complex *p01 = p00 + mb;
            Complex *p10 = p00 + ma;
            Complex *p11 = p00 + ma + mb;
            for (size_t k = 0; k < lo_stride; k++) {
                Complex v0 = p00[k], v1 = p01[k], v2 = p10[k], v3 = p11[k];
                p00[k] = g[0][0] * v0 + g[0][1] * v1 + g[0][2] * v2 + g[0][3] * v3;
                p01[k] = g[1][0] * v0 + g[1][1] * v1 + g[1][2] * v2 + g[1][3] * v3;
                p10[k] = g[2][0] * v0 + g[2][1] * v1 + g[2][2] * v2 + g[2][3] * v3;
                p11[k] = g[3][0] * v0 + g[3][1] * v1 + g[3][2] * v2 + g[3][3] * v3;
            }
        }
    }
}

double probability_of_one(const PureState &state, size_t q) {
    check_qubit(state, q);
    size_t pos = state.bit_position(q);
    size_t mask = size_t{1} << pos;
    size_t half = state.dim() >> 1;
    double p1 = 0;
    for (size_t k = 0; k < half; k++) {
        p1 += std::norm(state.amplitudes[insert_zero(k, pos) | mask]);
    }
    return p1;
}

namespace {

// Zeroes the branch where q != outcome and rescales the rest.
void collapse(PureState &state, size_t q, int outcome, double prob) {
    size_t pos = state.bit_position(q);
    size_t mask = size_t{1} << pos;
    size_t half = state.dim() >> 1;
    double scale = 1.0 / std::sqrt(prob);
    Complex *a = state.amplitudes.data();
    for (size_t k = 0; k < half; k++) {
        size_t i0 = insert_zero(k, pos);
        size_t keep = outcome ? (i0 | mask) : i0;
        size_t drop = outcome ? i0 : (i0 | mask);
        a[keep] *= scale;
        a[drop] = 0;
    }
}

}  // namespace

MeasureResult measure_qubit(PureState &state, size_t q, Rng &rng) {
    double p1 = probability_of_one(state, q);
    double total = state.norm_squared();
    p1 = std::clamp(p1 / total, 0.0, 1.0);
    double p0 = 1.0 - p1;
    int outcome = choose_outcome(p0, p1, rng);
    double prob = outcome ? p1 : p0;
    collapse(state, q, outcome, prob * total);
    return {outcome, prob};
}

ProjectResult project_qubit(PureState &state, size_t q, int outcome) {
    double total = state.norm_squared();
    double p1 = std::clamp(probability_of_one(state, q) / total, 0.0, 1.0);
    double prob = outcome ? p1 : 1.0 - p1;
    if (prob <= 0.0) {
        return {0.0, true};
    }
    collapse(state, q, outcome, prob * total);
    return {prob, false};
}

void reset_qubit(PureState &state, size_t q, Rng &rng) {
    MeasureResult r = measure_qubit(state, q, rng);
    if (r.outcome == 1) {
        apply_1q(state, gate_pauli(1), q);
    }
}

int apply_depolarizing(PureState &state, std::span<const size_t> qubits, double p, Rng &rng) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("depolarizing probability must lie in [0, 1]");
    }
    if (qubits.size() != 1 && qubits.size() != 2) {
        throw std::invalid_argument("depolarizing noise acts on one or two qubits");
    }
    double u = rng.uniform();
    if (!(u < p)) {
        return 0;
    }
    if (qubits.size() == 1) {
        int which = 1 + static_cast<int>(rng.below(3));
        apply_1q(state, gate_pauli(which), qubits[0]);
        return which;
    }
    int word = 1 + static_cast<int>(rng.below(15));
    int first = word / 4;
    int second = word % 4;
    if (first != 0) {
        apply_1q(state, gate_pauli(first), qubits[0]);
    }
    if (second != 0) {
        apply_1q(state, gate_pauli(second), qubits[1]);
    }
    return word;
}

DensityMatrix1Q reduced_density_1q(const PureState &state, size_t q) {
    check_qubit(state, q);
    double r00, r11;
    Complex r01;
    qubit_moments(state, q, r00, r11, r01);
    DensityMatrix1Q rho;
    rho.matrix << r00, r01, std::conj(r01), r11;
    return rho;
}

double von_neumann_entropy(const DensityMatrix1Q &rho) {
    double a = rho.matrix(0, 0).real();
    double d = rho.matrix(1, 1).real();
    double off = std::norm(rho.matrix(0, 1));
    double tr = a + d;
    double det = a * d - off;
    double disc = std::sqrt(std::max(0.0, tr * tr - 4 * det));
    double entropy = 0;
    for (double lambda : {(tr + disc) / 2, (tr - disc) / 2}) {
        lambda = std::clamp(lambda, 0.0, 1.0);
        if (lambda > 1e-9 && lambda < 1.0) {
            entropy -= lambda * std::log2(lambda);
        }
    }
    return std::clamp(entropy, 0.0, 1.0);
}

KrausPair kraus_from_coupling(const Gate2Q &coupling) {
    KrausPair out;
    for (int b = 0; b < 2; b++) {
        for (int sp = 0; sp < 2; sp++) {
            for (int s = 0; s < 2; s++) {
                out.k[b](sp, s) = coupling.matrix(2 * sp + b, 2 * s);
            }
        }
    }
    return out;
}

MeasureResult measure_kraus(PureState &state, size_t q, const KrausPair &kraus, Rng &rng) {
    check_qubit(state, q);
    double r00, r11;
    Complex r01;
    qubit_moments(state, q, r00, r11, r01);
    double w0 = std::max(0.0, kraus_probability(kraus.k[0], r00, r11, r01));
    double w1 = std::max(0.0, kraus_probability(kraus.k[1], r00, r11, r01));
    double total = w0 + w1;
    double p0 = w0 / total;
    double p1 = w1 / total;
    int outcome = choose_outcome(p0, p1, rng);
    double prob = outcome ? p1 : p0;
    apply_operator_1q(state, kraus.k[outcome] / std::sqrt(outcome ? w1 : w0), q);
    return {outcome, prob};
}

ProjectResult project_kraus(PureState &state, size_t q, const KrausPair &kraus, int outcome) {
    check_qubit(state, q);
    double r00, r11;
    Complex r01;
    qubit_moments(state, q, r00, r11, r01);
    double w0 = std::max(0.0, kraus_probability(kraus.k[0], r00, r11, r01));
    double w1 = std::max(0.0, kraus_probability(kraus.k[1], r00, r11, r01));
    double w = outcome ? w1 : w0;
    if (w <= 0.0) {
        return {0.0, true};
    }
    apply_operator_1q(state, kraus.k[outcome] / std::sqrt(w), q);
    return {w / (w0 + w1), false};
}

}  // namespace mipt
