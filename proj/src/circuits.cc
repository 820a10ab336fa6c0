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

#include "mipt/circuits.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mipt/parallel.h"

namespace mipt {

namespace {

using C = Complex;

Eigen::Matrix2cd exp_i_sigma_x(double theta) {
    // exp(i theta sigma_x) = cos(theta) I + i sin(theta) sigma_x
    Eigen::Matrix2cd m;
    double c = std::cos(theta);
    double s = std::sin(theta);
    m << C(c, 0), C(0, s), C(0, s), C(c, 0);
    return m;
}

Gate2Q block_diagonal(const Eigen::Matrix2cd &when0, const Eigen::Matrix2cd &when1) {
    Gate2Q g;
    g.matrix.setZero();
    g.matrix.block<2, 2>(0, 0) = when0;
    g.matrix.block<2, 2>(2, 2) = when1;
    return g;
}

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("gamma must lie in [0, 1]");
    }
}

void apply_pauli_word(PureState &state, std::span<const size_t> qubits, int word) {
    if (word == 0) {
        return;
    }
    if (qubits.size() == 1) {
        apply_1q(state, gate_pauli(word), qubits[0]);
        return;
    }
    if (word / 4 != 0) {
        apply_1q(state, gate_pauli(word / 4), qubits[0]);
    }
    if (word % 4 != 0) {
        apply_1q(state, gate_pauli(word % 4), qubits[1]);
    }
}

// Gate noise shared by all branches: the Pauli word is drawn once from the
// first branch and replayed on the rest. No draw happens when p is zero.
void noise_all(std::vector<PureState> &branches, std::span<const size_t> qubits, double p, Rng &rng) {
    if (p <= 0.0) {
        return;
    }
    int word = apply_depolarizing(branches[0], qubits, p, rng);
    for (size_t b = 1; b < branches.size(); b++) {
        apply_pauli_word(branches[b], qubits, word);
    }
}

void gate2_all(std::vector<PureState> &branches, const Gate2Q &gate, size_t qa, size_t qb,
               const NoiseModel &noise, Rng &rng) {
    for (auto &s : branches) {
        apply_2q(s, gate, qa, qb);
    }
    size_t qs[2] = {qa, qb};
    noise_all(branches, qs, noise.p2q, rng);
}

void gate1_all(std::vector<PureState> &branches, const Gate1Q &gate, size_t q, const NoiseModel &noise,
               Rng &rng) {
    for (auto &s : branches) {
        apply_1q(s, gate, q);
    }
    size_t qs[1] = {q};
    noise_all(branches, qs, noise.p1q, rng);
}

void layer_all(std::vector<PureState> &branches, const Gate2Q &gate, size_t L, size_t offset, int parity,
               const NoiseModel &noise, Rng &rng) {
    for (size_t x = static_cast<size_t>(parity); x < L; x += 2) {
        size_t y = (x + 1) % L;
        gate2_all(branches, gate, offset + x, offset + y, noise, rng);
    }
}

void scramble_all(std::vector<PureState> &branches, size_t L, size_t offset, size_t steps,
                  const NoiseModel &noise, Rng &rng) {
    Gate2Q us = gate_us();
    for (size_t s = 0; s < steps; s++) {
        layer_all(branches, us, L, offset, 0, noise, rng);
        layer_all(branches, us, L, offset, 1, noise, rng);
    }
}

PureState product_state(InitialState initial, size_t L) {
    return initial == InitialState::Psi0 ? PureState::zeros(L) : PureState::plus(L);
}

bool is_diagonal(const KrausPair &k) {
    return k.k[0](0, 1) == 0.0 && k.k[0](1, 0) == 0.0 && k.k[1](0, 1) == 0.0 && k.k[1](1, 0) == 0.0;
}

// One weak-measurement sweep over system sites 0..L-1 for diagonal Kraus
// operators, where the system occupies the L least-significant index bits.
// Outcomes depend only on |amplitude|^2, so the sequential sampling runs on a
// real marginal over the system bits and the complex amplitudes are touched
// once at the end. Samples when `rng` is set, otherwise forces `outcomes`.
// Returns false (state untouched) when a forced outcome is impossible.
bool diagonal_sweep(PureState &state, size_t L, const KrausPair &kraus, Rng *rng, uint8_t *outcomes,
                    double &logp) {
    size_t sys_dim = size_t{1} << L;
    size_t mask = sys_dim - 1;
    thread_local std::vector<double> marginal;
    thread_local std::vector<Complex> factor;
    marginal.assign(sys_dim, 0.0);
    const Complex *a = state.amplitudes.data();
    for (size_t i = 0; i < state.dim(); i++) {
        marginal[i & mask] += std::norm(a[i]);
    }

    double mag2[2][2];
    for (int b = 0; b < 2; b++) {
        for (int s = 0; s < 2; s++) {
            mag2[b][s] = std::norm(kraus.k[b](s, s));
        }
    }

    double prev_scale[2] = {1.0, 1.0};
    size_t prev_pos = 0;
    double last_weight = 0.0;
    double sweep_logp = 0.0;
    for (size_t x = 0; x < L; x++) {
        size_t pos = L - 1 - x;
        double r[2] = {0.0, 0.0};
        for (size_t j = 0; j < sys_dim; j++) {
            if (x > 0) {
                marginal[j] *= prev_scale[(j >> prev_pos) & 1];
            }
            r[(j >> pos) & 1] += marginal[j];
        }
        double w0 = mag2[0][0] * r[0] + mag2[0][1] * r[1];
        double w1 = mag2[1][0] * r[0] + mag2[1][1] * r[1];
        double total = w0 + w1;
        int b;
        if (rng) {
            double u = rng->uniform();
            double p0 = w0 / total;
            double p1 = w1 / total;
            if (p1 < 1e-15) {
                b = 0;
            } else if (p0 < 1e-15) {
                b = 1;
            } else {
                b = u < p0 ? 0 : 1;
            }
            outcomes[x] = static_cast<uint8_t>(b);
        } else {
            b = outcomes[x];
            if ((b ? w1 : w0) <= 0.0) {
                return false;
            }
        }
        double w = b ? w1 : w0;
        sweep_logp += std::log(w / total);
        prev_scale[0] = mag2[b][0];
        prev_scale[1] = mag2[b][1];
        prev_pos = pos;
        last_weight = w;
    }

    // Product of the diagonal factors, indexed by the system bits (site 0 is the MSB).
    factor.assign(1, Complex(1.0 / std::sqrt(last_weight), 0.0));
    for (size_t x = 0; x < L; x++) {
        int b = outcomes[x];
        Complex d0 = kraus.k[b](0, 0);
        Complex d1 = kraus.k[b](1, 1);
        size_t n = factor.size();
        factor.resize(2 * n);
        for (size_t j = n; j-- > 0;) {
            Complex f = factor[j];
            factor[2 * j] = f * d0;
            factor[2 * j + 1] = f * d1;
        }
    }
    Complex *amp = state.amplitudes.data();
    for (size_t i = 0; i < state.dim(); i++) {
        amp[i] *= factor[i & mask];
    }
    logp += sweep_logp;
    return true;
}

}  // namespace

std::string task_name(TaskKind task) {
    switch (task) {
        case TaskKind::StateDistinguish:
            return "distinguish";
        case TaskKind::PhaseRecognition:
            return "phase";
        case TaskKind::ReferenceQubit:
            return "refqubit";
    }
    return "unknown";
}

TaskKind parse_task(const std::string &name) {
    if (name == "distinguish") return TaskKind::StateDistinguish;
    if (name == "phase") return TaskKind::PhaseRecognition;
    if (name == "refqubit") return TaskKind::ReferenceQubit;
    throw std::invalid_argument("unknown task '" + name + "'");
}

void CircuitConfig::validate() const {
    if (L < 4 || L % 2 != 0) {
        throw std::invalid_argument("L must be an even integer >= 4");
    }
    if (L > 24) {
        throw std::invalid_argument("L must be at most 24");
    }
    check_gamma(gamma);
    noise.validate();
    if (task != TaskKind::StateDistinguish && initial != InitialState::Psi0) {
        throw std::invalid_argument("only the state distinguishing task uses the Phi0 initial state");
    }
}

Gate2Q gate_us() {
    static const Gate2Q g = [] {
        Eigen::Matrix4cd m;
        m << C(0.3644, 0.3086), C(0.2537, 0.0937), C(0.5589, 0.0768), C(0.5589, -0.2612),
            C(0.3857, -0.5273), C(-0.1871, 0.1649), C(0.3448, 0.5512), C(-0.2860, 0.0803),
            C(-0.0213, 0.4688), C(0.0841, -0.4706), C(0.4436, 0.0357), C(-0.5604, 0.1975),
            C(0.1572, 0.3166), C(0.0522, 0.7958), C(0.0076, -0.2467), C(-0.4211, -0.0276);
        return reunitarize(m);
    }();
    return g;
}

Gate2Q gate_um() {
    static const Gate2Q g = [] {
        Eigen::Matrix4cd m;
        m << C(0.9167, -0.1057), C(0.3727, 0.0430), C(-0.0300, -0.0692), C(-0.0181, 0.0419),
            C(0.0188, -0.0022), C(0.1810, 0.0209), C(0.3601, 0.8311), C(0.1519, -0.3507),
            C(-0.0438, -0.3797), C(-0.1037, 0.8998), C(0.1672, -0.0724), C(0.0174, 0.0075),
            C(0.0052, 0.0454), C(0.0086, -0.0750), C(0.3443, -0.1491), C(0.8467, 0.3668);
        return reunitarize(m);
    }();
    return g;
}

Gate2Q coupling_distinguish(double gamma) {
    check_gamma(gamma);
    return block_diagonal(Eigen::Matrix2cd::Identity(), exp_i_sigma_x(std::numbers::pi * gamma / 2));
}

Gate2Q coupling_phase(double gamma) {
    check_gamma(gamma);
    return block_diagonal(exp_i_sigma_x(std::numbers::pi * (1 - gamma) / 4),
                          exp_i_sigma_x(std::numbers::pi * (1 + gamma) / 4));
}

Gate1Q ancilla_prerotation(double gamma) {
    check_gamma(gamma);
    return gate_rx(std::numbers::pi * (1 - gamma) / 2);
}

Gate2Q monitored_gate(TaskKind task) {
    return task == TaskKind::StateDistinguish ? gate_us() : gate_um();
}

uint8_t default_label(TaskKind task, InitialState initial, double gamma) {
    if (task == TaskKind::StateDistinguish) {
        return static_cast<uint8_t>(initial);
    }
    return gamma >= 0.5 ? 1 : 0;
}

void brick_layer(PureState &state, const Gate2Q &gate, size_t L, size_t offset, int parity,
                 const NoiseModel &noise, Rng &rng) {
    std::vector<PureState> one;
    one.push_back(std::move(state));
    layer_all(one, gate, L, offset, parity, noise, rng);
    state = std::move(one[0]);
}

PureState scramble(InitialState initial, size_t L, const NoiseModel &noise, Rng &rng,
                   std::optional<size_t> steps) {
    std::vector<PureState> one;
    one.push_back(product_state(initial, L));
    scramble_all(one, L, 0, steps.value_or(2 * L), noise, rng);
    return std::move(one[0]);
}

std::vector<uint8_t> weak_measure_sweep(PureState &state, size_t L, double gamma, TaskKind task,
                                        const NoiseModel &noise, Rng &rng) {
    check_gamma(gamma);
    size_t anc = L;
    if (state.num_qubits != L + 1) {
        throw std::invalid_argument("sweep expects L system qubits plus one ancilla");
    }
    if (probability_of_one(state, anc) > 1e-12) {
        throw std::logic_error("ancilla must be in |0> at the start of a sweep");
    }
    bool phase = task != TaskKind::StateDistinguish;
    Gate2Q cr = coupling_distinguish(gamma);
    Gate1Q pre = ancilla_prerotation(gamma);
    Gate1Q flip = gate_pauli(1);
    std::vector<uint8_t> bits(L);
    std::vector<PureState> one;
    one.push_back(std::move(state));
    for (size_t x = 0; x < L; x++) {
        if (phase) {
            gate1_all(one, pre, anc, noise, rng);
        }
        gate2_all(one, cr, x, anc, noise, rng);
        MeasureResult r = measure_qubit(one[0], anc, rng);
        bits[x] = static_cast<uint8_t>(r.outcome);
        if (r.outcome) {
            apply_1q(one[0], flip, anc);
        }
    }
    state = std::move(one[0]);
    return bits;
}

TrajectorySampler::TrajectorySampler(CircuitConfig config) : config_(std::move(config)) {
    config_.validate();
    fast_ = !config_.noise.any() && !config_.explicit_ancilla;
    monitor_gate_ = monitored_gate(config_.task);
    bool phase = config_.task != TaskKind::StateDistinguish;
    coupling_ = phase ? coupling_phase(config_.gamma) : coupling_distinguish(config_.gamma);
    controlled_ = coupling_distinguish(config_.gamma);
    prerotation_ = ancilla_prerotation(config_.gamma);
    kraus_ = kraus_from_coupling(coupling_);
    diagonal_ = is_diagonal(kraus_);

    if (!config_.noise.any()) {
        Rng unused(0);
        if (config_.task == TaskKind::ReferenceQubit) {
            cached_reference_ = initial_state(InitialState::Psi0, true, unused);
        } else {
            cached_psi_ = initial_state(InitialState::Psi0, false, unused);
            if (config_.task == TaskKind::StateDistinguish) {
                cached_phi_ = initial_state(InitialState::Phi0, false, unused);
            }
        }
    }
}

PureState TrajectorySampler::initial_state(InitialState which, bool with_reference, Rng &rng) const {
    size_t L = config_.L;
    size_t steps = config_.scramble_steps.value_or(2 * L);
    std::vector<PureState> one;
    size_t offset = 0;
    if (with_reference) {
        // (|0>_Q |0>_0 + |1>_Q |1>_0) / sqrt(2), remaining sites in |0>.
        PureState s = PureState::zeros(L + 1);
        double h = 1.0 / std::sqrt(2.0);
        s.amplitudes[0] = h;
        s.amplitudes[(size_t{1} << L) | (size_t{1} << (L - 1))] = h;
        one.push_back(std::move(s));
        offset = 1;
    } else {
        one.push_back(product_state(which, L));
    }
    scramble_all(one, L, offset, steps, config_.noise, rng);
    if (!fast_) {
        return tensor(one[0], PureState::zeros(1));
    }
    return std::move(one[0]);
}

void TrajectorySampler::monitor(std::vector<PureState> &branches, size_t offset, Rng &rng,
                                TrajectoryRecord &record, std::vector<double> &logp,
                                std::vector<double> *trace) const {
    size_t L = config_.L;
    size_t anc = offset + L;
    bool phase = config_.task != TaskKind::StateDistinguish;
    Gate1Q flip = gate_pauli(1);
    std::vector<bool> alive(branches.size(), true);
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    for (size_t t = 0; t < 2 * L; t++) {
        layer_all(branches, monitor_gate_, L, offset, static_cast<int>(t % 2), config_.noise, rng);
        if (fast_ && diagonal_) {
            uint8_t *row = record.bits.data() + t * L;
            diagonal_sweep(branches[0], L, kraus_, &rng, row, logp[0]);
            for (size_t b = 1; b < branches.size(); b++) {
                if (alive[b] && !diagonal_sweep(branches[b], L, kraus_, nullptr, row, logp[b])) {
                    alive[b] = false;
                    logp[b] = kNegInf;
                }
            }
            if (trace) {
                trace->push_back(von_neumann_entropy(reduced_density_1q(branches[0], 0)));
            }
            continue;
        }
        for (size_t x = 0; x < L; x++) {
            size_t q = offset + x;
            int outcome;
            if (fast_) {
                MeasureResult r = measure_kraus(branches[0], q, kraus_, rng);
                outcome = r.outcome;
                logp[0] += std::log(r.prob);
                for (size_t b = 1; b < branches.size(); b++) {
                    if (!alive[b]) continue;
                    ProjectResult p = project_kraus(branches[b], q, kraus_, outcome);
                    if (p.impossible) {
                        alive[b] = false;
                        logp[b] = kNegInf;
                    } else {
                        logp[b] += std::log(p.prob);
                    }
                }
            } else {
                if (phase) {
                    gate1_all(branches, prerotation_, anc, config_.noise, rng);
                }
                gate2_all(branches, controlled_, q, anc, config_.noise, rng);
                MeasureResult r = measure_qubit(branches[0], anc, rng);
                outcome = r.outcome;
                logp[0] += std::log(r.prob);
                for (size_t b = 1; b < branches.size(); b++) {
                    if (!alive[b]) continue;
                    ProjectResult p = project_qubit(branches[b], anc, outcome);
                    if (p.impossible) {
                        alive[b] = false;
                        logp[b] = kNegInf;
                    } else {
                        logp[b] += std::log(p.prob);
                    }
                }
                if (outcome) {
                    for (auto &s : branches) {
                        apply_1q(s, flip, anc);
                    }
                }
            }
            record.bits[t * L + x] = static_cast<uint8_t>(outcome);
        }
        if (trace) {
            trace->push_back(von_neumann_entropy(reduced_density_1q(branches[0], 0)));
        }
    }
}

namespace {

TrajectoryRecord blank_record(const CircuitConfig &config, uint64_t seed) {
    TrajectoryRecord rec;
    rec.L = config.L;
    rec.bits.assign(2 * config.L * config.L, 0);
    rec.gamma = config.gamma;
    rec.task = config.task;
    rec.label = default_label(config.task, config.initial, config.gamma);
    rec.trajectory_seed = seed;
    return rec;
}

}  // namespace

TrajectoryRecord TrajectorySampler::sample(uint64_t trajectory_index) const {
    if (config_.task == TaskKind::ReferenceQubit) {
        return sample_reference(trajectory_index).record;
    }
    uint64_t seed = hash64(config_.master_seed, trajectory_index);
    Rng rng(seed);
    TrajectoryRecord rec = blank_record(config_, seed);
    std::vector<PureState> branches;
    const auto &cached = config_.initial == InitialState::Psi0 ? cached_psi_ : cached_phi_;
    branches.push_back(cached ? *cached : initial_state(config_.initial, false, rng));
    std::vector<double> logp(1, 0.0);
    monitor(branches, 0, rng, rec, logp, nullptr);
    return rec;
}

DualLikelihood TrajectorySampler::sample_dual(uint64_t trajectory_index) const {
    if (config_.task != TaskKind::StateDistinguish) {
        throw std::invalid_argument("dual likelihoods require the state distinguishing task");
    }
    uint64_t seed = hash64(config_.master_seed, trajectory_index);
    Rng rng(seed);
    DualLikelihood out;
    out.true_state = config_.initial;
    out.record = blank_record(config_, seed);
    InitialState other = config_.initial == InitialState::Psi0 ? InitialState::Phi0 : InitialState::Psi0;

    std::vector<PureState> branches;
    if (cached_psi_) {
        branches.push_back(config_.initial == InitialState::Psi0 ? *cached_psi_ : *cached_phi_);
        branches.push_back(config_.initial == InitialState::Psi0 ? *cached_phi_ : *cached_psi_);
    } else {
        // Both branches see the same noise realization during scrambling.
        size_t L = config_.L;
        branches.push_back(product_state(config_.initial, L));
        branches.push_back(product_state(other, L));
        scramble_all(branches, L, 0, config_.scramble_steps.value_or(2 * L), config_.noise, rng);
        for (auto &b : branches) {
            b = tensor(b, PureState::zeros(1));
        }
    }
    std::vector<double> logp(2, 0.0);
    monitor(branches, 0, rng, out.record, logp, nullptr);
    if (config_.initial == InitialState::Psi0) {
        out.logp_psi = logp[0];
        out.logp_phi = logp[1];
    } else {
        out.logp_phi = logp[0];
        out.logp_psi = logp[1];
    }
    return out;
}

ReferenceQubitResult TrajectorySampler::sample_reference(uint64_t trajectory_index, bool keep_trace) const {
    if (config_.task != TaskKind::ReferenceQubit) {
        throw std::invalid_argument("reference-qubit sampling requires the refqubit task");
    }
    uint64_t seed = hash64(config_.master_seed, trajectory_index);
    Rng rng(seed);
    ReferenceQubitResult out;
    out.record = blank_record(config_, seed);
    std::vector<PureState> branches;
    branches.push_back(cached_reference_ ? *cached_reference_ : initial_state(InitialState::Psi0, true, rng));
    std::vector<double> logp(1, 0.0);
    monitor(branches, 1, rng, out.record, logp, keep_trace ? &out.s_q_trace : nullptr);
    out.s_q = von_neumann_entropy(reduced_density_1q(branches[0], 0));
    return out;
}

std::vector<TrajectoryRecord> TrajectorySampler::sample_many(uint64_t first, size_t count) const {
    std::vector<TrajectoryRecord> out(count);
    parallel_for(count, [&](size_t i) { out[i] = sample(first + i); });
    return out;
}

std::vector<DualLikelihood> TrajectorySampler::sample_dual_many(uint64_t first, size_t count) const {
    std::vector<DualLikelihood> out(count);
    parallel_for(count, [&](size_t i) { out[i] = sample_dual(first + i); });
    return out;
}

std::vector<ReferenceQubitResult> TrajectorySampler::sample_reference_many(uint64_t first, size_t count) const {
    std::vector<ReferenceQubitResult> out(count);
    parallel_for(count, [&](size_t i) { out[i] = sample_reference(first + i); });
    return out;
}

TrajectoryRecord run_trajectory(const CircuitConfig &config, uint64_t trajectory_index) {
    return TrajectorySampler(config).sample(trajectory_index);
}

DualLikelihood run_trajectory_dual(const CircuitConfig &config, uint64_t trajectory_index) {
    return TrajectorySampler(config).sample_dual(trajectory_index);
}

ReferenceQubitResult run_reference_qubit(const CircuitConfig &config, uint64_t trajectory_index,
                                         bool keep_trace) {
    return TrajectorySampler(config).sample_reference(trajectory_index, keep_trace);
}

}  // namespace mipt
