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

#ifndef MIPT_CIRCUITS_H
#define MIPT_CIRCUITS_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mipt/rng.h"
#include "mipt/statevec.h"

/// Brickwork hybrid circuits with ancilla-mediated weak measurements.
///
/// A trajectory is produced in two stages:
///   1. scramble: 2L full brickwork steps (even bonds, then odd bonds, periodic)
///      of the fixed gate U_s applied to |0...0> or |+...+>;
///   2. monitor: 2L single brick layers of the monitored gate (even layer
///      first), each followed by a weak-measurement sweep over sites 0..L-1.
///
/// Row t of the resulting bit grid is the sweep that follows monitored layer t.
namespace mipt {

enum class TaskKind : uint8_t {
    StateDistinguish = 0,
    PhaseRecognition = 1,
    ReferenceQubit = 2,
};

enum class InitialState : uint8_t {
    Psi0 = 0,  // scrambled |0...0>
    Phi0 = 1,  // scrambled |+...+>
};

std::string task_name(TaskKind task);
TaskKind parse_task(const std::string &name);

struct CircuitConfig {
    size_t L = 8;
    double gamma = 0.5;
    TaskKind task = TaskKind::StateDistinguish;
    InitialState initial = InitialState::Psi0;
    NoiseModel noise;
    uint64_t master_seed = 0;

    /// Overrides the number of full scrambling steps (default 2L). Testing hook.
    std::optional<size_t> scramble_steps;
    /// Simulates the ancilla explicitly even when no noise is present.
    bool explicit_ancilla = false;

    void validate() const;
};

struct TrajectoryRecord {
    size_t L = 0;
    /// Row-major (2L x L) grid: bits[t * L + x].
    std::vector<uint8_t> bits;
    double gamma = 0.0;
    TaskKind task = TaskKind::StateDistinguish;
    uint8_t label = 0;
    uint64_t trajectory_seed = 0;

    size_t num_slices() const { return 2 * L; }
    uint8_t bit(size_t t, size_t x) const { return bits[t * L + x]; }
};

struct DualLikelihood {
    TrajectoryRecord record;
    double logp_psi = 0.0;
    double logp_phi = 0.0;
    InitialState true_state = InitialState::Psi0;

    double logp_true() const { return true_state == InitialState::Psi0 ? logp_psi : logp_phi; }
    double logp_other() const { return true_state == InitialState::Psi0 ? logp_phi : logp_psi; }
};

Gate2Q gate_us();
Gate2Q gate_um();
/// |0><0| x I + |1><1| x exp(i pi gamma sigma_x / 2); system is the control.
Gate2Q coupling_distinguish(double gamma);
/// |0><0| x exp(i pi (1-gamma) sigma_x / 4) + |1><1| x exp(i pi (1+gamma) sigma_x / 4).
Gate2Q coupling_phase(double gamma);
/// Rotation applied to the ancilla ahead of the controlled rotation in the
/// phase protocol: R_x(pi (1 - gamma) / 2).
Gate1Q ancilla_prerotation(double gamma);
/// Gate used in the monitored layers of a task.
Gate2Q monitored_gate(TaskKind task);

/// Label stored with a record: the initial state for state distinguishing,
/// (gamma >= 0.5) otherwise.
uint8_t default_label(TaskKind task, InitialState initial, double gamma);

/// Applies one brick layer of `gate` to system qubits offset..offset+L-1.
/// parity 0 pairs (0,1),(2,3),...; parity 1 pairs (1,2),...,(L-1,0).
void brick_layer(PureState &state, const Gate2Q &gate, size_t L, size_t offset, int parity,
                 const NoiseModel &noise, Rng &rng);

/// Scrambled initial state on L qubits. `steps` defaults to 2L.
PureState scramble(InitialState initial, size_t L, const NoiseModel &noise, Rng &rng,
                   std::optional<size_t> steps = std::nullopt);

/// One weak-measurement sweep using an explicit ancilla at qubit index L.
/// Throws std::logic_error when the ancilla is not in |0> at entry.
std::vector<uint8_t> weak_measure_sweep(PureState &state, size_t L, double gamma, TaskKind task,
                                        const NoiseModel &noise, Rng &rng);

TrajectoryRecord run_trajectory(const CircuitConfig &config, uint64_t trajectory_index);

/// Evolves the Psi0 and Phi0 branches in lockstep. Outcomes are sampled from
/// the config.initial branch; the other branch is projected onto them.
DualLikelihood run_trajectory_dual(const CircuitConfig &config, uint64_t trajectory_index);

struct ReferenceQubitResult {
    TrajectoryRecord record;
    /// Entropy of the reference qubit after the last sweep, in bits.
    double s_q = 0.0;
    /// Entropy after each sweep when requested.
    std::vector<double> s_q_trace;
};

/// Reference qubit at index 0, Bell-paired with system site 0 before scrambling.
ReferenceQubitResult run_reference_qubit(const CircuitConfig &config, uint64_t trajectory_index,
                                         bool keep_trace = false);

/// Reusable sampler that caches gates, Kraus operators and (when noise-free)
/// the scrambled initial states. Thread-safe for concurrent sample calls.
class TrajectorySampler {
   public:
    explicit TrajectorySampler(CircuitConfig config);

    const CircuitConfig &config() const { return config_; }
    TrajectoryRecord sample(uint64_t trajectory_index) const;
    DualLikelihood sample_dual(uint64_t trajectory_index) const;
    ReferenceQubitResult sample_reference(uint64_t trajectory_index, bool keep_trace = false) const;

    /// Samples indices [first, first + count) in parallel, in index order.
    std::vector<TrajectoryRecord> sample_many(uint64_t first, size_t count) const;
    std::vector<DualLikelihood> sample_dual_many(uint64_t first, size_t count) const;
    std::vector<ReferenceQubitResult> sample_reference_many(uint64_t first, size_t count) const;

   private:
    PureState initial_state(InitialState which, bool with_reference, Rng &rng) const;
    void monitor(std::vector<PureState> &branches, size_t offset, Rng &rng, TrajectoryRecord &record,
                 std::vector<double> &logp, std::vector<double> *trace) const;

    CircuitConfig config_;
    bool fast_;
    bool diagonal_;
    Gate2Q monitor_gate_;
    Gate2Q coupling_;
    Gate2Q controlled_;
    Gate1Q prerotation_;
    KrausPair kraus_;
    std::optional<PureState> cached_psi_;
    std::optional<PureState> cached_phi_;
    std::optional<PureState> cached_reference_;
};

}  // namespace mipt

#endif
