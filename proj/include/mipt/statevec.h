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

#ifndef MIPT_STATEVEC_H
#define MIPT_STATEVEC_H

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mipt/rng.h"

/// Dense statevector engine.
///
/// Qubit ordering: qubit 0 is the most-significant bit of the amplitude index.
/// For an n-qubit state, qubit q lives at bit position (n - 1 - q), so the
/// basis state |b_0 b_1 ... b_{n-1}> has index sum_q b_q << (n - 1 - q).
namespace mipt {

using Complex = std::complex<double>;

struct PureState {
    size_t num_qubits = 0;
    std::vector<Complex> amplitudes;

    /// |0...0> on n qubits.
    static PureState zeros(size_t n);
    /// |+...+> on n qubits.
    static PureState plus(size_t n);
    /// Wraps explicit amplitudes; the length must be 2^n. Not renormalized.
    static PureState from_amplitudes(size_t n, std::vector<Complex> amps);

    size_t dim() const { return amplitudes.size(); }
    double norm_squared() const;
    void normalize();
    size_t bit_position(size_t q) const { return num_qubits - 1 - q; }
};

/// Kronecker product; the qubits of `first` precede those of `second`.
PureState tensor(const PureState &first, const PureState &second);

struct Gate1Q {
    Eigen::Matrix2cd matrix;
};

struct Gate2Q {
    /// Basis order |qa qb> = |00>, |01>, |10>, |11> with qa the more significant.
    Eigen::Matrix4cd matrix;
};

struct NoiseModel {
    double p1q = 0.0;
    double p2q = 0.0;

    /// Throws std::invalid_argument unless both rates lie in [0, 1].
    void validate() const;
    bool any() const { return p1q > 0.0 || p2q > 0.0; }
};

struct DensityMatrix1Q {
    Eigen::Matrix2cd matrix;
};

/// exp(i theta sigma_x / 2).
Gate1Q gate_rx(double theta);
Gate1Q gate_pauli(int which);  // 0=I, 1=X, 2=Y, 3=Z

double unitarity_error(const Eigen::MatrixXcd &m);

/// Closest unitary (polar factor) to a nearly unitary 4x4 matrix.
/// Throws std::invalid_argument when the input is too far from unitary.
Gate2Q reunitarize(const Eigen::Matrix4cd &m);

void apply_1q(PureState &state, const Gate1Q &gate, size_t q);
void apply_2q(PureState &state, const Gate2Q &gate, size_t qa, size_t qb);

/// Applies an arbitrary 2x2 operator to qubit q without renormalizing.
void apply_operator_1q(PureState &state, const Eigen::Matrix2cd &op, size_t q);

/// Probability that qubit q reads 1.
double probability_of_one(const PureState &state, size_t q);

struct MeasureResult {
    int outcome = 0;
    double prob = 1.0;
};

/// Projective Z measurement with Born sampling. One uniform draw is consumed;
/// an outcome whose probability is below 1e-15 is never selected.
MeasureResult measure_qubit(PureState &state, size_t q, Rng &rng);

struct ProjectResult {
    double prob = 0.0;
    /// Set when the forced outcome has zero probability; the state is left
    /// untouched in that case and the caller should treat the log-likelihood
    /// as -infinity.
    bool impossible = false;
};

/// Forces qubit q onto `outcome` and renormalizes.
ProjectResult project_qubit(PureState &state, size_t q, int outcome);

/// Measures q and flips it back to |0> when the outcome was 1.
void reset_qubit(PureState &state, size_t q, Rng &rng);

/// Stochastic unraveling of the depolarizing channel on one or two qubits.
/// With probability p a uniformly chosen non-identity Pauli word is applied.
/// Returns the index of the applied word (0 when nothing was applied); for two
/// qubits the word index is 4 * pauli(first) + pauli(second).
int apply_depolarizing(PureState &state, std::span<const size_t> qubits, double p, Rng &rng);

DensityMatrix1Q reduced_density_1q(const PureState &state, size_t q);

/// Entropy in bits, using the closed-form 2x2 eigenvalues.
double von_neumann_entropy(const DensityMatrix1Q &rho);

/// Measurement operators induced on a system qubit by a coupling gate acting
/// on (system, ancilla) with the ancilla prepared in |0> and read out in the
/// computational basis: K_b[s', s] = <s' b| U |s 0>.
struct KrausPair {
    Eigen::Matrix2cd k[2];
};

KrausPair kraus_from_coupling(const Gate2Q &coupling);

/// Samples the outcome of a Kraus measurement on qubit q and applies the
/// normalized post-measurement operator. Consumes exactly one uniform draw,
/// matching measure_qubit on an explicit ancilla.
MeasureResult measure_kraus(PureState &state, size_t q, const KrausPair &kraus, Rng &rng);

/// Deterministic variant of measure_kraus for a forced outcome.
ProjectResult project_kraus(PureState &state, size_t q, const KrausPair &kraus, int outcome);

}  // namespace mipt

#endif
