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

#ifndef MIPT_BORNDIST_H
#define MIPT_BORNDIST_H

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "mipt/circuits.h"

/// Distributions of empirical Born probabilities p = k / M.
///
/// For a pure state on a D-dimensional space sampled M times, the density of
/// the discrete estimate p of one outcome's probability is
///   binomial:      Prob0(k/M) = M C(M,k) D^-k (1 - 1/D)^(M-k)
///   Beta-binomial: Prob1(k/M) = M (D-1) M! (M+D-k-2)! / ((M-k)! (M+D-1)!)
/// The first describes an unentangled product of unbiased qubits, the second a
/// scrambled state whose outcome probabilities are Beta(1, D-1) distributed.
/// Both satisfy sum_k Prob(k/M) / M = 1.
namespace mipt {

/// ln Gamma(a) - ln Gamma(b), accurate when a and b are large and close.
double lgamma_diff(double a, double b);

double log_binom_prob_p(uint64_t k, uint64_t M, double D);
double log_betabinom_prob_p(uint64_t k, uint64_t M, double D);
double binom_prob_p(uint64_t k, uint64_t M, double D);
double betabinom_prob_p(uint64_t k, uint64_t M, double D);

/// Beta(1, D-1) density (D-1)(1-p)^(D-2).
double beta_prob(double p, double D);

/// Leading-order large-M, large-D approximation of
/// ln Prob0(p) - ln Prob1(p) in the tail 1/M << p << 1:
///   (1 + Mp) ln(1 + M/D) - Mp ln(Mp) + Mp - (1/2) ln(2 pi Mp).
/// Requires 2/M <= p <= 0.5 and D > M; throws std::invalid_argument otherwise.
double tail_log_diff(double p, uint64_t M, double D);
double tail_ratio(double p, uint64_t M, double D);

/// Empirical outcome frequencies of one time slice. Keys pack site x into
/// bit x. With translation each record contributes all L cyclic shifts and
/// the denominator becomes M * L.
struct BornEstimate {
    size_t t = 0;
    size_t L = 0;
    uint64_t denominator = 0;
    std::map<uint64_t, uint64_t> counts;

    double probability(uint64_t key) const;
};

uint64_t slice_key(const TrajectoryRecord &record, size_t t);

/// Throws std::invalid_argument on empty or inhomogeneous input.
BornEstimate empirical_born(const std::vector<TrajectoryRecord> &records, size_t t, bool translate);

/// Density N_p / D at each distinct observed p = k / denominator, sorted by p.
struct ProbHistogram {
    std::vector<std::pair<double, double>> entries;
    uint64_t sample_size = 0;
    double hilbert_dim = 0;

    /// sum over outcomes of p^order / D, i.e. the mean of p^order over all D
    /// outcomes (unobserved outcomes contribute zero).
    double moment(int order) const;
};

ProbHistogram prob_p_histogram(const BornEstimate &estimate, double D);

}  // namespace mipt

#endif
