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

#ifndef MIPT_DECODER_H
#define MIPT_DECODER_H

#include <cstdint>
#include <vector>

#include "mipt/circuits.h"
#include "mipt/rng.h"

/// Bayes-optimal discrimination of two initial states from measurement data,
/// with equal priors.
namespace mipt {

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// p_a / (p_a + p_b) from log-likelihoods, evaluated as a logistic of the
/// log-difference. Throws std::invalid_argument when both are -inf.
double posterior(double logp_a, double logp_b);

/// Average posterior of the true state, sum_m (p^2 + q^2) / (2 (p + q)),
/// for two full outcome distributions. Throws if either is not normalized
/// within 1e-9 or the lengths differ.
double pcorr_exact(const std::vector<double> &probs_psi, const std::vector<double> &probs_phi);

/// Outcome-probability model for the Monte-Carlo decoders.
enum class BornModel {
    /// Projective limit: every outcome probability is Beta(1, D-1) under
    /// both states, independently.
    Gamma1,
    /// The data carry no information: the sampled and the competing
    /// likelihoods are exchangeable.
    Identical,
};

/// Average posterior of the true state for sets of N outcomes in the
/// projective limit. Outcomes drawn from the true state are size-biased, so
/// their probabilities follow Beta(2, D-1); the competing probabilities
/// follow Beta(1, D-1). Each sample contributes the exact set posterior.
Estimate pcorr_gamma1_mc(size_t N, double D, size_t m_mc, Rng &rng, BornModel model = BornModel::Gamma1);

/// The same quantity via the plain importance-weighted form
/// D^N prod_i x_i * posterior with x_i, y_i ~ Beta(1, D-1). Unbiased, but its
/// variance grows like 2^N; useful only as a cross-check at small N.
Estimate pcorr_gamma1_mc_weighted(size_t N, double D, size_t m_mc, Rng &rng);

/// Probability that the single-outcome posterior of the true state exceeds
/// 1/2. Ties count as failures.
Estimate accuracy_alpha_mc(double D, size_t m_mc, Rng &rng, BornModel model = BornModel::Gamma1);

/// Posterior of the true state averaged over sets of N trajectories. Each
/// class (by true state) is put in canonical order, permuted with `rng` and
/// cut into floor(count / N) sets; set log-likelihoods are member sums.
/// Throws when either class has fewer than N entries.
Estimate pcorr_trajectory(const std::vector<DualLikelihood> &duals, size_t N, Rng &rng);

/// Samples from Beta(1, D-1) and Beta(2, D-1) by inversion.
double sample_beta_1(double D, Rng &rng);
double sample_beta_2(double D, Rng &rng);

}  // namespace mipt

#endif
