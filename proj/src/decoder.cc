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

#include "mipt/decoder.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mipt/dataset.h"
#include "mipt/parallel.h"

namespace mipt {

namespace {

constexpr size_t kChunk = 1 << 14;

// Welford accumulator with pairwise merging; stable when all values sit
// close to 1, where the sum-of-squares form cancels to zero.
struct Moments {
    double mean = 0;
    double m2 = 0;
    size_t n = 0;

    void add(double v) {
        n++;
        double delta = v - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (v - mean);
    }
    void merge(const Moments &o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
        double delta = o.mean - mean;
        mean += delta * nb / nt;
        m2 += o.m2 + delta * delta * na * nb / nt;
        n += o.n;
    }
    Estimate finish() const {
        Estimate e;
        if (n == 0) {
            return e;
        }
        e.value = mean;
        if (n > 1) {
            e.error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
        }
        return e;
    }
};

// Runs `sample(rng)` m times on fixed chunks with their own substreams and
// reduces in chunk order, so results do not depend on the worker count.
template <typename F>
Estimate chunked_mc(size_t m, Rng &rng, F sample) {
    uint64_t base = rng.next();
    size_t chunks = (m + kChunk - 1) / kChunk;
    std::vector<Moments> partial(chunks);
    parallel_for(chunks, [&](size_t c) {
        Rng local(hash64(base, c));
        size_t end = std::min(m, (c + 1) * kChunk);
        for (size_t i = c * kChunk; i < end; i++) {
            partial[c].add(sample(local));
        }
    });
    Moments total;
    for (const auto &p : partial) {
        total.merge(p);
    }
    return total.finish();
}

void check_mc_args(double D, size_t m_mc) {
    if (!(D >= 2)) {
        throw std::invalid_argument("D must be at least 2");
    }
    if (m_mc < 2) {
        throw std::invalid_argument("need at least two Monte-Carlo samples");
    }
}

}  // namespace

double posterior(double logp_a, double logp_b) {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    if (logp_a == kNegInf && logp_b == kNegInf) {
        throw std::invalid_argument("posterior undefined when both likelihoods vanish");
    }
    if (logp_b == kNegInf) return 1.0;
    if (logp_a == kNegInf) return 0.0;
    double d = logp_a - logp_b;
    if (d >= 0) {
        return 1.0 / (1.0 + std::exp(-d));
    }
    double e = std::exp(d);
    return e / (1.0 + e);
}

double pcorr_exact(const std::vector<double> &probs_psi, const std::vector<double> &probs_phi) {
    if (probs_psi.size() != probs_phi.size() || probs_psi.empty()) {
        throw std::invalid_argument("distributions must be non-empty and of equal length");
    }
    double sp = 0, sq = 0;
    for (size_t i = 0; i < probs_psi.size(); i++) {
        if (probs_psi[i] < 0 || probs_phi[i] < 0) {
            throw std::invalid_argument("probabilities must be nonnegative");
        }
        sp += probs_psi[i];
        sq += probs_phi[i];
    }
    if (std::abs(sp - 1) > 1e-9 || std::abs(sq - 1) > 1e-9) {
        throw std::invalid_argument("distributions must be normalized within 1e-9");
    }
    // (p^2 + q^2) / (2 (p + q)) = (p + q) / 4 + (p - q)^2 / (4 (p + q)); the
    // second form has no rounding in the difference term when p == q.
    double diff = 0;
    for (size_t i = 0; i < probs_psi.size(); i++) {
        double p = probs_psi[i];
        double q = probs_phi[i];
        if (p + q > 0) {
            diff += (p - q) * (p - q) / (p + q);
        }
    }
    return 0.25 * (sp + sq) + 0.25 * diff;
}

double sample_beta_1(double D, Rng &rng) {
    return -std::expm1(std::log1p(-rng.uniform()) / (D - 1));
}

double sample_beta_2(double D, Rng &rng) {
    // 1 - x = U1^(1/(D-1)) * U2^(1/D), a product of Beta(D-1, 1) and Beta(D, 1).
    double a = std::log(rng.uniform_open0()) / (D - 1);
    double b = std::log(rng.uniform_open0()) / D;
    return -std::expm1(a + b);
}

Estimate pcorr_gamma1_mc(size_t N, double D, size_t m_mc, Rng &rng, BornModel model) {
    check_mc_args(D, m_mc);
    if (N == 0) {
        throw std::invalid_argument("set size must be at least 1");
    }
    return chunked_mc(m_mc, rng, [&](Rng &r) {
        double lx = 0, ly = 0;
        for (size_t i = 0; i < N; i++) {
            double x = model == BornModel::Gamma1 ? sample_beta_2(D, r) : sample_beta_1(D, r);
            lx += std::log(x);
            ly += std::log(sample_beta_1(D, r));
        }
        return posterior(lx, ly);
    });
}

Estimate pcorr_gamma1_mc_weighted(size_t N, double D, size_t m_mc, Rng &rng) {
    check_mc_args(D, m_mc);
    if (N == 0) {
        throw std::invalid_argument("set size must be at least 1");
    }
    double log_d = std::log(D);
    return chunked_mc(m_mc, rng, [&](Rng &r) {
        double lx = 0, ly = 0;
        for (size_t i = 0; i < N; i++) {
            lx += std::log(sample_beta_1(D, r));
            ly += std::log(sample_beta_1(D, r));
        }
        return std::exp(static_cast<double>(N) * log_d + lx) * posterior(lx, ly);
    });
}

Estimate accuracy_alpha_mc(double D, size_t m_mc, Rng &rng, BornModel model) {
    check_mc_args(D, m_mc);
    return chunked_mc(m_mc, rng, [&](Rng &r) {
        double x = model == BornModel::Gamma1 ? sample_beta_2(D, r) : sample_beta_1(D, r);
        double y = sample_beta_1(D, r);
        return posterior(std::log(x), std::log(y)) > 0.5 ? 1.0 : 0.0;
    });
}

Estimate pcorr_trajectory(const std::vector<DualLikelihood> &duals, size_t N, Rng &rng) {
    if (N == 0) {
        throw std::invalid_argument("set size must be at least 1");
    }
    std::vector<const DualLikelihood *> classes[2];
    for (const auto &d : duals) {
        classes[static_cast<size_t>(d.true_state)].push_back(&d);
    }
    Moments m;
    for (auto &cls : classes) {
        if (cls.size() < N) {
            throw std::invalid_argument("fewer duals than the set size for one of the states");
        }
        std::sort(cls.begin(), cls.end(), [](const DualLikelihood *a, const DualLikelihood *b) {
            if (a->record.trajectory_seed != b->record.trajectory_seed) {
                return a->record.trajectory_seed < b->record.trajectory_seed;
            }
            if (a->logp_psi != b->logp_psi) return a->logp_psi < b->logp_psi;
            return a->logp_phi < b->logp_phi;
        });
        auto perm = random_permutation(cls.size(), rng);
        size_t sets = cls.size() / N;
        for (size_t s = 0; s < sets; s++) {
            double lt = 0, lo = 0;
            for (size_t k = 0; k < N; k++) {
                const DualLikelihood *d = cls[perm[s * N + k]];
                lt += d->logp_true();
                lo += d->logp_other();
            }
            m.add(posterior(lt, lo));
        }
    }
    return m.finish();
}

}  // namespace mipt
