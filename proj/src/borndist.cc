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

#include "mipt/borndist.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mipt {

namespace {

// Stirling remainder of ln Gamma(x) beyond (x - 1/2) ln x - x + ln(2 pi) / 2.
double stirling_tail(double x) {
    double r = 1.0 / x;
    double r2 = r * r;
    return r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 / 1680)));
}

void check_args(uint64_t k, uint64_t M, double D) {
    if (M == 0) {
        throw std::invalid_argument("sample size M must be positive");
    }
    if (k > M) {
        throw std::invalid_argument("k must lie in [0, M]");
    }
    if (!(D >= 2)) {
        throw std::invalid_argument("Hilbert-space dimension D must be at least 2");
    }
}

}  // namespace

double lgamma_diff(double a, double b) {
    if (a >= 8 && b >= 8) {
        double d = a - b;
        return (a - 0.5) * std::log1p(d / b) + d * std::log(b) - d + stirling_tail(a) - stirling_tail(b);
    }
    return std::lgamma(a) - std::lgamma(b);
}

double log_binom_prob_p(uint64_t k, uint64_t M, double D) {
    check_args(k, M, D);
    double m = static_cast<double>(M);
    double kk = static_cast<double>(k);
    double log_choose = lgamma_diff(m + 1, m - kk + 1) - std::lgamma(kk + 1);
    return std::log(m) + log_choose - kk * std::log(D) + (m - kk) * std::log1p(-1.0 / D);
}

double log_betabinom_prob_p(uint64_t k, uint64_t M, double D) {
    check_args(k, M, D);
    double m = static_cast<double>(M);
    double kk = static_cast<double>(k);
    return std::log(m) + std::log(D - 1) + lgamma_diff(m + 1, m - kk + 1) + lgamma_diff(m + D - kk - 1, m + D);
}

double binom_prob_p(uint64_t k, uint64_t M, double D) {
    return std::exp(log_binom_prob_p(k, M, D));
}

double betabinom_prob_p(uint64_t k, uint64_t M, double D) {
    return std::exp(log_betabinom_prob_p(k, M, D));
}

double beta_prob(double p, double D) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("p must lie in [0, 1]");
    }
    if (!(D >= 2)) {
        throw std::invalid_argument("Hilbert-space dimension D must be at least 2");
    }
    if (p == 1.0) {
        return D == 2 ? 1.0 : 0.0;
    }
    return std::exp(std::log(D - 1) + (D - 2) * std::log1p(-p));
}

double tail_log_diff(double p, uint64_t M, double D) {
    double m = static_cast<double>(M);
    if (M == 0 || !(p >= 2.0 / m && p <= 0.5)) {
        throw std::invalid_argument("tail approximation needs 2/M <= p <= 0.5");
    }
    if (!(D > m)) {
        throw std::invalid_argument("tail approximation needs D > M");
    }
    double x = m * p;
    return (1 + x) * std::log1p(m / D) - x * std::log(x) + x - 0.5 * std::log(2 * std::numbers::pi * x);
}

double tail_ratio(double p, uint64_t M, double D) {
    return std::exp(tail_log_diff(p, M, D));
}

double BornEstimate::probability(uint64_t key) const {
    auto it = counts.find(key);
    if (it == counts.end() || denominator == 0) {
        return 0.0;
    }
    return static_cast<double>(it->second) / static_cast<double>(denominator);
}

uint64_t slice_key(const TrajectoryRecord &record, size_t t) {
    uint64_t key = 0;
    for (size_t x = 0; x < record.L; x++) {
        key |= static_cast<uint64_t>(record.bit(t, x)) << x;
    }
    return key;
}

BornEstimate empirical_born(const std::vector<TrajectoryRecord> &records, size_t t, bool translate) {
    if (records.empty()) {
        throw std::invalid_argument("empirical Born estimate needs at least one record");
    }
    BornEstimate est;
    est.t = t;
    est.L = records[0].L;
    if (t >= 2 * est.L) {
        throw std::invalid_argument("time index out of range");
    }
    uint64_t mask = est.L == 64 ? ~uint64_t{0} : (uint64_t{1} << est.L) - 1;
    for (const auto &r : records) {
        if (r.L != est.L) {
            throw std::invalid_argument("records must share L");
        }
        uint64_t key = slice_key(r, t);
        if (!translate) {
            est.counts[key]++;
            continue;
        }
        // Shift by s moves site x to x + s, i.e. a cyclic left rotation of the key.
        for (size_t s = 0; s < est.L; s++) {
            uint64_t rotated = s == 0 ? key : ((key << s) | (key >> (est.L - s))) & mask;
            est.counts[rotated]++;
        }
    }
    est.denominator = records.size() * (translate ? est.L : 1);
    return est;
}

double ProbHistogram::moment(int order) const {
    double total = 0;
    for (const auto &[p, density] : entries) {
        total += density * std::pow(p, order);
    }
    return total;
}

ProbHistogram prob_p_histogram(const BornEstimate &estimate, double D) {
    if (!(D >= 2)) {
        throw std::invalid_argument("Hilbert-space dimension D must be at least 2");
    }
    std::map<uint64_t, uint64_t> outcomes_with_count;
    for (const auto &[key, count] : estimate.counts) {
        outcomes_with_count[count]++;
    }
    ProbHistogram h;
    h.sample_size = estimate.denominator;
    h.hilbert_dim = D;
    for (const auto &[count, n_p] : outcomes_with_count) {
        double p = static_cast<double>(count) / static_cast<double>(estimate.denominator);
        h.entries.emplace_back(p, static_cast<double>(n_p) / D);
    }
    return h;
}

}  // namespace mipt
