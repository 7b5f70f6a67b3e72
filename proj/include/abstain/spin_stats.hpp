// Copyright 2026 The abstain Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "abstain/half_int.hpp"
#include "abstain/numerics.hpp"
#include "abstain/setting.hpp"

namespace abstain {

using BigInt = boost::multiprecision::cpp_int;

/// Number of spin-j irreps in the decomposition of N qubits,
/// C(N, J - j) (2j + 1) / (J + j + 1), computed exactly.
inline BigInt multiplicity(std::int64_t copies, HalfInt j) {
    if (copies < 1) {
        throw std::domain_error("number of copies must be positive");
    }
    block_index(copies, j);
    const std::int64_t k = (copies - j.twice()) / 2;
    BigInt binom = 1;
    for (std::int64_t i = 0; i < k; ++i) {
        binom *= copies - i;
        binom /= i + 1;
    }
    return binom * j.dimension() / (copies - k + 1);
}

/// log of multiplicity(), usable for any N.
inline double log_multiplicity(std::int64_t copies, HalfInt j) {
    block_index(copies, j);
    const double k = static_cast<double>((copies - j.twice()) / 2);
    const double n = static_cast<double>(copies);
    return numerics::log_binomial_coefficient(k, n) + std::log(static_cast<double>(j.dimension())) -
           std::log(n - k + 1.0);
}

struct BlockProbability {
    double log_p;
    double p;
};

/// Probability that N copies of the depolarized state are found in total
/// angular momentum j (summed over multiplicity).
///
/// Evaluated as (2j+1)/((N+1) r) * Bin(J-j; N+1, (1-r)/2) * (1 - R^-(2j+1)),
/// which equals ((1-r^2)/4)^J n_j Z_j but keeps full relative precision for
/// any N because the binomial factor is a saddle-point pmf.
inline BlockProbability block_probability(const EstimationSetting &setting, HalfInt j) {
    const std::int64_t copies = setting.copies();
    block_index(copies, j);
    const double r = setting.purity();
    const double n1 = static_cast<double>(copies + 1);
    const double k = static_cast<double>((copies - j.twice()) / 2);
    const double dim = static_cast<double>(j.dimension());

    if (setting.is_pure()) {
        return j == setting.top_block() ? BlockProbability{0.0, 1.0} : BlockProbability{numerics::kNegInf, 0.0};
    }

    double log_p = std::log(dim) - std::log(n1) + numerics::log_binomial_pmf(k, n1, 0.5 * (1.0 - r), 0.5 * (1.0 + r));
    if (setting.is_fully_mixed()) {
        log_p += std::log(2.0 * dim);
    } else {
        log_p += numerics::log1m_exp_neg(2.0 * dim * setting.rapidity()) - std::log(r);
    }
    return {log_p, std::exp(log_p)};
}

/// Mean of J_z in the normalized block state, sum_m m R^m / Z_j.
///
/// Written as ((2j+1) L((2j+1) t) - L(t)) / 2 with t = atanh r and L the
/// Langevin function coth(x) - 1/x, which has no cancellation as r -> 0.
inline double mean_jz(const EstimationSetting &setting, HalfInt j) {
    if (setting.is_pure()) {
        return j.value();
    }
    if (setting.is_fully_mixed() || j.twice() == 0) {
        return 0.0;
    }
    const double t = setting.rapidity();
    const double dim = static_cast<double>(j.dimension());
    return 0.5 * (dim * numerics::coth_minus_inverse(dim * t) - numerics::coth_minus_inverse(t));
}

/// Per-block fidelity contribution <J_z>_j / (j + 1).
inline double block_delta(const EstimationSetting &setting, HalfInt j) {
    return mean_jz(setting, j) / (j.value() + 1.0);
}

struct SpinBlock {
    HalfInt j;
    double log_multiplicity;
    double log_p;
    double p;
    double mean_jz;
    double delta;
};

/// Per-block table for one setting, ordered by increasing j.
class SpinSpectrum {
   public:
    explicit SpinSpectrum(const EstimationSetting &setting) : setting_(setting) {
        const std::int64_t count = setting.block_count();
        rows_.reserve(static_cast<std::size_t>(count));
        for (std::int64_t i = 0; i < count; ++i) {
            const HalfInt j = block_at(setting.copies(), i);
            const auto [log_p, p] = block_probability(setting, j);
            const double mz = mean_jz(setting, j);
            rows_.push_back({j, log_multiplicity(setting.copies(), j), log_p, p, mz, mz / (j.value() + 1.0)});
        }
    }

    const EstimationSetting &setting() const { return setting_; }
    const std::vector<SpinBlock> &rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    const SpinBlock &operator[](std::size_t i) const { return rows_[i]; }
    const SpinBlock &at(HalfInt j) const {
        return rows_[static_cast<std::size_t>(block_index(setting_.copies(), j))];
    }
    const SpinBlock &top() const { return rows_.back(); }

    /// log sum_j p_j, accumulated with log-sum-exp.
    double log_total() const {
        std::vector<double> logs;
        logs.reserve(rows_.size());
        for (const auto &row : rows_) {
            logs.push_back(row.log_p);
        }
        return numerics::log_sum_exp(logs);
    }

    /// log sum_{j >= from} p_j.
    double log_tail(HalfInt from) const {
        std::vector<double> logs;
        for (const auto &row : rows_) {
            if (row.j >= from) {
                logs.push_back(row.log_p);
            }
        }
        return numerics::log_sum_exp(logs);
    }

    /// Block with the largest probability.
    const SpinBlock &mode() const {
        const SpinBlock *best = &rows_.front();
        for (const auto &row : rows_) {
            if (row.log_p > best->log_p) {
                best = &row;
            }
        }
        return *best;
    }

   private:
    EstimationSetting setting_;
    std::vector<SpinBlock> rows_;
};

inline SpinSpectrum spectrum(const EstimationSetting &setting) { return SpinSpectrum(setting); }

/// Smallest block j with j >= x J, for a scaled threshold x in [0, 1].
inline HalfInt block_at_or_above(std::int64_t copies, double x) {
    const double target = x * static_cast<double>(copies);  // 2 x J
    std::int64_t twice = copies % 2;
    const auto steps = static_cast<std::int64_t>(std::ceil((target - static_cast<double>(twice)) / 2.0 - 1e-12));
    if (steps > 0) {
        twice += 2 * steps;
    }
    if (twice > copies) {
        twice = copies;
    }
    return HalfInt::from_twice(twice);
}

}  // namespace abstain
