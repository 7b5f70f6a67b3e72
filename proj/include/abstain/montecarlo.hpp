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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "abstain/half_int.hpp"
#include "abstain/protocol.hpp"
#include "abstain/setting.hpp"
#include "abstain/spin_stats.hpp"

// Simulation of the two-stage protocol: measure j, toss the abstention coin,
// and otherwise measure the covariant POVM of block j. By rotational
// covariance the overlap t = |<n|s>|^2 between the true and guessed state does
// not depend on the true direction, so only t is sampled: conditional on the
// magnetic number m (drawn with weight R^m), t ~ Beta(j + m + 1, j - m + 1).

namespace abstain::mc {

using Engine = std::mt19937_64;

/// Samples per chunk. Chunk k always draws from the stream derived from
/// (seed, k), so results do not depend on how chunks are spread over threads.
inline constexpr std::int64_t kChunkSize = 1 << 16;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Engine stream_for(std::uint64_t seed, std::uint64_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                      static_cast<std::uint32_t>(splitmix64(seed ^ splitmix64(chunk)))};
    return Engine(seq);
}

struct RunOutcome {
    bool abstained = false;
    HalfInt j;
    std::optional<HalfInt> m;
    std::optional<double> fidelity;
};

/// Precomputed tables for repeated single-shot runs under one policy.
class ProtocolSampler {
   public:
    ProtocolSampler(const SpinSpectrum &spec, const AbstentionPolicy &policy)
        : copies_(spec.setting().copies()), coefficients_(policy.coefficients) {
        if (coefficients_.size() != spec.size()) {
            throw std::invalid_argument("policy does not match the setting");
        }
        double cum = 0.0;
        for (const auto &row : spec.rows()) {
            cum += row.p;
            block_cdf_.push_back(cum);
        }
        for (double &c : block_cdf_) {
            c /= cum;
        }
        block_cdf_.back() = 1.0;
        const auto &setting = spec.setting();
        pure_ = setting.is_pure();
        log_rho_ = pure_ ? 0.0 : -2.0 * setting.rapidity();
    }

    /// Draws block j with probability p_j by inverse CDF.
    template <class Rng>
    std::size_t sample_block(Rng &rng) const {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto it = std::upper_bound(block_cdf_.begin(), block_cdf_.end(), u);
        return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - block_cdf_.begin(),
                                                                 static_cast<std::ptrdiff_t>(block_cdf_.size()) - 1));
    }

    /// Draws m in block j with probability R^m / Z_j. With k = j - m the law is a
    /// truncated geometric with ratio 1/R, inverted in closed form.
    template <class Rng>
    HalfInt sample_m(Rng &rng, HalfInt j) const {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const std::int64_t dim = j.dimension();
        std::int64_t k = 0;
        if (pure_) {
            k = 0;
        } else if (log_rho_ == 0.0) {
            k = static_cast<std::int64_t>(u * static_cast<double>(dim));
        } else {
            const double value = std::log1p(u * std::expm1(static_cast<double>(dim) * log_rho_)) / log_rho_;
            k = static_cast<std::int64_t>(std::floor(value));
        }
        k = std::clamp<std::int64_t>(k, 0, dim - 1);
        return j - HalfInt::from_int(k);
    }

    /// Overlap t ~ Beta(j + m + 1, j - m + 1) from a ratio of gamma variates.
    template <class Rng>
    static double sample_overlap(Rng &rng, HalfInt j, HalfInt m) {
        const double alpha = (j + m).value() + 1.0;
        const double beta = (j - m).value() + 1.0;
        const double x = std::gamma_distribution<double>(alpha, 1.0)(rng);
        const double y = std::gamma_distribution<double>(beta, 1.0)(rng);
        return x / (x + y);
    }

    template <class Rng>
    RunOutcome sample_run(Rng &rng) const {
        const std::size_t index = sample_block(rng);
        RunOutcome out;
        out.j = block_at(copies_, static_cast<std::int64_t>(index));
        const double coin = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        if (coin < coefficients_[index]) {
            out.abstained = true;
            return out;
        }
        const HalfInt m = sample_m(rng, out.j);
        out.m = m;
        out.fidelity = sample_overlap(rng, out.j, m);
        return out;
    }

    std::int64_t copies() const { return copies_; }
    std::size_t block_count() const { return block_cdf_.size(); }

   private:
    std::int64_t copies_;
    std::vector<double> coefficients_;
    std::vector<double> block_cdf_;
    bool pure_ = false;
    double log_rho_ = 0.0;
};

/// Single protocol run drawn from `rng`.
template <class Rng>
RunOutcome sample_run(Rng &rng, const SpinSpectrum &spec, const AbstentionPolicy &policy) {
    return ProtocolSampler(spec, policy).sample_run(rng);
}

/// Running mean and sum of squared deviations, mergeable in a fixed order.
struct Moments {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    void merge(const Moments &o) {
        if (o.count == 0) {
            return;
        }
        if (count == 0) {
            *this = o;
            return;
        }
        const double n = static_cast<double>(count + o.count);
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.count) / n;
        m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
        count += o.count;
    }

    std::optional<double> standard_error() const {
        if (count < 2) {
            return std::nullopt;
        }
        const double var = m2 / static_cast<double>(count - 1);
        return std::sqrt(var / static_cast<double>(count));
    }
};

struct BlockTally {
    HalfInt j;
    std::int64_t measured = 0;
    Moments fidelity;  // over accepted runs in this block
};

struct MCReport {
    std::int64_t samples = 0;
    std::int64_t accepted = 0;
    double empirical_q = 0.0;
    std::optional<double> mean_fidelity;  // empty when nothing was accepted
    std::optional<double> standard_error;
    std::uint64_t seed = 0;
    std::vector<BlockTally> blocks;

    bool has_data() const { return accepted > 0; }
};

namespace detail {

struct ChunkResult {
    Moments overall;
    std::vector<std::int64_t> measured;
    std::vector<Moments> per_block;
};

inline ChunkResult run_chunk(const ProtocolSampler &sampler, std::uint64_t seed, std::int64_t chunk,
                             std::int64_t count) {
    ChunkResult out;
    out.measured.assign(sampler.block_count(), 0);
    out.per_block.assign(sampler.block_count(), Moments{});
    Engine rng = stream_for(seed, static_cast<std::uint64_t>(chunk));
    for (std::int64_t i = 0; i < count; ++i) {
        const RunOutcome run = sampler.sample_run(rng);
        const auto index = static_cast<std::size_t>(block_index(sampler.copies(), run.j));
        ++out.measured[index];
        if (!run.abstained) {
            out.overall.add(*run.fidelity);
            out.per_block[index].add(*run.fidelity);
        }
    }
    return out;
}

}  // namespace detail

/// Monte Carlo estimate of F(Q) and Q under the optimal policy. Deterministic
/// in (seed, setting, q, samples); `threads` = 0 uses the hardware concurrency.
inline MCReport estimate(std::uint64_t seed, const EstimationSetting &setting, double q, std::int64_t samples,
                         unsigned threads = 0) {
    if (samples < 1) {
        throw std::domain_error("sample count must be positive");
    }
    const SpinSpectrum spec(setting);
    const AbstentionPolicy policy = optimal_policy(spec, q);
    const ProtocolSampler sampler(spec, policy);

    const std::int64_t chunks = (samples + kChunkSize - 1) / kChunkSize;
    std::vector<detail::ChunkResult> results(static_cast<std::size_t>(chunks));
    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, chunks));

    std::atomic<std::int64_t> next{0};
    const auto worker = [&] {
        for (std::int64_t c = next++; c < chunks; c = next++) {
            const std::int64_t count = std::min(kChunkSize, samples - c * kChunkSize);
            results[static_cast<std::size_t>(c)] = detail::run_chunk(sampler, seed, c, count);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    MCReport report;
    report.samples = samples;
    report.seed = seed;
    Moments overall;
    std::vector<std::int64_t> measured(spec.size(), 0);
    std::vector<Moments> per_block(spec.size());
    for (const auto &chunk : results) {
        overall.merge(chunk.overall);
        for (std::size_t i = 0; i < spec.size(); ++i) {
            measured[i] += chunk.measured[i];
            per_block[i].merge(chunk.per_block[i]);
        }
    }
    report.accepted = overall.count;
    report.empirical_q = static_cast<double>(samples - overall.count) / static_cast<double>(samples);
    if (overall.count > 0) {
        report.mean_fidelity = overall.mean;
        report.standard_error = overall.standard_error();
    }
    for (std::size_t i = 0; i < spec.size(); ++i) {
        report.blocks.push_back({spec[i].j, measured[i], per_block[i]});
    }
    return report;
}

}  // namespace abstain::mc
