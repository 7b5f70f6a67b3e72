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
#include <numbers>
#include <stdexcept>
#include <string>

#include "abstain/setting.hpp"
#include "abstain/spin_stats.hpp"

// Large-N laws for the block distribution and the abstention protocol, in the
// scaled variable x = j/J. All logarithms are natural.

namespace abstain {

/// Binary relative entropy H(s || t) = s ln(s/t) + (1-s) ln((1-s)/(1-t)),
/// with 0 ln 0 = 0.
inline double relative_entropy(double s, double t) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw std::domain_error("relative entropy: s must lie in [0, 1], got " + std::to_string(s));
    }
    if (!(t > 0.0 && t < 1.0)) {
        throw std::domain_error("relative entropy: t must lie in (0, 1), got " + std::to_string(t));
    }
    const double up = s > 0.0 ? s * std::log(s / t) : 0.0;
    const double down = s < 1.0 ? (1.0 - s) * std::log((1.0 - s) / (1.0 - t)) : 0.0;
    return up + down;
}

enum class DensityVariant { kStirling, kGaussian };

/// Large-N approximation to the scaled block density p(x) = J p_{j = xJ}.
inline double density_approx(const EstimationSetting &setting, double x, DensityVariant variant) {
    const double r = setting.purity();
    if (!(x > 0.0 && x < 1.0)) {
        throw std::domain_error("density approximation needs x in (0, 1), got " + std::to_string(x));
    }
    if (!(r > 0.0 && r < 1.0)) {
        throw std::domain_error("density approximation needs r in (0, 1), got " + std::to_string(r));
    }
    const double n = static_cast<double>(setting.copies());
    if (variant == DensityVariant::kGaussian) {
        const double var = 1.0 - r * r;
        return std::sqrt(n / (2.0 * std::numbers::pi * var)) * std::exp(-n * (x - r) * (x - r) / (2.0 * var));
    }
    const double prefactor =
        std::sqrt(n / (2.0 * std::numbers::pi)) / std::sqrt(1.0 - x * x) * x * (1.0 + r) / (r * (1.0 + x));
    return prefactor * std::exp(-n * relative_entropy(0.5 * (1.0 + x), 0.5 * (1.0 + r)));
}

/// Exact scaled density J p_j at the block j nearest to x J (from spin-stats).
inline double density_exact(const SpinSpectrum &spec, HalfInt j) {
    return 0.5 * static_cast<double>(spec.setting().copies()) * spec.at(j).p;
}

/// Leading exponential law for the acceptance rate of threshold x*:
/// log Qbar ~ -N H((1+x*)/2 || (1+r)/2). Returns 0 when x* <= r, where the
/// abstention rate is exponentially small.
inline double acceptance_asymptotic(const EstimationSetting &setting, double x_star) {
    const double r = setting.purity();
    if (x_star <= r) {
        return 0.0;
    }
    if (x_star > 1.0) {
        throw std::domain_error("threshold x* must not exceed 1, got " + std::to_string(x_star));
    }
    return -static_cast<double>(setting.copies()) * relative_entropy(0.5 * (1.0 + x_star), 0.5 * (1.0 + r));
}

/// Exact log acceptance of the sharp threshold x*: log sum_{j >= x* J} p_j.
inline double acceptance_exact(const SpinSpectrum &spec, double x_star) {
    return spec.log_tail(block_at_or_above(spec.setting().copies(), x_star));
}

/// Leading 1/N fidelity of the threshold protocol:
/// 1 - (r+1)/(2 N r^2) for x* <= r and 1 - (r+1)/(2 N x* r) for r < x* <= 1.
inline double fidelity_asymptotic(const EstimationSetting &setting, double x_star) {
    const double r = setting.purity();
    if (r == 0.0) {
        throw std::domain_error("asymptotic fidelity is undefined at r = 0");
    }
    if (!(x_star >= 0.0 && x_star <= 1.0)) {
        throw std::domain_error("threshold x* must lie in [0, 1], got " + std::to_string(x_star));
    }
    const double n = static_cast<double>(setting.copies());
    const double x = std::max(x_star, r);
    return 1.0 - (r + 1.0) / (2.0 * n * x * r);
}

/// Asymptotic copy count the no-abstention protocol needs to match threshold x*:
/// N max(x*, r)/r.
inline double effective_copies_asymptotic(const EstimationSetting &setting, double x_star) {
    const double r = setting.purity();
    if (r == 0.0) {
        throw std::domain_error("effective copies are undefined at r = 0");
    }
    return static_cast<double>(setting.copies()) * std::max(x_star, r) / r;
}

/// Large-N effective purity at large abstention, (r + sqrt(4r + 5r^2)) / (2(1+r)).
/// Tends to sqrt(r) as r -> 0; as r -> 1 the error probability drops by 3x.
inline double effective_purity_asymptotic(double r) {
    if (!(r > 0.0 && r <= 1.0)) {
        throw std::domain_error("effective purity needs r in (0, 1], got " + std::to_string(r));
    }
    return (r + std::sqrt(4.0 * r + 5.0 * r * r)) / (2.0 * (1.0 + r));
}

struct AsymptoticPoint {
    double x;
    double x_star;
    double density;
    double log_acceptance;
};

inline AsymptoticPoint asymptotic_point(const EstimationSetting &setting, double x, double x_star) {
    return {x, x_star, density_approx(setting, x, DensityVariant::kStirling), acceptance_asymptotic(setting, x_star)};
}

}  // namespace abstain
