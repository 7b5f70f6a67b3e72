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
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "abstain/half_int.hpp"
#include "abstain/numerics.hpp"
#include "abstain/roots.hpp"
#include "abstain/setting.hpp"
#include "abstain/spin_stats.hpp"

namespace abstain {

/// Slack allowed when a requested Q lands on a cumulative block mass.
inline constexpr double kTieTolerance = 1e-13;

/// Block-wise abstention rule: abstain always below the threshold, with
/// probability `coefficients[i]` at it, never above.
struct AbstentionPolicy {
    HalfInt threshold;
    std::vector<double> coefficients;  // a_j, indexed by block position from j_min
    double requested_q = 0.0;
    double realized_q = 0.0;
    double log_acceptance = 0.0;  // log sum_j p_j (1 - a_j)

    double coefficient(std::int64_t copies, HalfInt j) const {
        return coefficients[static_cast<std::size_t>(block_index(copies, j))];
    }
};

inline void check_abstention_rate(double q) {
    if (!(q >= 0.0 && q < 1.0)) {
        throw std::domain_error("abstention rate must lie in [0, 1), got " + std::to_string(q));
    }
}

namespace detail {

inline double log_acceptance_of(const SpinSpectrum &spec, std::span<const double> coefficients) {
    std::vector<double> logs;
    logs.reserve(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double accept = 1.0 - coefficients[i];
        logs.push_back(accept > 0.0 ? spec[i].log_p + std::log(accept) : numerics::kNegInf);
    }
    return numerics::log_sum_exp(logs);
}

}  // namespace detail

/// Optimal policy for abstention rate Q: the lowest blocks are discarded first,
/// with a Bernoulli coin at the threshold block so that sum_j p_j a_j = Q.
///
/// When Q lands exactly on a cumulative mass the threshold advances and its coin
/// is 0, which keeps a_j right-continuous in Q.
inline AbstentionPolicy optimal_policy(const SpinSpectrum &spec, double q) {
    check_abstention_rate(q);
    const std::size_t count = spec.size();
    std::vector<double> coeff(count, 0.0);

    double below = 0.0;  // sum_{j' < j} p_j'
    std::size_t star = 0;
    double below_star = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        if (q - below >= -kTieTolerance) {
            star = i;
            below_star = below;
        } else {
            break;
        }
        below += spec[i].p;
    }
    for (std::size_t i = 0; i < star; ++i) {
        coeff[i] = 1.0;
    }
    const double p_star = spec[star].p;
    coeff[star] = p_star > 0.0 ? std::clamp((q - below_star) / p_star, 0.0, 1.0) : 0.0;

    double realized = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        realized += spec[i].p * coeff[i];
    }
    AbstentionPolicy policy{spec[star].j, std::move(coeff), q, realized, 0.0};
    policy.log_acceptance = detail::log_acceptance_of(spec, policy.coefficients);
    return policy;
}

inline AbstentionPolicy optimal_policy(const EstimationSetting &setting, double q) {
    return optimal_policy(SpinSpectrum(setting), q);
}

/// Policy given directly by its threshold block and coin. Used where the
/// abstention rate is too close to 1 to be represented as a double, e.g. for
/// large N where the acceptance rate is exponentially small.
inline AbstentionPolicy threshold_policy(const SpinSpectrum &spec, HalfInt threshold, double coin = 0.0) {
    if (!(coin >= 0.0 && coin < 1.0)) {
        throw std::domain_error("threshold coin must lie in [0, 1), got " + std::to_string(coin));
    }
    const auto star = static_cast<std::size_t>(block_index(spec.setting().copies(), threshold));
    std::vector<double> coeff(spec.size(), 0.0);
    double realized = 0.0;
    for (std::size_t i = 0; i < star; ++i) {
        coeff[i] = 1.0;
        realized += spec[i].p;
    }
    coeff[star] = coin;
    realized += coin * spec[star].p;
    AbstentionPolicy policy{threshold, std::move(coeff), realized, realized, 0.0};
    policy.log_acceptance = detail::log_acceptance_of(spec, policy.coefficients);
    return policy;
}

struct FidelityReport {
    double fidelity = 0.0;                // F(Q)
    double fidelity_no_abstention = 0.0;  // F(0)
    double gain = 0.0;                    // (F(Q) - F(0)) / F(0)
    double abstention = 0.0;              // Q
    double acceptance = 0.0;              // 1 - Q
    double log_acceptance = 0.0;
    std::vector<double> weighted_deltas;  // (1 - a_j) Delta_j / (1 - Q)
};

namespace detail {

/// 1/2 (1 + sum_j p_j (1 - a_j) Delta_j / sum_j p_j (1 - a_j)), with the weights
/// taken relative to their maximum so exponentially small acceptance is fine.
inline double mean_fidelity(const SpinSpectrum &spec, std::span<const double> coefficients) {
    double top = numerics::kNegInf;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (coefficients[i] < 1.0) {
            top = std::max(top, spec[i].log_p + std::log1p(-coefficients[i]));
        }
    }
    if (top == numerics::kNegInf) {
        throw NumericalError("policy accepts no block");
    }
    double weight = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (coefficients[i] < 1.0) {
            const double w = std::exp(spec[i].log_p + std::log1p(-coefficients[i]) - top);
            weight += w;
            weighted += w * spec[i].delta;
        }
    }
    return 0.5 * (1.0 + weighted / weight);
}

inline double pure_state_fidelity(std::int64_t copies) {
    return static_cast<double>(copies + 1) / static_cast<double>(copies + 2);
}

}  // namespace detail

/// Fidelity of the optimal estimator without abstention, 1/2 (1 + sum_j p_j Delta_j).
inline double fidelity_no_abstention(const SpinSpectrum &spec) {
    if (spec.setting().is_pure()) {
        return detail::pure_state_fidelity(spec.setting().copies());
    }
    const std::vector<double> none(spec.size(), 0.0);
    return detail::mean_fidelity(spec, none);
}

inline double fidelity_no_abstention(const EstimationSetting &setting) {
    return fidelity_no_abstention(SpinSpectrum(setting));
}

/// Fidelity when only the top block j = J is kept, 1/2 (1 + Delta_J). This is
/// the value of F(Q) for every Q >= Q_crit.
inline double plateau_fidelity(const SpinSpectrum &spec) {
    if (spec.setting().is_pure()) {
        return detail::pure_state_fidelity(spec.setting().copies());
    }
    return 0.5 * (1.0 + spec.top().delta);
}

inline FidelityReport fidelity_report(const SpinSpectrum &spec, const AbstentionPolicy &policy) {
    FidelityReport report;
    report.fidelity_no_abstention = fidelity_no_abstention(spec);
    report.abstention = policy.realized_q;
    report.log_acceptance = policy.log_acceptance;
    report.acceptance = std::exp(policy.log_acceptance);
    if (spec.setting().is_pure()) {
        report.fidelity = report.fidelity_no_abstention;
    } else {
        report.fidelity = detail::mean_fidelity(spec, policy.coefficients);
    }
    report.gain = (report.fidelity - report.fidelity_no_abstention) / report.fidelity_no_abstention;
    report.weighted_deltas.reserve(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double accept = 1.0 - policy.coefficients[i];
        report.weighted_deltas.push_back(accept > 0.0 ? accept * spec[i].delta / report.acceptance : 0.0);
    }
    return report;
}

/// F(Q) under the optimal policy.
inline FidelityReport fidelity_with_abstention(const SpinSpectrum &spec, double q) {
    return fidelity_report(spec, optimal_policy(spec, q));
}

inline FidelityReport fidelity_with_abstention(const EstimationSetting &setting, double q) {
    return fidelity_with_abstention(SpinSpectrum(setting), q);
}

/// Abstention rate beyond which only j = J is kept:
/// 1 - p_J = 1 - ((1+r)/2)^(N+1)/r + ((1-r)/2)^(N+1)/r.
inline double critical_abstention(const EstimationSetting &setting) {
    if (setting.is_pure()) {
        return 0.0;
    }
    return -std::expm1(block_probability(setting, setting.top_block()).log_p);
}

/// Abstention rate of the local strategy that measures every qubit along one
/// axis and abstains unless all N outcomes agree: 1 - ((1+r)/2)^N.
inline double local_sg_abstention(const EstimationSetting &setting) {
    const double n = static_cast<double>(setting.copies());
    return -std::expm1(n * std::log1p(-0.5 * (1.0 - setting.purity())));
}

/// Abscissas Q at which F(Q) has kinks: the cumulative masses sum_{j' <= j} p_j'
/// for j < J.
inline std::vector<double> kink_abscissas(const SpinSpectrum &spec) {
    std::vector<double> kinks;
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < spec.size(); ++i) {
        cum += spec[i].p;
        kinks.push_back(cum);
    }
    return kinks;
}

/// `steps` evenly spaced abstention rates k/steps, k = 0 .. steps-1.
inline std::vector<double> abstention_grid(std::int64_t steps) {
    if (steps < 1) {
        throw std::domain_error("grid needs at least one step");
    }
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(steps));
    for (std::int64_t k = 0; k < steps; ++k) {
        grid.push_back(static_cast<double>(k) / static_cast<double>(steps));
    }
    return grid;
}

struct GainPoint {
    double q;
    double fidelity;
    double gain;
};

inline std::vector<GainPoint> gain_curve(const EstimationSetting &setting, std::span<const double> q_grid) {
    const SpinSpectrum spec(setting);
    std::vector<GainPoint> out;
    out.reserve(q_grid.size());
    for (double q : q_grid) {
        const auto report = fidelity_with_abstention(spec, q);
        out.push_back({q, report.fidelity, report.gain});
    }
    return out;
}

/// Relative gain F(Q)/F(0) - 1 at any Q >= Q_crit.
inline double plateau_gain(const EstimationSetting &setting) {
    const SpinSpectrum spec(setting);
    const double f0 = fidelity_no_abstention(spec);
    return (plateau_fidelity(spec) - f0) / f0;
}

struct CopiesGainPoint {
    std::int64_t copies;
    double gain;
};

inline std::vector<CopiesGainPoint> gain_vs_copies(double purity, std::int64_t n_min, std::int64_t n_max) {
    if (n_min < 1 || n_max < n_min) {
        throw std::domain_error("copy range must satisfy 1 <= n_min <= n_max");
    }
    std::vector<CopiesGainPoint> out;
    for (std::int64_t n = n_min; n <= n_max; ++n) {
        out.push_back({n, plateau_gain(EstimationSetting(n, purity))});
    }
    return out;
}

struct EffectivePurity {
    double purity;
    double error_probability;
};

/// Purity r' at which the no-abstention protocol on N copies reaches `target`.
inline EffectivePurity effective_purity_for_fidelity(std::int64_t copies, double target, double lower = 0.0) {
    const auto f = [copies](double r) { return fidelity_no_abstention(EstimationSetting(copies, r)); };
    double r_eff = 1.0;
    if (target < detail::pure_state_fidelity(copies)) {
        r_eff = target <= f(lower) ? lower : solve_increasing(f, target, lower, 1.0);
    }
    return {r_eff, 0.75 * (1.0 - r_eff)};
}

/// Effective purity of abstention rate Q: F(r_eff, N, 0) = F(r, N, Q).
inline EffectivePurity effective_purity(const EstimationSetting &setting, double q) {
    check_abstention_rate(q);
    if (q == 0.0 || setting.is_pure()) {
        return {setting.purity(), setting.error_probability()};
    }
    const double target = fidelity_with_abstention(setting, q).fidelity;
    return effective_purity_for_fidelity(setting.copies(), target, setting.purity());
}

inline constexpr std::int64_t kMaxEffectiveCopies = std::int64_t{1} << 23;

namespace detail {

/// Inverts the monotone piecewise-cubic (Fritsch-Butland slopes) interpolant
/// of integer samples f(n) on [n - 1, n] at `target`.
template <class F>
double invert_monotone_cubic(F &&f, std::int64_t n, double target) {
    const std::int64_t lo = n - 1;
    std::array<double, 4> xs{};
    std::array<double, 4> ys{};
    for (int i = 0; i < 4; ++i) {
        xs[i] = static_cast<double>(lo - 1 + i);
        ys[i] = (lo - 1 + i) >= 1 ? f(lo - 1 + i) : std::numeric_limits<double>::quiet_NaN();
    }
    const auto slope_between = [&](int i) { return ys[i + 1] - ys[i]; };
    const auto node_slope = [&](int i) {
        const double left = std::isnan(ys[i - 1]) ? std::numeric_limits<double>::quiet_NaN() : slope_between(i - 1);
        const double right = slope_between(i);
        if (std::isnan(left)) {
            return right;
        }
        if (left * right <= 0.0) {
            return 0.0;
        }
        return 2.0 * left * right / (left + right);
    };
    const double y0 = ys[1];
    const double y1 = ys[2];
    const double d0 = node_slope(1);
    const double d1 = node_slope(2);
    const auto hermite = [&](double s) {
        const double s2 = s * s;
        const double s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * d1;
    };
    return static_cast<double>(lo) + solve_increasing(hermite, target, 0.0, 1.0);
}

}  // namespace detail

/// Real-valued copy count at which the no-abstention protocol with purity r
/// reaches `target`, interpolating F(., r, 0) monotonically between integers.
/// Returns nullopt when no N up to kMaxEffectiveCopies reaches the target.
inline std::optional<double> effective_copies_for_fidelity(double purity, double target, std::int64_t start = 1) {
    if (!(purity > 0.0 && purity <= 1.0)) {
        throw std::domain_error("effective copies need purity in (0, 1], got " + std::to_string(purity));
    }
    const auto f = [purity](std::int64_t n) { return fidelity_no_abstention(EstimationSetting(n, purity)); };
    start = std::max<std::int64_t>(start, 1);
    if (f(start) >= target) {
        // Walk down until the bracket [n - 1, n] holds the target.
        std::int64_t n = start;
        while (n > 1 && f(n - 1) >= target) {
            --n;
        }
        if (n == 1) {
            return 1.0;
        }
        return f(n) == target ? static_cast<double>(n) : detail::invert_monotone_cubic(f, n, target);
    }
    std::int64_t lo = start;  // f(lo) < target
    std::int64_t hi = start * 2;
    while (f(hi) < target) {
        lo = hi;
        hi *= 2;
        if (hi > kMaxEffectiveCopies) {
            return std::nullopt;
        }
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (f(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return f(hi) == target ? static_cast<double>(hi) : detail::invert_monotone_cubic(f, hi, target);
}

/// N_eff for a given policy: the copy count the no-abstention protocol needs to
/// match the policy's fidelity.
inline std::optional<double> effective_copies(const SpinSpectrum &spec, const AbstentionPolicy &policy) {
    const auto &setting = spec.setting();
    if (policy.realized_q == 0.0 || setting.is_pure()) {
        return static_cast<double>(setting.copies());
    }
    const double target = fidelity_report(spec, policy).fidelity;
    return effective_copies_for_fidelity(setting.purity(), target, setting.copies());
}

inline std::optional<double> effective_copies(const EstimationSetting &setting, double q) {
    check_abstention_rate(q);
    const SpinSpectrum spec(setting);
    return effective_copies(spec, optimal_policy(spec, q));
}

}  // namespace abstain
