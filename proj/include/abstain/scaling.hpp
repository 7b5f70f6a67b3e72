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
#include <stdexcept>
#include <string>

#include "abstain/numerics.hpp"
#include "abstain/roots.hpp"

// Leading-order laws when the purity shrinks as r = a / sqrt(N). The block
// index is measured by xi = 2j / sqrt(N); O(N^-1/2) corrections are dropped.

namespace abstain::scaling {

struct ScalingParams {
    double a;
    double xi_star;

    ScalingParams(double a_, double xi_star_) : a(a_), xi_star(xi_star_) {
        if (!(a > 0.0)) {
            throw std::domain_error("scaling constant a must be positive, got " + std::to_string(a));
        }
        if (!(xi_star >= 0.0)) {
            throw std::domain_error("scaled threshold must be nonnegative, got " + std::to_string(xi_star));
        }
    }

    double xi_plus() const { return (xi_star + a) / std::numbers::sqrt2; }
    double xi_minus() const { return (xi_star - a) / std::numbers::sqrt2; }
};

inline void check_a(double a) {
    if (!(a > 0.0)) {
        throw std::domain_error("scaling constant a must be positive, got " + std::to_string(a));
    }
}

/// Limiting density of xi,
/// xi (exp(-((xi-a)/sqrt2)^2) - exp(-((xi+a)/sqrt2)^2)) / (sqrt(2 pi) a).
inline double density_xi(double a, double xi) {
    check_a(a);
    if (xi < 0.0) {
        throw std::domain_error("xi must be nonnegative");
    }
    const double bracket = std::exp(-0.5 * (xi - a) * (xi - a)) * -std::expm1(-2.0 * a * xi);
    return xi * bracket / (std::sqrt(2.0 * std::numbers::pi) * a);
}

/// Abstention rate of threshold xi*, the integral of density_xi over [0, xi*].
inline double abstention_of_threshold(double a, double xi_star) {
    const ScalingParams p(a, xi_star);
    const double xp = p.xi_plus();
    const double xm = p.xi_minus();
    return 0.5 * (std::erf(xp) + std::erf(xm)) -
           (std::exp(-xm * xm) - std::exp(-xp * xp)) / (std::sqrt(2.0 * std::numbers::pi) * a);
}

/// Leading-order Delta(xi) = 1 - 2/(1 - e^{2 a xi}) - 1/(a xi) = coth(a xi) - 1/(a xi).
inline double delta_xi(double a, double xi) {
    check_a(a);
    if (xi < 0.0) {
        throw std::domain_error("xi must be nonnegative");
    }
    return numerics::coth_minus_inverse(a * xi);
}

/// Delta* = integral of Delta(xi) p(xi) over [xi*, inf), in closed form.
inline double mean_delta_star(double a, double xi_star) {
    const ScalingParams p(a, xi_star);
    const double xp = p.xi_plus();
    const double xm = p.xi_minus();
    return (1.0 - a * a) / (2.0 * a * a) * (std::erf(xm) - std::erf(xp)) +
           (std::exp(-xm * xm) + std::exp(-xp * xp)) / (std::sqrt(2.0 * std::numbers::pi) * a);
}

/// Scaled threshold xi* whose abstention rate is q.
inline double threshold_for_abstention(double a, double q) {
    check_a(a);
    if (!(q >= 0.0 && q < 1.0)) {
        throw std::domain_error("abstention rate must lie in [0, 1), got " + std::to_string(q));
    }
    if (q == 0.0) {
        return 0.0;
    }
    const auto f = [a](double xi) { return abstention_of_threshold(a, xi); };
    double hi = a + 10.0;
    while (f(hi) <= q) {
        hi *= 2.0;
        if (hi > 1e6) {
            throw NumericalError("no threshold reaches abstention rate " + std::to_string(q));
        }
    }
    return solve_increasing(f, q, 0.0, hi);
}

/// Limiting fidelity 1/2 (1 + Delta*(xi*) / (1 - q)) at abstention rate q.
inline double fidelity_scaling(double a, double q) {
    const double xi_star = threshold_for_abstention(a, q);
    return 0.5 * (1.0 + mean_delta_star(a, xi_star) / (1.0 - q));
}

/// Purity a / sqrt(N) of the finite-N setting that this regime describes.
inline double purity_for(double a, std::int64_t copies) { return a / std::sqrt(static_cast<double>(copies)); }

}  // namespace abstain::scaling
