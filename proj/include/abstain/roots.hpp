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
#include <concepts>
#include <string>

#include "abstain/setting.hpp"

namespace abstain {

inline constexpr double kRootTolerance = 1e-12;
inline constexpr int kRootMaxIterations = 200;

/// Solves f(x) = target for non-decreasing f on [lo, hi] by interval halving.
///
/// Requires f(lo) <= target <= f(hi). Returns the midpoint of the final bracket
/// once its width drops below `tol`. Throws NumericalError if the bracket is
/// invalid or the iteration cap is reached.
template <std::invocable<double> F>
double solve_increasing(F &&f, double target, double lo, double hi, double tol = kRootTolerance,
                        int max_iter = kRootMaxIterations) {
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo >= target) {
        if (f_lo == target) {
            return lo;
        }
        throw NumericalError("bisection: target " + std::to_string(target) + " below f(lo) = " + std::to_string(f_lo));
    }
    if (f_hi <= target) {
        if (f_hi == target) {
            return hi;
        }
        throw NumericalError("bisection: target " + std::to_string(target) + " above f(hi) = " + std::to_string(f_hi));
    }
    for (int iter = 0; iter < max_iter; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= tol || mid == lo || mid == hi) {
            return mid;
        }
        if (f(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw NumericalError("bisection: no convergence after " + std::to_string(max_iter) + " iterations");
}

}  // namespace abstain
