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
#include <cmath>
#include <initializer_list>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace abstain {

inline constexpr double kQuadratureTolerance = 1e-10;

/// Adaptive 31-point Gauss-Kronrod integral of f over [a, b], split at the given
/// interior breakpoints. Splitting lets sharply peaked integrands be resolved;
/// place a breakpoint at or around each peak. `b` may be +infinity.
template <class F>
double integrate(F f, double a, double b, std::initializer_list<double> breakpoints = {},
                 double abs_tol = kQuadratureTolerance) {
    std::vector<double> nodes{a};
    for (double x : breakpoints) {
        if (x > a && x < b) {
            nodes.push_back(x);
        }
    }
    std::sort(nodes.begin() + 1, nodes.end());
    nodes.push_back(b);

    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double pieces = static_cast<double>(nodes.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i + 1] <= nodes[i]) {
            continue;
        }
        double err = 0.0;
        // Boost's tolerance is relative; scale the absolute target against a
        // cheap magnitude estimate of the piece.
        const double rough = std::abs(Rule::integrate(f, nodes[i], nodes[i + 1], 0, 0.0));
        const double rel_tol = rough > 0.0 ? std::max(abs_tol / pieces / rough, 1e-15) : 1e-10;
        total += Rule::integrate(f, nodes[i], nodes[i + 1], 20, rel_tol, &err);
    }
    return total;
}

}  // namespace abstain
