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
#include <limits>
#include <numbers>
#include <span>

namespace abstain::numerics {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum(exp(values))), -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> values) {
    double top = kNegInf;
    for (double v : values) {
        top = std::max(top, v);
    }
    if (top == kNegInf) {
        return kNegInf;
    }
    double acc = 0.0;
    for (double v : values) {
        acc += std::exp(v - top);
    }
    return top + std::log(acc);
}

/// log(a + b) given log a and log b.
inline double log_add(double log_a, double log_b) {
    if (log_a < log_b) {
        std::swap(log_a, log_b);
    }
    if (log_b == kNegInf) {
        return log_a;
    }
    return log_a + std::log1p(std::exp(log_b - log_a));
}

/// log(1 - exp(-x)) for x > 0.
inline double log1m_exp_neg(double x) {
    if (x <= 0.0) {
        return kNegInf;
    }
    return x < std::numbers::ln2 ? std::log(-std::expm1(-x)) : std::log1p(-std::exp(-x));
}

/// log(sinh(x)) for x > 0, finite for arbitrarily large x.
inline double log_sinh(double x) {
    if (x > 20.0) {
        return x - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * x));
    }
    return std::log(std::sinh(x));
}

/// coth(x) - 1/x, evaluated without cancellation near zero. Equal to the
/// Langevin function; behaves as x/3 for small x and tends to 1 for large x.
inline double coth_minus_inverse(double x) {
    if (x < 0.0) {
        return -coth_minus_inverse(-x);
    }
    if (x < 1.0) {
        // Laurent coefficients 2^{2n} B_{2n} / (2n)!, n = 1..22.
        static constexpr std::array<double, 22> kCoeff = {
            0.333333333333333333333,    -0.0222222222222222222222,   0.00211640211640211640212,
            -0.000211640211640211640212, 0.0000213777991555769333547, -0.00000216440428080639720851,
            2.19259478518737777997e-7,  -2.22146087899796790761e-8,  2.25078465168089928542e-9,
            -2.28051512045921828659e-10, 2.31064325990026240965e-11, -2.34117068198248839592e-12,
            2.3721017400233654295e-13,  -2.40344153333077061791e-14, 2.43519540291833687311e-15,
            -2.46736880451720747059e-16, 2.49996727712208089799e-17, -2.53299643574063483152e-18,
            2.56646197028262866112e-19, -2.60036964601372735886e-20, 2.63472530441538013417e-21,
            -2.66953486415739495345e-22,
        };
        const double x2 = x * x;
        double acc = 0.0;
        for (auto it = kCoeff.rbegin(); it != kCoeff.rend(); ++it) {
            acc = acc * x2 + *it;
        }
        return acc * x;
    }
    // coth x = 1 + 2/(e^{2x} - 1); both terms are positive and x - 1 is exact here.
    return (x - 1.0) / x + 2.0 / std::expm1(2.0 * x);
}

/// log(n!) - log(sqrt(2 pi n) (n/e)^n) for integer-valued n >= 0.
inline double stirling_error(double n) {
    static constexpr std::array<double, 16> kTable = {
        0.0,
        0.0810614667953272582197,
        0.0413406959554092940938,
        0.0276779256849983391488,
        0.0207906721037650931115,
        0.0166446911898211921632,
        0.0138761288230707479987,
        0.0118967099458917700951,
        0.0104112652619720964975,
        0.00925546218271273291773,
        0.00833056343336287125647,
        0.00757367548795184079497,
        0.00694284010720952986566,
        0.00640899418800420706844,
        0.00595137011275884773562,
        0.00555473355196280137104,
    };
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n <= 15.0) {
        return kTable[static_cast<std::size_t>(n)];
    }
    const double nn = n * n;
    if (n > 500.0) {
        return (s0 - s1 / nn) / n;
    }
    if (n > 80.0) {
        return (s0 - (s1 - s2 / nn) / nn) / n;
    }
    if (n > 35.0) {
        return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    }
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

/// Deviance term x log(x/np) + np - x, accurate when x is close to np.
inline double binomial_deviance(double x, double np) {
    if (std::abs(x - np) < 0.1 * (x + np)) {
        double v = (x - np) / (x + np);
        double s = (x - np) * v;
        double ej = 2.0 * x * v;
        const double v2 = v * v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v2;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) {
                return s1;
            }
            s = s1;
        }
    }
    return x * std::log(x / np) + np - x;
}

/// log of the binomial pmf C(n, k) p^k q^(n-k), q = 1 - p supplied separately so
/// that both tails keep full relative precision. Saddle-point form; relative error
/// of the pmf stays near machine precision for n up to ~1e15.
inline double log_binomial_pmf(double k, double n, double p, double q) {
    if (p == 0.0) {
        return k == 0.0 ? 0.0 : kNegInf;
    }
    if (q == 0.0) {
        return k == n ? 0.0 : kNegInf;
    }
    if (k == 0.0) {
        if (n == 0.0) {
            return 0.0;
        }
        return p < q ? n * std::log1p(-p) : n * std::log(q);
    }
    if (k == n) {
        return q < p ? n * std::log1p(-q) : n * std::log(p);
    }
    if (k < 0.0 || k > n) {
        return kNegInf;
    }
    const double lc = stirling_error(n) - stirling_error(k) - stirling_error(n - k) -
                      binomial_deviance(k, n * p) - binomial_deviance(n - k, n * q);
    const double lf = std::log(2.0 * std::numbers::pi) + std::log(k) + std::log1p(-k / n);
    return lc - 0.5 * lf;
}

/// log C(n, k) for integer-valued 0 <= k <= n.
inline double log_binomial_coefficient(double k, double n) {
    return log_binomial_pmf(k, n, 0.5, 0.5) + n * std::numbers::ln2;
}

}  // namespace abstain::numerics
