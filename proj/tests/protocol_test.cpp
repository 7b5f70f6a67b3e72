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

#include "abstain/protocol.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "gtest/gtest.h"

using namespace abstain;

namespace {

// Best fidelity at abstention rate q over every vertex of the feasible
// polytope {a in [0,1]^n : sum p_j a_j = q}: one coefficient fractional, the
// rest 0 or 1. The objective is a ratio of linear forms, so it peaks at a vertex.
double brute_force_fidelity(const SpinSpectrum &spec, double q) {
    const std::size_t n = spec.size();
    double best = -1.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double used = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                used += spec[i].p;
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (mask & (1u << k)) {
                continue;
            }
            const double coin = (q - used) / spec[k].p;
            if (coin < -1e-15 || coin > 1.0 + 1e-15) {
                continue;
            }
            double weight = 0.0;
            double weighted = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double a = (mask & (1u << i)) ? 1.0 : (i == k ? std::clamp(coin, 0.0, 1.0) : 0.0);
                weight += spec[i].p * (1.0 - a);
                weighted += spec[i].p * (1.0 - a) * spec[i].delta;
            }
            if (weight > 0.0) {
                best = std::max(best, 0.5 * (1.0 + weighted / weight));
            }
        }
    }
    return best;
}

}  // namespace

TEST(fidelity_no_abstention, spec_examples) {
    EXPECT_NEAR(fidelity_no_abstention(EstimationSetting(1, 1.0)), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(fidelity_no_abstention(EstimationSetting(2, 0.5)), 0.625, 1e-15);
    const double deficit = 1.0 - fidelity_no_abstention(EstimationSetting(10000, 0.5));
    EXPECT_NEAR(deficit / 3e-4, 1.0, 0.01);
    EXPECT_NEAR(fidelity_no_abstention(EstimationSetting(5, 0.0)), 0.5, 1e-15);
}

TEST(critical_abstention, spec_examples) {
    EXPECT_EQ(critical_abstention(EstimationSetting(9, 1.0)), 0.0);
    EXPECT_NEAR(critical_abstention(EstimationSetting(2, 0.5)), 0.1875, 1e-15);
    EXPECT_NEAR(critical_abstention(EstimationSetting(6, 0.7)), 0.542035, 1e-6);
    const double r = 0.3;
    const double want = 1.0 - (std::pow((1 + r) / 2, 7) - std::pow((1 - r) / 2, 7)) / r;
    EXPECT_NEAR(critical_abstention(EstimationSetting(6, r)), want, 1e-14);
}

TEST(optimal_policy, spec_examples) {
    const SpinSpectrum spec(EstimationSetting(2, 0.5));
    const auto p = optimal_policy(spec, 0.1);
    EXPECT_EQ(p.threshold, HalfInt::from_int(0));
    EXPECT_NEAR(p.coefficients[0], 8.0 / 15.0, 1e-15);
    EXPECT_EQ(p.coefficients[1], 0.0);

    const auto none = optimal_policy(SpinSpectrum(EstimationSetting(9, 0.4)), 0.0);
    for (double a : none.coefficients) {
        EXPECT_EQ(a, 0.0);
    }

    const auto tie = optimal_policy(spec, 0.1875);
    EXPECT_EQ(tie.threshold, HalfInt::from_int(1));
    EXPECT_EQ(tie.coefficients[0], 1.0);
    EXPECT_EQ(tie.coefficients[1], 0.0);
}

TEST(optimal_policy, rejects_bad_rates) {
    const SpinSpectrum spec(EstimationSetting(4, 0.5));
    EXPECT_THROW(optimal_policy(spec, 1.0), std::domain_error);
    EXPECT_THROW(optimal_policy(spec, -0.01), std::domain_error);
    EXPECT_THROW(optimal_policy(spec, std::nan("")), std::domain_error);
}

TEST(optimal_policy, matches_brute_force_vertices) {
    for (std::int64_t n = 1; n <= 4; ++n) {
        for (double r : {0.1, 0.3, 0.5, 0.8}) {
            const SpinSpectrum spec(EstimationSetting(n, r));
            for (int k = 0; k < 40; ++k) {
                const double q = k / 40.0;
                const double got = fidelity_with_abstention(spec, q).fidelity;
                EXPECT_NEAR(got, brute_force_fidelity(spec, q), 1e-13) << n << " " << r << " " << q;
            }
        }
    }
}

TEST(fidelity_with_abstention, spec_examples) {
    const SpinSpectrum spec(EstimationSetting(2, 0.5));
    EXPECT_NEAR(fidelity_with_abstention(spec, 0.1875).fidelity, 17.0 / 26.0, 1e-15);
    EXPECT_NEAR(fidelity_with_abstention(spec, 0.5).fidelity, 17.0 / 26.0, 1e-15);
    for (std::int64_t n : {1, 4, 17}) {
        for (double q : {0.0, 0.3, 0.99}) {
            EXPECT_NEAR(fidelity_with_abstention(EstimationSetting(n, 1.0), q).fidelity, (n + 1.0) / (n + 2.0), 1e-15);
        }
    }
}

TEST(fidelity_with_abstention, report_fields) {
    const auto rep = fidelity_with_abstention(EstimationSetting(6, 0.3), 0.4);
    EXPECT_NEAR(rep.abstention, 0.4, 1e-15);
    EXPECT_NEAR(rep.acceptance, 0.6, 1e-14);
    EXPECT_NEAR(rep.gain, (rep.fidelity - rep.fidelity_no_abstention) / rep.fidelity_no_abstention, 1e-15);
    double sum = 0.0;
    const SpinSpectrum spec(EstimationSetting(6, 0.3));
    for (std::size_t i = 0; i < spec.size(); ++i) {
        sum += spec[i].p * rep.weighted_deltas[i];
    }
    EXPECT_NEAR(0.5 * (1.0 + sum), rep.fidelity, 1e-14);
}

TEST(plateau, equals_top_block_value_beyond_critical_rate) {
    const SpinSpectrum spec(EstimationSetting(6, 0.7));
    const double qc = critical_abstention(spec.setting());
    const double plateau = plateau_fidelity(spec);
    EXPECT_NEAR(plateau, 0.5 * (1.0 + spec.top().delta), 1e-16);
    for (double q : {qc, qc + 1e-3, 0.9, 0.999}) {
        EXPECT_NEAR(fidelity_with_abstention(spec, q).fidelity, plateau, 1e-14) << q;
    }
    EXPECT_LT(fidelity_with_abstention(spec, qc - 1e-3).fidelity, plateau);
}

TEST(threshold_policy, large_copy_plateau) {
    // At N = 10^4 the critical rate rounds to 1 in double; the policy is
    // stated by its threshold instead.
    const SpinSpectrum spec(EstimationSetting(10000, 0.5));
    const auto policy = threshold_policy(spec, spec.top().j);
    EXPECT_LT(policy.log_acceptance, -100.0);
    EXPECT_NEAR(fidelity_report(spec, policy).fidelity, plateau_fidelity(spec), 1e-15);
    EXPECT_THROW(threshold_policy(spec, spec.top().j, 1.0), std::domain_error);
}

TEST(threshold_policy, agrees_with_optimal_policy) {
    const SpinSpectrum spec(EstimationSetting(9, 0.4));
    const auto t = threshold_policy(spec, HalfInt::from_twice(5), 0.25);
    const auto o = optimal_policy(spec, t.realized_q);
    EXPECT_EQ(o.threshold, t.threshold);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        EXPECT_NEAR(o.coefficients[i], t.coefficients[i], 1e-12);
    }
}

TEST(local_sg_abstention, spec_examples) {
    EXPECT_EQ(local_sg_abstention(EstimationSetting(1, 1.0)), 0.0);
    EXPECT_NEAR(local_sg_abstention(EstimationSetting(6, 0.3)), 1.0 - std::pow(0.65, 6), 1e-15);
    EXPECT_NEAR(local_sg_abstention(EstimationSetting(5000, 0.5)), 1.0, 1e-15);
}

TEST(gain_curve, spec_bands) {
    EXPECT_GE(plateau_gain(EstimationSetting(6, 0.3)), 0.13);
    EXPECT_LE(plateau_gain(EstimationSetting(6, 0.3)), 0.17);
    for (std::int64_t n : {6, 8}) {
        EXPECT_GE(plateau_gain(EstimationSetting(n, 0.7)), 0.03);
        EXPECT_LE(plateau_gain(EstimationSetting(n, 0.7)), 0.06);
    }
    const auto curve = gain_curve(EstimationSetting(6, 0.3), abstention_grid(200));
    ASSERT_EQ(curve.size(), 200u);
    EXPECT_EQ(curve.front().q, 0.0);
    EXPECT_EQ(curve.front().gain, 0.0);
    EXPECT_NEAR(curve.back().q, 0.995, 1e-15);
}

TEST(gain_vs_copies, argmax_locations) {
    const auto argmax = [](const std::vector<CopiesGainPoint> &pts) {
        return std::max_element(pts.begin(), pts.end(), [](auto &a, auto &b) { return a.gain < b.gain; })->copies;
    };
    EXPECT_EQ(argmax(gain_vs_copies(0.3, 2, 30)), 12);
    EXPECT_EQ(argmax(gain_vs_copies(0.1, 2, 30)), 30);
    for (const auto &pt : gain_vs_copies(1.0, 1, 20)) {
        EXPECT_EQ(pt.gain, 0.0);
    }
}

TEST(kinks, at_cumulative_masses) {
    const SpinSpectrum spec(EstimationSetting(5, 0.4));
    const auto kinks = kink_abscissas(spec);
    ASSERT_EQ(kinks.size(), spec.size() - 1);
    EXPECT_NEAR(kinks.front(), spec[0].p, 1e-16);
    EXPECT_NEAR(kinks.back(), critical_abstention(spec.setting()), 1e-15);
}

TEST(effective_purity, spec_examples) {
    const EstimationSetting s(2, 0.5);
    EXPECT_EQ(effective_purity(s, 0.0).purity, 0.5);
    const auto e = effective_purity(s, 0.1875);
    EXPECT_NEAR(fidelity_no_abstention(EstimationSetting(2, e.purity)), 17.0 / 26.0, 1e-12);
    EXPECT_NEAR(e.purity, 0.615, 1e-3);
    EXPECT_NEAR(e.error_probability, 0.75 * (1.0 - e.purity), 1e-15);
    EXPECT_EQ(effective_purity(EstimationSetting(4, 1.0), 0.6).purity, 1.0);
}

TEST(effective_copies, spec_examples) {
    EXPECT_EQ(effective_copies(EstimationSetting(7, 0.4), 0.0), 7.0);
    const EstimationSetting s6(6, 0.3);
    const auto n6 = effective_copies(s6, critical_abstention(s6));
    ASSERT_TRUE(n6);
    EXPECT_GE(*n6, 6.0);

    const SpinSpectrum spec(EstimationSetting(1000, 0.5));
    const auto policy = threshold_policy(spec, block_at_or_above(1000, 0.8));
    const auto n_eff = effective_copies(spec, policy);
    ASSERT_TRUE(n_eff);
    EXPECT_NEAR(*n_eff / 1600.0, 1.0, 0.01);
}

TEST(effective_copies, interpolation_hits_target) {
    const double r = 0.4;
    const double lo = fidelity_no_abstention(EstimationSetting(30, r));
    const double hi = fidelity_no_abstention(EstimationSetting(31, r));
    const auto n = effective_copies_for_fidelity(r, 0.5 * (lo + hi), 10);
    ASSERT_TRUE(n);
    EXPECT_GT(*n, 30.0);
    EXPECT_LT(*n, 31.0);
    EXPECT_EQ(effective_copies_for_fidelity(r, lo, 5), 30.0);
    EXPECT_FALSE(effective_copies_for_fidelity(r, 1.0, 1));
}
